#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "spider/errors.hpp"
#include "spider/types.hpp"

namespace spider {

/// One-step probabilities (up, stay, down) at a single leg site.
struct RateTriple {
  double up = 0.0;    // a
  double stay = 0.0;  // b
  double down = 0.0;  // c
};

/// Per-leg rate table: an explicit finite prefix followed by a constant tail.
struct LegTable {
  std::vector<RateTriple> prefix;  // entries for k = 1..prefix.size()
  RateTriple tail;                 // applied for k > prefix.size()

  const RateTriple& at(int k) const {
    return (k >= 1 && k <= static_cast<int>(prefix.size())) ? prefix[k - 1] : tail;
  }
};

/// Defining data of a birth-death chain on a spider with N legs:
/// body probabilities alpha_0..alpha_N and one rate table per leg.
struct SpiderParams {
  int num_legs = 0;             // N
  std::vector<double> alpha;    // N+1 entries
  std::vector<LegTable> legs;   // N entries, legs[m-1] is leg m
};

/// Total constraint check; returns every violated constraint (empty = valid).
std::vector<Violation> check(const SpiderParams& params);

/// A chain whose parameters passed validation. Immutable; cheap to copy.
class ValidatedChain {
 public:
  int num_legs() const { return params_.num_legs; }
  double alpha(int m) const { return params_.alpha[m]; }
  /// Rates at site k >= 1 of leg (1..N).
  const RateTriple& leg_rate(int leg, int k) const { return params_.legs[leg - 1].at(k); }
  const SpiderParams& params() const { return params_; }
  /// True when every leg is a bare constant triple and all legs agree.
  bool constant_rates() const;

 private:
  friend ValidatedChain validate(SpiderParams params);
  explicit ValidatedChain(SpiderParams p) : params_(std::move(p)) {}
  SpiderParams params_;
};

/// Validates and wraps; throws ValidationError listing every violated constraint.
ValidatedChain validate(SpiderParams params);

/// Level-n coefficient triple of the block tridiagonal transition operator.
/// C is empty at level 0.
struct BlockTriple {
  int level = 0;
  Matrix A, B, C;
};

/// Three-term recurrence coefficients (a_n, b_n, c_n) for the scalar chain of
/// one leg, step index n >= 0. Leg N starts at (alpha_N, alpha_0, -); legs
/// k < N are shifted by one site.
RateTriple recurrence_coeff(const ValidatedChain& chain, int leg, int n);

BlockTriple blocks(const ValidatedChain& chain, int level);

/// Dense ((L+1)N)x((L+1)N) truncation of the transition operator.
Matrix truncate(const ValidatedChain& chain, int L, int row_cap = 20000);

/// Diagonal symmetrizing coefficients Pi_n (inverse polynomial norms).
struct PotentialCoeffs {
  int level = 0;
  Vector diagonal;
  Matrix matrix() const { return Matrix(diagonal.asDiagonal()); }
};

PotentialCoeffs potential(const ValidatedChain& chain, int n);

/// Walk position: leg in 1..N with node >= 1, or the body (leg 0, node 0).
struct LegNode {
  int leg = 0;
  int node = 0;
};

/// The single place that fixes the level/phase <-> leg/node interleaving:
/// phase 0 of level n is leg N at node n (the body when n = 0); phase j >= 1
/// of level n is leg j at node n+1.
LegNode leg_node(int level, int phase, int num_legs);
std::pair<int, int> level_phase(const LegNode& pos, int num_legs);

inline int state_index(int level, int phase, int num_legs) { return level * num_legs + phase; }

/// JSON chain spec I/O. Numbers may be plain or exact-rational strings "p/q".
SpiderParams parse_spider_params(const nlohmann::json& spec);
nlohmann::json to_json(const SpiderParams& params);
double parse_number(const nlohmann::json& value);

}  // namespace spider
