#pragma once

#include <vector>

#include "spider/chain_model.hpp"
#include "spider/km_spectral.hpp"
#include "spider/types.hpp"

namespace spider {

/// Free parameters beta_1..beta_N of the reflecting factor; beta_0 derived.
struct BetaVector {
  std::vector<double> beta;  // beta_1..beta_N

  double beta0() const {
    double s = 1.0;
    for (double b : beta) s -= b;
    return s;
  }
};

/// Per-leg thresholds H_m with the feasibility flag sum H_m < 1.
struct FeasibilityReport {
  std::vector<double> H;
  bool feasible = false;
};

FeasibilityReport thresholds(const ValidatedChain& chain, double tol = 1e-14);

/// The UL pair P = P_R * P_A: per-leg sequences (x, y, r, s) for n = 1..depth
/// plus block accessors. Leg N occupies index n directly; legs k < N are
/// shifted one site, mirroring the operator's interleaving.
class FactorPair {
 public:
  FactorPair(const ValidatedChain& chain, BetaVector beta, int depth);

  int depth() const { return depth_; }
  int num_legs() const { return chain_.num_legs(); }
  const BetaVector& beta() const { return beta_; }
  const ValidatedChain& chain() const { return chain_; }

  double x(int n, int leg) const { return x_[leg - 1][n - 1]; }
  double y(int n, int leg) const { return y_[leg - 1][n - 1]; }
  double r(int n, int leg) const { return r_[leg - 1][n - 1]; }
  double s(int n, int leg) const { return s_[leg - 1][n - 1]; }

  /// P_R blocks: X_n (up), Y_n (diagonal); Y_0 is upper-arrow shaped.
  Matrix X(int n) const;
  Matrix Y(int n) const;
  /// P_A blocks: R_n (down), S_n (diagonal); S_0 is lower-arrow shaped.
  Matrix R(int n) const;  // n >= 1
  Matrix S(int n) const;

 private:
  friend FactorPair ul_factorize(const ValidatedChain&, const BetaVector&, int);
  const ValidatedChain chain_;
  BetaVector beta_;
  int depth_;
  std::vector<std::vector<double>> x_, y_, r_, s_;  // [leg-1][n-1]
};

/// Sequential UL solve to the given depth. Throws NotStochastic (with the
/// offending depth/leg) when an entry leaves [0,1] by more than 1e-12 — the
/// constructive witness that beta_m < H_m — and Error("DegenerateDivision")
/// when a pivot falls below 1e-13.
FactorPair ul_factorize(const ValidatedChain& chain, const BetaVector& beta, int depth = 100);

/// Max entrywise |P - P_R P_A| over levels <= L.
double verify_product(const ValidatedChain& chain, const FactorPair& pair, int L);

/// The Darboux transform P~ = P_A P_R with its extra level-1 transitions.
class DarbouxChain {
 public:
  explicit DarbouxChain(FactorPair pair);

  int num_legs() const { return pair_.num_legs(); }
  const FactorPair& pair() const { return pair_; }
  /// A~_n = S_n X_n, B~_0 = S_0 Y_0, B~_n = R_n X_{n-1} + S_n Y_n,
  /// C~_n = R_n Y_{n-1}.
  BlockTriple blocks(int level) const;
  /// d_{i,j} = beta_j r_{1,i}: transition from the first node of leg i to
  /// the first node of leg j.
  double extra_transition(int i, int j) const;
  Matrix truncate(int L) const;

 private:
  FactorPair pair_;
};

DarbouxChain darboux(const ValidatedChain& chain, FactorPair pair);

/// Closed-form X = (Pi_0 Y_0 S_0)^{-1} (symmetric).
Matrix x_matrix(const ValidatedChain& chain, const BetaVector& beta);

/// Geronimus transform W~ = S_0 (W/x + [X - M_{-1}] delta_0) S_0^T.
/// m_minus1 must equal B(0;W). Throws Error("ZeroInSupport") when 0 lies in
/// the support of W, Error("NegativeAtomMass") when the new atom at 0 is
/// indefinite beyond -1e-9.
WeightMatrixSpec geronimus_weight(const ValidatedChain& chain, const FactorPair& pair,
                                  const WeightMatrixSpec& weight, const Matrix& m_minus1);

/// Q~_0..Q~_{n_max} at x: Q~_n = (R_n Q_{n-1} + S_n Q_n) S_0^{-1}.
std::vector<Matrix> darboux_polys(const ValidatedChain& chain, const FactorPair& pair,
                                  int n_max, double x);

/// Pi~_n = diagonal of Y_n^T Pi_n S_n^{-1}.
Matrix darboux_potential(const ValidatedChain& chain, const FactorPair& pair, int n);

}  // namespace spider
