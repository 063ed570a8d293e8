#pragma once

#include <cstdint>
#include <vector>

#include "spider/chain_model.hpp"
#include "spider/types.hpp"

namespace spider {

/// n-th power of a dense matrix by repeated squaring.
Matrix matrix_power(Matrix base, long n);

/// (i,j) N x N block of P^n on the level-L truncation. Exact whenever
/// L >= max(i,j) + n + 1 (one level per step); below that bound the result
/// is still returned but flagged by the exactness helper.
Matrix power_block(const ValidatedChain& chain, int L, int n, int i, int j);

inline bool power_block_exact(int L, int n, int i, int j) {
  return L >= std::max(i, j) + n + 1;
}

/// Empirical distribution of the chain after a fixed number of steps.
struct EmpiricalDistribution {
  std::vector<std::int64_t> counts;  // indexed by state_index(level, phase)
  std::int64_t paths = 0;
  std::uint64_t seed = 0;
  int steps = 0;
  int num_legs = 0;

  double probability(int level, int phase) const {
    const int idx = state_index(level, phase, num_legs);
    if (idx >= static_cast<int>(counts.size())) return 0.0;
    return static_cast<double>(counts[idx]) / static_cast<double>(paths);
  }
};

/// Monte Carlo paths from (level, phase). Deterministic given (seed, workers):
/// each worker draws from its own seed_seq{seed, worker} stream and counts
/// are merged by summation.
EmpiricalDistribution simulate(const ValidatedChain& chain, int start_level, int start_phase,
                               int steps, std::int64_t paths, std::uint64_t seed,
                               int workers = 4);

/// Deviation report between an empirical distribution and an exact row.
struct ComparisonReport {
  double max_abs_deviation = 0.0;
  double total_variation = 0.0;
  std::vector<double> z_scores;  // one per state of the exact row
};

ComparisonReport compare(const EmpiricalDistribution& emp, const Vector& exact_row);

}  // namespace spider
