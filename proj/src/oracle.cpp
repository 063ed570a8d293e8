#include "spider/oracle.hpp"

#include <cmath>
#include <random>
#include <thread>

namespace spider {

Matrix matrix_power(Matrix base, long n) {
  Matrix result = Matrix::Identity(base.rows(), base.cols());
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

Matrix power_block(const ValidatedChain& chain, int L, int n, int i, int j) {
  const int N = chain.num_legs();
  const Matrix P = matrix_power(truncate(chain, L), n);
  return P.block(i * N, j * N, N, N);
}

namespace {

// One transition from (level, phase). Body uses the alphas; a leg site uses
// its own (a, b, c).
void step(const ValidatedChain& chain, int& level, int& phase, double u) {
  const int N = chain.num_legs();
  const LegNode pos = leg_node(level, phase, N);
  if (pos.node == 0) {
    // body: alpha_0 stay, alpha_m to the first node of leg m
    double acc = chain.alpha(0);
    if (u < acc) return;
    for (int m = 1; m <= N; ++m) {
      acc += chain.alpha(m);
      if (u < acc) {
        auto [lv, ph] = level_phase({m, 1}, N);
        level = lv;
        phase = ph;
        return;
      }
    }
    return;  // numerical tail: stay
  }
  const RateTriple& t = chain.leg_rate(pos.leg, pos.node);
  LegNode next = pos;
  if (u < t.up)
    next.node = pos.node + 1;
  else if (u < t.up + t.stay)
    next.node = pos.node;
  else
    next.node = pos.node - 1;
  if (next.node == 0) next.leg = 0;
  auto [lv, ph] = level_phase(next, N);
  level = lv;
  phase = ph;
}

}  // namespace

EmpiricalDistribution simulate(const ValidatedChain& chain, int start_level, int start_phase,
                               int steps, std::int64_t paths, std::uint64_t seed, int workers) {
  const int N = chain.num_legs();
  const int max_level = start_level + steps + 1;
  const int states = (max_level + 1) * N;
  std::vector<std::vector<std::int64_t>> partial(workers,
                                                 std::vector<std::int64_t>(states, 0));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    const std::int64_t lo = paths * w / workers;
    const std::int64_t hi = paths * (w + 1) / workers;
    pool.emplace_back([&, w, lo, hi] {
      std::seed_seq sq{static_cast<std::uint64_t>(seed), static_cast<std::uint64_t>(w)};
      std::mt19937_64 rng(sq);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      auto& counts = partial[w];
      for (std::int64_t p = lo; p < hi; ++p) {
        int level = start_level, phase = start_phase;
        for (int s = 0; s < steps; ++s) step(chain, level, phase, unif(rng));
        ++counts[state_index(level, phase, N)];
      }
    });
  }
  for (auto& t : pool) t.join();
  EmpiricalDistribution out;
  out.counts.assign(states, 0);
  for (const auto& c : partial)
    for (int i = 0; i < states; ++i) out.counts[i] += c[i];
  out.paths = paths;
  out.seed = seed;
  out.steps = steps;
  out.num_legs = N;
  return out;
}

ComparisonReport compare(const EmpiricalDistribution& emp, const Vector& exact_row) {
  const int states = static_cast<int>(exact_row.size());
  if (states > static_cast<int>(emp.counts.size()))
    throw Error("IndexMismatch", "exact row longer than the empirical state space");
  ComparisonReport out;
  out.z_scores.resize(states);
  const double n = static_cast<double>(emp.paths);
  for (int i = 0; i < states; ++i) {
    const double p_hat = static_cast<double>(emp.counts[i]) / n;
    const double p = exact_row(i);
    const double dev = std::abs(p_hat - p);
    out.max_abs_deviation = std::max(out.max_abs_deviation, dev);
    out.total_variation += 0.5 * dev;
    const double sigma = std::sqrt(std::max(p * (1.0 - p) / n, 1e-300));
    out.z_scores[i] = (p_hat - p) / sigma;
  }
  // any empirical mass beyond the exact row also counts against TV
  for (std::size_t i = states; i < emp.counts.size(); ++i)
    out.total_variation += 0.5 * static_cast<double>(emp.counts[i]) / n;
  return out;
}

}  // namespace spider
