#include "spider/km_spectral.hpp"

#include <cmath>
#include <numbers>

namespace spider {

QuadratureRule QuadratureRule::gauss_chebyshev2(int n) {
  QuadratureRule rule;
  rule.nodes = Vector(n);
  rule.weights = Vector(n);
  const double step = std::numbers::pi / (n + 1);
  for (int i = 1; i <= n; ++i) {
    const double s = std::sin(i * step);
    rule.nodes(i - 1) = std::cos(i * step);
    rule.weights(i - 1) = step * s * s;
  }
  return rule;
}

ScalarPolys eval_scalar_polys(const ValidatedChain& chain, int leg, int n_max, double x) {
  ScalarPolys out;
  out.q.resize(n_max + 1);
  out.q0.resize(n_max + 1);
  out.q[0] = 1.0;
  out.q0[0] = 0.0;
  if (n_max == 0) return out;
  // q_{n+1} = ((x - b_n) q_n - c_n q_{n-1}) / a_n; the associated sequence
  // obeys the same recurrence from its shifted initial values.
  const RateTriple t0 = recurrence_coeff(chain, leg, 0);
  out.q[1] = (x - t0.stay) / t0.up;
  out.q0[1] = (leg == chain.num_legs()) ? -1.0 / t0.up : -t0.down / t0.up;
  for (int n = 1; n < n_max; ++n) {
    const RateTriple t = recurrence_coeff(chain, leg, n);
    out.q[n + 1] = ((x - t.stay) * out.q[n] - t.down * out.q[n - 1]) / t.up;
    out.q0[n + 1] = ((x - t.stay) * out.q0[n] - t.down * out.q0[n - 1]) / t.up;
  }
  return out;
}

std::vector<Matrix> eval_matrix_polys(const ValidatedChain& chain, int n_max, double x) {
  const int N = chain.num_legs();
  std::vector<ScalarPolys> per_leg;
  per_leg.reserve(N);
  for (int m = 1; m <= N; ++m) per_leg.push_back(eval_scalar_polys(chain, m, n_max, x));
  const ScalarPolys& legN = per_leg[N - 1];
  std::vector<Matrix> out;
  out.reserve(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    Matrix Q = Matrix::Zero(N, N);
    Q(0, 0) = legN.q[n];
    for (int j = 1; j < N; ++j) {
      Q(0, j) = chain.alpha(j) * legN.q0[n];
      Q(j, 0) = per_leg[j - 1].q0[n];
      Q(j, j) = per_leg[j - 1].q[n];
    }
    out.push_back(std::move(Q));
  }
  return out;
}

namespace {

// Core bilinear integral: int x^steps P_i(x) dW(x) P_j(x)^T.
Matrix bilinear(const WeightMatrixSpec& weight, const PolyFamily& polys, int i, int j,
                int steps, const QuadratureRule& rule) {
  const int n_max = std::max(i, j);
  const double mid = 0.5 * (weight.hi + weight.lo);
  const double half = 0.5 * (weight.hi - weight.lo);
  Matrix sum;
  auto add = [&sum](Matrix term) {
    if (sum.size() == 0)
      sum = std::move(term);
    else
      sum += term;
  };
  if (weight.density) {
    for (int k = 0; k < rule.count(); ++k) {
      const double t = rule.nodes(k);
      const double x = mid + half * t;
      // The density carries the sqrt((hi-x)(x-lo)) endpoint factor, which the
      // substitution turns into half*sqrt(1-t^2); divide the Chebyshev weight
      // back out so the reduced integrand is smooth.
      auto Q = polys(n_max, x);
      add(rule.weights(k) / std::sqrt(1.0 - t * t) * half * std::pow(x, steps) *
          (Q[i] * weight.density(x) * Q[j].transpose()));
    }
  }
  for (const WeightAtom& atom : weight.atoms) {
    auto Q = polys(n_max, atom.location);
    add(std::pow(atom.location, steps) * Q[i] * atom.mass * Q[j].transpose());
  }
  return sum;
}

PolyFamily chain_polys(const ValidatedChain& chain) {
  return [chain](int n_max, double x) { return eval_matrix_polys(chain, n_max, x); };
}

}  // namespace

namespace {

Matrix integrate_once(const WeightMatrixSpec& weight, const std::function<Matrix(double)>& f,
                      const QuadratureRule& rule) {
  const double mid = 0.5 * (weight.hi + weight.lo);
  const double half = 0.5 * (weight.hi - weight.lo);
  Matrix sum;
  auto add = [&sum](Matrix term) {
    if (sum.size() == 0)
      sum = std::move(term);
    else
      sum += term;
  };
  if (weight.density)
    for (int k = 0; k < rule.count(); ++k) {
      const double t = rule.nodes(k);
      const double x = mid + half * t;
      add(rule.weights(k) / std::sqrt(1.0 - t * t) * half * (f(x) * weight.density(x)));
    }
  for (const WeightAtom& atom : weight.atoms) add(f(atom.location) * atom.mass);
  return sum;
}

}  // namespace

Matrix integrate(const WeightMatrixSpec& weight, const std::function<Matrix(double)>& f,
                 const QuadratureRule& rule, double tol) {
  Matrix coarse = integrate_once(weight, f, rule);
  if (!weight.density) return coarse;
  Matrix fine = integrate_once(weight, f, QuadratureRule::gauss_chebyshev2(2 * rule.count() + 1));
  const double drift = (fine - coarse).cwiseAbs().maxCoeff();
  if (drift > tol)
    throw Error("QuadratureUnconverged",
                "doubling nodes moved the result by " + std::to_string(drift));
  return fine;
}

Matrix km_block(const ValidatedChain& chain, const WeightMatrixSpec& weight, int i, int j,
                int steps, const QuadratureRule& rule) {
  return bilinear(weight, chain_polys(chain), i, j, steps, rule) *
         potential(chain, j).matrix();
}

Matrix gram(const ValidatedChain& chain, const WeightMatrixSpec& weight, int n, int m,
            const QuadratureRule& rule) {
  return bilinear(weight, chain_polys(chain), n, m, 0, rule);
}

Matrix km_block_with(const WeightMatrixSpec& weight, const PolyFamily& polys,
                     const Matrix& pi_j, int i, int j, int steps, const QuadratureRule& rule) {
  return bilinear(weight, polys, i, j, steps, rule) * pi_j;
}

}  // namespace spider
