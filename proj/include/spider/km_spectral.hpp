#pragma once

#include <functional>
#include <vector>

#include "spider/chain_model.hpp"
#include "spider/types.hpp"

namespace spider {

/// Point mass of a matrix measure.
struct WeightAtom {
  double location = 0.0;
  Matrix mass;
};

/// Matrix-valued measure on [lo, hi]: an absolutely continuous density plus
/// finitely many atoms. The density must absorb any square-root endpoint
/// factor itself; integration divides it out (see QuadratureRule).
struct WeightMatrixSpec {
  double lo = -1.0;
  double hi = 1.0;
  std::function<Matrix(double)> density;  // empty = purely atomic
  std::vector<WeightAtom> atoms;
};

/// Gauss nodes/weights on [-1,1] for the weight sqrt(1-t^2) (Chebyshev,
/// second kind). Exact for integrands f(t)*sqrt(1-t^2) with deg f <= 2n-1.
struct QuadratureRule {
  Vector nodes;    // t_i = cos(i*pi/(n+1)), i = 1..n
  Vector weights;  // pi/(n+1) * sin^2(i*pi/(n+1))

  int count() const { return static_cast<int>(nodes.size()); }
  static QuadratureRule gauss_chebyshev2(int n);
};

/// Q_0(x)..Q_{n_max}(x) from the block three-term recurrence, assembled from
/// the per-leg scalar recurrences (arrow sparsity is exact by construction).
std::vector<Matrix> eval_matrix_polys(const ValidatedChain& chain, int n_max, double x);

/// Scalar leg polynomials and their 0-th associated companions.
struct ScalarPolys {
  std::vector<double> q;   // Q_{0,leg}..Q_{n_max,leg}
  std::vector<double> q0;  // associated, same range
};

ScalarPolys eval_scalar_polys(const ValidatedChain& chain, int leg, int n_max, double x);

/// Integral of f(x) dW(x): transformed Gauss quadrature for the continuous
/// part plus the exact atom sum. A doubled-node check guards convergence.
/// Throws Error("QuadratureUnconverged") when doubling moves the result by
/// more than tol entrywise.
Matrix integrate(const WeightMatrixSpec& weight, const std::function<Matrix(double)>& f,
                 const QuadratureRule& rule, double tol = 1e-9);

/// Karlin-McGregor n-step block: (int x^n Q_i dW Q_j^T) Pi_j.
Matrix km_block(const ValidatedChain& chain, const WeightMatrixSpec& weight, int i, int j,
                int steps, const QuadratureRule& rule);

/// Gram matrix int Q_n dW Q_m^T (equals Pi_n^{-1} delta_{nm}).
Matrix gram(const ValidatedChain& chain, const WeightMatrixSpec& weight, int n, int m,
            const QuadratureRule& rule);

/// KM block for an externally supplied polynomial family (e.g. the Darboux
/// polynomials): (int x^steps P_i dW P_j^T) Pi_j.
using PolyFamily = std::function<std::vector<Matrix>(int n_max, double x)>;

Matrix km_block_with(const WeightMatrixSpec& weight, const PolyFamily& polys,
                     const Matrix& pi_j, int i, int j, int steps, const QuadratureRule& rule);

}  // namespace spider
