#pragma once

#include <functional>
#include <vector>

#include "spider/chain_model.hpp"
#include "spider/km_spectral.hpp"
#include "spider/types.hpp"

namespace spider {

/// B(z;W) = int dW(x)/(x - z) by quadrature plus exact atom terms.
/// Throws PoleTooClose when z is within 1e-9 of the support or an atom.
ComplexMatrix stieltjes_weight(const WeightMatrixSpec& weight, Complex z,
                               const QuadratureRule& rule);

/// The classical relation between a leg measure and its 0-th associated
/// measure: given B(z;omega_leg^(0)), returns B(z;omega_leg). Leg N couples
/// through (alpha_0, alpha_N); legs k < N through (b_{1,k}, a_{1,k} c_{2,k}).
Complex leg_transform(const ValidatedChain& chain, int leg, Complex z, Complex assoc);

/// Prop-2.4-style assembly of the full N x N transform from the scalar leg
/// transforms B(z;omega_1)..B(z;omega_N).
ComplexMatrix assemble_stieltjes(const ValidatedChain& chain,
                                 const std::function<Complex(int leg, Complex z)>& leg_transforms,
                                 Complex z);

/// Continued-fraction convergents h_n = A_n/B_n for one leg, with partial
/// quotients alpha_m, c_{1,m}, a_{1,m}, c_{2,m}, ...
struct ConvergentState {
  int leg = 0;
  std::vector<double> A;  // A_0..A_depth
  std::vector<double> B;
  std::vector<double> h;
  bool hypothesis_ok = true;  // 0 < A_n < B_n held for all n >= 1
};

ConvergentState convergents(const ValidatedChain& chain, int leg, int depth);

/// Limit H_m of the convergents, certified by monotone boundedness.
/// Throws HypothesisViolated when 0 < A_n < B_n fails, DepthExceeded when
/// the tolerance is not met within the depth cap.
double cf_limit(const ValidatedChain& chain, int leg, double tol = 1e-14,
                long depth_cap = 1000000);

}  // namespace spider
