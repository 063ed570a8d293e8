#pragma once

#include <optional>
#include <vector>

#include "spider/chain_model.hpp"
#include "spider/km_spectral.hpp"
#include "spider/types.hpp"

namespace spider {

/// Constant-coefficient random walk on a spider: every leg site has the same
/// (a, b, c) and the body keeps general alpha_0..alpha_N.
struct RWParams {
  int num_legs = 0;
  double a = 0.0, b = 0.0, c = 0.0;
  std::vector<double> alpha;
};

/// Conversions to/from the general chain representation.
SpiderParams to_spider_params(const RWParams& params);
/// Throws Error("NotConstant") when the chain's legs are not all one triple.
RWParams rw_from_chain(const ValidatedChain& chain);

/// Support endpoints sigma_-+ = 1 - (sqrt(a) -+ sqrt(c))^2.
struct SupportInterval {
  double lo = 0.0;  // sigma_-
  double hi = 0.0;  // sigma_+
};

SupportInterval support(const RWParams& params);

/// Closed-form Stieltjes transform B(z;W), analytic off [sigma_-, sigma_+]
/// and the atom locations. Branch: product of principal square roots, so
/// B(z;W) ~ -Pi_0^{-1}/z at infinity.
ComplexMatrix rw_stieltjes(const RWParams& params, Complex z);

/// Absolutely continuous part W_c(x), x in (sigma_-, sigma_+).
Matrix rw_density(const RWParams& params, double x);

struct AtomReport {
  std::optional<WeightAtom> at_one;   // present iff c > a
  std::optional<WeightAtom> at_z2;    // present iff (1-alpha_0-a)^2 > ac
  double z2 = 0.0;
  double coeff_one = 0.0;
  double coeff_z2 = 0.0;
};

AtomReport rw_atoms(const RWParams& params);

/// M_{-1} = B(0;W) in closed form; requires 0 outside support and atoms.
Matrix rw_m_minus1(const RWParams& params);

/// Q_0(x)..Q_{n_max}(x) from the Chebyshev closed forms.
std::vector<Matrix> rw_polys(const RWParams& params, int n_max, double x);

enum class Recurrence { Transient, NullRecurrent, PositiveRecurrent };

Recurrence rw_classify(const RWParams& params);
const char* to_string(Recurrence r);

struct Thresholds {
  std::vector<double> H;  // H_1..H_N
  bool feasible = false;  // sum H_m < 1
  bool closed_form = false;
};

/// Period-2 closed form when a <= (1-sqrt(c))^2, continued-fraction fallback
/// otherwise.
Thresholds rw_thresholds(const RWParams& params);

/// The full weight matrix W = W_c + W_d packaged for quadrature. Density
/// nodes falling on an interior zero of the denominator are nudged by
/// 1e-10 * halfwidth.
WeightMatrixSpec rw_weight(const RWParams& params);

/// Numerical recurrence diagnostic: quadrature of the (1,1) measure against
/// 1/(1-x) on [sigma_-, sigma_+ - gap] for shrinking gap; returns the last
/// two partial integrals (divergence as gap -> 0 signals recurrence).
std::pair<double, double> rw_recurrence_diagnostic(const RWParams& params, int nodes = 2048);

}  // namespace spider
