#include "spider/spider_rw.hpp"

#include <cmath>
#include <numbers>

#include "spider/stieltjes.hpp"

namespace spider {

namespace {

// Branch: product of principal roots; analytic off [sigma_-, sigma_+] and
// asymptotic to z at infinity.
Complex sqrt_branch(const RWParams& p, Complex z) {
  const SupportInterval s = support(p);
  return std::sqrt(z - s.hi) * std::sqrt(z - s.lo);
}

double denom_root_poly(const RWParams& p, double x) {
  // the linear factor D(x) shared by every closed-form denominator
  return (1.0 - p.a - p.alpha[0]) * x + p.c - p.alpha[0] * (1.0 - p.a + p.c - p.alpha[0]);
}

double r_poly(const RWParams& p, double x) {
  return x * x - (p.alpha[0] + p.b) * x - p.c + p.alpha[0] * (1.0 - p.a);
}

double p_poly(const RWParams& p, double z) {
  const double a0 = p.alpha[0];
  return -z * z * z + (a0 + 2.0 * p.b) * z * z -
         (a0 * (2.0 - 2.0 * p.a - p.c) + p.b * p.b - 2.0 * p.a * p.c - p.c) * z -
         p.b * p.c + a0 * (p.b - p.a * (1.0 - p.a + p.c));
}

}  // namespace

SpiderParams to_spider_params(const RWParams& params) {
  SpiderParams out;
  out.num_legs = params.num_legs;
  out.alpha = params.alpha;
  LegTable table;
  table.tail = {params.a, params.b, params.c};
  out.legs.assign(params.num_legs, table);
  return out;
}

RWParams rw_from_chain(const ValidatedChain& chain) {
  if (!chain.constant_rates())
    throw Error("NotConstant", "chain has level-dependent leg rates");
  RWParams out;
  out.num_legs = chain.num_legs();
  const RateTriple& t = chain.leg_rate(1, 1);
  out.a = t.up;
  out.b = t.stay;
  out.c = t.down;
  out.alpha = chain.params().alpha;
  return out;
}

SupportInterval support(const RWParams& params) {
  const double sa = std::sqrt(params.a), sc = std::sqrt(params.c);
  return {1.0 - (sa + sc) * (sa + sc), 1.0 - (sa - sc) * (sa - sc)};
}

ComplexMatrix rw_stieltjes(const RWParams& p, Complex z) {
  const int N = p.num_legs;
  const double a0 = p.alpha[0];
  const SupportInterval s = support(p);
  if (std::abs(z.imag()) < 1e-9) {
    const double x = z.real();
    if (x > s.lo - 1e-9 && x < s.hi + 1e-9)
      throw Error("PoleTooClose", "z inside the continuous support");
    const AtomReport atoms = rw_atoms(p);
    if (atoms.at_one && std::abs(x - 1.0) < 1e-9)
      throw Error("PoleTooClose", "z at the atom z_1 = 1");
    if (atoms.at_z2 && std::abs(x - atoms.z2) < 1e-9)
      throw Error("PoleTooClose", "z at the atom z_2");
  }
  const Complex sq = sqrt_branch(p, z);
  // sq = (z - e) + delta with delta computed free of the z - sq cancellation
  // (the denominator sq + z - e never vanishes off the support)
  const double e = 0.5 * (s.hi + s.lo), h = 0.5 * (s.hi - s.lo);
  const Complex delta = -h * h / (sq + z - e);
  const Complex den = 2.0 * (1.0 - z) *
                      ((1.0 - p.a - a0) * z + p.c - a0 * (1.0 - p.a + p.c - a0));
  const Complex B11 =
      ((1.0 - 2.0 * p.a - a0) * z - p.b + a0 * (1.0 + p.a - p.c) + (1.0 - a0) * sq) / den;
  // -z^2 + z*sq = z*(delta - e); keeps the numerator O(z) without cancellation
  const Complex B12 = (2.0 * p.c - a0 * (1.0 - p.a + p.c) + (p.b + a0) * z +
                       z * (delta - e) - a0 * sq) /
                      den;
  // p(z) + r(z)*sq expanded against r(z)*(z - e): the z^3 terms cancel
  // identically and the z^2 coefficient collapses to b - e
  const double r1 = -(a0 + p.b), r0 = -p.c + a0 * (1.0 - p.a);
  const double p1 = -(a0 * (2.0 - 2.0 * p.a - p.c) + p.b * p.b - 2.0 * p.a * p.c - p.c);
  const double p0 = -p.b * p.c + a0 * (p.b - p.a * (1.0 - p.a + p.c));
  const Complex rz = z * z + r1 * z + r0;
  const Complex num22 =
      (p.b - e) * z * z + (p1 + r0 - e * r1) * z + (p0 - e * r0) + rz * delta;
  const Complex diag22 = (p.b - e + delta) / (2.0 * p.a);
  const Complex ones22 = num22 / (p.a * den);
  ComplexMatrix M(N, N);
  M(0, 0) = B11;
  for (int j = 1; j < N; ++j) {
    M(0, j) = B12;
    M(j, 0) = B12;
    for (int l = 1; l < N; ++l) M(j, l) = ones22;
    M(j, j) += diag22 / p.alpha[j];
  }
  return M;
}

Matrix rw_density(const RWParams& p, double x) {
  const SupportInterval s = support(p);
  if (x <= s.lo || x >= s.hi) throw Error("OutOfSupport", "x outside (sigma_-, sigma_+)");
  const int N = p.num_legs;
  const double a0 = p.alpha[0];
  const double root = std::sqrt((s.hi - x) * (x - s.lo));
  const double den = 2.0 * std::numbers::pi * (1.0 - x) * denom_root_poly(p, x);
  Matrix W(N, N);
  W(0, 0) = (1.0 - a0) * root / den;
  const double w12 = (x - a0) * root / den;
  const double ones = r_poly(p, x) * root / (p.a * den);
  for (int j = 1; j < N; ++j) {
    W(0, j) = w12;
    W(j, 0) = w12;
    for (int l = 1; l < N; ++l) W(j, l) = ones;
    W(j, j) += root / (2.0 * std::numbers::pi * p.a * p.alpha[j]);
  }
  return W;
}

AtomReport rw_atoms(const RWParams& p) {
  const int N = p.num_legs;
  const double a0 = p.alpha[0];
  const double g = 1.0 - a0 - p.a;
  AtomReport out;
  if (std::abs(g) < 1e-13)
    throw Error("DegenerateDirection", "1 - alpha_0 - a vanishes; u direction undefined");
  out.z2 = (a0 * (1.0 - p.a + p.c - a0) - p.c) / g;
  if (p.c > p.a) {
    out.coeff_one = (p.c - p.a) / (p.c - p.a + 1.0 - a0);
    Vector e = Vector::Ones(N);
    out.at_one = WeightAtom{1.0, out.coeff_one * e * e.transpose()};
  }
  if (g * g > p.a * p.c) {
    // coefficient denominator uses (1 - alpha_0 - a), matching the residues
    // of the closed-form transform and the total-mass identity
    out.coeff_z2 = (g * g - p.a * p.c) / (g * (g + p.c));
    Vector u(N);
    u(0) = -1.0;
    for (int j = 1; j < N; ++j) u(j) = p.c / g;
    out.at_z2 = WeightAtom{out.z2, out.coeff_z2 * u * u.transpose()};
  }
  return out;
}

Matrix rw_m_minus1(const RWParams& p) {
  const SupportInterval s = support(p);
  const AtomReport atoms = rw_atoms(p);
  if (s.lo <= 0.0) throw Error("ZeroInSupport", "sigma_- <= 0");
  if (atoms.at_z2 && std::abs(atoms.z2) < 1e-13)
    throw Error("ZeroInSupport", "atom located at 0");
  const int N = p.num_legs;
  const double a0 = p.alpha[0];
  const double s0 = std::sqrt(s.hi * s.lo);
  const double den0 = 2.0 * (p.c - a0 * (1.0 - p.a + p.c - a0));
  const double mu11 = (a0 * (1.0 + p.a - p.c) - p.b - (1.0 - a0) * s0) / den0;
  const double mu12 = (2.0 * p.c - a0 * (1.0 - p.a + p.c) + a0 * s0) / den0;
  const double diag22 = (p.b - s0) / (2.0 * p.a);
  const double ones22 =
      (a0 * (p.b - p.a * (1.0 - p.a + p.c)) - p.b * p.c - (a0 * (1.0 - p.a) - p.c) * s0) /
      (p.a * den0);
  Matrix M(N, N);
  M(0, 0) = mu11;
  for (int j = 1; j < N; ++j) {
    M(0, j) = mu12;
    M(j, 0) = mu12;
    for (int l = 1; l < N; ++l) M(j, l) = ones22;
    M(j, j) += diag22 / p.alpha[j];
  }
  return M;
}

namespace {

// Chebyshev values by their three-term recurrences; the argument routinely
// leaves [-1,1], so no trigonometric shortcut.
void chebyshev(double t, int n_max, std::vector<double>& T, std::vector<double>& U) {
  T.assign(n_max + 1, 0.0);
  U.assign(n_max + 1, 0.0);
  T[0] = 1.0;
  U[0] = 1.0;
  if (n_max >= 1) {
    T[1] = t;
    U[1] = 2.0 * t;
  }
  for (int n = 2; n <= n_max; ++n) {
    T[n] = 2.0 * t * T[n - 1] - T[n - 2];
    U[n] = 2.0 * t * U[n - 1] - U[n - 2];
  }
}

}  // namespace

std::vector<Matrix> rw_polys(const RWParams& p, int n_max, double x) {
  const int N = p.num_legs;
  const double aN = p.alpha[N];
  const double t = (x - p.b) / (2.0 * std::sqrt(p.a * p.c));
  const double q = p.c / p.a;  // ratio (c/a)
  std::vector<double> T, U;
  chebyshev(t, n_max, T, U);
  std::vector<Matrix> out;
  out.reserve(n_max + 1);
  double q_half_n = 1.0;  // (c/a)^{n/2}
  const double sq = std::sqrt(q);
  for (int n = 0; n <= n_max; ++n) {
    const double Um1 = n >= 1 ? U[n - 1] : 0.0;
    const double qN = (2.0 * (aN - p.a) * T[n] + (2.0 * p.a - aN) * U[n] +
                       std::sqrt(p.a / p.c) * (p.b - p.alpha[0]) * Um1) *
                      q_half_n / aN;
    const double q0N = n >= 1 ? -Um1 * q_half_n / (sq * aN) : 0.0;
    const double qk = q_half_n * U[n];
    const double q0k = -q_half_n * sq * Um1;
    Matrix Q = Matrix::Zero(N, N);
    Q(0, 0) = qN;
    for (int j = 1; j < N; ++j) {
      Q(0, j) = p.alpha[j] * q0N;
      Q(j, 0) = q0k;
      Q(j, j) = qk;
    }
    out.push_back(std::move(Q));
    q_half_n *= sq;
  }
  return out;
}

Recurrence rw_classify(const RWParams& p) {
  if (std::abs(p.a - p.c) <= 1e-14) return Recurrence::NullRecurrent;
  return p.a > p.c ? Recurrence::Transient : Recurrence::PositiveRecurrent;
}

const char* to_string(Recurrence r) {
  switch (r) {
    case Recurrence::Transient:
      return "transient";
    case Recurrence::NullRecurrent:
      return "null_recurrent";
    default:
      return "positive_recurrent";
  }
}

Thresholds rw_thresholds(const RWParams& p) {
  Thresholds out;
  const double sc = std::sqrt(p.c);
  const double disc = (1.0 + p.c - p.a) * (1.0 + p.c - p.a) - 4.0 * p.c;
  out.closed_form = p.a <= (1.0 - sc) * (1.0 - sc);
  if (out.closed_form) {
    const double factor = (1.0 + p.a - p.c - std::sqrt(std::max(disc, 0.0))) / (2.0 * p.a);
    for (int m = 1; m <= p.num_legs; ++m) out.H.push_back(p.alpha[m] * factor);
  } else {
    // outside the closed form's validity, fall back on the convergents
    const ValidatedChain chain = validate(to_spider_params(p));
    for (int m = 1; m <= p.num_legs; ++m) out.H.push_back(cf_limit(chain, m));
  }
  double sum = 0.0;
  for (double h : out.H) sum += h;
  out.feasible = sum < 1.0;
  return out;
}

WeightMatrixSpec rw_weight(const RWParams& p) {
  const SupportInterval s = support(p);
  WeightMatrixSpec spec;
  spec.lo = s.lo;
  spec.hi = s.hi;
  const RWParams params = p;
  const double guard_shift = 1e-10 * 0.5 * (s.hi - s.lo);
  spec.density = [params, s, guard_shift](double x) {
    // nudge nodes off interior zeros of the denominator (removable: the
    // numerator vanishes there too whenever the measure is finite)
    if (std::abs((1.0 - x) * denom_root_poly(params, x)) < 1e-13) x += guard_shift;
    return rw_density(params, x);
  };
  const AtomReport atoms = rw_atoms(p);
  if (atoms.at_one) spec.atoms.push_back(*atoms.at_one);
  if (atoms.at_z2) spec.atoms.push_back(*atoms.at_z2);
  return spec;
}

std::pair<double, double> rw_recurrence_diagnostic(const RWParams& p, int nodes) {
  // integral of dW_11/(1-x) over [sigma_-, sigma_+ - gap]; growth as the gap
  // shrinks signals the divergence that forces recurrence when a = c
  const SupportInterval s = support(p);
  auto partial = [&](double gap) {
    const double hi = s.hi - gap;
    const double mid = 0.5 * (hi + s.lo), half = 0.5 * (hi - s.lo);
    double sum = 0.0;
    const double step = std::numbers::pi / (nodes + 1);
    for (int i = 1; i <= nodes; ++i) {
      const double t = std::cos(i * step);
      const double w = step * std::sin(i * step) * std::sin(i * step);
      const double x = mid + half * t;
      sum += w / std::sqrt(1.0 - t * t) * rw_density(p, x)(0, 0) / (1.0 - x);
    }
    return sum * half;
  };
  return {partial(1e-4 * (s.hi - s.lo)), partial(1e-8 * (s.hi - s.lo))};
}

}  // namespace spider
