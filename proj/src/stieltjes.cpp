#include "spider/stieltjes.hpp"

#include <cmath>

namespace spider {

ComplexMatrix stieltjes_weight(const WeightMatrixSpec& weight, Complex z,
                               const QuadratureRule& rule) {
  if (std::abs(z.imag()) < 1e-9) {
    const double x = z.real();
    if (x > weight.lo - 1e-9 && x < weight.hi + 1e-9)
      throw Error("PoleTooClose", "z inside the continuous support");
    for (const WeightAtom& atom : weight.atoms)
      if (std::abs(x - atom.location) < 1e-9)
        throw Error("PoleTooClose", "z at an atom location");
  }
  const double mid = 0.5 * (weight.hi + weight.lo);
  const double half = 0.5 * (weight.hi - weight.lo);
  ComplexMatrix sum;
  auto add = [&sum](ComplexMatrix term) {
    if (sum.size() == 0)
      sum = std::move(term);
    else
      sum += term;
  };
  if (weight.density)
    for (int k = 0; k < rule.count(); ++k) {
      const double t = rule.nodes(k);
      const double x = mid + half * t;
      add(rule.weights(k) / std::sqrt(1.0 - t * t) * half / (x - z) *
          weight.density(x).cast<Complex>());
    }
  for (const WeightAtom& atom : weight.atoms)
    add(atom.mass.cast<Complex>() / (atom.location - z));
  return sum;
}

Complex leg_transform(const ValidatedChain& chain, int leg, Complex z, Complex assoc) {
  const int N = chain.num_legs();
  Complex den;
  if (leg == N)
    den = z - chain.alpha(0) + chain.alpha(N) * chain.leg_rate(N, 1).down * assoc;
  else
    den = z - chain.leg_rate(leg, 1).stay +
          chain.leg_rate(leg, 1).up * chain.leg_rate(leg, 2).down * assoc;
  if (std::abs(den) < 1e-13) throw Error("SingularAssembly", "leg transform denominator vanished");
  return -1.0 / den;
}

ComplexMatrix assemble_stieltjes(const ValidatedChain& chain,
                                 const std::function<Complex(int leg, Complex z)>& leg_transforms,
                                 Complex z) {
  const int N = chain.num_legs();
  const Complex BN = leg_transforms(N, z);
  if (N == 1) {
    ComplexMatrix M(1, 1);
    M(0, 0) = BN;
    return M;
  }
  ComplexVector Bc(N - 1);  // c_{1,k} B(z; omega_k), k = 1..N-1
  Complex coupling = 0.0;
  for (int k = 1; k < N; ++k) {
    const Complex Bk = leg_transforms(k, z);
    Bc(k - 1) = chain.leg_rate(k, 1).down * Bk;
    coupling += chain.alpha(k) * Bc(k - 1);
  }
  const Complex den = 1.0 / BN - coupling;
  if (std::abs(den) < 1e-13)
    throw Error("SingularAssembly", "scalar factor denominator vanished");
  const Complex bf = 1.0 / den;
  ComplexMatrix M(N, N);
  M(0, 0) = bf;
  for (int k = 1; k < N; ++k) {
    M(0, k) = -bf * Bc(k - 1);
    M(k, 0) = -bf * Bc(k - 1);
    for (int l = 1; l < N; ++l) M(k, l) = bf * Bc(k - 1) * Bc(l - 1);
    M(k, k) += Bc(k - 1) / chain.alpha(k);
  }
  return M;
}

ConvergentState convergents(const ValidatedChain& chain, int leg, int depth) {
  ConvergentState st;
  st.leg = leg;
  st.A.resize(depth + 1);
  st.B.resize(depth + 1);
  st.h.resize(depth + 1);
  double Am2 = -1.0, Am1 = 0.0, Bm2 = 0.0, Bm1 = 1.0;
  st.A[0] = 0.0;
  st.B[0] = 1.0;
  st.h[0] = 0.0;
  for (int n = 1; n <= depth; ++n) {
    // partial quotients alpha_m, c_{1,m}, a_{1,m}, c_{2,m}, a_{2,m}, ...
    double q;
    if (n == 1)
      q = chain.alpha(leg);
    else if (n % 2 == 0)
      q = chain.leg_rate(leg, n / 2).down;
    else
      q = chain.leg_rate(leg, n / 2).up;
    const double An = Am1 - q * Am2;
    const double Bn = Bm1 - q * Bm2;
    st.A[n] = An;
    st.B[n] = Bn;
    st.h[n] = An / Bn;
    if (!(An > 0.0 && An < Bn)) st.hypothesis_ok = false;
    Am2 = Am1;
    Am1 = An;
    Bm2 = Bm1;
    Bm1 = Bn;
  }
  return st;
}

double cf_limit(const ValidatedChain& chain, int leg, double tol, long depth_cap) {
  if (chain.alpha(leg) == 0.0) return 0.0;
  double Am2 = -1.0, Am1 = 0.0, Bm2 = 0.0, Bm1 = 1.0;
  double h_prev = 0.0;
  for (long n = 1; n <= depth_cap; ++n) {
    double q;
    if (n == 1)
      q = chain.alpha(leg);
    else if (n % 2 == 0)
      q = chain.leg_rate(leg, static_cast<int>(n / 2)).down;
    else
      q = chain.leg_rate(leg, static_cast<int>(n / 2)).up;
    const double An = Am1 - q * Am2;
    const double Bn = Bm1 - q * Bm2;
    if (!(An > 0.0 && An < Bn))
      throw Error("HypothesisViolated",
                  "0 < A_n < B_n failed at depth " + std::to_string(n) + ", leg " +
                      std::to_string(leg));
    const double h = An / Bn;
    if (n > 1 && std::abs(h - h_prev) < tol) return h;
    h_prev = h;
    Am2 = Am1;
    Am1 = An;
    Bm2 = Bm1;
    Bm1 = Bn;
    // keep the raw recursion in range on very deep tails
    if (Bm1 < 1e-250) {
      Am2 *= 1e250;
      Am1 *= 1e250;
      Bm2 *= 1e250;
      Bm1 *= 1e250;
    }
  }
  throw Error("DepthExceeded", "continued fraction not converged at depth cap");
}

}  // namespace spider
