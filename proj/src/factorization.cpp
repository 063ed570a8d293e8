#include "spider/factorization.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "spider/stieltjes.hpp"

namespace spider {

FeasibilityReport thresholds(const ValidatedChain& chain, double tol) {
  FeasibilityReport out;
  double sum = 0.0;
  for (int m = 1; m <= chain.num_legs(); ++m) {
    out.H.push_back(cf_limit(chain, m, tol));
    sum += out.H.back();
  }
  out.feasible = sum < 1.0;
  return out;
}

namespace {

constexpr double kBand = 1e-12;   // tolerated excursion outside [0,1]
constexpr double kPivot = 1e-13;  // denominator floor

void check_entry(double v, int depth, int leg, const char* name) {
  if (v < -kBand || v > 1.0 + kBand) throw NotStochastic(depth, leg, name, v);
}

}  // namespace

FactorPair::FactorPair(const ValidatedChain& chain, BetaVector beta, int depth)
    : chain_(chain), beta_(std::move(beta)), depth_(depth) {
  const int N = chain_.num_legs();
  x_.assign(N, {});
  y_.assign(N, {});
  r_.assign(N, {});
  s_.assign(N, {});
  for (int m = 1; m <= N; ++m) {
    auto& xs = x_[m - 1];
    auto& ys = y_[m - 1];
    auto& rs = r_[m - 1];
    auto& ss = s_[m - 1];
    xs.resize(depth);
    ys.resize(depth);
    rs.resize(depth);
    ss.resize(depth);
    const double bm = beta_.beta[m - 1];
    if (std::abs(bm) < kPivot) throw Error("DegenerateDivision", "beta_m ~ 0");
    double s = chain_.alpha(m) / bm;
    double r = 1.0 - s;
    check_entry(s, 1, m, "s");
    check_entry(r, 1, m, "r");
    if (std::abs(r) < kPivot)
      throw Error("DegenerateDivision", "r_{1,m} ~ 0 (beta_m = alpha_m)");
    double y = chain_.leg_rate(m, 1).down / r;
    double x = 1.0 - y;
    check_entry(y, 1, m, "y");
    check_entry(x, 1, m, "x");
    ss[0] = s;
    rs[0] = r;
    ys[0] = y;
    xs[0] = x;
    const int prefix = static_cast<int>(chain_.params().legs[m - 1].prefix.size());
    for (int n = 1; n < depth; ++n) {
      if (std::abs(x) < kPivot) throw Error("DegenerateDivision", "x pivot ~ 0");
      s = chain_.leg_rate(m, n).up / x;
      r = 1.0 - s;
      check_entry(s, n + 1, m, "s");
      check_entry(r, n + 1, m, "r");
      if (std::abs(r) < kPivot) throw Error("DegenerateDivision", "r pivot ~ 0");
      y = chain_.leg_rate(m, n + 1).down / r;
      x = 1.0 - y;
      check_entry(y, n + 1, m, "y");
      check_entry(x, n + 1, m, "x");
      ss[n] = s;
      rs[n] = r;
      ys[n] = y;
      xs[n] = x;
      // constant-tail fixed point: once a deep level repeats, so do all later
      if (n > prefix + 1 && std::abs(ss[n] - ss[n - 1]) < 1e-14 &&
          std::abs(ys[n] - ys[n - 1]) < 1e-14) {
        for (int k = n + 1; k < depth; ++k) {
          ss[k] = s;
          rs[k] = r;
          ys[k] = y;
          xs[k] = x;
        }
        break;
      }
    }
  }
}

Matrix FactorPair::X(int n) const {
  const int N = num_legs();
  Vector d(N);
  if (n == 0) {
    d(0) = beta_.beta[N - 1];
    for (int j = 1; j < N; ++j) d(j) = x(1, j);
  } else {
    d(0) = x(n, N);
    for (int j = 1; j < N; ++j) d(j) = x(n + 1, j);
  }
  return Matrix(d.asDiagonal());
}

Matrix FactorPair::Y(int n) const {
  const int N = num_legs();
  if (n == 0) {
    Matrix M = Matrix::Zero(N, N);
    M(0, 0) = beta_.beta0();
    for (int j = 1; j < N; ++j) {
      M(0, j) = beta_.beta[j - 1];
      M(j, j) = y(1, j);
    }
    return M;
  }
  Vector d(N);
  d(0) = y(n, N);
  for (int j = 1; j < N; ++j) d(j) = y(n + 1, j);
  return Matrix(d.asDiagonal());
}

Matrix FactorPair::R(int n) const {
  const int N = num_legs();
  Vector d(N);
  d(0) = r(n, N);
  for (int j = 1; j < N; ++j) d(j) = r(n + 1, j);
  return Matrix(d.asDiagonal());
}

Matrix FactorPair::S(int n) const {
  const int N = num_legs();
  if (n == 0) {
    Matrix M = Matrix::Zero(N, N);
    M(0, 0) = 1.0;
    for (int j = 1; j < N; ++j) {
      M(j, 0) = r(1, j);
      M(j, j) = s(1, j);
    }
    return M;
  }
  Vector d(N);
  d(0) = s(n, N);
  for (int j = 1; j < N; ++j) d(j) = s(n + 1, j);
  return Matrix(d.asDiagonal());
}

FactorPair ul_factorize(const ValidatedChain& chain, const BetaVector& beta, int depth) {
  return FactorPair(chain, beta, depth);
}

double verify_product(const ValidatedChain& chain, const FactorPair& pair, int L) {
  double res = 0.0;
  for (int n = 0; n <= L; ++n) {
    const BlockTriple t = blocks(chain, n);
    res = std::max(res, (t.A - pair.X(n) * pair.S(n + 1)).cwiseAbs().maxCoeff());
    res = std::max(res,
                   (t.B - pair.X(n) * pair.R(n + 1) - pair.Y(n) * pair.S(n)).cwiseAbs().maxCoeff());
    if (n >= 1)
      res = std::max(res, (t.C - pair.Y(n) * pair.R(n)).cwiseAbs().maxCoeff());
  }
  return res;
}

DarbouxChain::DarbouxChain(FactorPair pair) : pair_(std::move(pair)) {}

BlockTriple DarbouxChain::blocks(int level) const {
  BlockTriple out;
  out.level = level;
  out.A = pair_.S(level) * pair_.X(level);
  if (level == 0) {
    out.B = pair_.S(0) * pair_.Y(0);
    out.C = Matrix();
  } else {
    out.B = pair_.R(level) * pair_.X(level - 1) + pair_.S(level) * pair_.Y(level);
    out.C = pair_.R(level) * pair_.Y(level - 1);
  }
  return out;
}

double DarbouxChain::extra_transition(int i, int j) const {
  return pair_.beta().beta[j - 1] * pair_.r(1, i);
}

Matrix DarbouxChain::truncate(int L) const {
  const int N = num_legs();
  Matrix P = Matrix::Zero((L + 1) * N, (L + 1) * N);
  for (int n = 0; n <= L; ++n) {
    const BlockTriple t = blocks(n);
    P.block(n * N, n * N, N, N) = t.B;
    if (n < L) P.block(n * N, (n + 1) * N, N, N) = t.A;
    if (n >= 1) P.block(n * N, (n - 1) * N, N, N) = t.C;
  }
  return P;
}

DarbouxChain darboux(const ValidatedChain& chain, FactorPair pair) {
  (void)chain;
  return DarbouxChain(std::move(pair));
}

Matrix x_matrix(const ValidatedChain& chain, const BetaVector& beta) {
  const int N = chain.num_legs();
  const double b0 = beta.beta0();
  if (b0 < 1e-13) throw Error("SingularGeronimus", "beta_0 ~ 0");
  Matrix M(N, N);
  auto defect = [&](int j) { return 1.0 - beta.beta[j - 1] / chain.alpha(j); };
  M(0, 0) = 1.0 / b0;
  for (int j = 1; j < N; ++j) {
    M(0, j) = M(j, 0) = defect(j) / b0;
    for (int l = j; l < N; ++l) {
      double v;
      if (l == j)
        v = defect(j) * (1.0 - b0 / chain.alpha(j) - beta.beta[j - 1] / chain.alpha(j));
      else
        v = defect(j) * defect(l);
      M(j, l) = M(l, j) = v / b0;
    }
  }
  return M;
}

WeightMatrixSpec geronimus_weight(const ValidatedChain& chain, const FactorPair& pair,
                                  const WeightMatrixSpec& weight, const Matrix& m_minus1) {
  if (weight.lo <= 0.0 && weight.hi >= 0.0)
    throw Error("ZeroInSupport", "0 lies in the continuous support of W");
  for (const WeightAtom& atom : weight.atoms)
    if (std::abs(atom.location) < 1e-13)
      throw Error("ZeroInSupport", "W has an atom at 0");
  const Matrix S0 = pair.S(0);
  WeightMatrixSpec out;
  out.lo = weight.lo;
  out.hi = weight.hi;
  auto base = weight.density;
  out.density = [S0, base](double x) { return Matrix(S0 * (base(x) / x) * S0.transpose()); };
  for (const WeightAtom& atom : weight.atoms)
    out.atoms.push_back({atom.location, S0 * (atom.mass / atom.location) * S0.transpose()});
  Matrix zero_mass =
      S0 * (x_matrix(chain, pair.beta()) - m_minus1) * S0.transpose();
  zero_mass = 0.5 * (zero_mass + zero_mass.transpose().eval());
  Eigen::SelfAdjointEigenSolver<Matrix> es(zero_mass);
  if (es.eigenvalues().minCoeff() < -1e-9)
    throw Error("NegativeAtomMass", "Geronimus atom at 0 is indefinite");
  out.atoms.push_back({0.0, zero_mass});
  return out;
}

std::vector<Matrix> darboux_polys(const ValidatedChain& chain, const FactorPair& pair,
                                  int n_max, double x) {
  const Matrix S0inv = pair.S(0).inverse();
  auto Q = eval_matrix_polys(chain, n_max, x);
  std::vector<Matrix> out;
  out.reserve(n_max + 1);
  out.push_back(Matrix::Identity(chain.num_legs(), chain.num_legs()));
  for (int n = 1; n <= n_max; ++n)
    out.push_back((pair.R(n) * Q[n - 1] + pair.S(n) * Q[n]) * S0inv);
  return out;
}

Matrix darboux_potential(const ValidatedChain& chain, const FactorPair& pair, int n) {
  const Matrix full =
      pair.Y(n).transpose() * potential(chain, n).matrix() * pair.S(n).inverse();
  return Matrix(full.diagonal().asDiagonal());
}

}  // namespace spider
