#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spider/km_spectral.hpp"
#include "spider/oracle.hpp"
#include "spider/spider_rw.hpp"
#include "test_support.hpp"

using namespace spider;

namespace {
const QuadratureRule kRule = QuadratureRule::gauss_chebyshev2(512);
}

TEST_CASE("quadrature integrates sqrt-weighted polynomials exactly") {
  // int_{-1}^{1} t^2 sqrt(1-t^2) dt = pi/8
  double sum = 0.0;
  const QuadratureRule rule = QuadratureRule::gauss_chebyshev2(16);
  for (int i = 0; i < rule.count(); ++i)
    sum += rule.weights(i) * rule.nodes(i) * rule.nodes(i);
  CHECK(sum == doctest::Approx(std::numbers::pi / 8).epsilon(1e-14));
}

TEST_CASE("matrix polynomials satisfy the block recurrence") {
  for (const auto& chain : {testing::example_chain(), testing::nonconstant_chain()}) {
    for (double x : {0.5, 0.3, -0.2, 1.7}) {
      auto Q = eval_matrix_polys(chain, 9, x);
      CHECK(Q[0].isIdentity(0));
      for (int n = 0; n < 8; ++n) {
        const BlockTriple t = blocks(chain, n);
        Matrix rhs = t.A * Q[n + 1] + t.B * Q[n];
        if (n >= 1) rhs += t.C * Q[n - 1];
        // entries grow to O(10^2) by n = 8; allow for the matching roundoff
        CHECK((x * Q[n] - rhs).cwiseAbs().maxCoeff() < 1e-9);
      }
    }
  }
}

TEST_CASE("arrow sparsity is exact") {
  auto chain = testing::example_chain();
  auto Q = eval_matrix_polys(chain, 8, 0.42);
  for (const Matrix& M : Q)
    for (int i = 1; i < 3; ++i)
      for (int j = 1; j < 3; ++j)
        if (i != j) CHECK(M(i, j) == 0.0);
}

TEST_CASE("scalar initial conditions") {
  auto chain = testing::example_chain();
  const ScalarPolys legN = eval_scalar_polys(chain, 3, 4, 0.7);
  CHECK(legN.q[0] == 1.0);
  CHECK(legN.q0[0] == 0.0);
  CHECK(legN.q0[1] == doctest::Approx(-24.0 / 5));
  const ScalarPolys leg1 = eval_scalar_polys(chain, 1, 4, 0.7);
  CHECK(leg1.q0[1] == doctest::Approx(-5.0 / 4));
}

TEST_CASE("second-leg diagonal is the Chebyshev closed form") {
  const RWParams p = testing::example_rw();
  auto chain = testing::example_chain();
  const double x = 0.62;
  const double t = (x - p.b) / (2 * std::sqrt(p.a * p.c));
  auto Q = eval_matrix_polys(chain, 6, x);
  // U_n by recurrence
  double Um1 = 0.0, U = 1.0;
  for (int n = 0; n <= 6; ++n) {
    const double expected = std::pow(p.c / p.a, n / 2.0) * U;
    CHECK(Q[n](2, 2) == doctest::Approx(expected).epsilon(1e-12));
    const double next = 2 * t * U - Um1;
    Um1 = U;
    U = next;
  }
}

TEST_CASE("total mass of the closed-form weight is Pi0^{-1}") {
  const RWParams p = testing::example_rw();
  const WeightMatrixSpec w = rw_weight(p);
  const Matrix M0 = integrate(w, [](double) { return Matrix::Identity(3, 3); }, kRule);
  Matrix expected = Vector{{1.0, 2.0, 1.5}}.asDiagonal();
  CHECK((M0 - expected).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("purely atomic integration is exact") {
  WeightMatrixSpec w;
  w.atoms.push_back({0.5, 2.0 * Matrix::Identity(2, 2)});
  const Matrix M = integrate(w, [](double x) { return Matrix::Identity(2, 2) * x; },
                             QuadratureRule::gauss_chebyshev2(4));
  CHECK((M - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("unconverged quadrature is reported") {
  WeightMatrixSpec w;
  w.lo = 0.0;
  w.hi = 1.0;
  // genuinely rough integrand: quadrature at 4 nodes cannot settle
  w.density = [](double x) {
    return Matrix(Matrix::Identity(1, 1) * std::cos(200.0 * x));
  };
  CHECK_THROWS_WITH_AS(
      integrate(w, [](double) { return Matrix::Identity(1, 1); },
                QuadratureRule::gauss_chebyshev2(4), 1e-12),
      doctest::Contains("QuadratureUnconverged"), Error);
}

TEST_CASE("orthogonality and norms") {
  const RWParams p = testing::example_rw();
  auto chain = testing::example_chain();
  const WeightMatrixSpec w = rw_weight(p);
  for (int n = 0; n <= 10; ++n) {
    for (int m = 0; m <= 10; ++m) {
      const Matrix G = gram(chain, w, n, m, kRule);
      if (n == m)
        CHECK((G * potential(chain, n).matrix() - Matrix::Identity(3, 3))
                  .cwiseAbs()
                  .maxCoeff() < 1e-8);
      else
        CHECK(G.cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("KM formula reproduces matrix powers") {
  const RWParams p = testing::example_rw();
  auto chain = testing::example_chain();
  const WeightMatrixSpec w = rw_weight(p);
  SUBCASE("one step from level 0 is B0") {
    const Matrix B0 = blocks(chain, 0).B;
    CHECK((km_block(chain, w, 0, 0, 1, kRule) - B0).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("zero steps is the identity") {
    CHECK((km_block(chain, w, 2, 2, 0, kRule) - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <
          1e-10);
  }
  SUBCASE("six steps against the truncated power") {
    const Matrix exact = power_block(chain, 10, 6, 0, 1);
    CHECK((km_block(chain, w, 0, 1, 6, kRule) - exact).cwiseAbs().maxCoeff() < 1e-8);
  }
}
