#include <doctest.h>

#include <cmath>

#include "common/oracles.hpp"
#include "spikan/bspline.hpp"
#include "spikan/errors.hpp"

using namespace spikan;

TEST_SUITE("bspline") {
  TEST_CASE("knot vector layout") {
    for (int k : {1, 3, 5})
      for (int g : {1, 3, 7}) {
        const SplineSpec s(g, k);
        CHECK(s.knots().size() == static_cast<std::size_t>(g + 2 * k + 1));
        CHECK(s.basis_count() == g + k);
        for (std::size_t i = 1; i < s.knots().size(); ++i) CHECK(s.knots()[i] >= s.knots()[i - 1]);
        CHECK(s.knots() == oracle::clamped_knots(g, k));
      }
  }

  TEST_CASE("hat function at a knot") {
    const auto b = basis_eval(SplineSpec(2, 1), 0.0);
    REQUIRE(b.size() == 3);
    CHECK(b[0] == 0.0);
    CHECK(b[1] == 1.0);
    CHECK(b[2] == 0.0);
  }

  TEST_CASE("clamped end conditions") {
    const auto lo = basis_eval(SplineSpec(3, 3), -1.0);
    CHECK(lo[0] == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 1; i < lo.size(); ++i) CHECK(std::abs(lo[i]) <= 1e-12);
    const auto hi = basis_eval(SplineSpec(3, 3), 1.0);
    CHECK(hi.back() == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("matches brute-force Cox-de Boor") {
    Rng rng(4);
    for (int k : {1, 2, 3, 5})
      for (int g : {1, 3, 5}) {
        const SplineSpec s(g, k);
        const auto t = oracle::clamped_knots(g, k);
        for (int trial = 0; trial < 200; ++trial) {
          const double x = trial == 0 ? -1.0 : trial == 1 ? 1.0 : rng.uniform(-1, 1);
          const auto b = basis_eval(s, x);
          for (int c = 0; c < g + k; ++c) CHECK(std::abs(b[static_cast<std::size_t>(c)] - oracle::cox_de_boor(t, c, k, x)) <= 1e-12);
        }
      }
  }

  TEST_CASE("partition of unity and derivative sums") {
    Rng rng(11);
    for (int k : {3, 5}) {
      const SplineSpec s(3, k);
      for (int i = 0; i < 1000; ++i) {
        const double x = rng.uniform(-1, 1);
        const auto j = basis_jet(s, x);
        double s0 = 0, s1 = 0, s2 = 0;
        for (std::size_t c = 0; c < j.value.size(); ++c) {
          s0 += j.value[c];
          s1 += j.d1[c];
          s2 += j.d2[c];
        }
        CHECK(std::abs(s0 - 1.0) <= 1e-12);
        CHECK(std::abs(s1) <= 1e-12);
        CHECK(std::abs(s2) <= 1e-12);
      }
    }
  }

  TEST_CASE("local support") {
    Rng rng(5);
    for (int k : {1, 3, 5}) {
      const SplineSpec s(4, k);
      for (int i = 0; i < 200; ++i) {
        const auto b = basis_eval(s, rng.uniform(-1, 1));
        int nz = 0;
        for (double v : b) nz += v != 0.0;
        CHECK(nz <= k + 1);
      }
    }
  }

  TEST_CASE("derivatives match finite differences") {
    Rng rng(8);
    for (int k : {2, 3, 5}) {
      const SplineSpec s(3, k);
      for (int trial = 0; trial < 100; ++trial) {
        const double x = trial == 0 ? 0.37 : rng.uniform(-0.95, 0.95);
        const double h = 1e-5;
        const auto j = basis_jet(s, x);
        const auto p = basis_eval(s, x + h), m = basis_eval(s, x - h), z = basis_eval(s, x);
        // Skip points where the stencil straddles a knot (the second derivative jumps there).
        const int span = s.span_index(x);
        if (s.span_index(x + h) != span || s.span_index(x - h) != span) continue;
        for (std::size_t c = 0; c < j.value.size(); ++c) {
          const double fd1 = (p[c] - m[c]) / (2 * h);
          const double fd2 = (p[c] - 2 * z[c] + m[c]) / (h * h);
          CHECK(oracle::rel_err(j.d1[c], fd1, 1e-3) < 1e-6);
          CHECK(oracle::rel_err(j.d2[c], fd2, 1.0) < 1e-4);
        }
      }
    }
  }

  TEST_CASE("linear splines have zero second derivative") {
    const auto j = basis_jet(SplineSpec(3, 1), 0.2);
    for (double v : j.d2) CHECK(v == 0.0);
  }

  TEST_CASE("domain tolerance") {
    const SplineSpec s(3, 3);
    CHECK_NOTHROW(basis_eval(s, 1.0 + 5e-13));
    CHECK_NOTHROW(basis_eval(s, -1.0 - 5e-13));
    CHECK(basis_eval(s, 1.0 + 5e-13) == basis_eval(s, 1.0));
    CHECK_THROWS_AS(basis_eval(s, 1.0 + 1e-9), DomainError);
    CHECK_THROWS_AS(basis_eval(s, -1.5), DomainError);
    CHECK_THROWS_AS(basis_eval(s, std::nan("")), NumericalError);
  }

  TEST_CASE("invalid specs") {
    CHECK_THROWS_AS(SplineSpec(0, 3), InvalidArgument);
    CHECK_THROWS_AS(SplineSpec(3, 0), InvalidArgument);
    CHECK_THROWS_AS(SplineSpec(3, kMaxSplineDegree + 1), InvalidArgument);
  }
}
