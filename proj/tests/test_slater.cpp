#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "fermigas/slater.hpp"

using namespace fermigas;

TEST_CASE("grid orthonormality (alias-free precondition)") {
  DiscreteTorus torus{1, 2.0 * M_PI, 16};
  auto ms = enumerate_momenta_ball(1, 2.0, torus.L);  // j in {-2..2}, N=5
  REQUIRE(torus.alias_free(ms));
  OneBodyKernel kernel(ms);
  const auto& ks = kernel.momenta();
  for (size_t a = 0; a < ks.size(); ++a)
    for (size_t b = 0; b < ks.size(); ++b) {
      std::complex<double> acc = 0.0;
      for (std::int64_t g = 0; g < torus.nodes(); ++g) {
        auto x = torus.node(g);
        acc += std::polar(1.0 / torus.L, (ks[a][0] - ks[b][0]) * x[0]) * torus.weight();
      }
      double expect = a == b ? 1.0 : 0.0;
      CHECK(std::abs(acc - expect) <= 1e-13);
    }
}

TEST_CASE("rho_p basics") {
  auto ms = enumerate_momenta_ball(3, 2.5, 2.0 * M_PI);
  OneBodyKernel kernel(ms);
  CHECK(kernel.gamma({0, 0, 0}) == doctest::Approx(kernel.rho()).epsilon(1e-14));
  for (double t : {0.0, 0.3, 1.2})
    CHECK(rho_p(kernel, {{t, -0.2 * t, 0.7}}) == doctest::Approx(kernel.rho()).epsilon(1e-13));
  CHECK(rho_p(kernel, {{0.1, 0.2, 0.3}, {0.1, 0.2, 0.3}}) == doctest::Approx(0.0).epsilon(1e-12));
  // Wick identity for p = 2
  std::array<double, 3> x1 = {0.3, -0.1, 0.8}, x2 = {-0.4, 0.5, 0.2};
  std::array<double, 3> dx = {x1[0] - x2[0], x1[1] - x2[1], x1[2] - x2[2]};
  double g = kernel.gamma(dx);
  double lhs = rho_p(kernel, {x1, x2});
  CHECK(lhs == doctest::Approx(kernel.rho() * kernel.rho() - g * g).epsilon(1e-12));
}

TEST_CASE("determinant bound and positivity on samples") {
  auto ms = enumerate_momenta_ball(3, 3.5, 2.0 * M_PI);
  OneBodyKernel kernel(ms);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uni(-M_PI, M_PI);
  for (int it = 0; it < 50; ++it) {
    int p = 1 + static_cast<int>(rng() % 4);
    std::vector<std::array<double, 3>> pts;
    for (int i = 0; i < p; ++i) pts.push_back({uni(rng), uni(rng), uni(rng)});
    double v = rho_p(kernel, pts);
    CHECK(v >= -1e-10);
    CHECK(v <= std::pow(kernel.rho(), p) * (1.0 + 1e-12));
  }
}

TEST_CASE("frequency-space derivatives match finite differences") {
  auto ms = enumerate_momenta_ball(3, 2.5, 2.0 * M_PI);
  OneBodyKernel kernel(ms);
  std::array<double, 3> x = {0.37, -0.21, 0.53};
  const double h = 1e-5;
  for (int ax = 0; ax < 3; ++ax) {
    auto xp = x, xm = x;
    xp[ax] += h;
    xm[ax] -= h;
    double fd = (kernel.gamma(xp) - kernel.gamma(xm)) / (2 * h);
    CHECK(kernel.dgamma(x, ax) == doctest::Approx(fd).epsilon(1e-6));
    double fd2 = (kernel.gamma(xp) - 2 * kernel.gamma(x) + kernel.gamma(xm)) / (h * h);
    CHECK(kernel.d2gamma(x, ax, ax) == doctest::Approx(fd2).epsilon(1e-4));
  }
}

TEST_CASE("marginalization oracle agrees with the Wick determinant (1D)") {
  DiscreteTorus torus{1, 2.0 * M_PI, 16};
  auto ms = enumerate_momenta_ball(1, 1.5, torus.L);  // N = 3
  REQUIRE(ms.N() == 3);
  REQUIRE(torus.alias_free(ms));
  OneBodyKernel kernel(ms);
  std::mt19937_64 rng(5);
  for (int p = 1; p <= 3; ++p) {
    for (int rep = 0; rep < 3; ++rep) {
      std::vector<std::array<double, 3>> ext;
      for (int i = 0; i < p; ++i)
        ext.push_back(torus.node(static_cast<std::int64_t>(rng() % torus.nodes())));
      double wick = rho_p(kernel, ext);
      double oracle = rho_p_marginalized(kernel, torus, ext);
      CHECK(wick == doctest::Approx(oracle).epsilon(1e-12));
    }
  }
}

TEST_CASE("marginalization budget guard") {
  DiscreteTorus torus{3, 2.0 * M_PI, 16};
  auto ms = enumerate_momenta_ball(3, 1.5, torus.L);
  OneBodyKernel kernel(ms);
  CHECK_THROWS_AS(rho_p_marginalized(kernel, torus, {{0, 0, 0}}, 1e6), BudgetExceeded);
}

TEST_CASE("rho2 fit recovers the quadratic and quartic coefficients") {
  auto ms = enumerate_momenta_ball(3, 8.0, 2.0 * M_PI);
  OneBodyKernel kernel(ms);
  auto fit = rho2_small_separation_fit(kernel);
  INFO("c2/target=", fit.c2 / fit.c2_target, " c4/target=", fit.c4 / fit.c4_target);
  CHECK(fit.c2 / fit.c2_target == doctest::Approx(1.0).epsilon(0.02));
  CHECK(fit.c4 / fit.c4_target == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("polyhedral rho2 fit deviation shrinks with s") {
  const std::int64_t R = 8;
  double prev = 1e300;
  for (long s : {48L, 192L}) {
    auto poly = build_polyhedron({3, s, 1e9, PolyhedronMode::rational, 3});
    auto ms = enumerate_momenta(poly, R, 1, 2.0 * M_PI);
    OneBodyKernel kernel(ms);
    auto fit = rho2_small_separation_fit(kernel, 0.5);
    double dev = std::abs(fit.c2 / fit.c2_target - 1.0);
    INFO("s=", s, " dev=", dev);
    CHECK(dev <= prev + 0.01);
    prev = dev;
  }
}

TEST_CASE("rho3 samples: positivity, symmetry, quartic bound") {
  auto ms = enumerate_momenta_ball(3, 4.5, 2.0 * M_PI);
  OneBodyKernel kernel(ms);
  CHECK(rho_p(kernel, {{0.1, 0, 0}, {0.1, 0, 0}, {0.4, 0.2, 0}}) ==
        doctest::Approx(0.0).epsilon(1e-12));
  std::vector<std::array<double, 3>> pts = {{0.1, 0.2, 0.3}, {-0.3, 0.1, 0.5}, {0.6, -0.2, 0.1}};
  double v1 = rho_p(kernel, pts);
  std::swap(pts[0], pts[2]);
  double v2 = rho_p(kernel, pts);
  CHECK(v1 == doctest::Approx(v2).epsilon(1e-12));

  auto check = rho3_quartic_bound_check(kernel, 500, 7);
  INFO("max ratio=", check.max_ratio);
  CHECK(check.max_ratio <= 100.0);
  CHECK(check.min_value >= -1e-10);
}
