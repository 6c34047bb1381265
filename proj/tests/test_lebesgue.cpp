#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "fermigas/lebesgue.hpp"

using namespace fermigas;

namespace {
MomentumSet point_set(int d, std::vector<std::array<std::int64_t, 3>> pts) {
  MomentumSet ms;
  ms.d = d;
  ms.pts = std::move(pts);
  return ms;
}
}  // namespace

TEST_CASE("single point gives exactly 1") {
  auto ms = point_set(3, {{0, 0, 0}});
  KernelSpec spec{&ms, {0, 0, 0}, 16};
  auto kv = kernel_l1(spec);
  CHECK(kv.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(kv.error_estimate <= 1e-12);
}

TEST_CASE("FFT path matches the serial direct reference") {
  auto ms2 = point_set(2, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {2, 1, 0}});
  auto ms3 = point_set(3, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}, {-1, 0, 1}});
  for (auto e : std::vector<std::array<int, 3>>{
           {0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {2, 0, 0}, {1, 1, 0}, {0, 0, 2}, {0, 1, 1}}) {
    for (const MomentumSet* ms : {&ms2, &ms3}) {
      if (ms->d == 2 && e[2] > 0) continue;
      const int M = 16;
      KernelSpec spec{ms, e, M};
      auto kv = kernel_l1(spec);
      double ref = kernel_l1_direct(*ms, e, 2 * M);
      CHECK(kv.value == doctest::Approx(ref).epsilon(1e-10));
    }
  }
}

TEST_CASE("1D interval matches the power-kernel quadrature") {
  const int M0 = 9;
  std::vector<std::array<std::int64_t, 3>> pts;
  for (std::int64_t k = 0; k <= M0; ++k) pts.push_back({k, 0, 0});
  auto ms = point_set(1, pts);
  KernelSpec spec{&ms, {0, 0, 0}, 4096};
  auto kv = kernel_l1(spec);
  double ref = one_d_power_kernel_l1(M0, 0) / (2.0 * M_PI);
  CHECK(kv.value == doctest::Approx(ref).epsilon(1e-6));
}

TEST_CASE("translation invariance of the unweighted constant") {
  auto ms = point_set(2, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}});
  auto shifted = point_set(2, {{3, -2, 0}, {4, -2, 0}, {3, -1, 0}, {4, -1, 0}});
  const int M = 32;
  double a = kernel_l1_direct(ms, {0, 0, 0}, M);
  double b = kernel_l1_direct(shifted, {0, 0, 0}, M);
  CHECK(a == doctest::Approx(b).epsilon(1e-10));
}

TEST_CASE("L >= 1 and refinement shrinks") {
  auto ms = enumerate_momenta_ball(3, 3.5, 2.0 * M_PI);
  KernelSpec spec{&ms, {0, 0, 0}, 0};  // default M
  auto kv = kernel_l1(spec);
  CHECK(kv.value >= 1.0);
  KernelSpec coarse{&ms, {0, 0, 0}, 16};
  auto kv2 = kernel_l1(coarse);
  CHECK(kv.error_estimate <= kv2.error_estimate + 1e-12);
}

TEST_CASE("alias guard") {
  std::vector<std::array<std::int64_t, 3>> pts;
  for (std::int64_t k = -8; k <= 8; ++k) pts.push_back({k, 0, 0});
  auto ms = point_set(1, pts);
  KernelSpec spec{&ms, {0, 0, 0}, 12};
  CHECK_THROWS_AS(kernel_l1(spec), GridAliased);
}

TEST_CASE("Dirichlet kernel exact values") {
  CHECK(one_d_power_kernel_l1(1, 0) == doctest::Approx(8.0).epsilon(1e-8));
}

TEST_CASE("power-kernel growth ratios stay bounded") {
  for (int M : {8, 64, 512, 4096}) {
    double v = one_d_power_kernel_l1(M, 1);
    double ratio = v / (M * std::log(static_cast<double>(M)));
    INFO("M=", M, " ratio=", ratio);
    CHECK(ratio <= 20.0);
    CHECK(ratio >= 0.5);
  }
  for (int M : {8, 64, 1024}) {
    double v = one_d_power_kernel_l1(M, 2);
    double ratio = v / (static_cast<double>(M) * M * std::log(static_cast<double>(M)));
    INFO("M=", M, " ratio=", ratio);
    CHECK(ratio <= 20.0);
  }
}

TEST_CASE("ball Lebesgue constant grows linearly") {
  std::vector<double> ratios;
  for (std::int64_t R : {4, 8, 16}) {
    auto rows = scaling_study(nullptr, 3, {R}, {0, 0, 0}, 64);
    ratios.push_back(rows[0].ratio);
    INFO("R=", R, " L/R=", rows[0].ratio);
  }
  double lo = *std::min_element(ratios.begin(), ratios.end());
  double hi = *std::max_element(ratios.begin(), ratios.end());
  CHECK(hi / lo <= 10.0);
}

TEST_CASE("polyhedral Lebesgue constant obeys the s log^3 scaling") {
  auto poly = build_polyhedron({3, 48, 1e6, PolyhedronMode::rational, 1});
  double max_ratio = 0.0;
  for (std::int64_t R : {4, 8, 16}) {
    auto rows = scaling_study(&poly, 3, {R}, {0, 0, 0}, 64);
    INFO("R=", R, " ratio=", rows[0].ratio);
    max_ratio = std::max(max_ratio, rows[0].ratio);
  }
  CHECK(max_ratio <= 1.0);  // recorded constant
}
