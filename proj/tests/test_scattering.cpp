#include <cmath>

#include "doctest.h"
#include "fermigas/numerics.hpp"
#include "fermigas/scattering.hpp"

using namespace fermigas;

namespace {

// Independent 1D oracle for the odd-wave length: solve h'' = v h / 2 outward
// and use a_odd = R - h(R)/h'(R) (boundary-value form of the infimum).
double odd_wave_length(const RadialPotential& v, double R) {
  Rk45 solver;
  solver.rtol = 1e-13;
  double r0 = v.core_radius() > 0.0 ? v.core_radius() : 1e-9 * v.R0;
  std::vector<double> y = {r0, 1.0};  // h = r0 (~0), h' = 1
  if (v.core_radius() > 0.0) y[0] = 0.0;
  auto deriv = [&](double r, const std::vector<double>& s, std::vector<double>& ds) {
    ds[0] = s[1];
    ds[1] = 0.5 * v.value(r) * s[0];
  };
  solver.integrate(deriv, r0, R, y);
  return R - y[0] / y[1];
}

}  // namespace

TEST_CASE("hard core d=3 reproduces the exact scattering function") {
  auto v = RadialPotential::hard_core(1.0, 3);
  auto sol = solve_p_wave(v, 10.0, 400);
  CHECK(sol.a == doctest::Approx(1.0).epsilon(1e-8));
  double max_err = 0.0;
  for (size_t i = 0; i < sol.r.size(); ++i) {
    double ref = std::max(0.0, 1.0 - 1.0 / std::pow(sol.r[i], 3));
    max_err = std::max(max_err, std::abs(sol.f0[i] - ref));
  }
  CHECK(max_err <= 1e-8);
  CHECK(sol.a0 == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.Reff == doctest::Approx(5.0 / 18.0).epsilon(1e-5));
}

TEST_CASE("hard core d=1 gives f0 = [1 - a/|x|]+") {
  auto v = RadialPotential::hard_core(1.0, 1);
  auto sol = solve_p_wave(v, 12.0, 300);
  CHECK(sol.a == doctest::Approx(1.0).epsilon(1e-8));
  for (size_t i = 0; i < sol.r.size(); ++i) {
    double ref = std::max(0.0, 1.0 - 1.0 / sol.r[i]);
    CHECK(std::abs(sol.f0[i] - ref) <= 1e-8);
  }
}

TEST_CASE("zero potential gives the free constant solution") {
  auto v = RadialPotential::tabulated({0.1, 0.5, 1.0}, {0.0, 0.0, 0.0}, 3);
  auto sol = solve_p_wave(v, 8.0, 250);
  CHECK(sol.a == doctest::Approx(0.0).epsilon(1e-12));
  for (double fv : sol.f0) CHECK(fv == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("pointwise sandwich and derivative bound (Lemma-type properties)") {
  for (double V0 : {0.5, 4.0, 40.0}) {
    auto v = RadialPotential::soft_core(1.0, V0, 3);
    auto sol = solve_p_wave(v, 10.0, 300);
    double ad = std::pow(sol.a, 3);
    for (size_t i = 0; i < sol.r.size(); ++i) {
      double hc = std::max(0.0, 1.0 - ad / std::pow(sol.r[i], 3));
      CHECK(sol.f0[i] >= hc - 1e-9);
      CHECK(sol.f0[i] <= 1.0 + 1e-9);
      if (sol.r[i] > sol.a)
        CHECK(std::abs(sol.f0_prime[i]) <= 3.0 * ad / std::pow(sol.r[i], 4) + 1e-9);
    }
    // flux identity: r^4 f0' nondecreasing
    for (size_t i = 0; i + 1 < sol.r.size(); ++i) {
      double w0 = std::pow(sol.r[i], 4) * sol.f0_prime[i];
      double w1 = std::pow(sol.r[i + 1], 4) * sol.f0_prime[i + 1];
      CHECK(w1 >= w0 - 1e-9);
    }
  }
}

TEST_CASE("definition consistency: energy integrand reproduces 12 pi a^3") {
  auto v = RadialPotential::soft_core(1.0, 8.0, 3);
  auto sol = solve_p_wave(v, 40.0, 600);
  // b -> r_max limit of the minimization integrand
  JastrowProfile prof(sol, 39.0);
  double I2 = moment_integral(prof, 2, MomentKind::energy_form) / std::pow(prof.scale(), 2);
  double a_from_integral = std::cbrt(I2 / (12.0 * M_PI) / (1.0 - std::pow(sol.a / 39.0, 3)));
  CHECK(a_from_integral == doctest::Approx(sol.a).epsilon(1e-6));
}

TEST_CASE("derived lengths: soft core quadrature cross-check") {
  double V0 = calibrate_soft_core(1.0, 2.0, 3);
  auto v = RadialPotential::soft_core(2.0, V0, 3);
  auto sol = solve_p_wave(v, 40.0, 800);
  auto dl = derived_lengths(sol);
  CHECK(dl.a == doctest::Approx(1.0).epsilon(2e-6));
  // independent adaptive quadrature of int |x|^4 (|f'|^2 + v f^2 / 2) dx
  auto integrand = [&](double r) {
    double fp = sol.fprime(r), fv = sol.f(r);
    return 4.0 * M_PI * std::pow(r, 6) * (fp * fp + 0.5 * v.value(r) * fv * fv);
  };
  double quad = adaptive_simpson(integrand, 1e-7, 40.0, 1e-12);
  double a3 = std::pow(dl.a, 3);
  quad += 4.0 * M_PI * 9.0 * a3 * a3 / 40.0;  // exact exterior tail
  CHECK(quad == doctest::Approx(3.0 * dl.a0 * dl.a0 * 12.0 * M_PI * a3).epsilon(1e-8));
}

TEST_CASE("Reff formula substitution") {
  // Reff^{-1} = (18/5) a0^2 a^{-3}; at a = a0 = 1 this is exactly 5/18
  double a = 1.0, a0 = 1.0;
  CHECK(5.0 * std::pow(a, 3) / (18.0 * a0 * a0) == 5.0 / 18.0);
}

TEST_CASE("soft-core calibration closes the loop") {
  double achieved = 0.0;
  double V0 = calibrate_soft_core(1.0, 2.0, 3, &achieved);
  CHECK(V0 > 0.0);
  CHECK(achieved == doctest::Approx(1.0).epsilon(1e-6));

  // larger support at fixed a needs a weaker potential
  double prev = std::numeric_limits<double>::infinity();
  for (double rf : {2.0, 4.0, 8.0}) {
    double V = calibrate_soft_core(1.0, rf, 3);
    CHECK(V < prev);
    prev = V;
  }

  // hard-core limit: a(V0 -> infinity) approaches the core radius
  double R0 = 2.0;
  double a_prev = 0.0;
  for (double V : {1e2, 1e4, 1e6}) {
    auto sol = solve_p_wave(RadialPotential::soft_core(R0, V, 3), 16.0, 300);
    CHECK(sol.a > a_prev);
    a_prev = sol.a;
  }
  CHECK(a_prev > 0.9 * R0);
  CHECK(a_prev < R0);
}

TEST_CASE("moment integrals against closed forms (hard core)") {
  auto sol = solve_p_wave(RadialPotential::hard_core(1.0, 3), 120.0, 500);
  JastrowProfile prof(sol, 100.0);
  double I2 = moment_integral(prof, 2, MomentKind::energy_form);
  CHECK(std::abs(I2 / (12.0 * M_PI) - 1.0) <= 2e-4);
  double I4 = moment_integral(prof, 4, MomentKind::energy_form);
  CHECK(std::abs(I4 / (36.0 * M_PI) - 1.0) <= 1e-2);

  JastrowProfile prof10(sol, 10.0);
  double J2 = moment_integral(prof10, 2, MomentKind::f_df_form);
  double a = 1.0, b = 10.0;
  double denom = std::pow(1.0 - std::pow(a / b, 3), 2);
  double closed = 4.0 * M_PI * 3.0 * std::pow(a, 3) *
                  (b - 1.5 * a + std::pow(a, 3) / (2.0 * b * b)) / denom;
  CHECK(J2 == doctest::Approx(closed).epsilon(1e-10));

  CHECK_THROWS_AS(moment_integral(prof, 3, MomentKind::energy_form), UnsupportedMoment);
  CHECK_THROWS_AS(moment_integral(prof, 4, MomentKind::f_df_form), UnsupportedMoment);
}

TEST_CASE("1D equivalence with the odd-wave definition") {
  for (int mode = 0; mode < 2; ++mode) {
    RadialPotential v = mode == 0 ? RadialPotential::hard_core(1.0, 1)
                                  : RadialPotential::soft_core(1.0, 3.0, 1);
    auto sol = solve_p_wave(v, 20.0, 400);
    double a_odd = odd_wave_length(v, 2.0 * v.R0);
    CHECK(sol.a == doctest::Approx(a_odd).epsilon(1e-6));
  }
}

TEST_CASE("error paths") {
  CHECK_THROWS_AS(RadialPotential::hard_core(-1.0, 3), NonpositiveRange);
  CHECK_THROWS_AS(solve_p_wave(RadialPotential::hard_core(1.0, 3), 2.0, 300),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_p_wave(RadialPotential::hard_core(1.0, 3), 10.0, 50),
                  std::invalid_argument);
  auto zero = RadialPotential::tabulated({0.1, 1.0}, {0.0, 0.0}, 3);
  auto sol = solve_p_wave(zero, 8.0, 250);
  CHECK_THROWS_AS(derived_lengths(sol), ZeroScatteringLength);
}
