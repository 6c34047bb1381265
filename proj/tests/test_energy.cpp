#include <cmath>

#include "doctest.h"
#include "fermigas/energy.hpp"
#include "fermigas/ggr.hpp"

using namespace fermigas;

TEST_CASE("closed-form bounds at reference points") {
  auto free3 = closed_form_bound(1.0, 0.0, 0.0, 3);
  CHECK(free3.total == doctest::Approx(0.6 * std::pow(6.0 * M_PI * M_PI, 2.0 / 3.0)).epsilon(1e-14));

  auto d1 = closed_form_bound(1.0, 0.01, 0.0, 1);
  CHECK(d1.e_free == doctest::Approx(M_PI * M_PI / 3.0).epsilon(1e-14));
  CHECK(d1.e_interaction == doctest::Approx(2.0 * M_PI * M_PI / 3.0 * 0.01).epsilon(1e-14));

  // interaction coefficient as the product of the scattering-length integral
  // and the leading pair-density coefficient, at a = rho = 1
  auto b3 = closed_form_bound(1.0, 1.0, 1.0, 3);
  double product = 12.0 * M_PI * std::pow(6.0 * M_PI * M_PI, 2.0 / 3.0) / 5.0;
  CHECK(b3.e_interaction == doctest::Approx(product).epsilon(1e-14));
  CHECK(b3.dilute_warning);

  // monotone in a for small a at fixed rho
  double prev = 0.0;
  for (double a : {0.0, 0.01, 0.02, 0.04}) {
    auto cf = closed_form_bound(1.0, a, a, 3);
    CHECK(cf.total >= prev);
    prev = cf.total;
  }
}

TEST_CASE("assembled energy: free case is exactly the kinetic sum") {
  auto ms = enumerate_momenta_ball(3, 4.5, 2.0 * M_PI);
  auto zero = RadialPotential::tabulated({0.1, 0.5}, {0.0, 0.0}, 3);
  auto sol = solve_p_wave(zero, 8.0, 250);
  JastrowProfile prof(sol, 1.0);
  auto ae = energy_assembled(ms, prof);
  CHECK(ae.interaction_c2 == 0.0);
  CHECK(ae.interaction_c4 == 0.0);
  CHECK(ae.total == ae.kinetic);
  auto ks = kinetic_sums(ms);
  CHECK(ae.kinetic == doctest::Approx(ks.S2 / std::pow(ms.L, 3)).epsilon(1e-15));
}

TEST_CASE("assembled energy matches the closed form at small kFa") {
  const double kFa = 2e-2;
  const std::int64_t R = 10;
  const double L = 2.0 * M_PI * R / kFa;  // a = 1
  auto ms = enumerate_momenta_ball(3, static_cast<double>(R), L);
  double rho = ms.rho();
  auto sol = solve_p_wave(RadialPotential::hard_core(1.0, 3), 10.0, 300);
  double b = std::pow(rho, -1.0 / 3.0);
  JastrowProfile prof(sol, b);
  auto ae = energy_assembled(ms, prof);
  auto cf = closed_form_bound(rho, sol.a, sol.a0, 3);
  double ratio = (ae.total - ae.kinetic) / cf.e_interaction;
  INFO("ratio=", ratio);
  CHECK(ratio == doctest::Approx(1.0).epsilon(0.01));
  CHECK(ae.total == ae.kinetic + ae.interaction_c2 + ae.interaction_c4);
}

TEST_CASE("dilute-regime gate for corrections") {
  auto ms = enumerate_momenta_ball(3, 4.5, 2.0 * M_PI);
  auto sol = solve_p_wave(RadialPotential::hard_core(1.0, 3), 10.0, 300);
  JastrowProfile prof(sol, 2.0);  // a^3 rho is order one here
  CHECK_THROWS_AS(energy_assembled(ms, prof, true, 48), DiluteRegimeViolated);
}

TEST_CASE("exponent optimizer recovers the 3D optimum") {
  auto budget = error_budget(1.0, 1e-2, 1.0, 100.0, 1e6, 3);
  CHECK(budget.optimized.alpha.num == 6);
  CHECK(budget.optimized.alpha.den == 7);
  CHECK(budget.optimized.beta.num == 1);
  CHECK(budget.optimized.beta.den == 3);
  CHECK(budget.optimized.delta.num == 3);
  CHECK(budget.optimized.delta.den == 1);
  CHECK(budget.optimized.gamma.num == 12);
  CHECK(budget.optimized.gamma.den == 7);
  CHECK(budget.optimized.gamma2 == 6.0);
  // analytic gamma at the paper choice equals the optimizer's gamma
  double alpha = budget.paper_choice.alpha.value(), beta = budget.paper_choice.beta.value();
  double analytic = std::min({2 * alpha, 1 + 3 * beta, 13.0 / 3 - 3 * alpha, 6 - 5 * alpha,
                              8.0 / 3 - 2 * beta});
  CHECK(budget.optimized.gamma.value() == doctest::Approx(analytic).epsilon(1e-14));
}

TEST_CASE("exponent optimizer recovers the 2D and 1D optima") {
  auto b2 = error_budget(1.0, 1e-2, 1.0, 100.0, 1e6, 2);
  CHECK(b2.optimized.alpha.num == 4);
  CHECK(b2.optimized.alpha.den == 7);
  CHECK(b2.optimized.beta.num == 1);
  CHECK(b2.optimized.beta.den == 2);
  CHECK(b2.optimized.delta.num == 10);
  CHECK(b2.optimized.delta.den == 7);
  CHECK(b2.optimized.gamma.num == 2);

  auto b1 = error_budget(1.0, 1e-3, 1.0, 1.0, 1e6, 1);
  CHECK(b1.optimized.alpha.num == 33);
  CHECK(b1.optimized.alpha.den == 13);
  CHECK(b1.optimized.beta.num == 9);
  CHECK(b1.optimized.beta.den == 13);
  CHECK(b1.optimized.delta.num == 24);
  CHECK(b1.optimized.delta.den == 13);
  CHECK(b1.optimized.gamma.num == 22);
  CHECK(b1.optimized.gamma.den == 13);
}

TEST_CASE("a -> 0 budget is dominated by the shape error") {
  auto budget = error_budget(1.0, 0.0, 1.0, 100.0, 1e6, 3);
  double shape = 0.0, others = 0.0;
  for (const auto& t : budget.terms) {
    if (t.label == "kinetic_shape")
      shape = t.value;
    else if (t.label != "kinetic_finite_size")
      others += t.value;
  }
  CHECK(shape > 0.0);
  CHECK(others == 0.0);
}

TEST_CASE("comparison curve values") {
  auto rows = ding_zhang_curve({0.0, 0.2}, 5.0 / 18.0);
  CHECK(rows[0].e_total == doctest::Approx(0.6).epsilon(1e-15));
  // hard core: third term = -(18/(5 * 35 pi)) (kFa)^5
  double expect_k5 = -18.0 / (5.0 * 35.0 * M_PI) * std::pow(0.2, 5);
  CHECK(rows[1].e_k5 == doctest::Approx(expect_k5).epsilon(1e-14));
  CHECK(rows[1].e_total ==
        doctest::Approx(rows[1].e_k2 + rows[1].e_k3 + rows[1].e_k5 + rows[1].e_k6).epsilon(1e-15));
}

TEST_CASE("box method arithmetic") {
  auto degenerate = box_method_density(2.0, 10.0, 0.0, 0.0, 7.0);
  CHECK(degenerate.rho_tilde == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(degenerate.e_bound == doctest::Approx(7.0).epsilon(1e-15));

  auto r1 = box_method_density(2.0, 10.0, 0.5, 0.1, 7.0);
  auto r2 = box_method_density(2.0, 10.0, 1.0, 0.1, 7.0);
  // doubling d_c quarters the 1/d_c^2 cost per particle
  double per1 = r1.corridor_term / r1.rho_tilde;
  double per2 = r2.corridor_term / r2.rho_tilde;
  CHECK(per2 == doctest::Approx(per1 / 4.0).epsilon(1e-12));
  CHECK_THROWS_AS(box_method_density(2.0, 10.0, 6.0, 0.1, 7.0), GeometryInvalid);

  // paper-style corridor choice keeps corrections below the leading one
  double a = 1.0, x = 1e-3;  // a^3 rho
  double rho = x;
  double dc = a * std::pow(x, -5.0), ell = a * std::pow(x, -10.0);
  auto cf = closed_form_bound(rho, a, a, 3);
  auto r = box_method_density(rho, ell, dc, 100.0, cf.total);
  CHECK(std::abs(r.rho_tilde / rho - 1.0) <= 1e-4);
  CHECK(r.corridor_term / cf.e_interaction <= 1e-3);
}
