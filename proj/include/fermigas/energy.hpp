#pragma once

#include <string>
#include <vector>

#include "fermigas/fermi_surface.hpp"
#include "fermigas/scattering.hpp"

namespace fermigas {

struct GeometryInvalid : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ClosedFormBound {
  double e_free = 0.0;
  double e_interaction = 0.0;
  double e_correction = 0.0;  // the a0^2 rho^{2/3} correction inside the bracket (3D)
  double total = 0.0;
  bool dilute_warning = false;  // a^d rho > 0.1
};
ClosedFormBound closed_form_bound(double rho, double a, double a0, int d);

struct AssembledEnergy {
  double kinetic = 0.0;          // sum |k|^2 / L^d
  double interaction_c2 = 0.0;   // c2 * M2 with c2 from the exact kinetic sums
  double interaction_c4 = 0.0;   // -e4 * M4 (quartic order of the pair density)
  double total = 0.0;
  double c2 = 0.0, e4 = 0.0;     // expansion coefficients actually used
  std::vector<std::pair<std::string, double>> corrections;  // bound-level terms
};
// Trial-state energy density: exact kinetic sum plus the pair-density
// expansion through quartic order against the profile's moment integrals.
// include_corrections adds the subleading GGR bound magnitudes (unit
// constants) and requires the convergence parameter below threshold.
AssembledEnergy energy_assembled(const MomentumSet& ms, const JastrowProfile& profile,
                                 bool include_corrections = false, long s_corners = 0);

struct Fraction {
  long long num = 0, den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct ExponentChoice {
  Fraction alpha, beta, delta;
  Fraction gamma;      // power of a^d rho in the leading error
  double gamma2 = 0.0;  // log power attached to the binding terms
};

struct BudgetTerm {
  std::string label;
  std::string signature;  // exponent of a^d rho as a function of (alpha, beta)
  double value = 0.0;     // numeric magnitude with unit constants
};

struct EnergyBudget {
  int d = 3;
  double rho = 0, a = 0, b = 0, s = 0, N = 0;
  std::vector<BudgetTerm> terms;
  double leading_kinetic = 0, leading_interaction = 0, leading_correction = 0;
  ExponentChoice paper_choice;
  ExponentChoice optimized;
};
EnergyBudget error_budget(double rho, double a, double b, double s, double N, int d);

struct DingZhangRow {
  double kFa = 0.0;
  double e_total = 0.0;  // e / (rho kF^2)
  double e_k2 = 0.0, e_k3 = 0.0, e_k5 = 0.0, e_k6 = 0.0;
};
// e/(rho kF^2) = 3/5 + (2/5pi)(kFa)^3 - (1/35pi)(kFa)^5 (a/Reff)
//              + (2066 - 312 log 2)/(10395 pi^2) (kFa)^6
std::vector<DingZhangRow> ding_zhang_curve(const std::vector<double>& kFa_list,
                                           double Reff_over_a);

struct BoxMethodResult {
  double rho_tilde = 0.0;
  double e_bound = 0.0;        // exact box-method inequality right-hand side
  double corridor_term = 0.0;  // 6 rho~ / d_c^2
  double geometry_factor = 0.0;  // (l / (l + 2 d_c + b))^d
};
BoxMethodResult box_method_density(double rho, double ell, double d_c, double b, double e_box,
                                   int d = 3);

}  // namespace fermigas
