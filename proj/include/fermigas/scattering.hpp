#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace fermigas {

struct NonpositiveRange : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct GridTooCoarse : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ZeroScatteringLength : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoBracket : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnsupportedMoment : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class PotentialKind { hardcore, softcore, tabulated };

// Radial repulsive two-body interaction with compact support.
// v >= 0 everywhere, v(r) = 0 for r > R0. A hard core, if present, occupies
// the initial interval [0, r_hc].
struct RadialPotential {
  int d = 3;
  PotentialKind kind = PotentialKind::hardcore;
  double R0 = 1.0;
  double V0 = 0.0;
  std::vector<double> r_tab, v_tab;  // piecewise-linear table (tabulated kind)

  static RadialPotential hard_core(double R0, int d = 3);
  static RadialPotential soft_core(double R0, double V0, int d = 3);
  static RadialPotential tabulated(std::vector<double> r, std::vector<double> v, int d = 3);

  // Radius of the hard-core initial interval (0 if none).
  double core_radius() const;
  // Finite part of v at r > core_radius().
  double value(double r) const;
  // Radii where v has kinks or jumps; integration segments break here.
  std::vector<double> breakpoints() const;
};

// Zero-energy p-wave scattering solution on a radial grid.
// f0 is normalized so f0 -> 1 - a^d/r^d outside the range of v.
struct ScatteringSolution {
  int d = 3;
  RadialPotential v;
  std::vector<double> r, f0, f0_prime;
  double a = 0.0;       // p-wave scattering length
  double a0 = 0.0;      // second length (d=3); NaN with a0_valid=false when a=0
  bool a0_valid = false;
  double a0_inv = 0.0;  // d=1: 1/(2 a0) = int(|f'|^2 + v f^2 / 2)
  double Reff = 0.0;    // effective range (d=3, a>0)
  double exterior_max_err = 0.0;  // max |f0 - (1 - a^d/r^d)| over exterior nodes
  double solver_tol = 0.0;

  // Evaluate f0 / f0' anywhere: exact closed form outside the potential range,
  // monotone interpolation on the stored grid inside.
  double f(double rr) const;
  double fprime(double rr) const;
};

ScatteringSolution solve_p_wave(const RadialPotential& v, double r_max, int n_grid,
                                double tol = 1e-12);

struct DerivedLengths {
  double a = 0.0, a0 = 0.0, Reff = 0.0;
  bool a0_valid = false;
};
DerivedLengths derived_lengths(const ScatteringSolution& sol);

// Root-find the soft-core strength V0 with scattering length target_a at core
// radius radius_factor * target_a. Returns V0; achieved length optionally out.
double calibrate_soft_core(double target_a, double radius_factor, int d,
                           double* achieved_a = nullptr, double V_max = 1e12);

// Scaled and cut-off scattering function
//   f(r) = f0(r) / (1 - a^d/b^d)  for r <= b,   1 for r >= b,
// with g = f^2 - 1.
struct JastrowProfile {
  ScatteringSolution base;
  double b = 0.0;

  JastrowProfile() = default;
  JastrowProfile(ScatteringSolution sol, double cutoff);

  double scale() const;  // 1 / (1 - a^d/b^d)
  double f(double r) const;
  double fprime(double r) const;
  double g(double r) const { return f(r) * f(r) - 1.0; }
};

enum class MomentKind { energy_form, f_df_form };

// energy_form: int (|grad f|^2 + v f^2 / 2) |x|^n dx   (n in {0,2,4,6})
// f_df_form:   int |x|^n f df/dr dx                     (n in {0,1,2})
// d-dimensional volume element; integrands vanish beyond b.
double moment_integral(const JastrowProfile& profile, int n, MomentKind kind);

// Surface area of the unit sphere in d dimensions (2, 2*pi, 4*pi).
double sphere_surface(int d);

}  // namespace fermigas
