#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fermigas {

struct SymmetryOrbitMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DegenerateHull : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptySet : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class PolyhedronMode { rational, simple };

struct PolyhedronSpec {
  int d = 3;                 // 2 or 3
  long s = 48;               // corner count, realized by whole symmetry orbits
  double Q = 1e6;            // prime scale (rational mode)
  PolyhedronMode mode = PolyhedronMode::rational;
  std::uint64_t rng_seed = 0;
};

// Convex polytope with exactly sign-flip-symmetric rational corners
// sigma * (p1/D1, p2/D2, p3/D3), normalized so Vol = 4 pi / 3 (3D) or pi (2D).
// In rational mode the per-axis denominators are distinct primes ~ Q; in
// simple mode a common power-of-two denominator is used and the corner set is
// also exactly permutation symmetric.
struct FermiPolyhedron {
  int d = 3;
  long s = 0;
  double Q = 0.0;
  PolyhedronMode mode = PolyhedronMode::rational;
  std::array<std::uint64_t, 3> denoms = {1, 1, 1};
  std::vector<std::array<std::int64_t, 3>> corners;  // integer triples p
  double sigma = 0.0;        // volume-normalizing scale (irrational)
  std::string sigma_str;     // 40 significant digits
  std::string vol_num, vol_den;  // exact Vol of the unscaled hull as a fraction
  std::vector<std::array<int, 3>> faces;  // boundary triangulation (corner indices)

  // measured construction constants
  double radial_band_C = 0.0;   // max_corner |r-1| * s
  double min_pair_dist = 0.0;   // min corner pair distance (units of s^{-1/2}, scaled hull)
  double covering_est = 0.0;    // covering radius estimate (same units)

  double target_volume() const;  // 4 pi / 3 or pi
};

FermiPolyhedron build_polyhedron(const PolyhedronSpec& spec);

enum class Region { ball, polyhedron };

// Lattice momenta k = (2 pi / L) j with j integer and k / kF in the region.
struct MomentumSet {
  int d = 3;
  double L = 2.0 * 3.14159265358979323846;
  double kF = 1.0;
  Region region = Region::ball;
  std::vector<std::array<std::int64_t, 3>> pts;  // lattice indices j
  long tie_flags = 0;  // near-boundary points within the guard band (none expected)
  std::int64_t N() const { return static_cast<std::int64_t>(pts.size()); }
  double rho() const;
  double unit() const { return 2.0 * M_PI / L; }  // lattice spacing in k
};

// R = kF L / (2 pi); rational for polyhedral regions.
MomentumSet enumerate_momenta_ball(int d, double R, double L);
MomentumSet enumerate_momenta(const FermiPolyhedron& poly, std::int64_t R_num,
                              std::int64_t R_den, double L);

struct KineticSums {
  double S2 = 0.0, S4 = 0.0, S4_1 = 0.0;
  // reference values with rho = N / L^d (self-consistent) and their deviations
  double S2_ref = 0.0, S4_ref = 0.0, S4_1_ref = 0.0;
  double S2_dev = 0.0, S4_dev = 0.0, S4_1_dev = 0.0;
  // Riemann-integral references at the given kF (continuum comparison)
  double S2_cont = 0.0;
  double S2_cont_dev = 0.0;
};
KineticSums kinetic_sums(const MomentumSet& ms);

struct SymmetryDefect {
  double defect = 0.0;        // sum over the symmetric difference of t(k)
  double ratio = 0.0;         // defect / (Q^{-1/4} N sup t)
  std::int64_t points = 0;    // size of the symmetric difference
};
SymmetryDefect symmetry_defect(const MomentumSet& ms, int mu, int nu, double Q,
                               const std::function<double(double kx, double ky, double kz)>& t);

// Exact checks used by tests and the acceptance suite.
bool signflip_invariant(const std::vector<std::array<std::int64_t, 3>>& corners, int d);
// Hull volume recomputed two independent ways (origin fan vs centroid fan),
// returned as doubles of the exact rationals.
std::pair<double, double> hull_volume_two_ways(const FermiPolyhedron& poly);

}  // namespace fermigas
