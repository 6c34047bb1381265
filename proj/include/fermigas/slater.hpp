#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fermigas/fermi_surface.hpp"

namespace fermigas {

struct FitIllConditioned : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Uniform alias-free grid on the torus [-L/2, L/2)^d. Plane waves of a
// momentum set with M > 2 max|j| are exactly orthonormal under the grid
// quadrature, which is what makes the brute-force oracles exact.
struct DiscreteTorus {
  int d = 1;
  double L = 2.0 * M_PI;
  int M = 16;

  double h() const { return L / M; }
  double weight() const { return std::pow(h(), d); }
  std::int64_t nodes() const {
    std::int64_t n = 1;
    for (int c = 0; c < d; ++c) n *= M;
    return n;
  }
  std::array<double, 3> node(std::int64_t idx) const {
    std::array<double, 3> x = {0, 0, 0};
    for (int c = d - 1; c >= 0; --c) {
      x[c] = (idx % M) * h() - L / 2.0;
      idx /= M;
    }
    return x;
  }
  double min_image(double dx) const {
    double r = std::remainder(dx, L);
    return r;
  }
  bool alias_free(const MomentumSet& ms) const {
    std::int64_t jm = 0;
    for (const auto& j : ms.pts)
      for (int c = 0; c < ms.d; ++c) jm = std::max(jm, std::abs(j[c]));
    return M > 2 * jm;
  }
};

// One-body kernel gamma(x) = L^{-d} sum_{k in P_F} e^{ikx}; real since the
// momentum set is sign-flip symmetric. Derivatives act in frequency space.
class OneBodyKernel {
 public:
  explicit OneBodyKernel(const MomentumSet& ms);

  int d() const { return d_; }
  double L() const { return L_; }
  double rho() const { return rho_; }
  std::int64_t N() const { return static_cast<std::int64_t>(ks_.size()); }
  const std::vector<std::array<double, 3>>& momenta() const { return ks_; }

  double gamma(const std::array<double, 3>& x) const;
  double dgamma(const std::array<double, 3>& x, int ax) const;
  double d2gamma(const std::array<double, 3>& x, int ax1, int ax2) const;

  // gamma on all difference vectors of a torus grid, indexed by the wrapped
  // per-axis index difference (row-major)
  std::vector<double> grid_table(const DiscreteTorus& torus) const;

 private:
  int d_;
  double L_, rho_;
  std::vector<std::array<double, 3>> ks_;
};

// det[gamma(x_i - x_j)] for p points; identically 0 for p > N.
double rho_p(const OneBodyKernel& kernel, const std::vector<std::array<double, 3>>& points);

// Brute-force grid marginalization of the free Slater determinant:
// (1/(N-p)!) h^{d(N-p)} sum_grid |D_N(ext, grid...)|^2. Exact on alias-free
// grids; the term budget caps M^{d(N-p)}.
double rho_p_marginalized(const OneBodyKernel& kernel, const DiscreteTorus& torus,
                          const std::vector<std::array<double, 3>>& ext,
                          double term_budget = 2e8);

struct Rho2Fit {
  double c2 = 0.0, c4 = 0.0;
  double c2_target = 0.0, c4_target = 0.0;  // (6 pi^2)^{2/3} rho^{8/3}/5 etc.
  double directional_spread = 0.0;          // relative spread of c2 across directions
};
Rho2Fit rho2_small_separation_fit(const OneBodyKernel& kernel, double spread_tol = 0.2);

struct Rho3Check {
  double max_ratio = 0.0;  // max rho3 / (rho^{13/3} |x12|^2 |x13|^2)
  double min_value = 0.0;  // most negative rho3 seen (Gram positivity check)
};
Rho3Check rho3_quartic_bound_check(const OneBodyKernel& kernel, int samples,
                                   std::uint64_t seed = 1);

}  // namespace fermigas
