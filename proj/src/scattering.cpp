#include "fermigas/scattering.hpp"

#include <algorithm>
#include <cmath>

#include "fermigas/numerics.hpp"

namespace fermigas {

double sphere_surface(int d) {
  switch (d) {
    case 1: return 2.0;
    case 2: return 2.0 * M_PI;
    case 3: return 4.0 * M_PI;
    default: throw std::invalid_argument("sphere_surface: d must be 1, 2 or 3");
  }
}

RadialPotential RadialPotential::hard_core(double R0, int d) {
  if (R0 <= 0.0) throw NonpositiveRange("hard_core: R0 <= 0");
  RadialPotential v;
  v.d = d;
  v.kind = PotentialKind::hardcore;
  v.R0 = R0;
  return v;
}

RadialPotential RadialPotential::soft_core(double R0, double V0, int d) {
  if (R0 <= 0.0) throw NonpositiveRange("soft_core: R0 <= 0");
  if (V0 < 0.0) throw std::invalid_argument("soft_core: V0 < 0");
  RadialPotential v;
  v.d = d;
  v.kind = PotentialKind::softcore;
  v.R0 = R0;
  v.V0 = V0;
  return v;
}

RadialPotential RadialPotential::tabulated(std::vector<double> r, std::vector<double> vv, int d) {
  if (r.size() != vv.size() || r.size() < 2)
    throw std::invalid_argument("tabulated: need matching grids with >= 2 nodes");
  for (size_t i = 0; i + 1 < r.size(); ++i)
    if (!(r[i] < r[i + 1])) throw std::invalid_argument("tabulated: grid not increasing");
  for (double x : vv)
    if (x < 0.0) throw std::invalid_argument("tabulated: v must be >= 0");
  RadialPotential v;
  v.d = d;
  v.kind = PotentialKind::tabulated;
  v.r_tab = std::move(r);
  v.v_tab = std::move(vv);
  v.R0 = v.r_tab.back();
  if (v.R0 <= 0.0) throw NonpositiveRange("tabulated: range <= 0");
  return v;
}

double RadialPotential::core_radius() const {
  return kind == PotentialKind::hardcore ? R0 : 0.0;
}

double RadialPotential::value(double r) const {
  switch (kind) {
    case PotentialKind::hardcore:
      return 0.0;  // finite part vanishes; the core is handled by the solver start
    case PotentialKind::softcore:
      return r <= R0 ? V0 : 0.0;
    case PotentialKind::tabulated: {
      if (r >= r_tab.back()) return 0.0;
      if (r <= r_tab.front()) return v_tab.front();
      auto it = std::upper_bound(r_tab.begin(), r_tab.end(), r);
      size_t i = static_cast<size_t>(it - r_tab.begin()) - 1;
      double t = (r - r_tab[i]) / (r_tab[i + 1] - r_tab[i]);
      return (1.0 - t) * v_tab[i] + t * v_tab[i + 1];
    }
  }
  return 0.0;
}

std::vector<double> RadialPotential::breakpoints() const {
  switch (kind) {
    case PotentialKind::hardcore: return {R0};
    case PotentialKind::softcore: return {R0};
    case PotentialKind::tabulated: return r_tab;
  }
  return {};
}

namespace {

struct RawSolve {
  std::vector<double> r, f, w;        // w = r^{d+1} f'
  double I[4] = {0, 0, 0, 0};         // Omega_d int r^{n+d-1} (f'^2 + v f^2/2), n = 0,2,4,6
  double J[3] = {0, 0, 0};            // Omega_d int r^{n+d-1} f f',              n = 0,1,2
  double A = 1.0, B = 0.0;            // exterior fit f ~ A + B r^{-d}
  double r_start = 0.0;
};

// Integrate the scattering ODE in flux form from the core edge (or a tiny
// radius) out to r_end, carrying the moment quadratures along. Node placement
// is geometric with potential breakpoints inserted so that each RK segment is
// smooth.
RawSolve radial_solve(const RadialPotential& v, double r_end, int n_grid, double tol) {
  const int d = v.d;
  const double omega = sphere_surface(d);
  const double r_hc = v.core_radius();

  double r_start;
  std::vector<double> y(9, 0.0);  // f, w, I0, I2, I4, I6, J0, J1, J2
  if (r_hc > 0.0) {
    r_start = r_hc;
    y[0] = 0.0;
    y[1] = std::pow(r_hc, d + 1);  // f' = 1; normalization fixed afterwards
  } else {
    r_start = std::min(v.R0, r_end) * 1e-7;
    double v0 = v.value(r_start);
    y[0] = 1.0;
    y[1] = std::pow(r_start, d + 1) * v0 * r_start / (2.0 * (d + 2));
  }
  if (r_end <= r_start) throw std::invalid_argument("radial_solve: r_end inside the core");

  // node set: geometric grid + breakpoints
  std::vector<double> nodes;
  nodes.reserve(static_cast<size_t>(n_grid) + 8);
  double ratio = std::pow(r_end / r_start, 1.0 / (n_grid - 1));
  for (int i = 0; i < n_grid; ++i) nodes.push_back(r_start * std::pow(ratio, i));
  for (double bp : v.breakpoints())
    if (bp > r_start && bp < r_end) nodes.push_back(bp);
  nodes.push_back(r_end);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-14 * b; }),
              nodes.end());

  Rk45 solver;
  solver.rtol = tol;
  solver.atol = tol * 1e-2;
  auto deriv = [&](double r, const std::vector<double>& s, std::vector<double>& ds) {
    double f = s[0];
    double fp = s[1] / std::pow(r, d + 1);
    double vv = v.value(r);
    ds[0] = fp;
    ds[1] = 0.5 * vv * std::pow(r, d + 1) * f;
    double e = fp * fp + 0.5 * vv * f * f;
    double rd = std::pow(r, d - 1);
    ds[2] = omega * rd * e;
    ds[3] = omega * rd * r * r * e;
    ds[4] = omega * rd * r * r * r * r * e;
    ds[5] = omega * rd * r * r * r * r * r * r * e;
    double ff = f * fp;
    ds[6] = omega * rd * ff;
    ds[7] = omega * rd * r * ff;
    ds[8] = omega * rd * r * r * ff;
  };

  RawSolve out;
  out.r_start = r_start;
  out.r.reserve(nodes.size());
  out.f.reserve(nodes.size());
  out.w.reserve(nodes.size());
  out.r.push_back(r_start);
  out.f.push_back(y[0]);
  out.w.push_back(y[1]);
  double rcur = r_start;
  for (double rn : nodes) {
    if (rn <= rcur) continue;
    solver.integrate(deriv, rcur, rn, y);
    rcur = rn;
    // the problem is linear: rescale the state before it overflows (strong
    // repulsion grows f exponentially inside the core region)
    double mag = std::max(std::abs(y[0]), std::abs(y[1]));
    if (mag > 1e50) {
      double c = 1.0 / mag;
      y[0] *= c;
      y[1] *= c;
      for (int i = 2; i < 9; ++i) y[i] *= c * c;
      for (auto& fv : out.f) fv *= c;
      for (auto& wv : out.w) wv *= c;
    }
    out.r.push_back(rn);
    out.f.push_back(y[0]);
    out.w.push_back(y[1]);
  }
  for (int i = 0; i < 4; ++i) out.I[i] = y[2 + i];
  for (int i = 0; i < 3; ++i) out.J[i] = y[6 + i];

  // exterior fit f = A + B r^{-d} over the outermost nodes beyond the range
  double fit_lo = std::max(v.R0 * (1.0 + 1e-12), r_end / 10.0);
  std::vector<double> c0, c1, fy;
  for (size_t i = 0; i < out.r.size(); ++i) {
    if (out.r[i] >= fit_lo) {
      c0.push_back(1.0);
      c1.push_back(std::pow(out.r[i], -d));
      fy.push_back(out.f[i]);
    }
  }
  if (fy.size() < 2) {  // thin exterior window; take everything beyond the range
    c0.clear(); c1.clear(); fy.clear();
    for (size_t i = 0; i < out.r.size(); ++i) {
      if (out.r[i] > v.R0) {
        c0.push_back(1.0);
        c1.push_back(std::pow(out.r[i], -d));
        fy.push_back(out.f[i]);
      }
    }
  }
  if (fy.size() < 2) throw GridTooCoarse("radial_solve: no exterior nodes for the asymptotic fit");
  auto coef = lstsq({c0, c1}, fy);
  out.A = coef[0];
  out.B = coef[1];
  if (out.A <= 0.0) throw GridTooCoarse("radial_solve: exterior fit has nonpositive amplitude");
  return out;
}

}  // namespace

ScatteringSolution solve_p_wave(const RadialPotential& v, double r_max, int n_grid, double tol) {
  if (v.R0 <= 0.0) throw NonpositiveRange("solve_p_wave: R0 <= 0");
  if (r_max < 4.0 * v.R0) throw std::invalid_argument("solve_p_wave: need r_max >= 4 R0");
  if (n_grid < 200) throw std::invalid_argument("solve_p_wave: need n_grid >= 200");

  RawSolve raw = radial_solve(v, r_max, n_grid, tol);
  ScatteringSolution sol;
  sol.d = v.d;
  sol.v = v;
  sol.solver_tol = tol;
  double scale = 1.0 / raw.A;
  double ad = -raw.B / raw.A;  // a^d
  if (ad < 0.0 && ad > -1e-13 * std::pow(v.R0, v.d)) ad = 0.0;
  sol.a = ad <= 0.0 ? 0.0 : std::pow(ad, 1.0 / v.d);

  sol.r = raw.r;
  sol.f0.resize(raw.r.size());
  sol.f0_prime.resize(raw.r.size());
  for (size_t i = 0; i < raw.r.size(); ++i) {
    sol.f0[i] = raw.f[i] * scale;
    sol.f0_prime[i] = raw.w[i] * scale / std::pow(raw.r[i], v.d + 1);
  }

  // residual check against the exact exterior form; refine once if too large
  double err = 0.0;
  double adn = sol.a <= 0.0 ? 0.0 : std::pow(sol.a, v.d);
  for (size_t i = 0; i < sol.r.size(); ++i) {
    if (sol.r[i] > v.R0) {
      double ref = 1.0 - adn / std::pow(sol.r[i], v.d);
      err = std::max(err, std::abs(sol.f0[i] - ref));
    }
  }
  sol.exterior_max_err = err;
  if (err > std::max(1e3 * tol, 1e-9)) {
    if (tol > 1e-13) return solve_p_wave(v, r_max, n_grid, tol * 1e-2);
    throw GridTooCoarse("solve_p_wave: exterior residual " + std::to_string(err) +
                        " above tolerance after refinement");
  }

  // moments of the normalized solution up to r_max, used by derived_lengths
  double s2 = scale * scale;
  DerivedLengths dl;
  dl.a = sol.a;
  if (v.d == 3) {
    if (sol.a > 0.0) {
      // tail beyond r_max: f' = 3 a^3 / r^4 exactly
      double a3 = std::pow(sol.a, 3);
      double tail4 = 4.0 * M_PI * 9.0 * a3 * a3 / r_max;
      double M4 = raw.I[2] * s2 + tail4;
      dl.a0 = std::sqrt(M4 / (36.0 * M_PI * a3));
      dl.a0_valid = true;
      dl.Reff = 5.0 * a3 / (18.0 * dl.a0 * dl.a0);
    } else {
      dl.a0 = std::numeric_limits<double>::quiet_NaN();
      dl.a0_valid = false;
      dl.Reff = std::numeric_limits<double>::quiet_NaN();
    }
    sol.a0 = dl.a0;
    sol.a0_valid = dl.a0_valid;
    sol.Reff = dl.Reff;
  } else if (v.d == 1) {
    double a1 = sol.a;
    double tail0 = 2.0 * a1 * a1 / (3.0 * r_max * r_max * r_max);
    sol.a0_inv = raw.I[0] * s2 + tail0;  // = 1/(2 a0)
  }
  return sol;
}

double ScatteringSolution::f(double rr) const {
  double adn = a <= 0.0 ? 0.0 : std::pow(a, d);
  if (rr >= v.R0) return 1.0 - adn / std::pow(rr, d);
  if (rr <= r.front()) return v.core_radius() > 0.0 ? 0.0 : f0.front();
  auto it = std::upper_bound(r.begin(), r.end(), rr);
  size_t i = static_cast<size_t>(it - r.begin()) - 1;
  double h = r[i + 1] - r[i];
  double t = (rr - r[i]) / h;
  double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
  double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
  return h00 * f0[i] + h10 * h * f0_prime[i] + h01 * f0[i + 1] + h11 * h * f0_prime[i + 1];
}

double ScatteringSolution::fprime(double rr) const {
  double adn = a <= 0.0 ? 0.0 : std::pow(a, d);
  if (rr >= v.R0) return d * adn / std::pow(rr, d + 1);
  if (rr <= r.front()) return v.core_radius() > 0.0 ? 0.0 : f0_prime.front();
  auto it = std::upper_bound(r.begin(), r.end(), rr);
  size_t i = static_cast<size_t>(it - r.begin()) - 1;
  double h = r[i + 1] - r[i];
  double t = (rr - r[i]) / h;
  double d00 = 6 * t * (t - 1) / h, d10 = (1 - t) * (1 - 3 * t);
  double d01 = -6 * t * (t - 1) / h, d11 = t * (3 * t - 2);
  return d00 * f0[i] + d10 * f0_prime[i] + d01 * f0[i + 1] + d11 * f0_prime[i + 1];
}

DerivedLengths derived_lengths(const ScatteringSolution& sol) {
  if (sol.d != 3) throw std::invalid_argument("derived_lengths: d = 3 only");
  DerivedLengths dl;
  dl.a = sol.a;
  dl.a0 = sol.a0;
  dl.a0_valid = sol.a0_valid;
  dl.Reff = sol.Reff;
  if (sol.a <= 0.0) throw ZeroScatteringLength("derived_lengths: a = 0, Reff undefined");
  return dl;
}

double calibrate_soft_core(double target_a, double radius_factor, int d, double* achieved_a,
                           double V_max) {
  if (target_a <= 0.0) throw std::invalid_argument("calibrate_soft_core: target_a <= 0");
  if (radius_factor <= 1.0) throw std::invalid_argument("calibrate_soft_core: radius_factor <= 1");
  const double R0 = radius_factor * target_a;
  const double r_max = 8.0 * R0;
  const int n_grid = 320;
  auto length_at = [&](double V0) {
    return solve_p_wave(RadialPotential::soft_core(R0, V0, d), r_max, n_grid).a;
  };

  double V_lo = 1e-10 / (R0 * R0), V_hi = 1.0 / (R0 * R0);
  double a_hi = length_at(V_hi);
  while (a_hi < target_a) {
    V_hi *= 16.0;
    if (V_hi > V_max) {
      throw NoBracket("calibrate_soft_core: target not reachable below V_max; achieved a = " +
                      std::to_string(a_hi) + " at V0 = " + std::to_string(V_hi / 16.0));
    }
    a_hi = length_at(V_hi);
  }
  double a_lo = length_at(V_lo);
  while (a_lo > target_a) {
    V_lo /= 16.0;
    a_lo = length_at(V_lo);
  }

  double V_mid = V_lo, a_mid = a_lo;
  for (int it = 0; it < 200; ++it) {
    V_mid = std::sqrt(V_lo * V_hi);  // bisection in log V
    a_mid = length_at(V_mid);
    if (std::abs(a_mid - target_a) <= 1e-7 * target_a) break;
    (a_mid < target_a ? V_lo : V_hi) = V_mid;
  }
  if (achieved_a) *achieved_a = a_mid;
  return V_mid;
}

JastrowProfile::JastrowProfile(ScatteringSolution sol, double cutoff)
    : base(std::move(sol)), b(cutoff) {
  if (!(b > base.v.R0)) throw std::invalid_argument("JastrowProfile: need b > R0");
}

double JastrowProfile::scale() const {
  double adn = base.a <= 0.0 ? 0.0 : std::pow(base.a, base.d);
  return 1.0 / (1.0 - adn / std::pow(b, base.d));
}

double JastrowProfile::f(double r) const {
  if (r >= b) return 1.0;
  return base.f(r) * scale();
}

double JastrowProfile::fprime(double r) const {
  if (r >= b) return 0.0;
  return base.fprime(r) * scale();
}

double moment_integral(const JastrowProfile& profile, int n, MomentKind kind) {
  if (kind == MomentKind::energy_form) {
    if (n != 0 && n != 2 && n != 4 && n != 6)
      throw UnsupportedMoment("moment_integral: energy_form needs n in {0,2,4,6}");
  } else {
    if (n != 0 && n != 1 && n != 2)
      throw UnsupportedMoment("moment_integral: f_df_form needs n in {0,1,2}");
  }
  const RadialPotential& v = profile.base.v;
  if (profile.base.a <= 0.0 && kind == MomentKind::energy_form) {
    // free or zero-length interaction: integrand vanishes identically only if
    // v = 0; recompute anyway through the solver for uniformity
  }
  RawSolve raw = radial_solve(v, profile.b, 400, std::min(profile.base.solver_tol, 1e-12));
  double s = profile.scale() / raw.A;  // normalization x Jastrow rescale
  double s2 = s * s;
  if (kind == MomentKind::energy_form) {
    int idx = n / 2;
    return raw.I[idx] * s2;
  }
  return raw.J[n] * s2;
}

}  // namespace fermigas
