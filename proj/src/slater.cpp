#include "fermigas/slater.hpp"

#include <cmath>
#include <random>

#include "fermigas/numerics.hpp"

namespace fermigas {

namespace {

using Cpx = std::complex<double>;

// determinant of a small complex matrix by LU with partial pivoting
Cpx det_small(std::vector<Cpx>& a, int n) {
  Cpx det = 1.0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int row = col + 1; row < n; ++row)
      if (std::abs(a[row * n + col]) > std::abs(a[piv * n + col])) piv = row;
    if (piv != col) {
      for (int k = 0; k < n; ++k) std::swap(a[col * n + k], a[piv * n + k]);
      det = -det;
    }
    Cpx p = a[col * n + col];
    if (p == Cpx(0.0)) return 0.0;
    det *= p;
    for (int row = col + 1; row < n; ++row) {
      Cpx f = a[row * n + col] / p;
      for (int k = col; k < n; ++k) a[row * n + k] -= f * a[col * n + k];
    }
  }
  return det;
}

double det_small_real(std::vector<double>& a, int n) {
  double det = 1.0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int row = col + 1; row < n; ++row)
      if (std::abs(a[row * n + col]) > std::abs(a[piv * n + col])) piv = row;
    if (piv != col) {
      for (int k = 0; k < n; ++k) std::swap(a[col * n + k], a[piv * n + k]);
      det = -det;
    }
    double p = a[col * n + col];
    if (p == 0.0) return 0.0;
    det *= p;
    for (int row = col + 1; row < n; ++row) {
      double f = a[row * n + col] / p;
      for (int k = col; k < n; ++k) a[row * n + k] -= f * a[col * n + k];
    }
  }
  return det;
}

}  // namespace

OneBodyKernel::OneBodyKernel(const MomentumSet& ms) : d_(ms.d), L_(ms.L) {
  const double u = ms.unit();
  ks_.reserve(ms.pts.size());
  for (const auto& j : ms.pts)
    ks_.push_back({u * static_cast<double>(j[0]), u * static_cast<double>(j[1]),
                   u * static_cast<double>(j[2])});
  rho_ = static_cast<double>(ks_.size()) / std::pow(L_, d_);
}

double OneBodyKernel::gamma(const std::array<double, 3>& x) const {
  KahanSum acc;
  for (const auto& k : ks_) acc.add(std::cos(k[0] * x[0] + k[1] * x[1] + k[2] * x[2]));
  return acc.value() / std::pow(L_, d_);
}

double OneBodyKernel::dgamma(const std::array<double, 3>& x, int ax) const {
  KahanSum acc;
  for (const auto& k : ks_)
    acc.add(-k[ax] * std::sin(k[0] * x[0] + k[1] * x[1] + k[2] * x[2]));
  return acc.value() / std::pow(L_, d_);
}

double OneBodyKernel::d2gamma(const std::array<double, 3>& x, int ax1, int ax2) const {
  KahanSum acc;
  for (const auto& k : ks_)
    acc.add(-k[ax1] * k[ax2] * std::cos(k[0] * x[0] + k[1] * x[1] + k[2] * x[2]));
  return acc.value() / std::pow(L_, d_);
}

std::vector<double> OneBodyKernel::grid_table(const DiscreteTorus& torus) const {
  if (torus.d != d_ || std::abs(torus.L - L_) > 1e-12 * L_)
    throw std::invalid_argument("grid_table: torus does not match the kernel");
  std::vector<double> table(static_cast<size_t>(torus.nodes()));
  const double h = torus.h();
#pragma omp parallel for schedule(static)
  for (std::int64_t idx = 0; idx < torus.nodes(); ++idx) {
    std::int64_t rem = idx;
    std::array<double, 3> dx = {0, 0, 0};
    for (int c = d_ - 1; c >= 0; --c) {
      dx[c] = torus.min_image((rem % torus.M) * h);
      rem /= torus.M;
    }
    table[static_cast<size_t>(idx)] = gamma(dx);
  }
  return table;
}

double rho_p(const OneBodyKernel& kernel, const std::vector<std::array<double, 3>>& points) {
  const int p = static_cast<int>(points.size());
  if (p == 0) return 1.0;
  if (p > kernel.N()) return 0.0;
  std::vector<double> a(static_cast<size_t>(p) * p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      std::array<double, 3> dx = {points[i][0] - points[j][0], points[i][1] - points[j][1],
                                  points[i][2] - points[j][2]};
      a[static_cast<size_t>(i) * p + j] = kernel.gamma(dx);
    }
  return det_small_real(a, p);
}

double rho_p_marginalized(const OneBodyKernel& kernel, const DiscreteTorus& torus,
                          const std::vector<std::array<double, 3>>& ext, double term_budget) {
  const int N = static_cast<int>(kernel.N());
  const int p = static_cast<int>(ext.size());
  if (p > N) return 0.0;
  const int nint = N - p;
  double terms = std::pow(static_cast<double>(torus.nodes()), nint);
  if (terms > term_budget)
    throw BudgetExceeded("rho_p_marginalized: needs " + std::to_string(terms) + " terms");

  // u_k rows for the external points and for every grid node
  const auto& ks = kernel.momenta();
  const double norm = std::pow(kernel.L(), -0.5 * kernel.d());
  std::vector<Cpx> ext_rows(static_cast<size_t>(p) * N);
  for (int i = 0; i < p; ++i)
    for (int k = 0; k < N; ++k) {
      double ph = ks[k][0] * ext[i][0] + ks[k][1] * ext[i][1] + ks[k][2] * ext[i][2];
      ext_rows[static_cast<size_t>(i) * N + k] = std::polar(norm, ph);
    }
  const std::int64_t G = torus.nodes();
  std::vector<Cpx> node_rows(static_cast<size_t>(G) * N);
  for (std::int64_t g = 0; g < G; ++g) {
    auto x = torus.node(g);
    for (int k = 0; k < N; ++k) {
      double ph = ks[k][0] * x[0] + ks[k][1] * x[1] + ks[k][2] * x[2];
      node_rows[static_cast<size_t>(g) * N + k] = std::polar(norm, ph);
    }
  }

  std::int64_t total = 1;
  for (int i = 0; i < nint; ++i) total *= G;
  auto term = [&](std::int64_t cfg) {
    std::vector<Cpx> a(static_cast<size_t>(N) * N);
    for (int i = 0; i < p; ++i)
      for (int k = 0; k < N; ++k) a[static_cast<size_t>(i) * N + k] = ext_rows[static_cast<size_t>(i) * N + k];
    std::int64_t rem = cfg;
    for (int i = 0; i < nint; ++i) {
      std::int64_t g = rem % G;
      rem /= G;
      for (int k = 0; k < N; ++k)
        a[static_cast<size_t>(p + i) * N + k] = node_rows[static_cast<size_t>(g) * N + k];
    }
    Cpx det = det_small(a, N);
    return std::norm(det);
  };
  double sum = parallel_sum(total, term);
  double fact = 1.0;
  for (int i = 2; i <= nint; ++i) fact *= i;
  return sum * std::pow(torus.weight(), nint) / fact;
}

Rho2Fit rho2_small_separation_fit(const OneBodyKernel& kernel, double spread_tol) {
  if (kernel.d() != 3)
    throw std::invalid_argument("rho2_small_separation_fit: 3D kernels only");
  const double rho = kernel.rho();
  const double rscale = std::pow(rho, -1.0 / 3.0);

  std::vector<std::array<double, 3>> dirs;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b)
      for (int c = -1; c <= 1; ++c) {
        if (a == 0 && b == 0 && c == 0) continue;
        double n = std::sqrt(static_cast<double>(a * a + b * b + c * c));
        dirs.push_back({a / n, b / n, c / n});
      }

  const int nr = 8;
  std::vector<double> radii(nr);
  for (int i = 0; i < nr; ++i)
    radii[i] = (0.01 + (0.1 - 0.01) * i / (nr - 1)) * rscale;

  // average over directions at each radius, then least squares in (r^2, r^4);
  // also per-direction c2 for the anisotropy spread
  std::vector<double> vals(nr, 0.0);
  std::vector<double> c2_dir;
  for (const auto& dir : dirs) {
    std::vector<double> v(nr);
    for (int i = 0; i < nr; ++i) {
      std::array<double, 3> x = {radii[i] * dir[0], radii[i] * dir[1], radii[i] * dir[2]};
      double g = kernel.gamma(x);
      v[i] = rho * rho - g * g;
      vals[i] += v[i] / static_cast<double>(dirs.size());
    }
    std::vector<double> b0(nr), b1(nr);
    for (int i = 0; i < nr; ++i) {
      b0[i] = radii[i] * radii[i];
      b1[i] = -std::pow(radii[i], 4);
    }
    auto cf = lstsq({b0, b1}, v);
    c2_dir.push_back(cf[0]);
  }
  std::vector<double> b0(nr), b1(nr);
  for (int i = 0; i < nr; ++i) {
    b0[i] = radii[i] * radii[i];
    b1[i] = -std::pow(radii[i], 4);
  }
  auto cf = lstsq({b0, b1}, vals);

  Rho2Fit fit;
  fit.c2 = cf[0];
  fit.c4 = cf[1] / cf[0];
  double c23 = std::pow(6.0 * M_PI * M_PI, 2.0 / 3.0);
  fit.c2_target = c23 / 5.0 * std::pow(rho, 8.0 / 3.0);
  fit.c4_target = 3.0 * c23 / 35.0 * std::pow(rho, 2.0 / 3.0);
  double lo = *std::min_element(c2_dir.begin(), c2_dir.end());
  double hi = *std::max_element(c2_dir.begin(), c2_dir.end());
  fit.directional_spread = (hi - lo) / fit.c2;
  if (fit.directional_spread > spread_tol)
    throw FitIllConditioned("rho2 fit: directional spread " +
                            std::to_string(fit.directional_spread) + " above tolerance");
  return fit;
}

Rho3Check rho3_quartic_bound_check(const OneBodyKernel& kernel, int samples, std::uint64_t seed) {
  if (kernel.d() != 3)
    throw std::invalid_argument("rho3_quartic_bound_check: 3D kernels only");
  const double rho = kernel.rho();
  const double rscale = std::pow(rho, -1.0 / 3.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::uniform_real_distribution<double> rad(0.02, 0.5);
  Rho3Check out;
  for (int it = 0; it < samples; ++it) {
    std::array<double, 3> x1 = {uni(rng), uni(rng), uni(rng)};
    auto rand_dir = [&]() {
      std::array<double, 3> v;
      double n2 = 0;
      do {
        v = {uni(rng), uni(rng), uni(rng)};
        n2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
      } while (n2 < 1e-4 || n2 > 1.0);
      double n = std::sqrt(n2);
      return std::array<double, 3>{v[0] / n, v[1] / n, v[2] / n};
    };
    double r12 = rad(rng) * rscale, r13 = rad(rng) * rscale;
    auto d12 = rand_dir(), d13 = rand_dir();
    std::array<double, 3> x2 = {x1[0] + r12 * d12[0], x1[1] + r12 * d12[1],
                                x1[2] + r12 * d12[2]};
    std::array<double, 3> x3 = {x1[0] + r13 * d13[0], x1[1] + r13 * d13[1],
                                x1[2] + r13 * d13[2]};
    double val = rho_p(kernel, {x1, x2, x3});
    out.min_value = std::min(out.min_value, val);
    double denom = std::pow(rho, 3.0 + 4.0 / 3.0) * r12 * r12 * r13 * r13;
    out.max_ratio = std::max(out.max_ratio, val / denom);
  }
  return out;
}

}  // namespace fermigas
