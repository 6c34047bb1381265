#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fermigas {

// Compensated (Kahan) accumulator.
struct KahanSum {
  double s = 0.0, c = 0.0;
  void add(double x) {
    double y = x - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  double value() const { return s; }
};

// Deterministic chunked reduction: partial sums per fixed-size chunk are
// combined in chunk order, so the result is bit-identical for any thread
// count. Serial variant kept as the reference implementation.
template <class F>
double serial_sum(std::int64_t n, F&& f) {
  KahanSum acc;
  for (std::int64_t i = 0; i < n; ++i) acc.add(f(i));
  return acc.value();
}

template <class F>
double parallel_sum(std::int64_t n, F&& f, std::int64_t chunk = 1 << 12) {
  if (n <= 0) return 0.0;
  const std::int64_t nchunks = (n + chunk - 1) / chunk;
  std::vector<double> partial(static_cast<size_t>(nchunks), 0.0);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t cidx = 0; cidx < nchunks; ++cidx) {
    const std::int64_t lo = cidx * chunk;
    const std::int64_t hi = std::min(n, lo + chunk);
    KahanSum acc;
    for (std::int64_t i = lo; i < hi; ++i) acc.add(f(i));
    partial[static_cast<size_t>(cidx)] = acc.value();
  }
  KahanSum acc;
  for (double p : partial) acc.add(p);
  return acc.value();
}

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Adaptive Simpson quadrature, absolute tolerance.
namespace detail {
inline double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}
inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double fa,
                                   double b, double fb, double m, double fm, double whole,
                                   double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(a, fa, m, fm, flm);
  double right = simpson(m, fm, b, fb, frm);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, tol * 0.5, depth - 1) +
         adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, tol * 0.5, depth - 1);
}
}  // namespace detail

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-12, int depth_cap = 40) {
  if (a == b) return 0.0;
  double m = 0.5 * (a + b);
  double fa = f(a), fb = f(b), fm = f(m);
  double whole = detail::simpson(a, fa, b, fb, fm);
  return detail::adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, depth_cap);
}

// Dormand-Prince RK5(4) with adaptive step on a small first-order system.
// deriv(r, y, dy) fills dy; integrates from ra to rb (ra < rb).
class Rk45 {
 public:
  using Deriv = std::function<void(double, const std::vector<double>&, std::vector<double>&)>;

  double rtol = 1e-12;
  double atol = 1e-14;
  double max_step_factor = 0.1;  // max step = factor * (rb - ra)

  void integrate(const Deriv& deriv, double ra, double rb, std::vector<double>& y) const {
    const size_t n = y.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), yt(n), y5(n), y4(n);
    double r = ra;
    double span = rb - ra;
    if (span <= 0.0) return;
    double h = span * 1e-3;
    const double hmax = span * max_step_factor;
    deriv(r, y, k1);
    int iter_guard = 0;
    while (r < rb) {
      if (++iter_guard > 2000000) throw std::runtime_error("Rk45: step count exceeded");
      if (r + h > rb) h = rb - r;
      // Dormand-Prince coefficients
      for (size_t i = 0; i < n; ++i) yt[i] = y[i] + h * (1.0 / 5.0) * k1[i];
      deriv(r + h / 5.0, yt, k2);
      for (size_t i = 0; i < n; ++i)
        yt[i] = y[i] + h * (3.0 / 40.0 * k1[i] + 9.0 / 40.0 * k2[i]);
      deriv(r + 3.0 * h / 10.0, yt, k3);
      for (size_t i = 0; i < n; ++i)
        yt[i] = y[i] + h * (44.0 / 45.0 * k1[i] - 56.0 / 15.0 * k2[i] + 32.0 / 9.0 * k3[i]);
      deriv(r + 4.0 * h / 5.0, yt, k4);
      for (size_t i = 0; i < n; ++i)
        yt[i] = y[i] + h * (19372.0 / 6561.0 * k1[i] - 25360.0 / 2187.0 * k2[i] +
                            64448.0 / 6561.0 * k3[i] - 212.0 / 729.0 * k4[i]);
      deriv(r + 8.0 * h / 9.0, yt, k5);
      for (size_t i = 0; i < n; ++i)
        yt[i] = y[i] + h * (9017.0 / 3168.0 * k1[i] - 355.0 / 33.0 * k2[i] +
                            46732.0 / 5247.0 * k3[i] + 49.0 / 176.0 * k4[i] -
                            5103.0 / 18656.0 * k5[i]);
      deriv(r + h, yt, k6);
      for (size_t i = 0; i < n; ++i)
        y5[i] = y[i] + h * (35.0 / 384.0 * k1[i] + 500.0 / 1113.0 * k3[i] +
                            125.0 / 192.0 * k4[i] - 2187.0 / 6784.0 * k5[i] +
                            11.0 / 84.0 * k6[i]);
      deriv(r + h, y5, k7);
      for (size_t i = 0; i < n; ++i)
        y4[i] = y[i] + h * (5179.0 / 57600.0 * k1[i] + 7571.0 / 16695.0 * k3[i] +
                            393.0 / 640.0 * k4[i] - 92097.0 / 339200.0 * k5[i] +
                            187.0 / 2100.0 * k6[i] + 1.0 / 40.0 * k7[i]);
      double err = 0.0;
      for (size_t i = 0; i < n; ++i) {
        double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
        double e = (y5[i] - y4[i]) / sc;
        err += e * e;
      }
      err = std::sqrt(err / static_cast<double>(n));
      if (err <= 1.0) {
        r += h;
        y = y5;
        k1 = k7;  // FSAL
      } else {
        deriv(r, y, k1);
      }
      double fac = 0.9 * std::pow(std::max(err, 1e-20), -0.2);
      fac = std::min(5.0, std::max(0.2, fac));
      h = std::min(h * fac, hmax);
      if (h < span * 1e-15) throw std::runtime_error("Rk45: step underflow");
    }
  }
};

// Least squares for y ~ sum_j c_j basis_j via normal equations (small systems).
inline std::vector<double> lstsq(const std::vector<std::vector<double>>& cols,
                                 const std::vector<double>& y) {
  const size_t m = cols.size();
  const size_t n = y.size();
  std::vector<std::vector<double>> A(m, std::vector<double>(m, 0.0));
  std::vector<double> b(m, 0.0);
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = i; j < m; ++j) {
      double s = 0.0;
      for (size_t k = 0; k < n; ++k) s += cols[i][k] * cols[j][k];
      A[i][j] = A[j][i] = s;
    }
    double s = 0.0;
    for (size_t k = 0; k < n; ++k) s += cols[i][k] * y[k];
    b[i] = s;
  }
  // Gaussian elimination with partial pivoting
  for (size_t col = 0; col < m; ++col) {
    size_t piv = col;
    for (size_t row = col + 1; row < m; ++row)
      if (std::abs(A[row][col]) > std::abs(A[piv][col])) piv = row;
    std::swap(A[col], A[piv]);
    std::swap(b[col], b[piv]);
    if (A[col][col] == 0.0) throw std::runtime_error("lstsq: singular normal equations");
    for (size_t row = col + 1; row < m; ++row) {
      double f = A[row][col] / A[col][col];
      for (size_t k = col; k < m; ++k) A[row][k] -= f * A[col][k];
      b[row] -= f * b[col];
    }
  }
  std::vector<double> c(m, 0.0);
  for (size_t row = m; row-- > 0;) {
    double s = b[row];
    for (size_t k = row + 1; k < m; ++k) s -= A[row][k] * c[k];
    c[row] = s / A[row][row];
  }
  return c;
}

inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("loglog_slope: need >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    double lx = std::log(x[i]), ly = std::log(std::abs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

}  // namespace fermigas
