#include "fermigas/lebesgue.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>

#include "fermigas/numerics.hpp"

namespace fermigas {

namespace {

using Cpx = std::complex<double>;

// Omega compressed into contiguous runs along the last axis. Convexity of the
// regions we enumerate guarantees one run per transverse index.
struct Columns {
  int d = 1;
  // 3D: (q1, q2) -> [lo, hi]; 2D: q1 -> [lo, hi]; 1D: single run list
  std::vector<std::array<std::int64_t, 4>> runs;  // q1, q2, lo, hi
  std::int64_t max_abs = 0;
};

Columns compress(const MomentumSet& ms) {
  Columns cols;
  cols.d = ms.d;
  std::map<std::pair<std::int64_t, std::int64_t>, std::pair<std::int64_t, std::int64_t>> runs;
  for (const auto& j : ms.pts) {
    for (int c = 0; c < 3; ++c) cols.max_abs = std::max(cols.max_abs, std::abs(j[c]));
    std::pair<std::int64_t, std::int64_t> key;
    std::int64_t last;
    if (ms.d == 3) {
      key = {j[0], j[1]};
      last = j[2];
    } else if (ms.d == 2) {
      key = {j[0], 0};
      last = j[1];
    } else {
      key = {0, 0};
      last = j[0];
    }
    auto it = runs.find(key);
    if (it == runs.end())
      runs[key] = {last, last};
    else {
      it->second.first = std::min(it->second.first, last);
      it->second.second = std::max(it->second.second, last);
    }
  }
  std::int64_t total = 0;
  for (const auto& [key, lohi] : runs) {
    cols.runs.push_back({key.first, key.second, lohi.first, lohi.second});
    total += lohi.second - lohi.first + 1;
  }
  if (total != ms.N())
    throw std::logic_error("kernel_l1: momentum set is not contiguous along the last axis");
  return cols;
}

double ipow(std::int64_t q, int e) {
  double v = 1.0;
  for (int i = 0; i < e; ++i) v *= static_cast<double>(q);
  return v;
}

// sum_{q=lo}^{hi} q^e exp(i q u) by phase recurrence
Cpx weighted_run(std::int64_t lo, std::int64_t hi, int e, double u) {
  Cpx z = std::polar(1.0, u * static_cast<double>(lo));
  Cpx step = std::polar(1.0, u);
  Cpx acc = 0.0;
  for (std::int64_t q = lo; q <= hi; ++q) {
    acc += ipow(q, e) * z;
    z *= step;
  }
  return acc;
}

// grid average of |F| at resolution M (the (2 pi)^{-d} integral approximant)
double grid_average(const Columns& cols, std::array<int, 3> e, int M) {
  const double du = 2.0 * M_PI / M;
  if (cols.d == 1) {
    auto f = [&](std::int64_t m) {
      double u = du * static_cast<double>(m);
      Cpx F = 0.0;
      for (const auto& r : cols.runs) F += weighted_run(r[2], r[3], e[0], u);
      return std::abs(F);
    };
    return parallel_sum(M, f) / M;
  }

  const size_t plane = cols.d == 3 ? static_cast<size_t>(M) * M : static_cast<size_t>(M);
  fftw_plan plan;
  std::vector<Cpx> proto(plane);
  {
    auto* p = reinterpret_cast<fftw_complex*>(proto.data());
    plan = cols.d == 3 ? fftw_plan_dft_2d(M, M, p, p, FFTW_BACKWARD, FFTW_ESTIMATE)
                       : fftw_plan_dft_1d(M, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
  }

  const int nslices = cols.d >= 2 ? M : 1;
  std::vector<double> partial(static_cast<size_t>(nslices), 0.0);
#pragma omp parallel
  {
    std::vector<Cpx> buf(plane);
#pragma omp for schedule(dynamic)
    for (int m_last = 0; m_last < nslices; ++m_last) {
      double u_last = du * m_last;
      std::fill(buf.begin(), buf.end(), Cpx(0.0));
      for (const auto& r : cols.runs) {
        Cpx w;
        int e_last = cols.d == 3 ? e[2] : e[1];
        w = weighted_run(r[2], r[3], e_last, u_last);
        if (cols.d == 3) {
          w *= ipow(r[0], e[0]) * ipow(r[1], e[1]);
          size_t i1 = static_cast<size_t>(((r[0] % M) + M) % M);
          size_t i2 = static_cast<size_t>(((r[1] % M) + M) % M);
          buf[i1 * M + i2] += w;
        } else {
          w *= ipow(r[0], e[0]);
          size_t i1 = static_cast<size_t>(((r[0] % M) + M) % M);
          buf[i1] += w;
        }
      }
      fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(buf.data()),
                       reinterpret_cast<fftw_complex*>(buf.data()));
      KahanSum acc;
      for (const Cpx& v : buf) acc.add(std::abs(v));
      partial[static_cast<size_t>(m_last)] = acc.value();
    }
  }
  fftw_destroy_plan(plan);
  KahanSum total;
  for (double p : partial) total.add(p);
  return total.value() / std::pow(static_cast<double>(M), cols.d);
}

}  // namespace

KernelValue kernel_l1(const KernelSpec& spec) {
  if (!spec.ms) throw std::invalid_argument("kernel_l1: null momentum set");
  int esum = spec.exponents[0] + spec.exponents[1] + spec.exponents[2];
  if (esum > 2 || spec.exponents[0] < 0 || spec.exponents[1] < 0 || spec.exponents[2] < 0)
    throw std::invalid_argument("kernel_l1: weight exponents must be nonnegative with sum <= 2");
  Columns cols = compress(*spec.ms);
  int m_alias = static_cast<int>(2 * cols.max_abs + 2);
  int M = spec.M;
  if (M == 0) {
    M = 1;
    int span = static_cast<int>(4 * (2 * cols.max_abs + 1));
    while (M < span) M *= 2;
  }
  if (M < m_alias)
    throw GridAliased("kernel_l1: M = " + std::to_string(M) + " below the alias-free bound " +
                      std::to_string(m_alias));
  KernelValue kv;
  double coarse = grid_average(cols, spec.exponents, M);
  double fine = grid_average(cols, spec.exponents, 2 * M);
  kv.value = fine;
  kv.error_estimate = std::abs(fine - coarse);
  kv.M_used = 2 * M;
  return kv;
}

double kernel_l1_direct(const MomentumSet& ms, std::array<int, 3> exponents, int M) {
  // plain triple loop over the grid; serial reference for the FFT path
  KahanSum acc;
  const double du = 2.0 * M_PI / M;
  const int n2 = ms.d >= 2 ? M : 1, n3 = ms.d >= 3 ? M : 1;
  for (int m1 = 0; m1 < M; ++m1)
    for (int m2 = 0; m2 < n2; ++m2)
      for (int m3 = 0; m3 < n3; ++m3) {
        Cpx F = 0.0;
        for (const auto& j : ms.pts) {
          double phase = du * (m1 * static_cast<double>(j[0]) + m2 * static_cast<double>(j[1]) +
                               m3 * static_cast<double>(j[2]));
          double w = ipow(j[0], exponents[0]) * ipow(j[1], exponents[1]) *
                     ipow(j[2], exponents[2]);
          F += w * std::polar(1.0, phase);
        }
        acc.add(std::abs(F));
      }
  return acc.value() / std::pow(static_cast<double>(M), ms.d);
}

namespace {

// closed forms for sum_{k=0}^{M} k^p q^k away from q = 1
Cpx power_sum(int M, int p, double x) {
  const Cpx q = std::polar(1.0, x);
  const Cpx qm = std::polar(1.0, x * M);  // q^M
  const Cpx d = q - 1.0;
  const double Md = static_cast<double>(M);
  switch (p) {
    case 0:
      return (qm * q - 1.0) / d;
    case 1:
      return q / (d * d) * (qm * (Md * q - Md - 1.0) + 1.0);
    default:
      return q / (d * d * d) *
             (qm * (Md * Md * d * d - 2.0 * Md * d + q + 1.0) - q - 1.0);
  }
}

Cpx direct_power_sum(int M, int p, double x) {
  Cpx z = 1.0, step = std::polar(1.0, x), acc = 0.0;
  for (int k = 0; k <= M; ++k) {
    acc += ipow(k, p) * z;
    z *= step;
  }
  return acc;
}

}  // namespace

double one_d_power_kernel_l1(int M, int p) {
  if (M < 1) throw std::invalid_argument("one_d_power_kernel_l1: M >= 1");
  if (p < 0 || p > 2) throw std::invalid_argument("one_d_power_kernel_l1: p in {0,1,2}");
  const double switch_x = 4.0 / static_cast<double>(M);
  auto f = [&](double x) {
    double x0 = std::min(x, 2.0 * M_PI - x);
    if (x0 < switch_x) return std::abs(direct_power_sum(M, p, x));
    return std::abs(power_sum(M, p, x));
  };
  // panels at the scale of the kernel oscillation, adaptive inside each
  const int panels = 8 * M;
  const double tol_per_panel = 1e-9 * std::pow(static_cast<double>(M), p + 1) / panels;
  auto panel = [&](std::int64_t i) {
    double a = 2.0 * M_PI * static_cast<double>(i) / panels;
    double b = 2.0 * M_PI * static_cast<double>(i + 1) / panels;
    return adaptive_simpson(f, a, b, tol_per_panel, 18);
  };
  return parallel_sum(panels, panel);
}

std::vector<ScalingRow> scaling_study(const FermiPolyhedron* poly, int d,
                                      const std::vector<std::int64_t>& R_list,
                                      std::array<int, 3> exponents, int M) {
  std::vector<ScalingRow> rows;
  const double L = 2.0 * M_PI;  // integer lattice
  for (std::int64_t R : R_list) {
    MomentumSet ms = poly ? enumerate_momenta(*poly, R, 1, L)
                          : enumerate_momenta_ball(d, static_cast<double>(R), L);
    KernelSpec spec;
    spec.ms = &ms;
    spec.exponents = exponents;
    spec.M = M;
    KernelValue kv = kernel_l1(spec);
    ScalingRow row;
    row.R = static_cast<double>(R);
    row.N = ms.N();
    row.s = poly ? poly->s : 0;
    row.exponents = exponents;
    row.value = kv.value;
    row.error_estimate = kv.error_estimate;
    const double lg = std::max(std::log(static_cast<double>(R)), 1.0);
    const int esum = exponents[0] + exponents[1] + exponents[2];
    const double Rd = static_cast<double>(R);
    if (!poly) {
      row.bound = std::pow(Rd, d == 3 ? 1.0 : (d == 2 ? 0.5 : 0.0)) * std::pow(Rd, esum);
      if (d == 1) row.bound = std::max(lg, 1.0) * std::pow(Rd, esum);
    } else {
      double logs = std::pow(lg, d) * static_cast<double>(poly->s);
      row.bound = logs * std::pow(Rd, esum) * (esum >= 2 ? lg : 1.0);
    }
    row.ratio = row.value / row.bound;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fermigas
