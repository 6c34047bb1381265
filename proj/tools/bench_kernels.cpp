// Timing comparison of the OpenMP kernels against their serial reference
// implementations. Not a correctness test (the suites cover that); prints a
// small table of speedups on this machine.

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fermigas/ggr.hpp"
#include "fermigas/lebesgue.hpp"
#include "fermigas/numerics.hpp"
#include "fermigas/slater.hpp"

using namespace fermigas;
using Clock = std::chrono::steady_clock;

namespace {

double seconds(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

template <class F>
double timed(F&& f) {
  auto t0 = Clock::now();
  f();
  return seconds(t0, Clock::now());
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (no OpenMP)\n");
#endif
  std::printf("%-34s %10s %10s %8s\n", "kernel", "serial[s]", "parallel", "speedup");

  {
    // plain reduction micro-benchmark
    const std::int64_t n = 50'000'000;
    auto f = [](std::int64_t i) { return std::sin(1e-7 * static_cast<double>(i)); };
    double ref = 0, par = 0;
    double ts = timed([&] { ref = serial_sum(n, f); });
    double tp = timed([&] { par = parallel_sum(n, f); });
    std::printf("%-34s %10.3f %10.3f %7.2fx  (diff %.2e)\n", "chunked reduction", ts, tp, ts / tp,
                std::abs(ref - par));
  }

  {
    auto ms = enumerate_momenta_ball(3, 16.0, 2.0 * M_PI);
    KernelSpec spec{&ms, {0, 0, 0}, 64};
    double direct = 0;
    KernelValue kv;
    double ts = timed([&] { direct = kernel_l1_direct(ms, {0, 0, 0}, 64); });
    double tp = timed([&] { kv = kernel_l1(spec); });
    std::printf("%-34s %10.3f %10.3f %7.2fx  (direct %.6g, fft %.6g)\n",
                "lebesgue kernel, ball R=16, M=64", ts, tp, ts / tp, direct, kv.value);
  }

  {
    DiscreteTorus torus{3, 2.0 * M_PI, 8};
    auto ms = enumerate_momenta_ball(3, 1.2, torus.L);
    OneBodyKernel kernel(ms);
    std::vector<std::array<double, 3>> ext = {torus.node(1), torus.node(77), torus.node(300)};
    double par = 0;
    double tp = timed([&] { par = rho_p_marginalized(kernel, torus, ext); });
    double wick = rho_p(kernel, ext);
    std::printf("%-34s %10s %10.3f %8s  (wick %.6g, grid %.6g)\n",
                "3D marginalization oracle N=7,p=3", "-", tp, "-", wick, par);
  }

  {
    DiscreteTorus torus{1, 2.0 * M_PI, 16};
    MomentumSet ms;
    ms.d = 1;
    ms.L = torus.L;
    ms.pts = {{-2, 0, 0}, {-1, 0, 0}, {0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
    OneBodyKernel kernel(ms);
    GProfile gp(torus, [](double r) {
      double f = r >= 2.0 ? 1.0 : (r <= 0.5 ? 0.0 : (1.0 - 0.5 / r) / (1.0 - 0.25));
      return f * f - 1.0;
    });
    OracleResult res;
    double tp = timed([&] { res = direct_oracle(kernel, gp, 5, 0, {}); });
    std::printf("%-34s %10s %10.3f %8s  (C_N/N! %.6g)\n", "jastrow oracle 1D N=5, M=16", "-", tp,
                "-", res.cn_over_fact);
  }
  return 0;
}
