#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fermigas/fermi_surface.hpp"

namespace fermigas {

struct GridAliased : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Kernel (2 pi)^{-d} int |sum_{q in Omega} t(q) e^{iqu}| du over the torus,
// with monomial weight t(q) = (q^1)^{e1} (q^2)^{e2} (q^3)^{e3}, sum e <= 2.
// Omega is the integer point set of a MomentumSet (lattice indices).
struct KernelSpec {
  const MomentumSet* ms = nullptr;
  std::array<int, 3> exponents = {0, 0, 0};
  int M = 0;  // grid per axis; 0 = 4 * coordinate span rounded up to a power of two
};

struct KernelValue {
  double value = 0.0;           // at the refined grid 2M
  double error_estimate = 0.0;  // |value(2M) - value(M)|
  int M_used = 0;               // refined grid
};

KernelValue kernel_l1(const KernelSpec& spec);

// Serial reference: direct evaluation of the same grid average (small cases).
double kernel_l1_direct(const MomentumSet& ms, std::array<int, 3> exponents, int M);

// int_0^{2 pi} | sum_{k=0}^{M} k^p e^{ikx} | dx for p in {0, 1, 2}, via
// adaptive quadrature on the closed-form geometric-series kernels.
double one_d_power_kernel_l1(int M, int p);

struct ScalingRow {
  double R = 0.0;
  std::int64_t N = 0;
  long s = 0;  // polyhedron corner count (0 for the ball)
  std::array<int, 3> exponents = {0, 0, 0};
  double value = 0.0;
  double bound = 0.0;  // predicted scaling (constant-free)
  double ratio = 0.0;  // value / bound
  double error_estimate = 0.0;
};

// Lebesgue-constant scaling sweep for dilated balls or a fixed polyhedron.
std::vector<ScalingRow> scaling_study(const FermiPolyhedron* poly /* null = ball */, int d,
                                      const std::vector<std::int64_t>& R_list,
                                      std::array<int, 3> exponents, int M = 0);

}  // namespace fermigas
