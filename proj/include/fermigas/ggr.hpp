#pragma once

#include <functional>
#include <string>
#include <utility>

#include "fermigas/scattering.hpp"
#include "fermigas/slater.hpp"

namespace fermigas {

struct CapExceeded : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct UnknownId : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DiluteRegimeViolated : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// g-edge graph on q external vertices {0..q-1} and p internal vertices
// {q..q+p-1}: every internal vertex has degree >= 1, no external-external
// edges.
struct GGraph {
  int q = 0, p = 0;
  std::vector<std::pair<int, int>> edges;  // i < j, lexicographic
};

// Complete duplicate-free enumeration; cap p + q <= 7.
std::vector<GGraph> enumerate_graphs(int p, int q);

struct DiagramClass {
  int k = 0;        // clusters made of internal vertices only
  int nu = 0;       // sum of internal-cluster sizes - 2k
  int nu_star = 0;  // internal vertices in external clusters
};

struct Diagram {
  GGraph graph;
  std::vector<int> perm;  // permutation of {0..q+p-1}
  int sign = 1;
  DiagramClass cls;
  bool linked = false;
};

int permutation_sign(const std::vector<int>& perm);
Diagram make_diagram(GGraph graph, std::vector<int> perm);

// g evaluated on torus nodes through the min-image metric, with ghat by
// direct weighted sums (torus grids need not be powers of two).
class GProfile {
 public:
  GProfile(const DiscreteTorus& torus, const JastrowProfile& profile);
  GProfile(const DiscreteTorus& torus, const std::function<double(double)>& g_of_r);

  const DiscreteTorus& torus() const { return torus_; }
  double g_diff(std::int64_t didx) const { return g_[static_cast<size_t>(didx)]; }
  double g(const std::array<double, 3>& dx) const;  // min-image radial evaluation
  double ghat(const std::array<double, 3>& k) const;
  double ghat_zero() const;
  double int_abs_g() const;     // grid sum of |g|
  double int_abs_g_x2() const;  // grid sum of |g| |x|^2
  // scale g towards zero, keeping -1 <= g <= 0
  GProfile scaled(double eps) const;

 private:
  GProfile() = default;
  void init_from(const std::function<double(double)>& g_of_r);
  DiscreteTorus torus_;
  std::vector<double> g_;  // on grid nodes as difference vectors from 0
};

// Value of a single diagram: internal coordinates summed over the torus grid.
// Direct mode caps at p <= 3 internal vertices.
double diagram_value(const Diagram& dg, const OneBodyKernel& kernel, const GProfile& gp,
                     const std::vector<std::array<double, 3>>& ext);

// Sum over all diagrams (pi, G) in D_p^q with fixed G, summing the
// permutations into a determinant: sum_pi sign prod gamma = rho-determinant.
// Used by the finite identities.
double graph_family_value(const GGraph& graph, const OneBodyKernel& kernel, const GProfile& gp,
                          const std::vector<std::array<double, 3>>& ext);

// Sum over permutations with the linked indicator for a vertex-set partition
// into clusters; for two clusters also the identity value
// rho^{(n1+n2)} - rho^{(n1)} rho^{(n2)}.
struct TruncatedCorrelation {
  double value = 0.0;
  bool has_identity = false;
  double identity_value = 0.0;
};
TruncatedCorrelation truncated_correlation(const std::vector<std::vector<int>>& clusters,
                                           const std::vector<std::array<double, 3>>& points,
                                           const OneBodyKernel& kernel);

// C_N / N! as the finite pre-resummation series
//   1 + sum_{p=2}^{N} (1/p!) int W_p rho^{(p)},
// exact on alias-free grids.
double normalization_series(const OneBodyKernel& kernel, const GProfile& gp, int N);

// Brute-force grid sums of the defining integrals of the Jastrow state.
struct OracleResult {
  double cn_over_fact = 0.0;
  double rho_q_jas = 0.0;
};
OracleResult direct_oracle(const OneBodyKernel& kernel, const GProfile& gp, int N, int q,
                           const std::vector<std::array<double, 3>>& ext,
                           double term_budget = 1e8);

// Finite GGR sum for the q-particle reduced density:
//   (C_N/N!) rho^{(q)}_Jas = prod f^2 * [rho^{(q)} + sum_{p=1}^{N-q} ...].
double finite_ggr_density_sum(const OneBodyKernel& kernel, const GProfile& gp, int N, int q,
                              const std::vector<std::array<double, 3>>& ext);

struct ConvergenceParameter {
  double value = 0.0;
  double threshold = 0.1;
  bool convergent = false;
};
ConvergenceParameter convergence_parameter(double s, double a, double rho, double b, double N,
                                           int d, double threshold = 0.1);

struct TreeGraphCheck {
  double lhs = 0.0;  // |sum over connected graphs of prod g_e|
  double rhs = 0.0;  // sum over spanning trees of prod |g_e|
  std::int64_t tree_count = 0;
  std::int64_t cayley = 0;  // n^{n-2}
  bool ok = false;
};
TreeGraphCheck tree_graph_check(int n, const std::vector<std::vector<double>>& g);

// Appendix-style closed evaluations of the smallest diagrams. Position-space
// ids are permutation-summed families; the others are single diagrams in
// momentum space. Every id has a matching generic-route diagram.
//   "A"   q=2 p=2: two 2-clusters, chi(k2-k1=k3-k4) ghat factor
//   "B1"  q=2 p=1: extra vertex attached to {1}
//   "B2"  q=2 p=1: extra vertex attached to {2}, ghat(0) factor
//   "C"   q=2 p=1: g13 g23 against rho^{(3)} (pi-summed)
//   "T3_linked"   q=3 p=2: one linked component
//   "T3_twocomp"  q=3 p=2: two linked components
//   "D1_A1" q=2 p=2: triangle cluster {1,3,4} vs {2} (pi-summed)
//   "D1_A2" q=2 p=2: clusters {1,3}, {2,4} (pi-summed)
//   "D1_B1" q=2 p=1: same graph as "C" (pi-summed)
//   "D1_B2" q=2 p=3: clusters {1,2,3}, {4,5} (pi-summed)
double small_diagram_catalog(const std::string& id, const OneBodyKernel& kernel,
                             const GProfile& gp, const std::vector<std::array<double, 3>>& ext);

// The matching generic-route value (single diagram or linked pi-sum).
double small_diagram_generic(const std::string& id, const OneBodyKernel& kernel,
                             const GProfile& gp, const std::vector<std::array<double, 3>>& ext);

}  // namespace fermigas
