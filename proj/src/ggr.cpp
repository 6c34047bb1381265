#include "fermigas/ggr.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numeric>

#include "fermigas/numerics.hpp"

namespace fermigas {

namespace {

using Cpx = std::complex<double>;
using Vec3 = std::array<double, 3>;

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
  int components() {
    int c = 0;
    for (size_t i = 0; i < parent.size(); ++i)
      if (find(static_cast<int>(i)) == static_cast<int>(i)) ++c;
    return c;
  }
};

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// iterate over all grid configurations of n internal coordinates
template <class F>
void for_each_config(const DiscreteTorus& torus, int n, F&& body) {
  std::int64_t total = 1;
  for (int i = 0; i < n; ++i) total *= torus.nodes();
  std::vector<std::int64_t> idx(static_cast<size_t>(std::max(n, 1)), 0);
  std::vector<Vec3> pos(static_cast<size_t>(std::max(n, 1)));
  for (std::int64_t cfg = 0; cfg < total; ++cfg) {
    std::int64_t rem = cfg;
    for (int i = 0; i < n; ++i) {
      idx[static_cast<size_t>(i)] = rem % torus.nodes();
      pos[static_cast<size_t>(i)] = torus.node(idx[static_cast<size_t>(i)]);
      rem /= torus.nodes();
    }
    body(pos);
  }
}

double min_image_r(const DiscreteTorus& torus, const Vec3& dx) {
  double r2 = 0.0;
  for (int c = 0; c < torus.d; ++c) {
    double m = torus.min_image(dx[c]);
    r2 += m * m;
  }
  return std::sqrt(r2);
}

}  // namespace

std::vector<GGraph> enumerate_graphs(int p, int q) {
  if (p + q > 7) throw CapExceeded("enumerate_graphs: p + q > 7");
  if (p < 0 || q < 0) throw std::invalid_argument("enumerate_graphs: negative counts");
  if (p == 0) return {};  // W_0 = W_1 = 0; the p = 0 density term is the bare determinant
  const int n = p + q;
  std::vector<std::pair<int, int>> allowed;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!(i < q && j < q)) allowed.push_back({i, j});
  std::vector<GGraph> out;
  const std::uint64_t m = allowed.size();
  for (std::uint64_t mask = 0; mask < (1ull << m); ++mask) {
    std::vector<int> deg(static_cast<size_t>(n), 0);
    for (std::uint64_t b = 0; b < m; ++b)
      if (mask & (1ull << b)) {
        ++deg[static_cast<size_t>(allowed[b].first)];
        ++deg[static_cast<size_t>(allowed[b].second)];
      }
    bool ok = true;
    for (int v = q; v < n; ++v) ok = ok && deg[static_cast<size_t>(v)] >= 1;
    if (!ok) continue;
    GGraph g;
    g.q = q;
    g.p = p;
    for (std::uint64_t b = 0; b < m; ++b)
      if (mask & (1ull << b)) g.edges.push_back(allowed[b]);
    out.push_back(std::move(g));
  }
  return out;
}

int permutation_sign(const std::vector<int>& perm) {
  std::vector<bool> seen(perm.size(), false);
  int sign = 1;
  for (size_t i = 0; i < perm.size(); ++i) {
    if (seen[i]) continue;
    size_t j = i;
    int len = 0;
    while (!seen[j]) {
      seen[j] = true;
      j = static_cast<size_t>(perm[j]);
      ++len;
    }
    if (len % 2 == 0) sign = -sign;
  }
  return sign;
}

Diagram make_diagram(GGraph graph, std::vector<int> perm) {
  const int n = graph.q + graph.p;
  if (static_cast<int>(perm.size()) != n)
    throw std::invalid_argument("make_diagram: permutation size mismatch");
  Diagram dg;
  dg.graph = std::move(graph);
  dg.perm = std::move(perm);
  dg.sign = permutation_sign(dg.perm);

  // clusters of the g-graph alone
  UnionFind uf(n);
  for (const auto& e : dg.graph.edges) uf.unite(e.first, e.second);
  std::map<int, std::pair<int, bool>> comp;  // root -> (size, has external)
  for (int v = 0; v < n; ++v) {
    auto& c = comp[uf.find(v)];
    c.first += 1;
    c.second = c.second || v < dg.graph.q;
  }
  for (const auto& [root, c] : comp) {
    if (c.second) {
      dg.cls.nu_star += c.first;  // internal vertices counted below
    } else if (c.first >= 2) {
      dg.cls.k += 1;
      dg.cls.nu += c.first - 2;
    }
    // singleton internal vertices cannot occur (degree >= 1), singleton
    // external clusters contribute nothing
  }
  // nu_star counts only internal vertices in external clusters
  int ext_in_ext = 0;
  for (int v = 0; v < dg.graph.q; ++v) ext_in_ext += 1;
  dg.cls.nu_star -= ext_in_ext;
  if (dg.cls.nu_star < 0) dg.cls.nu_star = 0;

  // linked: G-edges plus permutation edges connect everything
  UnionFind link(n);
  for (const auto& e : dg.graph.edges) link.unite(e.first, e.second);
  for (int v = 0; v < n; ++v) link.unite(v, dg.perm[static_cast<size_t>(v)]);
  dg.linked = link.components() == 1;
  return dg;
}

GProfile::GProfile(const DiscreteTorus& torus, const JastrowProfile& profile) : torus_(torus) {
  init_from([&](double r) { return profile.g(r); });
}

GProfile::GProfile(const DiscreteTorus& torus, const std::function<double(double)>& g_of_r)
    : torus_(torus) {
  init_from(g_of_r);
}

void GProfile::init_from(const std::function<double(double)>& g_of_r) {
  g_.resize(static_cast<size_t>(torus_.nodes()));
  for (std::int64_t idx = 0; idx < torus_.nodes(); ++idx) {
    std::int64_t rem = idx;
    double r2 = 0.0;
    for (int c = torus_.d - 1; c >= 0; --c) {
      double x = torus_.min_image((rem % torus_.M) * torus_.h());
      r2 += x * x;
      rem /= torus_.M;
    }
    double val = g_of_r(std::sqrt(r2));
    if (val < -1.0 - 1e-12 || val > 1e-12)
      throw std::invalid_argument("GProfile: g must satisfy -1 <= g <= 0");
    g_[static_cast<size_t>(idx)] = val;
  }
}

double GProfile::g(const std::array<double, 3>& dx) const {
  // nearest-node lookup after min-image wrap (nodes are set exactly in tests)
  std::int64_t idx = 0;
  for (int c = 0; c < torus_.d; ++c) {
    double w = dx[c] / torus_.h();
    std::int64_t m = static_cast<std::int64_t>(std::llround(w)) % torus_.M;
    if (m < 0) m += torus_.M;
    idx = idx * torus_.M + m;
  }
  return g_[static_cast<size_t>(idx)];
}

double GProfile::ghat(const std::array<double, 3>& k) const {
  // same min-image representative for the value and the phase; exact for
  // lattice momenta by periodicity, real by evenness of g
  KahanSum acc;
  for (std::int64_t idx = 0; idx < torus_.nodes(); ++idx) {
    std::int64_t rem = idx;
    double phase = 0.0;
    for (int c = torus_.d - 1; c >= 0; --c) {
      double x = torus_.min_image((rem % torus_.M) * torus_.h());
      phase += k[c] * x;
      rem /= torus_.M;
    }
    acc.add(g_[static_cast<size_t>(idx)] * std::cos(phase));
  }
  return acc.value() * torus_.weight();
}

double GProfile::ghat_zero() const {
  KahanSum acc;
  for (double v : g_) acc.add(v);
  return acc.value() * torus_.weight();
}

double GProfile::int_abs_g() const {
  KahanSum acc;
  for (double v : g_) acc.add(std::abs(v));
  return acc.value() * torus_.weight();
}

double GProfile::int_abs_g_x2() const {
  KahanSum acc;
  for (std::int64_t idx = 0; idx < torus_.nodes(); ++idx) {
    std::int64_t rem = idx;
    double r2 = 0.0;
    for (int c = torus_.d - 1; c >= 0; --c) {
      double x = torus_.min_image((rem % torus_.M) * torus_.h());
      r2 += x * x;
      rem /= torus_.M;
    }
    acc.add(std::abs(g_[static_cast<size_t>(idx)]) * r2);
  }
  return acc.value() * torus_.weight();
}

GProfile GProfile::scaled(double eps) const {
  GProfile out;
  out.torus_ = torus_;
  out.g_ = g_;
  for (double& v : out.g_) v *= eps;
  return out;
}

double diagram_value(const Diagram& dg, const OneBodyKernel& kernel, const GProfile& gp,
                     const std::vector<std::array<double, 3>>& ext) {
  const int q = dg.graph.q, p = dg.graph.p;
  if (static_cast<int>(ext.size()) != q)
    throw std::invalid_argument("diagram_value: external point count mismatch");
  if (p > 3) throw CapExceeded("diagram_value: direct mode caps at p <= 3");
  const DiscreteTorus& torus = gp.torus();

  KahanSum acc;
  for_each_config(torus, p, [&](const std::vector<Vec3>& internal) {
    std::vector<Vec3> x(static_cast<size_t>(q + p));
    for (int i = 0; i < q; ++i) x[static_cast<size_t>(i)] = ext[static_cast<size_t>(i)];
    for (int i = 0; i < p; ++i) x[static_cast<size_t>(q + i)] = internal[static_cast<size_t>(i)];
    double w = 1.0;
    for (const auto& e : dg.graph.edges) {
      Vec3 dx = {x[e.first][0] - x[e.second][0], x[e.first][1] - x[e.second][1],
                 x[e.first][2] - x[e.second][2]};
      w *= gp.g(dx);
      if (w == 0.0) break;
    }
    if (w != 0.0) {
      for (int j = 0; j < q + p; ++j) {
        int pj = dg.perm[static_cast<size_t>(j)];
        Vec3 dx = {x[static_cast<size_t>(j)][0] - x[static_cast<size_t>(pj)][0],
                   x[static_cast<size_t>(j)][1] - x[static_cast<size_t>(pj)][1],
                   x[static_cast<size_t>(j)][2] - x[static_cast<size_t>(pj)][2]};
        w *= kernel.gamma(dx);
      }
      acc.add(w);
    }
  });
  return dg.sign * acc.value() * std::pow(torus.weight(), p);
}

double graph_family_value(const GGraph& graph, const OneBodyKernel& kernel, const GProfile& gp,
                          const std::vector<std::array<double, 3>>& ext) {
  const int q = graph.q, p = graph.p;
  if (static_cast<int>(ext.size()) != q)
    throw std::invalid_argument("graph_family_value: external point count mismatch");
  if (p > 3) throw CapExceeded("graph_family_value: direct mode caps at p <= 3");
  const DiscreteTorus& torus = gp.torus();
  const int n = q + p;

  KahanSum acc;
  for_each_config(torus, p, [&](const std::vector<Vec3>& internal) {
    std::vector<Vec3> x(static_cast<size_t>(n));
    for (int i = 0; i < q; ++i) x[static_cast<size_t>(i)] = ext[static_cast<size_t>(i)];
    for (int i = 0; i < p; ++i) x[static_cast<size_t>(q + i)] = internal[static_cast<size_t>(i)];
    double w = 1.0;
    for (const auto& e : graph.edges) {
      Vec3 dx = {x[e.first][0] - x[e.second][0], x[e.first][1] - x[e.second][1],
                 x[e.first][2] - x[e.second][2]};
      w *= gp.g(dx);
      if (w == 0.0) break;
    }
    if (w != 0.0) {
      std::vector<Vec3> pts(x.begin(), x.end());
      w *= rho_p(kernel, pts);  // sum over all permutations with signs
    }
    acc.add(w);
  });
  return acc.value() * std::pow(torus.weight(), p);
}

TruncatedCorrelation truncated_correlation(const std::vector<std::vector<int>>& clusters,
                                           const std::vector<std::array<double, 3>>& points,
                                           const OneBodyKernel& kernel) {
  const int n = static_cast<int>(points.size());
  if (n > 8) throw CapExceeded("truncated_correlation: more than 8 vertices");
  {
    std::vector<bool> seen(static_cast<size_t>(n), false);
    for (const auto& cl : clusters)
      for (int v : cl) {
        if (v < 0 || v >= n || seen[static_cast<size_t>(v)])
          throw std::invalid_argument("truncated_correlation: bad partition");
        seen[static_cast<size_t>(v)] = true;
      }
    for (bool b : seen)
      if (!b) throw std::invalid_argument("truncated_correlation: partition must cover points");
  }

  std::vector<std::vector<double>> gam(static_cast<size_t>(n),
                                       std::vector<double>(static_cast<size_t>(n)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Vec3 dx = {points[i][0] - points[j][0], points[i][1] - points[j][1],
                 points[i][2] - points[j][2]};
      gam[static_cast<size_t>(i)][static_cast<size_t>(j)] = kernel.gamma(dx);
    }

  std::vector<int> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  KahanSum acc;
  do {
    UnionFind uf(n);
    for (const auto& cl : clusters)
      for (size_t i = 1; i < cl.size(); ++i) uf.unite(cl[0], cl[i]);
    for (int v = 0; v < n; ++v) uf.unite(v, perm[static_cast<size_t>(v)]);
    if (uf.components() != 1) continue;
    double w = permutation_sign(perm);
    for (int v = 0; v < n; ++v) w *= gam[static_cast<size_t>(v)][static_cast<size_t>(perm[v])];
    acc.add(w);
  } while (std::next_permutation(perm.begin(), perm.end()));

  TruncatedCorrelation out;
  out.value = acc.value();
  if (clusters.size() == 1) {
    out.has_identity = true;
    out.identity_value = rho_p(kernel, points);
  } else if (clusters.size() == 2) {
    out.has_identity = true;
    std::vector<Vec3> a, b;
    for (int v : clusters[0]) a.push_back(points[static_cast<size_t>(v)]);
    for (int v : clusters[1]) b.push_back(points[static_cast<size_t>(v)]);
    out.identity_value = rho_p(kernel, points) - rho_p(kernel, a) * rho_p(kernel, b);
  }
  return out;
}

double normalization_series(const OneBodyKernel& kernel, const GProfile& gp, int N) {
  if (N > 4) throw CapExceeded("normalization_series: N <= 4");
  double series = 1.0;
  for (int p = 2; p <= N; ++p) {
    auto graphs = enumerate_graphs(p, 0);
    KahanSum acc;
    for_each_config(gp.torus(), p, [&](const std::vector<Vec3>& pos) {
      double W = 0.0;
      for (const auto& g : graphs) {
        double w = 1.0;
        for (const auto& e : g.edges) {
          Vec3 dx = {pos[e.first][0] - pos[e.second][0], pos[e.first][1] - pos[e.second][1],
                     pos[e.first][2] - pos[e.second][2]};
          w *= gp.g(dx);
          if (w == 0.0) break;
        }
        W += w;
      }
      if (W != 0.0) {
        std::vector<Vec3> pts(pos.begin(), pos.begin() + p);
        W *= rho_p(kernel, pts);
      }
      acc.add(W);
    });
    series += acc.value() * std::pow(gp.torus().weight(), p) / factorial(p);
  }
  return series;
}

OracleResult direct_oracle(const OneBodyKernel& kernel, const GProfile& gp, int N, int q,
                           const std::vector<std::array<double, 3>>& ext, double term_budget) {
  if (kernel.N() != N)
    throw std::invalid_argument("direct_oracle: momentum set has N = " +
                                std::to_string(kernel.N()));
  if (q > N || static_cast<int>(ext.size()) != q)
    throw std::invalid_argument("direct_oracle: bad external points");
  const DiscreteTorus& torus = gp.torus();
  const std::int64_t G = torus.nodes();
  double terms = std::pow(static_cast<double>(G), N);
  if (terms > term_budget)
    throw BudgetExceeded("direct_oracle: needs " + std::to_string(terms) + " grid terms");

  // plane-wave rows for grid nodes and external points
  const auto& ks = kernel.momenta();
  const double norm = std::pow(kernel.L(), -0.5 * kernel.d());
  std::vector<Cpx> node_rows(static_cast<size_t>(G) * N);
  for (std::int64_t g = 0; g < G; ++g) {
    auto x = torus.node(g);
    for (int k = 0; k < N; ++k) {
      double ph = ks[static_cast<size_t>(k)][0] * x[0] + ks[static_cast<size_t>(k)][1] * x[1] +
                  ks[static_cast<size_t>(k)][2] * x[2];
      node_rows[static_cast<size_t>(g) * N + k] = std::polar(norm, ph);
    }
  }
  std::vector<Cpx> ext_rows(static_cast<size_t>(q) * N);
  for (int i = 0; i < q; ++i)
    for (int k = 0; k < N; ++k) {
      double ph = ks[static_cast<size_t>(k)][0] * ext[static_cast<size_t>(i)][0] +
                  ks[static_cast<size_t>(k)][1] * ext[static_cast<size_t>(i)][1] +
                  ks[static_cast<size_t>(k)][2] * ext[static_cast<size_t>(i)][2];
      ext_rows[static_cast<size_t>(i) * N + k] = std::polar(norm, ph);
    }

  auto jastrow_sq = [&](const std::vector<Vec3>& x) {
    double w = 1.0;
    const int n = static_cast<int>(x.size());
    for (int i = 0; i < n && w != 0.0; ++i)
      for (int j = i + 1; j < n; ++j) {
        Vec3 dx = {x[i][0] - x[j][0], x[i][1] - x[j][1], x[i][2] - x[j][2]};
        w *= 1.0 + gp.g(dx);
        if (w == 0.0) break;
      }
    return w;
  };

  auto det_abs2 = [&](const std::vector<const Cpx*>& rows) {
    std::vector<Cpx> a(static_cast<size_t>(N) * N);
    for (int i = 0; i < N; ++i)
      for (int k = 0; k < N; ++k) a[static_cast<size_t>(i) * N + k] = rows[static_cast<size_t>(i)][k];
    // LU determinant
    Cpx det = 1.0;
    for (int col = 0; col < N; ++col) {
      int piv = col;
      for (int row = col + 1; row < N; ++row)
        if (std::abs(a[static_cast<size_t>(row) * N + col]) >
            std::abs(a[static_cast<size_t>(piv) * N + col]))
          piv = row;
      if (piv != col) {
        for (int k = 0; k < N; ++k)
          std::swap(a[static_cast<size_t>(col) * N + k], a[static_cast<size_t>(piv) * N + k]);
        det = -det;
      }
      Cpx pv = a[static_cast<size_t>(col) * N + col];
      if (pv == Cpx(0.0)) return 0.0;
      det *= pv;
      for (int row = col + 1; row < N; ++row) {
        Cpx f = a[static_cast<size_t>(row) * N + col] / pv;
        for (int k = col; k < N; ++k)
          a[static_cast<size_t>(row) * N + k] -= f * a[static_cast<size_t>(col) * N + k];
      }
    }
    return std::norm(det);
  };

  // normalization: all N coordinates on the grid
  std::int64_t totalN = 1;
  for (int i = 0; i < N; ++i) totalN *= G;
  double cn = parallel_sum(totalN, [&](std::int64_t cfg) {
    std::vector<Vec3> x(static_cast<size_t>(N));
    std::vector<const Cpx*> rows(static_cast<size_t>(N));
    std::int64_t rem = cfg;
    for (int i = 0; i < N; ++i) {
      std::int64_t g = rem % G;
      rem /= G;
      x[static_cast<size_t>(i)] = torus.node(g);
      rows[static_cast<size_t>(i)] = &node_rows[static_cast<size_t>(g) * N];
    }
    double w = jastrow_sq(x);
    if (w == 0.0) return 0.0;
    return w * det_abs2(rows);
  });
  OracleResult out;
  out.cn_over_fact = cn * std::pow(torus.weight(), N) / factorial(N);

  if (q > 0) {
    std::int64_t total = 1;
    for (int i = 0; i < N - q; ++i) total *= G;
    double rho = parallel_sum(total, [&](std::int64_t cfg) {
      std::vector<Vec3> x(static_cast<size_t>(N));
      std::vector<const Cpx*> rows(static_cast<size_t>(N));
      for (int i = 0; i < q; ++i) {
        x[static_cast<size_t>(i)] = ext[static_cast<size_t>(i)];
        rows[static_cast<size_t>(i)] = &ext_rows[static_cast<size_t>(i) * N];
      }
      std::int64_t rem = cfg;
      for (int i = q; i < N; ++i) {
        std::int64_t g = rem % G;
        rem /= G;
        x[static_cast<size_t>(i)] = torus.node(g);
        rows[static_cast<size_t>(i)] = &node_rows[static_cast<size_t>(g) * N];
      }
      double w = jastrow_sq(x);
      if (w == 0.0) return 0.0;
      return w * det_abs2(rows);
    });
    double nfall = 1.0;
    for (int i = 0; i < q; ++i) nfall *= static_cast<double>(N - i);
    // rho_Jas = N!/(N-q)! int |psi|^2 = nfall * (grid sum) h^{d(N-q)} / C_N
    out.rho_q_jas = nfall * rho * std::pow(torus.weight(), N - q) /
                    (out.cn_over_fact * factorial(N));
  }
  return out;
}

double finite_ggr_density_sum(const OneBodyKernel& kernel, const GProfile& gp, int N, int q,
                              const std::vector<std::array<double, 3>>& ext) {
  // p = 0 term: the free reduced density
  std::vector<Vec3> pts(ext.begin(), ext.end());
  double total = rho_p(kernel, pts);
  for (int p = 1; p <= N - q; ++p) {
    auto graphs = enumerate_graphs(p, q);
    double sum_p = 0.0;
    for (const auto& g : graphs) sum_p += graph_family_value(g, kernel, gp, ext);
    total += sum_p / factorial(p);
  }
  return total;
}

ConvergenceParameter convergence_parameter(double s, double a, double rho, double b, double N,
                                           int d, double threshold) {
  if (a < 0.0 || rho <= 0.0 || (a > 0.0 && b <= a) || N < 1.0)
    throw std::invalid_argument("convergence_parameter: bad inputs");
  ConvergenceParameter out;
  out.threshold = threshold;
  if (a == 0.0) {
    out.value = 0.0;
    out.convergent = true;
    return out;
  }
  const double lg = std::log(b / a);
  const double lN = std::log(N);
  switch (d) {
    case 3: out.value = s * a * a * a * rho * lg * lN * lN * lN; break;
    case 2: out.value = s * a * a * rho * lg * lN * lN; break;
    case 1: out.value = a * rho * lg * lN; break;
    default: throw std::invalid_argument("convergence_parameter: d in {1,2,3}");
  }
  out.convergent = out.value < threshold;
  return out;
}

TreeGraphCheck tree_graph_check(int n, const std::vector<std::vector<double>>& g) {
  if (n > 6) throw CapExceeded("tree_graph_check: n <= 6");
  if (static_cast<int>(g.size()) != n)
    throw std::invalid_argument("tree_graph_check: matrix size mismatch");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (g[i][j] < -1.0 - 1e-12 || g[i][j] > 1e-12)
        throw std::invalid_argument("tree_graph_check: need -1 <= g <= 0");
      edges.push_back({i, j});
    }
  TreeGraphCheck out;

  const std::uint64_t m = edges.size();
  KahanSum lhs;
  for (std::uint64_t mask = 0; mask < (1ull << m); ++mask) {
    UnionFind uf(n);
    int used = 0;
    double w = 1.0;
    for (std::uint64_t b = 0; b < m; ++b)
      if (mask & (1ull << b)) {
        uf.unite(edges[b].first, edges[b].second);
        w *= g[edges[b].first][edges[b].second];
        ++used;
      }
    if (uf.components() != 1) continue;
    lhs.add(w);
    if (used == n - 1) ++out.tree_count;
  }
  out.lhs = std::abs(lhs.value());

  // spanning trees by Pruefer sequences
  KahanSum rhs;
  std::int64_t count = 0;
  if (n == 1) {
    rhs.add(1.0);
    count = 1;
  } else if (n == 2) {
    rhs.add(std::abs(g[0][1]));
    count = 1;
  } else {
    std::vector<int> pruefer(static_cast<size_t>(n - 2), 0);
    std::int64_t total = 1;
    for (int i = 0; i < n - 2; ++i) total *= n;
    for (std::int64_t code = 0; code < total; ++code) {
      std::int64_t rem = code;
      for (int i = 0; i < n - 2; ++i) {
        pruefer[static_cast<size_t>(i)] = static_cast<int>(rem % n);
        rem /= n;
      }
      // decode
      std::vector<int> degree(static_cast<size_t>(n), 1);
      for (int v : pruefer) ++degree[static_cast<size_t>(v)];
      double w = 1.0;
      std::vector<int> deg = degree;
      std::vector<bool> done(static_cast<size_t>(n), false);
      for (int i = 0; i < n - 2; ++i) {
        int leaf = -1;
        for (int v = 0; v < n; ++v)
          if (!done[static_cast<size_t>(v)] && deg[static_cast<size_t>(v)] == 1) {
            leaf = v;
            break;
          }
        int other = pruefer[static_cast<size_t>(i)];
        w *= std::abs(g[std::min(leaf, other)][std::max(leaf, other)]);
        done[static_cast<size_t>(leaf)] = true;
        --deg[static_cast<size_t>(other)];
        --deg[static_cast<size_t>(leaf)];
      }
      int u = -1, v = -1;
      for (int t = 0; t < n; ++t)
        if (!done[static_cast<size_t>(t)]) {
          if (u < 0)
            u = t;
          else
            v = t;
        }
      w *= std::abs(g[std::min(u, v)][std::max(u, v)]);
      rhs.add(w);
      ++count;
    }
  }
  out.rhs = rhs.value();
  out.cayley = count;
  out.ok = out.lhs <= out.rhs * (1.0 + 1e-12) + 1e-12;
  return out;
}

double small_diagram_catalog(const std::string& id, const OneBodyKernel& kernel,
                             const GProfile& gp, const std::vector<std::array<double, 3>>& ext) {
  const DiscreteTorus& torus = gp.torus();
  const int d = kernel.d();
  const double Ld = std::pow(kernel.L(), d);
  const auto& ks = kernel.momenta();
  const int N = static_cast<int>(kernel.N());

  auto ghat_tab = [&]() {
    // ghat on all pair differences k_a - k_b
    std::map<std::array<std::int64_t, 3>, double> tab;
    const double u = 2.0 * M_PI / kernel.L();
    for (int a2 = 0; a2 < N; ++a2)
      for (int b = 0; b < N; ++b) {
        std::array<std::int64_t, 3> key = {
            llround((ks[a2][0] - ks[b][0]) / u), llround((ks[a2][1] - ks[b][1]) / u),
            llround((ks[a2][2] - ks[b][2]) / u)};
        if (!tab.count(key))
          tab[key] = gp.ghat({ks[a2][0] - ks[b][0], ks[a2][1] - ks[b][1], ks[a2][2] - ks[b][2]});
      }
    return tab;
  };
  const double uu = 2.0 * M_PI / kernel.L();
  auto key_of = [&](const Vec3& dk) {
    return std::array<std::int64_t, 3>{llround(dk[0] / uu), llround(dk[1] / uu),
                                       llround(dk[2] / uu)};
  };

  if (id == "A") {
    if (ext.size() != 2) throw std::invalid_argument("catalog A: q = 2");
    // (1/L^{3d}) sum_{ka kb kc kd} e^{i(ka-kb)(x1-x2)} chi(kb-ka = kc-kd) ghat(ka-kb)
    auto tab = ghat_tab();
    std::map<std::array<std::int64_t, 3>, std::int64_t> counts;
    for (const auto& ka : ks)
      for (const auto& kb : ks) counts[key_of({ka[0] - kb[0], ka[1] - kb[1], ka[2] - kb[2]})]++;
    Vec3 x12 = {ext[0][0] - ext[1][0], ext[0][1] - ext[1][1], ext[0][2] - ext[1][2]};
    KahanSum acc;
    for (const auto& ka : ks)
      for (const auto& kb : ks) {
        Vec3 dk = {ka[0] - kb[0], ka[1] - kb[1], ka[2] - kb[2]};
        double phase = dk[0] * x12[0] + dk[1] * x12[1] + dk[2] * x12[2];
        auto key = key_of(dk);
        std::array<std::int64_t, 3> mkey = {-key[0], -key[1], -key[2]};
        acc.add(std::cos(phase) * tab[key] * static_cast<double>(counts[mkey]));
      }
    return acc.value() / std::pow(Ld, 3);
  }
  if (id == "B1") {
    if (ext.size() != 2) throw std::invalid_argument("catalog B1: q = 2");
    // (1/L^{3d}) sum_{ka kb kc} e^{i(kb-kc)(x1-x2)} ghat(kb-ka)
    auto tab = ghat_tab();
    Vec3 x12 = {ext[0][0] - ext[1][0], ext[0][1] - ext[1][1], ext[0][2] - ext[1][2]};
    KahanSum re, im;
    for (const auto& kb : ks) {
      double gsum = 0.0;
      for (const auto& ka : ks)
        gsum += tab[key_of({kb[0] - ka[0], kb[1] - ka[1], kb[2] - ka[2]})];
      double pb = kb[0] * x12[0] + kb[1] * x12[1] + kb[2] * x12[2];
      re.add(gsum * std::cos(pb));
      im.add(gsum * std::sin(pb));
    }
    double cre = 0.0, cim = 0.0;
    for (const auto& kc : ks) {
      double pc = kc[0] * x12[0] + kc[1] * x12[1] + kc[2] * x12[2];
      cre += std::cos(pc);
      cim += std::sin(pc);
    }
    // (sum_b gsum e^{i kb x}) * (sum_c e^{-i kc x}), real part (value is real)
    double val = re.value() * cre + im.value() * cim;
    return val / std::pow(Ld, 3);
  }
  if (id == "B2") {
    if (ext.size() != 2) throw std::invalid_argument("catalog B2: q = 2");
    Vec3 x12 = {ext[0][0] - ext[1][0], ext[0][1] - ext[1][1], ext[0][2] - ext[1][2]};
    double gam = kernel.gamma(x12);
    return -gam * gam * kernel.rho() * gp.ghat_zero();
  }
  if (id == "C" || id == "D1_B1") {
    if (ext.size() != 2) throw std::invalid_argument("catalog C: q = 2");
    // pi-summed: int g13 g23 rho^{(3)}(x1,x2,x3) dx3
    KahanSum acc;
    for_each_config(torus, 1, [&](const std::vector<Vec3>& pos) {
      const Vec3& x3 = pos[0];
      Vec3 d13 = {ext[0][0] - x3[0], ext[0][1] - x3[1], ext[0][2] - x3[2]};
      Vec3 d23 = {ext[1][0] - x3[0], ext[1][1] - x3[1], ext[1][2] - x3[2]};
      double w = gp.g(d13) * gp.g(d23);
      if (w != 0.0) w *= rho_p(kernel, {ext[0], ext[1], x3});
      acc.add(w);
    });
    return acc.value() * torus.weight();
  }
  if (id == "T3_linked") {
    if (ext.size() != 3) throw std::invalid_argument("catalog T3: q = 3");
    auto tab = ghat_tab();
    std::map<std::array<std::int64_t, 3>, std::int64_t> counts;
    for (const auto& ka : ks)
      for (const auto& kb : ks) counts[key_of({ka[0] - kb[0], ka[1] - kb[1], ka[2] - kb[2]})]++;
    // -(1/L^{4d}) sum_{k1 k2 k3} e^{i(k1-k3)x1} e^{i(k3-k2)x2} e^{i(k2-k1)x3}
    //            ghat(k1-k2) cnt(k2-k1)
    KahanSum acc;
    for (int i1 = 0; i1 < N; ++i1)
      for (int i2 = 0; i2 < N; ++i2) {
        Vec3 d12 = {ks[i1][0] - ks[i2][0], ks[i1][1] - ks[i2][1], ks[i1][2] - ks[i2][2]};
        auto key = key_of(d12);
        std::array<std::int64_t, 3> mkey = {-key[0], -key[1], -key[2]};
        double base = tab[key] * static_cast<double>(counts[mkey]);
        if (base == 0.0) continue;
        for (int i3 = 0; i3 < N; ++i3) {
          double phase = (ks[i1][0] - ks[i3][0]) * ext[0][0] +
                         (ks[i1][1] - ks[i3][1]) * ext[0][1] +
                         (ks[i1][2] - ks[i3][2]) * ext[0][2] +
                         (ks[i3][0] - ks[i2][0]) * ext[1][0] +
                         (ks[i3][1] - ks[i2][1]) * ext[1][1] +
                         (ks[i3][2] - ks[i2][2]) * ext[1][2] +
                         (ks[i2][0] - ks[i1][0]) * ext[2][0] +
                         (ks[i2][1] - ks[i1][1]) * ext[2][1] +
                         (ks[i2][2] - ks[i1][2]) * ext[2][2];
          acc.add(base * std::cos(phase));
        }
      }
    return -acc.value() / std::pow(Ld, 4);
  }
  if (id == "T3_twocomp") {
    if (ext.size() != 3) throw std::invalid_argument("catalog T3: q = 3");
    auto tab = ghat_tab();
    // -(1/L^{4d}) [sum_{k1 k2} ghat(k1-k2)] (L^d gamma(x2-x3))^2
    double gsum = 0.0;
    for (const auto& k1 : ks)
      for (const auto& k2 : ks)
        gsum += tab[key_of({k1[0] - k2[0], k1[1] - k2[1], k1[2] - k2[2]})];
    Vec3 x23 = {ext[1][0] - ext[2][0], ext[1][1] - ext[2][1], ext[1][2] - ext[2][2]};
    double gam = kernel.gamma(x23);
    return -gsum * gam * gam / std::pow(Ld, 2);
  }
  if (id == "D1_A1" || id == "D1_A2" || id == "D1_B2") {
    if (ext.size() != 2) throw std::invalid_argument("catalog D1: q = 2");
    int p = id == "D1_B2" ? 3 : 2;
    KahanSum acc;
    for_each_config(torus, p, [&](const std::vector<Vec3>& pos) {
      std::vector<Vec3> x = {ext[0], ext[1]};
      for (const auto& v : pos) x.push_back(v);
      double w = 1.0;
      std::vector<std::vector<int>> clusters;
      if (id == "D1_A1") {
        Vec3 d02 = {x[0][0] - x[2][0], x[0][1] - x[2][1], x[0][2] - x[2][2]};
        Vec3 d03 = {x[0][0] - x[3][0], x[0][1] - x[3][1], x[0][2] - x[3][2]};
        Vec3 d23 = {x[2][0] - x[3][0], x[2][1] - x[3][1], x[2][2] - x[3][2]};
        w = gp.g(d02) * gp.g(d03) * gp.g(d23);
        clusters = {{0, 2, 3}, {1}};
      } else if (id == "D1_A2") {
        Vec3 d02 = {x[0][0] - x[2][0], x[0][1] - x[2][1], x[0][2] - x[2][2]};
        Vec3 d13 = {x[1][0] - x[3][0], x[1][1] - x[3][1], x[1][2] - x[3][2]};
        w = gp.g(d02) * gp.g(d13);
        clusters = {{0, 2}, {1, 3}};
      } else {
        Vec3 d02 = {x[0][0] - x[2][0], x[0][1] - x[2][1], x[0][2] - x[2][2]};
        Vec3 d12 = {x[1][0] - x[2][0], x[1][1] - x[2][1], x[1][2] - x[2][2]};
        Vec3 d34 = {x[3][0] - x[4][0], x[3][1] - x[4][1], x[3][2] - x[4][2]};
        w = gp.g(d02) * gp.g(d12) * gp.g(d34);
        clusters = {{0, 1, 2}, {3, 4}};
      }
      if (w != 0.0) {
        auto tc = truncated_correlation(clusters, x, kernel);
        w *= tc.identity_value;  // two-cluster identity form
      }
      acc.add(w);
    });
    return acc.value() * std::pow(torus.weight(), p);
  }
  throw UnknownId("small_diagram_catalog: unknown id " + id);
}

double small_diagram_generic(const std::string& id, const OneBodyKernel& kernel,
                             const GProfile& gp, const std::vector<std::array<double, 3>>& ext) {
  auto pi_summed = [&](const GGraph& graph, const std::vector<std::vector<int>>& clusters) {
    // sum over permutations keeping the diagram linked, evaluated through the
    // truncated-correlation definition under the integral
    const int p = graph.p;
    KahanSum acc;
    for_each_config(gp.torus(), p, [&](const std::vector<Vec3>& pos) {
      std::vector<Vec3> x(ext.begin(), ext.end());
      for (const auto& v : pos) x.push_back(v);
      double w = 1.0;
      for (const auto& e : graph.edges) {
        Vec3 dx = {x[e.first][0] - x[e.second][0], x[e.first][1] - x[e.second][1],
                   x[e.first][2] - x[e.second][2]};
        w *= gp.g(dx);
        if (w == 0.0) break;
      }
      if (w != 0.0) {
        auto tc = truncated_correlation(clusters, x, kernel);
        w *= tc.value;
      }
      acc.add(w);
    });
    return acc.value() * std::pow(gp.torus().weight(), p);
  };

  if (id == "A") {
    GGraph g{2, 2, {{2, 3}}};
    return diagram_value(make_diagram(g, {2, 3, 0, 1}), kernel, gp, ext);
  }
  if (id == "B1") {
    GGraph g{2, 1, {{0, 2}}};
    return diagram_value(make_diagram(g, {2, 0, 1}), kernel, gp, ext);
  }
  if (id == "B2") {
    GGraph g{2, 1, {{1, 2}}};
    return diagram_value(make_diagram(g, {1, 0, 2}), kernel, gp, ext);
  }
  if (id == "C" || id == "D1_B1") {
    GGraph g{2, 1, {{0, 2}, {1, 2}}};
    // all pi in S_3 are linked for this connected graph
    double total = 0.0;
    std::vector<int> perm = {0, 1, 2};
    do {
      total += diagram_value(make_diagram(g, perm), kernel, gp, ext);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
  }
  if (id == "T3_linked") {
    GGraph g{3, 2, {{3, 4}}};
    return diagram_value(make_diagram(g, {3, 0, 4, 1, 2}), kernel, gp, ext);
  }
  if (id == "T3_twocomp") {
    GGraph g{3, 2, {{3, 4}}};
    return diagram_value(make_diagram(g, {3, 2, 1, 4, 0}), kernel, gp, ext);
  }
  if (id == "D1_A1") return pi_summed(GGraph{2, 2, {{0, 2}, {0, 3}, {2, 3}}}, {{0, 2, 3}, {1}});
  if (id == "D1_A2") return pi_summed(GGraph{2, 2, {{0, 2}, {1, 3}}}, {{0, 2}, {1, 3}});
  if (id == "D1_B2")
    return pi_summed(GGraph{2, 3, {{0, 2}, {1, 2}, {3, 4}}}, {{0, 1, 2}, {3, 4}});
  throw UnknownId("small_diagram_generic: unknown id " + id);
}

}  // namespace fermigas
