#include "fermigas/fermi_surface.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "fermigas/numerics.hpp"

namespace fermigas {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Float50 = boost::multiprecision::cpp_bin_float_50;

namespace {

// ---------------------------------------------------------------- primes ---

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull})
    if (n % p == 0) return n == p;
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // deterministic Miller-Rabin witness set for 64-bit inputs
  for (std::uint64_t a :
       {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (a % n == 0) continue;
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::uint64_t next_prime(std::uint64_t n) {
  while (!is_prime(n)) ++n;
  return n;
}

// --------------------------------------------------------- rng / sequence ---

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double unit_double(std::uint64_t bits) { return (bits >> 11) * 0x1.0p-53; }

// ----------------------------------------------------- symmetry expansion ---

using Vec3d = std::array<double, 3>;
using Tri64 = std::array<std::int64_t, 3>;

const int kPerms3[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};

// s decomposed into whole orbits: generic orbits plus optional orbits on the
// symmetry strata (axes, body diagonals, face diagonals).
struct OrbitPlan {
  long generic = 0;
  bool axis = false;
  bool body_diag = false;
  bool face_diag = false;
};

OrbitPlan plan_orbits(int d, long s) {
  const long generic_size = d == 3 ? 48 : 8;
  struct Extra {
    long size;
    bool ax, bd, fd;
  };
  std::vector<Extra> extras;
  if (d == 3) {
    extras = {{0, false, false, false}, {6, true, false, false},  {8, false, true, false},
              {12, false, false, true}, {14, true, true, false},  {18, true, false, true},
              {20, false, true, true},  {26, true, true, true}};
  } else {
    extras = {{0, false, false, false}, {4, true, false, false}, {8, true, true, false}};
  }
  for (const auto& e : extras) {
    long rem = s - e.size;
    if (rem >= 0 && rem % generic_size == 0 && s > 0) {
      OrbitPlan plan;
      plan.generic = rem / generic_size;
      plan.axis = e.ax;
      plan.body_diag = e.bd;
      plan.face_diag = e.fd;
      if (plan.generic > 0 || e.size > 0) return plan;
    }
  }
  throw SymmetryOrbitMismatch("s = " + std::to_string(s) +
                              " is not a sum of whole symmetry orbits");
}

// Representatives in the open fundamental sector (0 < x < y < z on the unit
// sphere for d = 3; polar angle in (pi/4, pi/2) for d = 2), from an R2
// low-discrepancy sequence with a margin that keeps every orbit generic.
std::vector<Vec3d> sector_representatives(int d, long m, std::uint64_t seed) {
  std::vector<Vec3d> reps;
  if (m <= 0) return reps;
  std::uint64_t st = seed * 0x9e3779b97f4a7c15ull + 1;
  double sh1 = unit_double(splitmix64(st));
  double sh2 = unit_double(splitmix64(st));
  if (d == 3) {
    const double g = 1.32471795724474602596;  // plastic number
    const double a1 = 1.0 / g, a2 = 1.0 / (g * g);
    const Vec3d A = {0.0, 0.0, 1.0};
    const Vec3d B = {1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)};
    const Vec3d C = {0.0, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
    const double margin = 0.14;
    for (long i = 0; i < m; ++i) {
      double u = std::fmod(0.5 + a1 * (i + 1) + sh1, 1.0);
      double v = std::fmod(0.5 + a2 * (i + 1) + sh2, 1.0);
      if (u + v > 1.0) {
        u = 1.0 - u;
        v = 1.0 - v;
      }
      double w0 = (1.0 - 3.0 * margin) * (1.0 - u - v) + margin;
      double w1 = (1.0 - 3.0 * margin) * u + margin;
      double w2 = (1.0 - 3.0 * margin) * v + margin;
      Vec3d p = {w0 * A[0] + w1 * B[0] + w2 * C[0], w0 * A[1] + w1 * B[1] + w2 * C[1],
                 w0 * A[2] + w1 * B[2] + w2 * C[2]};
      double nrm = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
      reps.push_back({p[0] / nrm, p[1] / nrm, p[2] / nrm});
    }
  } else {
    const double phi = 0.61803398874989485;
    const double margin = 0.08;
    for (long i = 0; i < m; ++i) {
      double t = std::fmod(0.5 + phi * (i + 1) + sh1, 1.0);
      double alpha = M_PI / 4.0 + M_PI / 4.0 * (margin + t * (1.0 - 2.0 * margin));
      reps.push_back({std::cos(alpha), std::sin(alpha), 0.0});
    }
  }
  return reps;
}

std::vector<Vec3d> expand_full_group(const std::vector<Vec3d>& reps, int d) {
  std::set<Vec3d> out;
  if (d == 3) {
    for (const auto& r : reps)
      for (const auto& perm : kPerms3)
        for (int sgn = 0; sgn < 8; ++sgn) {
          Vec3d q = {r[perm[0]], r[perm[1]], r[perm[2]]};
          for (int c = 0; c < 3; ++c) {
            if (sgn & (1 << c)) q[c] = -q[c];
            if (q[c] == 0.0) q[c] = 0.0;  // no -0.0 in the dedup set
          }
          out.insert(q);
        }
  } else {
    for (const auto& r : reps)
      for (int swap = 0; swap < 2; ++swap)
        for (int sgn = 0; sgn < 4; ++sgn) {
          Vec3d q = {swap ? r[1] : r[0], swap ? r[0] : r[1], 0.0};
          for (int c = 0; c < 2; ++c) {
            if (sgn & (1 << c)) q[c] = -q[c];
            if (q[c] == 0.0) q[c] = 0.0;
          }
          out.insert(q);
        }
  }
  return {out.begin(), out.end()};
}

// Deterministic tangent-plane repulsion of the generic representatives; the
// whole symmetry orbit acts as the neighbour set, so wall margins emerge from
// repulsion by mirror images. Special orbit points stay fixed anchors.
void relax_representatives(std::vector<Vec3d>& generic, const std::vector<Vec3d>& fixed, int d,
                           long s_total) {
  if (generic.empty()) return;
  const double step0 = 0.08 / std::sqrt(static_cast<double>(s_total));
  for (int iter = 0; iter < 60; ++iter) {
    std::vector<Vec3d> reps = generic;
    reps.insert(reps.end(), fixed.begin(), fixed.end());
    std::vector<Vec3d> cloud = expand_full_group(reps, d);
    const double step = step0 * (1.0 - 0.5 * iter / 60.0);
    for (auto& p : generic) {
      Vec3d F = {0, 0, 0};
      for (const auto& q : cloud) {
        double dx = p[0] - q[0], dy = p[1] - q[1], dz = p[2] - q[2];
        double d2 = dx * dx + dy * dy + dz * dz;
        if (d2 < 1e-18) continue;  // the point itself
        double w = 1.0 / (d2 * d2);
        F[0] += dx * w;
        F[1] += dy * w;
        F[2] += dz * w;
      }
      double fn = p[0] * F[0] + p[1] * F[1] + p[2] * F[2];
      for (int c = 0; c < 3; ++c) F[c] -= fn * p[c];  // tangent projection
      double fmag = std::sqrt(F[0] * F[0] + F[1] * F[1] + F[2] * F[2]);
      if (fmag < 1e-30) continue;
      for (int c = 0; c < 3; ++c) p[c] += step * F[c] / fmag;
      double nrm = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
      for (int c = 0; c < 3; ++c) p[c] /= nrm;
      // canonicalize back into the fundamental sector
      for (int c = 0; c < d; ++c) p[c] = std::abs(p[c]);
      if (d == 3)
        std::sort(p.begin(), p.end());
      else if (p[0] > p[1])
        std::swap(p[0], p[1]);
    }
  }
}

// --------------------------------------------------------- exact geometry ---

struct ExactGeometry {
  int d = 3;
  std::vector<std::array<BigInt, 3>> X;  // corners on a common integer lattice
  BigInt D = 1;                          // X = D * corner
  struct Facet {
    std::array<BigInt, 3> n;  // outward normal
    BigInt off;               // n . X <= off inside; off > 0 (origin interior)
    std::vector<int> verts;
  };
  std::vector<Facet> facets;
  Rational volume;  // exact volume of the unscaled hull
};

std::array<BigInt, 3> cross(const std::array<BigInt, 3>& a, const std::array<BigInt, 3>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

BigInt dot(const std::array<BigInt, 3>& a, const std::array<BigInt, 3>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

// Facets as maximal supporting planes: a cheap double prefilter over corner
// triples followed by exact integer certification. Symmetric corner sets
// genuinely produce polygonal (non-triangular) facets, so facets are stored
// with their full vertex lists and fanned afterwards.
void build_facets_3d(ExactGeometry& geo) {
  const size_t n = geo.X.size();
  if (n < 4) throw DegenerateHull("fewer than 4 corners");
  std::vector<Vec3d> P(n);
  double scale = 0.0;
  for (size_t i = 0; i < n; ++i)
    for (int c = 0; c < 3; ++c)
      scale = std::max(scale, std::abs(static_cast<double>(geo.X[i][c])));
  for (size_t i = 0; i < n; ++i)
    for (int c = 0; c < 3; ++c) P[i][c] = static_cast<double>(geo.X[i][c]) / scale;

  std::set<std::vector<int>> seen;
  const double eps = 1e-9;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      for (size_t k = j + 1; k < n; ++k) {
        Vec3d u = {P[j][0] - P[i][0], P[j][1] - P[i][1], P[j][2] - P[i][2]};
        Vec3d v = {P[k][0] - P[i][0], P[k][1] - P[i][1], P[k][2] - P[i][2]};
        Vec3d nn = {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2],
                    u[0] * v[1] - u[1] * v[0]};
        double nrm = std::sqrt(nn[0] * nn[0] + nn[1] * nn[1] + nn[2] * nn[2]);
        if (nrm < 1e-12) continue;
        for (int c = 0; c < 3; ++c) nn[c] /= nrm;
        double lo = 0.0, hi = 0.0;
        bool reject = false;
        for (size_t l = 0; l < n && !reject; ++l) {
          double dd = nn[0] * (P[l][0] - P[i][0]) + nn[1] * (P[l][1] - P[i][1]) +
                      nn[2] * (P[l][2] - P[i][2]);
          lo = std::min(lo, dd);
          hi = std::max(hi, dd);
          if (lo < -eps && hi > eps) reject = true;
        }
        if (reject) continue;

        auto U = std::array<BigInt, 3>{geo.X[j][0] - geo.X[i][0], geo.X[j][1] - geo.X[i][1],
                                       geo.X[j][2] - geo.X[i][2]};
        auto V = std::array<BigInt, 3>{geo.X[k][0] - geo.X[i][0], geo.X[k][1] - geo.X[i][1],
                                       geo.X[k][2] - geo.X[i][2]};
        auto N = cross(U, V);
        BigInt off = dot(N, geo.X[i]);
        if (off == 0) continue;
        if (off < 0) {
          for (auto& c : N) c = -c;
          off = -off;
        }
        std::vector<int> on;
        bool support = true;
        for (size_t l = 0; l < n; ++l) {
          BigInt dl = dot(N, geo.X[l]);
          if (dl > off) {
            support = false;
            break;
          }
          if (dl == off) on.push_back(static_cast<int>(l));
        }
        if (!support || on.size() < 3) continue;
        std::sort(on.begin(), on.end());
        if (seen.insert(on).second) {
          ExactGeometry::Facet f;
          f.n = N;
          f.off = off;
          f.verts = on;
          geo.facets.push_back(std::move(f));
        }
      }
  if (geo.facets.empty()) throw DegenerateHull("no supporting planes found");

  Rational vol6 = 0;
  for (auto& f : geo.facets) {
    // cyclic order within the facet plane (double is fine for well-separated
    // corners), then exact outward orientation and exact fan volumes
    Vec3d nd;
    double nlen = 0.0;
    for (int c = 0; c < 3; ++c) {
      nd[c] = static_cast<double>(f.n[c]);
      nlen += nd[c] * nd[c];
    }
    nlen = std::sqrt(nlen);
    for (int c = 0; c < 3; ++c) nd[c] /= nlen;
    Vec3d e1 = std::abs(nd[0]) < 0.9 ? Vec3d{1, 0, 0} : Vec3d{0, 1, 0};
    Vec3d a = {e1[1] * nd[2] - e1[2] * nd[1], e1[2] * nd[0] - e1[0] * nd[2],
               e1[0] * nd[1] - e1[1] * nd[0]};
    double alen = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
    for (int c = 0; c < 3; ++c) a[c] /= alen;
    Vec3d b = {nd[1] * a[2] - nd[2] * a[1], nd[2] * a[0] - nd[0] * a[2],
               nd[0] * a[1] - nd[1] * a[0]};
    Vec3d cen = {0, 0, 0};
    std::vector<Vec3d> pv(f.verts.size());
    for (size_t t = 0; t < f.verts.size(); ++t) {
      for (int c = 0; c < 3; ++c) pv[t][c] = static_cast<double>(geo.X[f.verts[t]][c]);
      for (int c = 0; c < 3; ++c) cen[c] += pv[t][c] / static_cast<double>(f.verts.size());
    }
    std::vector<std::pair<double, int>> ang;
    for (size_t t = 0; t < f.verts.size(); ++t) {
      double xa = 0, xb = 0;
      for (int c = 0; c < 3; ++c) {
        xa += (pv[t][c] - cen[c]) * a[c];
        xb += (pv[t][c] - cen[c]) * b[c];
      }
      ang.push_back({std::atan2(xb, xa), f.verts[t]});
    }
    std::sort(ang.begin(), ang.end());
    std::vector<int> ordered;
    ordered.reserve(ang.size());
    for (auto& pr : ang) ordered.push_back(pr.second);
    BigInt det0 = dot(geo.X[ordered[0]], cross(geo.X[ordered[1]], geo.X[ordered[2]]));
    if (det0 < 0) std::reverse(ordered.begin(), ordered.end());
    f.verts = ordered;
    for (size_t t = 1; t + 1 < f.verts.size(); ++t) {
      BigInt d6 = dot(geo.X[f.verts[0]], cross(geo.X[f.verts[t]], geo.X[f.verts[t + 1]]));
      if (d6 <= 0) throw DegenerateHull("degenerate triangle in facet fan");
      vol6 += Rational(d6);
    }
  }
  geo.volume = vol6 / 6 / (Rational(geo.D) * Rational(geo.D) * Rational(geo.D));
}

void build_facets_2d(ExactGeometry& geo) {
  const size_t n = geo.X.size();
  if (n < 3) throw DegenerateHull("fewer than 3 corners");
  std::vector<std::pair<double, int>> ang;
  for (size_t i = 0; i < n; ++i)
    ang.push_back({std::atan2(static_cast<double>(geo.X[i][1]), static_cast<double>(geo.X[i][0])),
                   static_cast<int>(i)});
  std::sort(ang.begin(), ang.end());
  Rational area2 = 0;
  for (size_t t = 0; t < n; ++t) {
    int i = ang[t].second, j = ang[(t + 1) % n].second, k = ang[(t + 2) % n].second;
    BigInt cr = geo.X[i][0] * geo.X[j][1] - geo.X[i][1] * geo.X[j][0];
    if (cr <= 0) throw DegenerateHull("polygon corners not strictly convex around the origin");
    area2 += Rational(cr);
    ExactGeometry::Facet f;
    f.n = {geo.X[j][1] - geo.X[i][1], geo.X[i][0] - geo.X[j][0], BigInt(0)};
    f.off = dot(f.n, geo.X[i]);
    if (f.off <= 0) throw DegenerateHull("origin not inside the polygon");
    f.verts = {i, j};
    geo.facets.push_back(std::move(f));
    BigInt turn = (geo.X[j][0] - geo.X[i][0]) * (geo.X[k][1] - geo.X[j][1]) -
                  (geo.X[j][1] - geo.X[i][1]) * (geo.X[k][0] - geo.X[j][0]);
    if (turn <= 0) throw DegenerateHull("non-extreme polygon corner");
  }
  geo.volume = area2 / 2 / (Rational(geo.D) * Rational(geo.D));
}

ExactGeometry exact_geometry(const FermiPolyhedron& poly) {
  ExactGeometry geo;
  geo.d = poly.d;
  BigInt D1 = poly.denoms[0], D2 = poly.denoms[1], D3 = poly.denoms[2];
  if (poly.d == 3)
    geo.D = D1 * D2 * D3;
  else
    geo.D = D1 * D2;
  geo.X.resize(poly.corners.size());
  for (size_t i = 0; i < poly.corners.size(); ++i) {
    if (poly.d == 3) {
      geo.X[i] = {BigInt(poly.corners[i][0]) * D2 * D3, BigInt(poly.corners[i][1]) * D1 * D3,
                  BigInt(poly.corners[i][2]) * D1 * D2};
    } else {
      geo.X[i] = {BigInt(poly.corners[i][0]) * D2, BigInt(poly.corners[i][1]) * D1, BigInt(0)};
    }
  }
  if (poly.d == 3)
    build_facets_3d(geo);
  else
    build_facets_2d(geo);
  return geo;
}

bool corner_is_extreme(const ExactGeometry& geo, int ci) {
  std::vector<const std::array<BigInt, 3>*> normals;
  for (const auto& f : geo.facets)
    if (std::find(f.verts.begin(), f.verts.end(), ci) != f.verts.end()) normals.push_back(&f.n);
  if (geo.d == 2) return normals.size() >= 2;
  if (normals.size() < 3) return false;
  for (size_t a = 0; a < normals.size(); ++a)
    for (size_t b = a + 1; b < normals.size(); ++b)
      for (size_t c = b + 1; c < normals.size(); ++c)
        if (dot(*normals[a], cross(*normals[b], *normals[c])) != 0) return true;
  return false;
}

Float50 sigma_of(const ExactGeometry& geo, double target) {
  Float50 vol = static_cast<Float50>(boost::multiprecision::numerator(geo.volume)) /
                static_cast<Float50>(boost::multiprecision::denominator(geo.volume));
  Float50 t = Float50(target);
  return geo.d == 3 ? pow(t / vol, Float50(1) / 3) : sqrt(t / vol);
}

}  // namespace

double FermiPolyhedron::target_volume() const { return d == 3 ? 4.0 * M_PI / 3.0 : M_PI; }

FermiPolyhedron build_polyhedron(const PolyhedronSpec& spec) {
  if (spec.d != 2 && spec.d != 3) throw std::invalid_argument("build_polyhedron: d must be 2 or 3");
  OrbitPlan plan = plan_orbits(spec.d, spec.s);

  FermiPolyhedron poly;
  poly.d = spec.d;
  poly.s = spec.s;
  poly.Q = spec.Q;
  poly.mode = spec.mode;

  if (spec.mode == PolyhedronMode::rational) {
    if (spec.Q < 100) throw std::invalid_argument("build_polyhedron: Q too small");
    std::uint64_t q0 = next_prime(static_cast<std::uint64_t>(spec.Q));
    std::uint64_t q1 = next_prime(q0 + 1);
    std::uint64_t q2 = spec.d == 3 ? next_prime(q1 + 1) : 1;
    poly.denoms = {q0, q1, q2};
  } else {
    std::uint64_t den = 1ull << 40;
    poly.denoms = {den, den, spec.d == 3 ? den : 1};
  }

  std::vector<Vec3d> generic = sector_representatives(spec.d, plan.generic, spec.rng_seed);
  std::vector<Vec3d> fixed;
  if (plan.axis) fixed.push_back(spec.d == 3 ? Vec3d{0.0, 0.0, 1.0} : Vec3d{1.0, 0.0, 0.0});
  if (plan.body_diag) {
    double c3 = 1.0 / std::sqrt(3.0), c2 = 1.0 / std::sqrt(2.0);
    fixed.push_back(spec.d == 3 ? Vec3d{c3, c3, c3} : Vec3d{c2, c2, 0.0});
  }
  if (plan.face_diag) {
    double c2 = 1.0 / std::sqrt(2.0);
    fixed.push_back(Vec3d{0.0, c2, c2});
  }
  relax_representatives(generic, fixed, spec.d, spec.s);
  std::vector<Vec3d> reps = generic;
  reps.insert(reps.end(), fixed.begin(), fixed.end());
  std::vector<Vec3d> sphere_pts = expand_full_group(reps, spec.d);
  if (static_cast<long>(sphere_pts.size()) != spec.s)
    throw SymmetryOrbitMismatch("orbit expansion produced " + std::to_string(sphere_pts.size()) +
                                " points, expected " + std::to_string(spec.s));

  // Round one nonnegative representative per sign orbit to the rational
  // lattice and generate the sign images from the rounded integers; this
  // makes the sign-flip invariance exact by construction.
  const double radius = spec.mode == PolyhedronMode::rational
                            ? std::pow(spec.Q, spec.d == 3 ? -0.75 : -0.5)
                            : 1.0;
  std::set<Tri64> corner_set;
  std::map<Tri64, Vec3d> sources;
  for (const auto& pt : sphere_pts) {
    bool nonneg = true;
    for (int c = 0; c < spec.d; ++c) nonneg = nonneg && pt[c] >= 0.0;
    if (!nonneg) continue;
    Tri64 p = {0, 0, 0};
    for (int c = 0; c < spec.d; ++c)
      p[c] = llround(pt[c] * radius * static_cast<double>(poly.denoms[static_cast<size_t>(c)]));
    int nsign = spec.d == 3 ? 8 : 4;
    for (int sgn = 0; sgn < nsign; ++sgn) {
      Tri64 q = p;
      bool dup_sign = false;
      for (int c = 0; c < spec.d; ++c) {
        if (sgn & (1 << c)) {
          if (q[c] == 0) dup_sign = true;
          q[c] = -q[c];
        }
      }
      if (dup_sign) continue;
      auto ins = corner_set.insert(q);
      if (!ins.second) {
        std::ostringstream os;
        os << "rounding collapsed two corners at (" << q[0] << ", " << q[1] << ", " << q[2]
           << ")";
        auto src = sources.find(q);
        if (src != sources.end())
          os << "; first source (" << src->second[0] << ", " << src->second[1] << ", "
             << src->second[2] << "), second (" << pt[0] << ", " << pt[1] << ", " << pt[2] << ")";
        throw DegenerateHull(os.str());
      }
      sources[q] = pt;
    }
  }
  poly.corners.assign(corner_set.begin(), corner_set.end());
  if (static_cast<long>(poly.corners.size()) != spec.s)
    throw DegenerateHull("corner count changed by rounding: got " +
                         std::to_string(poly.corners.size()) + ", expected " +
                         std::to_string(spec.s));

  ExactGeometry geo = exact_geometry(poly);
  for (size_t i = 0; i < poly.corners.size(); ++i)
    if (!corner_is_extreme(geo, static_cast<int>(i)))
      throw DegenerateHull("corner " + std::to_string(i) + " is not an extreme point");

  Float50 sig = sigma_of(geo, poly.target_volume());
  poly.sigma = static_cast<double>(sig);
  {
    std::ostringstream os;
    os.precision(40);
    os << sig;
    poly.sigma_str = os.str();
  }
  {
    std::ostringstream osn, osd;
    osn << boost::multiprecision::numerator(geo.volume);
    osd << boost::multiprecision::denominator(geo.volume);
    poly.vol_num = osn.str();
    poly.vol_den = osd.str();
  }
  for (const auto& f : geo.facets) {
    if (poly.d == 2) {
      poly.faces.push_back({f.verts[0], f.verts[1], -1});
    } else {
      for (size_t t = 1; t + 1 < f.verts.size(); ++t)
        poly.faces.push_back({f.verts[0], f.verts[t], f.verts[t + 1]});
    }
  }

  // measured construction constants on the sigma-scaled hull
  double rmin = 1e300, rmax = 0.0, dmin = 1e300, edge_max = 0.0;
  std::vector<Vec3d> scaled(poly.corners.size());
  for (size_t i = 0; i < poly.corners.size(); ++i) {
    for (int c = 0; c < 3; ++c)
      scaled[i][c] = poly.sigma * static_cast<double>(poly.corners[i][c]) /
                     static_cast<double>(poly.denoms[static_cast<size_t>(c)]);
    double r = std::sqrt(scaled[i][0] * scaled[i][0] + scaled[i][1] * scaled[i][1] +
                         scaled[i][2] * scaled[i][2]);
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
  }
  for (size_t i = 0; i < scaled.size(); ++i)
    for (size_t j = i + 1; j < scaled.size(); ++j) {
      double d2 = 0;
      for (int c = 0; c < 3; ++c)
        d2 += (scaled[i][c] - scaled[j][c]) * (scaled[i][c] - scaled[j][c]);
      dmin = std::min(dmin, std::sqrt(d2));
    }
  for (const auto& fc : poly.faces) {
    for (int t = 0; t < (poly.d == 3 ? 3 : 2); ++t) {
      int i = fc[t], j = fc[(t + 1) % (poly.d == 3 ? 3 : 2)];
      if (j < 0) continue;
      double d2 = 0;
      for (int c = 0; c < 3; ++c) d2 += (scaled[i][c] - scaled[j][c]) * (scaled[i][c] - scaled[j][c]);
      edge_max = std::max(edge_max, std::sqrt(d2));
    }
  }
  const double evenness_scale =
      spec.d == 3 ? std::sqrt(static_cast<double>(spec.s)) : static_cast<double>(spec.s);
  poly.radial_band_C = std::max(std::abs(rmax - 1.0), std::abs(rmin - 1.0)) * spec.s;
  poly.min_pair_dist = dmin * evenness_scale;
  poly.covering_est = edge_max * evenness_scale;
  return poly;
}

bool signflip_invariant(const std::vector<std::array<std::int64_t, 3>>& corners, int d) {
  std::set<Tri64> all(corners.begin(), corners.end());
  int nsign = d == 3 ? 8 : 4;
  for (const auto& c : corners)
    for (int sgn = 1; sgn < nsign; ++sgn) {
      Tri64 q = c;
      for (int ax = 0; ax < d; ++ax)
        if (sgn & (1 << ax)) q[ax] = -q[ax];
      if (!all.count(q)) return false;
    }
  return true;
}

std::pair<double, double> hull_volume_two_ways(const FermiPolyhedron& poly) {
  ExactGeometry geo = exact_geometry(poly);
  Rational v1 = geo.volume;
  Rational v2 = 0;
  const size_t n = geo.X.size();
  std::array<Rational, 3> cen = {0, 0, 0};
  for (const auto& x : geo.X)
    for (int c = 0; c < 3; ++c) cen[c] += Rational(x[c]) / Rational(static_cast<long>(n));
  if (poly.d == 3) {
    for (const auto& f : geo.facets)
      for (size_t t = 1; t + 1 < f.verts.size(); ++t) {
        std::array<Rational, 3> A, B, C;
        for (int c = 0; c < 3; ++c) {
          A[c] = Rational(geo.X[f.verts[0]][c]) - cen[c];
          B[c] = Rational(geo.X[f.verts[t]][c]) - cen[c];
          C[c] = Rational(geo.X[f.verts[t + 1]][c]) - cen[c];
        }
        Rational det = A[0] * (B[1] * C[2] - B[2] * C[1]) - A[1] * (B[0] * C[2] - B[2] * C[0]) +
                       A[2] * (B[0] * C[1] - B[1] * C[0]);
        v2 += det / 6;
      }
    v2 /= Rational(geo.D) * Rational(geo.D) * Rational(geo.D);
  } else {
    for (const auto& f : geo.facets) {
      std::array<Rational, 2> A = {Rational(geo.X[f.verts[0]][0]) - cen[0],
                                   Rational(geo.X[f.verts[0]][1]) - cen[1]};
      std::array<Rational, 2> B = {Rational(geo.X[f.verts[1]][0]) - cen[0],
                                   Rational(geo.X[f.verts[1]][1]) - cen[1]};
      v2 += (A[0] * B[1] - A[1] * B[0]) / 2;
    }
    v2 /= Rational(geo.D) * Rational(geo.D);
  }
  return {static_cast<double>(v1), static_cast<double>(v2)};
}

double MomentumSet::rho() const { return static_cast<double>(pts.size()) / std::pow(L, d); }

MomentumSet enumerate_momenta_ball(int d, double R, double L) {
  if (R <= 0.0 || L <= 0.0) throw std::invalid_argument("enumerate_momenta_ball: bad R or L");
  MomentumSet ms;
  ms.d = d;
  ms.L = L;
  ms.kF = 2.0 * M_PI * R / L;
  ms.region = Region::ball;
  const std::int64_t jmax = static_cast<std::int64_t>(std::floor(R));
  const double R2 = R * R;
  std::vector<std::vector<Tri64>> slabs(static_cast<size_t>(2 * jmax + 1));
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t s = 0; s <= 2 * jmax; ++s) {
    std::int64_t j1 = s - jmax;
    auto& out = slabs[static_cast<size_t>(s)];
    if (d == 1) {
      if (static_cast<double>(j1 * j1) <= R2) out.push_back({j1, 0, 0});
    } else {
      for (std::int64_t j2 = -jmax; j2 <= jmax; ++j2) {
        if (d == 2) {
          if (static_cast<double>(j1 * j1 + j2 * j2) <= R2) out.push_back({j1, j2, 0});
        } else {
          for (std::int64_t j3 = -jmax; j3 <= jmax; ++j3)
            if (static_cast<double>(j1 * j1 + j2 * j2 + j3 * j3) <= R2)
              out.push_back({j1, j2, j3});
        }
      }
    }
  }
  for (auto& s : slabs) ms.pts.insert(ms.pts.end(), s.begin(), s.end());
  if (ms.pts.empty()) throw EmptySet("enumerate_momenta_ball: no lattice points");
  return ms;
}

MomentumSet enumerate_momenta(const FermiPolyhedron& poly, std::int64_t R_num, std::int64_t R_den,
                              double L) {
  if (R_num <= 0 || R_den <= 0 || L <= 0.0)
    throw std::invalid_argument("enumerate_momenta: R and L must be positive");
  const double R = static_cast<double>(R_num) / static_cast<double>(R_den);
  if (R <= 1.0) throw std::invalid_argument("enumerate_momenta: need kF L / 2 pi > 1");

  ExactGeometry geo = exact_geometry(poly);
  Float50 sig = sigma_of(geo, poly.target_volume());

  // j lies in R P = R sigma (hull(X) / D)  <=>  for every facet
  //   (n . j) <= off * R_num * sigma / (R_den * D).
  // n . j is an exact integer; the right-hand side carries the single
  // high-precision multiplication by sigma.
  struct FacetF {
    Float50 n[3];
    Float50 rhs;
    double nd[3];
    double rhsd;
    double norm;
  };
  std::vector<FacetF> fs;
  fs.reserve(geo.facets.size());
  const Float50 denD = Float50(R_den) * static_cast<Float50>(geo.D);
  for (const auto& f : geo.facets) {
    FacetF ff;
    double nrm = 0.0;
    for (int c = 0; c < 3; ++c) {
      ff.n[c] = static_cast<Float50>(f.n[c]);
      ff.nd[c] = static_cast<double>(ff.n[c]);
      nrm += ff.nd[c] * ff.nd[c];
    }
    ff.rhs = static_cast<Float50>(f.off) * Float50(R_num) * sig / denD;
    ff.rhsd = static_cast<double>(ff.rhs);
    ff.norm = std::sqrt(nrm);
    fs.push_back(ff);
  }

  MomentumSet ms;
  ms.d = poly.d;
  ms.L = L;
  ms.kF = 2.0 * M_PI * R / L;
  ms.region = Region::polyhedron;
  const double band = 1.0 + 10.0 / static_cast<double>(std::max<long>(poly.s, 8));
  const std::int64_t jmax = static_cast<std::int64_t>(std::ceil(R * band)) + 1;

  std::vector<std::vector<Tri64>> slabs(static_cast<size_t>(2 * jmax + 1));
  std::vector<long> ties(static_cast<size_t>(2 * jmax + 1), 0);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t s = 0; s <= 2 * jmax; ++s) {
    std::int64_t j1 = s - jmax;
    auto& out = slabs[static_cast<size_t>(s)];
    std::int64_t j2lo = poly.d >= 2 ? -jmax : 0, j2hi = poly.d >= 2 ? jmax : 0;
    for (std::int64_t j2 = j2lo; j2 <= j2hi; ++j2) {
      std::int64_t j3lo = poly.d >= 3 ? -jmax : 0, j3hi = poly.d >= 3 ? jmax : 0;
      for (std::int64_t j3 = j3lo; j3 <= j3hi; ++j3) {
        bool inside = true;
        bool need_exact = false;
        for (const auto& f : fs) {
          double lhs = f.nd[0] * static_cast<double>(j1) + f.nd[1] * static_cast<double>(j2) +
                       f.nd[2] * static_cast<double>(j3);
          double margin = 1e-6 * f.norm * (std::abs(static_cast<double>(j1)) +
                                           std::abs(static_cast<double>(j2)) +
                                           std::abs(static_cast<double>(j3)) + 1.0);
          if (lhs > f.rhsd + margin) {
            inside = false;
            break;
          }
          if (lhs > f.rhsd - margin) need_exact = true;
        }
        if (inside && need_exact) {
          for (const auto& f : fs) {
            Float50 lhs = f.n[0] * j1 + f.n[1] * j2 + f.n[2] * j3;
            Float50 diff = lhs - f.rhs;
            Float50 guard = Float50(1e-30) * (abs(f.rhs) + 1);
            if (abs(diff) <= guard) ++ties[static_cast<size_t>(s)];
            if (diff > 0) {
              inside = false;
              break;
            }
          }
        }
        if (inside) out.push_back({j1, poly.d >= 2 ? j2 : 0, poly.d >= 3 ? j3 : 0});
      }
    }
  }
  for (auto& s : slabs) ms.pts.insert(ms.pts.end(), s.begin(), s.end());
  for (long t : ties) ms.tie_flags += t;
  if (ms.pts.empty()) throw EmptySet("enumerate_momenta: no lattice points in the polytope");
  return ms;
}

KineticSums kinetic_sums(const MomentumSet& ms) {
  if (ms.pts.empty()) throw EmptySet("kinetic_sums: empty momentum set");
  using I128 = __int128;
  I128 s2 = 0, s4 = 0, s41 = 0;
  for (const auto& j : ms.pts) {
    I128 r2 = static_cast<I128>(j[0]) * j[0] + static_cast<I128>(j[1]) * j[1] +
              static_cast<I128>(j[2]) * j[2];
    s2 += r2;
    s4 += r2 * r2;
    I128 j1sq = static_cast<I128>(j[0]) * j[0];
    s41 += j1sq * j1sq;
  }
  const double u = ms.unit();
  KineticSums ks;
  ks.S2 = static_cast<double>(s2) * u * u;
  ks.S4 = static_cast<double>(s4) * u * u * u * u;
  ks.S4_1 = static_cast<double>(s41) * u * u * u * u;

  const double N = static_cast<double>(ms.N());
  const double rho = ms.rho();
  const int d = ms.d;
  if (d == 3) {
    double c23 = std::pow(6.0 * M_PI * M_PI, 2.0 / 3.0);
    double c13 = std::pow(6.0 * M_PI * M_PI, 1.0 / 3.0);
    ks.S2_ref = 0.6 * c23 * std::pow(rho, 2.0 / 3.0) * N;
    ks.S4_ref = 18.0 * M_PI * M_PI / 7.0 * c13 * std::pow(rho, 4.0 / 3.0) * N;
    ks.S4_1_ref = 18.0 * M_PI * M_PI / 35.0 * c13 * std::pow(rho, 4.0 / 3.0) * N;
    ks.S2_cont = std::pow(ms.L, 3) * std::pow(ms.kF, 5) / (10.0 * M_PI * M_PI);
  } else if (d == 2) {
    ks.S2_ref = 2.0 * M_PI * rho * N;
    ks.S4_ref = 16.0 / 3.0 * M_PI * M_PI * rho * rho * N;
    ks.S4_1_ref = 2.0 * M_PI * M_PI * rho * rho * N;
    ks.S2_cont = std::pow(ms.L, 2) * std::pow(ms.kF, 4) / (8.0 * M_PI);
  } else {
    ks.S2_ref = M_PI * M_PI / 3.0 * rho * rho * N;
    ks.S4_ref = std::pow(M_PI, 4) / 5.0 * std::pow(rho, 4) * N;
    ks.S4_1_ref = ks.S4_ref;
    ks.S2_cont = ms.L * std::pow(ms.kF, 3) / (3.0 * M_PI);
  }
  ks.S2_dev = ks.S2 / ks.S2_ref - 1.0;
  ks.S4_dev = ks.S4 / ks.S4_ref - 1.0;
  ks.S4_1_dev = ks.S4_1 / ks.S4_1_ref - 1.0;
  ks.S2_cont_dev = ks.S2 / ks.S2_cont - 1.0;
  return ks;
}

SymmetryDefect symmetry_defect(const MomentumSet& ms, int mu, int nu, double Q,
                               const std::function<double(double, double, double)>& t) {
  if (mu == nu || mu < 0 || nu < 0 || mu >= ms.d || nu >= ms.d)
    throw std::invalid_argument("symmetry_defect: bad axis pair");
  std::set<Tri64> orig(ms.pts.begin(), ms.pts.end());
  SymmetryDefect sd;
  const double u = ms.unit();
  double sup_t = 0.0;
  for (const auto& j : ms.pts)
    sup_t = std::max(sup_t, t(u * static_cast<double>(j[0]), u * static_cast<double>(j[1]),
                              u * static_cast<double>(j[2])));
  // The symmetric difference P_F xor F(P_F) is
  //   { j in P_F : swap(j) not in P_F } + { swap(j) : j in P_F, swap(j) not in P_F }.
  KahanSum defect;
  for (const auto& j : ms.pts) {
    Tri64 sw = j;
    std::swap(sw[mu], sw[nu]);
    if (!orig.count(sw)) {
      defect.add(t(u * static_cast<double>(j[0]), u * static_cast<double>(j[1]),
                   u * static_cast<double>(j[2])));
      defect.add(t(u * static_cast<double>(sw[0]), u * static_cast<double>(sw[1]),
                   u * static_cast<double>(sw[2])));
      sd.points += 2;
    }
  }
  sd.defect = defect.value();
  double exponent = ms.d == 3 ? -0.25 : -0.5;
  sd.ratio = sd.defect / (std::pow(Q, exponent) * static_cast<double>(ms.N()) *
                          std::max(sup_t, 1e-300));
  return sd;
}

}  // namespace fermigas
