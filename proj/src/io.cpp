#include "fermigas/io.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace fermigas {

using nlohmann::json;

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string provenance_header(const std::string& kind, const std::string& config,
                              std::uint64_t seed, const std::vector<std::string>& labels) {
  std::ostringstream os;
  os << "# fermigas v" << kVersion << " " << kind << "\n";
  os << "# config-hash " << std::hex << fnv1a(config) << std::dec << " seed " << seed << "\n";
  os << "# quantities";
  for (const auto& l : labels) os << " " << l;
  os << "\n";
  return os.str();
}

void write_scattering_csv(std::ostream& os, const ScatteringSolution& sol,
                          const std::string& config, std::uint64_t seed) {
  os << provenance_header("scattering_solution", config, seed, {"r", "f0", "f0_prime"});
  os << "# d " << sol.d << " a " << format_g17(sol.a);
  if (sol.d == 3 && sol.a0_valid)
    os << " a0 " << format_g17(sol.a0) << " Reff " << format_g17(sol.Reff);
  if (sol.d == 1) os << " a0_inv " << format_g17(sol.a0_inv);
  os << "\n";
  os << "r,f0,f0_prime\n";
  for (size_t i = 0; i < sol.r.size(); ++i)
    os << format_g17(sol.r[i]) << "," << format_g17(sol.f0[i]) << ","
       << format_g17(sol.f0_prime[i]) << "\n";
}

void write_momenta_csv(std::ostream& os, const MomentumSet& ms, const std::string& config,
                       std::uint64_t seed) {
  os << provenance_header("momentum_set", config, seed, {"j1", "j2", "j3"});
  os << "# d " << ms.d << " L " << format_g17(ms.L) << " kF " << format_g17(ms.kF) << " N "
     << ms.N() << "\n";
  os << "j1,j2,j3\n";
  for (const auto& j : ms.pts) os << j[0] << "," << j[1] << "," << j[2] << "\n";
}

std::string polyhedron_to_json(const FermiPolyhedron& poly) {
  json j;
  j["version"] = kVersion;
  j["d"] = poly.d;
  j["s"] = poly.s;
  j["Q"] = poly.Q;
  j["mode"] = poly.mode == PolyhedronMode::rational ? "rational" : "simple";
  j["primes"] = {poly.denoms[0], poly.denoms[1], poly.denoms[2]};
  j["sigma"] = poly.sigma_str;
  j["vol_num"] = poly.vol_num;
  j["vol_den"] = poly.vol_den;
  json corners = json::array();
  for (const auto& c : poly.corners) corners.push_back({c[0], c[1], c[2]});
  j["corners"] = corners;
  json faces = json::array();
  for (const auto& f : poly.faces) faces.push_back({f[0], f[1], f[2]});
  j["faces"] = faces;
  j["radial_band_C"] = poly.radial_band_C;
  j["min_pair_dist"] = poly.min_pair_dist;
  j["covering_est"] = poly.covering_est;
  return j.dump(1);
}

FermiPolyhedron polyhedron_from_json(const std::string& text) {
  json j = json::parse(text);
  FermiPolyhedron poly;
  poly.d = j.at("d").get<int>();
  poly.s = j.at("s").get<long>();
  poly.Q = j.at("Q").get<double>();
  poly.mode = j.at("mode").get<std::string>() == "simple" ? PolyhedronMode::simple
                                                          : PolyhedronMode::rational;
  auto primes = j.at("primes");
  for (int c = 0; c < 3; ++c) poly.denoms[static_cast<size_t>(c)] = primes.at(c).get<std::uint64_t>();
  poly.sigma_str = j.at("sigma").get<std::string>();
  poly.sigma = std::stod(poly.sigma_str);
  poly.vol_num = j.at("vol_num").get<std::string>();
  poly.vol_den = j.at("vol_den").get<std::string>();
  for (const auto& c : j.at("corners"))
    poly.corners.push_back({c.at(0).get<std::int64_t>(), c.at(1).get<std::int64_t>(),
                            c.at(2).get<std::int64_t>()});
  for (const auto& f : j.at("faces"))
    poly.faces.push_back({f.at(0).get<int>(), f.at(1).get<int>(), f.at(2).get<int>()});
  if (j.contains("radial_band_C")) poly.radial_band_C = j["radial_band_C"].get<double>();
  if (j.contains("min_pair_dist")) poly.min_pair_dist = j["min_pair_dist"].get<double>();
  if (j.contains("covering_est")) poly.covering_est = j["covering_est"].get<double>();
  return poly;
}

RadialPotential potential_from_json(const std::string& text) {
  json j = json::parse(text);
  int d = j.value("dimension", 3);
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "hardcore") return RadialPotential::hard_core(j.at("R0").get<double>(), d);
  if (kind == "softcore")
    return RadialPotential::soft_core(j.at("R0").get<double>(), j.at("V0").get<double>(), d);
  if (kind == "tabulated") {
    std::vector<double> r, v;
    for (const auto& x : j.at("r")) r.push_back(x.get<double>());
    for (const auto& x : j.at("v")) v.push_back(x.get<double>());
    return RadialPotential::tabulated(std::move(r), std::move(v), d);
  }
  throw std::invalid_argument("potential_from_json: unknown kind " + kind);
}

}  // namespace fermigas
