#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fermigas/io.hpp"
#include "fermigas/numerics.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace fermigas;

namespace {

int run_cli(const std::string& args) {
  std::string cmd = std::string(FERMIGAS_BIN) + " " + args + " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string tmp_path(const std::string& name) { return "cli_tmp_" + name; }

}  // namespace

TEST_CASE("polyhedron JSON round trip keeps corner integers") {
  auto poly = build_polyhedron({3, 48, 1e6, PolyhedronMode::rational, 9});
  auto text = polyhedron_to_json(poly);
  auto back = polyhedron_from_json(text);
  CHECK(back.corners == poly.corners);
  CHECK(back.denoms == poly.denoms);
  CHECK(back.sigma_str == poly.sigma_str);
  CHECK(back.faces == poly.faces);
  CHECK(back.vol_num == poly.vol_num);
  // and a second export is byte-identical
  CHECK(polyhedron_to_json(back) == text);
}

TEST_CASE("cli polyhedron export/import round trip") {
  auto out1 = tmp_path("P.json"), out2 = tmp_path("P2.json");
  REQUIRE(run_cli("polyhedron --d 3 --s 48 --Q 1e6 --seed 4 --out " + out1) == 0);
  REQUIRE(run_cli("polyhedron --in " + out1 + " --out " + out2) == 0);
  CHECK(slurp(out1) == slurp(out2));
  std::remove(out1.c_str());
  std::remove(out2.c_str());
}

TEST_CASE("cli determinism: identical config and seed give identical bytes") {
  auto a = tmp_path("sol_a.csv"), b = tmp_path("sol_b.csv");
  REQUIRE(run_cli("scattering --kind softcore --R0 1 --V0 4 --rmax 8 --seed 3 --out " + a) == 0);
  REQUIRE(run_cli("scattering --kind softcore --R0 1 --V0 4 --rmax 8 --seed 3 --out " + b) == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).rfind("# fermigas", 0) == 0);  // provenance header first
  std::remove(a.c_str());
  std::remove(b.c_str());
}

TEST_CASE("cli config file mirrors flags") {
  auto cfg = tmp_path("cfg.json"), out = tmp_path("sweep.csv");
  {
    std::ofstream os(cfg);
    os << "{\"curve\": \"hc\", \"kfa\": \"0.01:0.1:3\"}\n";
  }
  REQUIRE(run_cli("energy --config " + cfg + " --out " + out) == 0);
  auto body = slurp(out);
  CHECK(body.find("kFa,e_total") != std::string::npos);
  // 3 sweep rows + header lines
  int rows = 0;
  std::istringstream is(body);
  std::string line;
  while (std::getline(is, line))
    if (!line.empty() && line[0] != '#' && line.rfind("kFa", 0) != 0) ++rows;
  CHECK(rows == 3);
  std::remove(cfg.c_str());
  std::remove(out.c_str());
}

TEST_CASE("cli exit codes") {
  CHECK(run_cli("ggr --verify --n 3 --grid 16 --dim 1") == 0);
  CHECK(run_cli("energy") == 1);                              // invalid config
  CHECK(run_cli("momenta --ball --d 3 --R -1") == 1);         // bad precondition/config
  CHECK(run_cli("ggr --verify --n 9 --grid 16 --dim 1") == 3);  // cap exceeded
}

TEST_CASE("cli compare merges by nearest point") {
  auto curve = tmp_path("curve.csv"), data = tmp_path("qmc.csv"), out = tmp_path("merged.csv");
  REQUIRE(run_cli("energy --curve hc --kfa 0.1:0.4:4 --out " + curve) == 0);
  {
    std::ofstream os(data);
    os << "kFa,e\n0.11,0.61\n0.39,0.62\n";
  }
  REQUIRE(run_cli("compare --curve " + curve + " --data " + data + " --out " + out) == 0);
  auto body = slurp(out);
  CHECK(body.find("e_model,e_data") != std::string::npos);
  std::remove(curve.c_str());
  std::remove(data.c_str());
  std::remove(out.c_str());
}

TEST_CASE("parallel reduction is deterministic across thread counts") {
  auto f = [](std::int64_t i) { return std::sin(1e-3 * static_cast<double>(i)) / (i + 1.0); };
#ifdef _OPENMP
  int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  double one = parallel_sum(200000, f);
  omp_set_num_threads(2);
  double two = parallel_sum(200000, f);
  omp_set_num_threads(saved);
  CHECK(one == two);  // bit-identical by chunked deterministic reduction
#endif
  double serial = serial_sum(200000, f);
  double par = parallel_sum(200000, f);
  CHECK(par == doctest::Approx(serial).epsilon(1e-13));
}
