// Command-line front end: one subcommand per module, JSON config overrides,
// CSV/JSON artifacts with provenance headers.

#include <fstream>
#include <iostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "fermigas/energy.hpp"
#include "fermigas/fermi_surface.hpp"
#include "fermigas/ggr.hpp"
#include "fermigas/io.hpp"
#include "fermigas/lebesgue.hpp"
#include "fermigas/scattering.hpp"
#include "fermigas/slater.hpp"
#include "json.hpp"

using namespace fermigas;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << body;
}

// geometric sweep start:end:count
std::vector<double> parse_sweep(const std::string& spec) {
  double lo = 0, hi = 0;
  int n = 0;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%d", &lo, &hi, &n) != 3 || n < 1 || lo <= 0 || hi < lo)
    throw std::invalid_argument("sweep must be start:end:count with 0 < start <= end");
  std::vector<double> out;
  if (n == 1) return {lo};
  double ratio = std::pow(hi / lo, 1.0 / (n - 1));
  for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(ratio, i));
  return out;
}

std::vector<std::int64_t> parse_int_list(const std::string& s) {
  std::vector<std::int64_t> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoll(tok));
  return out;
}

// config JSON applies to options the user did not set explicitly
void apply_config(CLI::App* cmd, const std::string& path) {
  json cfg = json::parse(read_file(path));
  for (auto& [key, val] : cfg.items()) {
    CLI::Option* opt = cmd->get_option_no_throw("--" + key);
    if (!opt || opt->count() > 0) continue;
    std::string text = val.is_string() ? val.get<std::string>() : val.dump();
    opt->add_result(text);
    opt->run_callback();
  }
}

struct Common {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  int threads = 0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON config; keys mirror the flags");
  cmd->add_option("--out", c.out, "output file");
  cmd->add_option("--seed", c.seed, "rng seed recorded in artifacts");
  cmd->add_option("--threads", c.threads, "worker pool size (0 = library default)");
}

void finish_common(const Common& c) {
#ifdef _OPENMP
  if (c.threads > 0) omp_set_num_threads(c.threads);
#else
  (void)c;
#endif
}

std::string config_string(const CLI::App* cmd) {
  std::ostringstream os;
  for (const auto* opt : cmd->get_options())
    if (opt->count() > 0) os << opt->get_name() << "=" << opt->results().front() << ";";
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dilute spin-polarized Fermi gas toolbox"};
  app.require_subcommand(1);

  // ------------------------------------------------------------ scattering
  auto* sc = app.add_subcommand("scattering", "p-wave scattering solutions and lengths");
  Common sc_c;
  std::string sc_kind = "hardcore", sc_table;
  double sc_R0 = 1.0, sc_V0 = 1.0, sc_rmax = 10.0, sc_b = 0.0;
  double sc_calibrate_a = 0.0, sc_radius_factor = 2.0;
  int sc_d = 3, sc_ngrid = 400;
  sc->add_option("--kind", sc_kind, "hardcore | softcore | tabulated");
  sc->add_option("--R0", sc_R0, "potential range");
  sc->add_option("--V0", sc_V0, "soft-core strength");
  sc->add_option("--table", sc_table, "JSON file with r[], v[] for tabulated kind");
  sc->add_option("--dim", sc_d, "dimension 1, 2 or 3");
  sc->add_option("--rmax", sc_rmax, "outer radius of the solve");
  sc->add_option("--ngrid", sc_ngrid, "output grid size (>= 200)");
  sc->add_option("--b", sc_b, "also report moment integrals at this cutoff");
  sc->add_option("--calibrate", sc_calibrate_a, "root-find V0 for this scattering length");
  sc->add_option("--radius-factor", sc_radius_factor, "core radius in units of the target length");
  add_common(sc, sc_c);

  // ------------------------------------------------------------ polyhedron
  auto* po = app.add_subcommand("polyhedron", "build or round-trip the momentum polytope");
  Common po_c;
  std::string po_spec, po_in;
  int po_d = 3;
  long po_s = 48;
  double po_Q = 1e6;
  std::string po_mode = "rational";
  po->add_option("--spec", po_spec, "JSON spec {d, s, Q, mode, seed}");
  po->add_option("--in", po_in, "import an existing polytope JSON");
  po->add_option("--d", po_d);
  po->add_option("--s", po_s);
  po->add_option("--Q", po_Q);
  po->add_option("--mode", po_mode, "rational | simple");
  add_common(po, po_c);

  // --------------------------------------------------------------- momenta
  auto* mo = app.add_subcommand("momenta", "enumerate lattice momenta and kinetic sums");
  Common mo_c;
  std::string mo_poly;
  int mo_d = 3;
  double mo_R = 10.0, mo_L = 2.0 * M_PI;
  std::int64_t mo_Rnum = 0, mo_Rden = 1;
  bool mo_defect = false;
  mo->add_option("--poly", mo_poly, "polytope JSON (omit for the ball)");
  mo->add_option("--d", mo_d, "dimension for the ball");
  mo->add_option("--R", mo_R, "kF L / 2 pi for the ball");
  mo->add_option("--Rnum", mo_Rnum, "rational R numerator (polytope)");
  mo->add_option("--Rden", mo_Rden, "rational R denominator (polytope)");
  mo->add_option("--L", mo_L, "box size");
  mo->add_flag("--defect", mo_defect, "report the axis-swap symmetry defect");
  add_common(mo, mo_c);

  // -------------------------------------------------------------- lebesgue
  auto* le = app.add_subcommand("lebesgue", "L1 kernels of dilated regions");
  Common le_c;
  std::string le_shape = "ball", le_poly, le_R = "4,8,16";
  int le_d = 3, le_M = 0, le_e1 = 0, le_e2 = 0, le_e3 = 0;
  int le_onedim_M = 0, le_p = 0;
  le->add_option("--shape", le_shape, "ball | poly");
  le->add_option("--poly", le_poly, "polytope JSON for shape=poly");
  le->add_option("--R", le_R, "comma list of dilations");
  le->add_option("--d", le_d);
  le->add_option("--M", le_M, "grid per axis (0 = default)");
  le->add_option("--e1", le_e1, "weight exponent of k1");
  le->add_option("--e2", le_e2, "weight exponent of k2");
  le->add_option("--e3", le_e3, "weight exponent of k3");
  le->add_option("--one-d-M", le_onedim_M, "power-kernel upper index (1D closed form)");
  le->add_option("--p", le_p, "power-kernel exponent p in {0,1,2}");
  add_common(le, le_c);

  // ------------------------------------------------------------- densities
  auto* de = app.add_subcommand("densities", "Slater reduced densities and fits");
  Common de_c;
  double de_R = 12.0, de_L = 2.0 * M_PI;
  int de_rho3 = 0;
  std::string de_poly;
  de->add_option("--R", de_R, "ball kF L / 2 pi");
  de->add_option("--L", de_L);
  de->add_option("--poly", de_poly, "polytope JSON instead of the ball");
  de->add_option("--rho3", de_rho3, "also sample the 3-particle quartic bound");
  add_common(de, de_c);

  // ------------------------------------------------------------------- ggr
  auto* gg = app.add_subcommand("ggr", "cluster-expansion identities against oracles");
  Common gg_c;
  bool gg_verify = false;
  int gg_n = 3, gg_grid = 16, gg_dim = 1;
  double gg_a = 0.0, gg_b = 0.0;
  gg->add_flag("--verify", gg_verify, "run the exact-identity suite");
  gg->add_option("--n", gg_n, "particle number (<= 4)");
  gg->add_option("--grid", gg_grid, "torus nodes per axis");
  gg->add_option("--dim", gg_dim, "dimension");
  gg->add_option("--a", gg_a, "pair-function core scale (0 = default)");
  gg->add_option("--b", gg_b, "pair-function cutoff (0 = default)");
  add_common(gg, gg_c);

  // ---------------------------------------------------------------- energy
  auto* en = app.add_subcommand("energy", "energy bounds, curves and error budgets");
  Common en_c;
  std::string en_curve, en_kfa = "0.01:0.5:40";
  bool en_budget = false;
  double en_rho = 1e-6, en_a = 1.0, en_b = 0.0, en_s = 100.0, en_N = 1e6;
  int en_d = 3;
  en->add_option("--curve", en_curve, "hc | sc: comparison curve family");
  en->add_option("--kfa", en_kfa, "kFa sweep start:end:count (geometric)");
  en->add_flag("--budget", en_budget, "evaluate the error budget and optimal exponents");
  en->add_option("--rho", en_rho);
  en->add_option("--a", en_a);
  en->add_option("--b", en_b, "Jastrow cutoff (0 = a (a^d rho)^{-1/3})");
  en->add_option("--s", en_s);
  en->add_option("--N", en_N);
  en->add_option("--d", en_d);
  add_common(en, en_c);

  // --------------------------------------------------------------- compare
  auto* co = app.add_subcommand("compare", "overlay an external dataset on a model curve");
  Common co_c;
  std::string co_curve, co_data;
  co->add_option("--curve", co_curve, "model curve CSV (from the energy subcommand)")->required();
  co->add_option("--data", co_data, "external CSV with columns kFa,e")->required();
  add_common(co, co_c);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sc) {
      if (!sc_c.config.empty()) apply_config(sc, sc_c.config);
      finish_common(sc_c);
      if (sc_calibrate_a > 0.0) {
        double achieved = 0.0;
        double V0 = calibrate_soft_core(sc_calibrate_a, sc_radius_factor, sc_d, &achieved);
        std::cout << "V0 " << format_g17(V0) << " achieved_a " << format_g17(achieved) << "\n";
        return 0;
      }
      RadialPotential v = sc_kind == "hardcore" ? RadialPotential::hard_core(sc_R0, sc_d)
                          : sc_kind == "softcore"
                              ? RadialPotential::soft_core(sc_R0, sc_V0, sc_d)
                              : potential_from_json(read_file(sc_table));
      auto sol = solve_p_wave(v, sc_rmax, sc_ngrid);
      std::cout << "a " << format_g17(sol.a);
      if (sol.d == 3 && sol.a0_valid)
        std::cout << " a0 " << format_g17(sol.a0) << " Reff " << format_g17(sol.Reff);
      if (sol.d == 1) std::cout << " a0_inv " << format_g17(sol.a0_inv);
      std::cout << " exterior_err " << format_g17(sol.exterior_max_err) << "\n";
      if (sc_b > 0.0) {
        JastrowProfile prof(sol, sc_b);
        std::cout << "moment_n2 " << format_g17(moment_integral(prof, 2, MomentKind::energy_form))
                  << " moment_n4 " << format_g17(moment_integral(prof, 4, MomentKind::energy_form))
                  << "\n";
      }
      if (!sc_c.out.empty()) {
        std::ostringstream os;
        write_scattering_csv(os, sol, config_string(sc), sc_c.seed);
        write_file(sc_c.out, os.str());
      }
      return 0;
    }

    if (*po) {
      if (!po_c.config.empty()) apply_config(po, po_c.config);
      finish_common(po_c);
      FermiPolyhedron poly;
      if (!po_in.empty()) {
        poly = polyhedron_from_json(read_file(po_in));
      } else {
        PolyhedronSpec spec;
        if (!po_spec.empty()) {
          json js = json::parse(read_file(po_spec));
          spec.d = js.value("d", 3);
          spec.s = js.value("s", 48L);
          spec.Q = js.value("Q", 1e6);
          spec.mode = js.value("mode", std::string("rational")) == "simple"
                          ? PolyhedronMode::simple
                          : PolyhedronMode::rational;
          spec.rng_seed = js.value("seed", po_c.seed);
        } else {
          spec.d = po_d;
          spec.s = po_s;
          spec.Q = po_Q;
          spec.mode = po_mode == "simple" ? PolyhedronMode::simple : PolyhedronMode::rational;
          spec.rng_seed = po_c.seed;
        }
        poly = build_polyhedron(spec);
      }
      std::cout << "s " << poly.s << " sigma " << poly.sigma_str << " radial_band_C "
                << format_g17(poly.radial_band_C) << "\n";
      if (!po_c.out.empty()) write_file(po_c.out, polyhedron_to_json(poly));
      return 0;
    }

    if (*mo) {
      if (!mo_c.config.empty()) apply_config(mo, mo_c.config);
      finish_common(mo_c);
      MomentumSet ms;
      double Q = 0.0;
      if (!mo_poly.empty()) {
        auto poly = polyhedron_from_json(read_file(mo_poly));
        if (mo_Rnum <= 0) throw std::invalid_argument("polytope momenta need --Rnum/--Rden");
        ms = enumerate_momenta(poly, mo_Rnum, mo_Rden, mo_L);
        Q = poly.Q;
      } else {
        ms = enumerate_momenta_ball(mo_d, mo_R, mo_L);
      }
      auto ks = kinetic_sums(ms);
      std::cout << "N " << ms.N() << " S2 " << format_g17(ks.S2) << " S4 " << format_g17(ks.S4)
                << " S4_1 " << format_g17(ks.S4_1) << "\n";
      std::cout << "S2_dev " << format_g17(ks.S2_dev) << " S4_dev " << format_g17(ks.S4_dev)
                << " S4_1_dev " << format_g17(ks.S4_1_dev) << " S2_cont_dev "
                << format_g17(ks.S2_cont_dev) << "\n";
      if (mo_defect && !mo_poly.empty()) {
        auto ones = [](double, double, double) { return 1.0; };
        auto sd = symmetry_defect(ms, 0, 1, Q, ones);
        std::cout << "defect " << format_g17(sd.defect) << " ratio " << format_g17(sd.ratio)
                  << "\n";
      }
      if (!mo_c.out.empty()) {
        std::ostringstream os;
        write_momenta_csv(os, ms, config_string(mo), mo_c.seed);
        write_file(mo_c.out, os.str());
      }
      return 0;
    }

    if (*le) {
      if (!le_c.config.empty()) apply_config(le, le_c.config);
      finish_common(le_c);
      if (le_onedim_M > 0) {
        double v = one_d_power_kernel_l1(le_onedim_M, le_p);
        std::cout << "value " << format_g17(v) << "\n";
        return 0;
      }
      FermiPolyhedron poly;
      const FermiPolyhedron* pp = nullptr;
      if (le_shape == "poly") {
        poly = polyhedron_from_json(read_file(le_poly));
        pp = &poly;
      }
      auto rows = scaling_study(pp, le_d, parse_int_list(le_R), {le_e1, le_e2, le_e3}, le_M);
      std::ostringstream os;
      os << provenance_header("lebesgue_scaling", config_string(le), le_c.seed,
                              {"shape", "R", "N", "s", "weight", "value", "bound_ratio",
                               "error_estimate"});
      os << "shape,R,N,s,weight,value,bound_ratio,error_estimate\n";
      for (const auto& r : rows) {
        os << (pp ? "poly" : "ball") << "," << format_g17(r.R) << "," << r.N << "," << r.s << ","
           << r.exponents[0] << r.exponents[1] << r.exponents[2] << "," << format_g17(r.value)
           << "," << format_g17(r.ratio) << "," << format_g17(r.error_estimate) << "\n";
        std::cout << "R " << r.R << " N " << r.N << " value " << format_g17(r.value) << " ratio "
                  << format_g17(r.ratio) << "\n";
      }
      if (!le_c.out.empty()) write_file(le_c.out, os.str());
      return 0;
    }

    if (*de) {
      if (!de_c.config.empty()) apply_config(de, de_c.config);
      finish_common(de_c);
      MomentumSet ms = de_poly.empty()
                           ? enumerate_momenta_ball(3, de_R, de_L)
                           : enumerate_momenta(polyhedron_from_json(read_file(de_poly)),
                                               static_cast<std::int64_t>(de_R), 1, de_L);
      OneBodyKernel kernel(ms);
      auto fit = rho2_small_separation_fit(kernel);
      std::cout << "c2 " << format_g17(fit.c2) << " c2_target " << format_g17(fit.c2_target)
                << " ratio " << format_g17(fit.c2 / fit.c2_target) << "\n";
      std::cout << "c4 " << format_g17(fit.c4) << " c4_target " << format_g17(fit.c4_target)
                << " ratio " << format_g17(fit.c4 / fit.c4_target) << "\n";
      if (de_rho3 > 0) {
        auto chk = rho3_quartic_bound_check(kernel, de_rho3, de_c.seed + 1);
        std::cout << "rho3_max_ratio " << format_g17(chk.max_ratio) << "\n";
      }
      if (!de_c.out.empty()) {
        std::ostringstream os;
        os << provenance_header("density_fit", config_string(de), de_c.seed,
                                {"c2", "c2_target", "c4", "c4_target"});
        os << "c2,c2_target,c4,c4_target\n";
        os << format_g17(fit.c2) << "," << format_g17(fit.c2_target) << "," << format_g17(fit.c4)
           << "," << format_g17(fit.c4_target) << "\n";
        write_file(de_c.out, os.str());
      }
      return 0;
    }

    if (*gg) {
      if (!gg_c.config.empty()) apply_config(gg, gg_c.config);
      finish_common(gg_c);
      if (!gg_verify) throw std::invalid_argument("ggr: only --verify is implemented");
      DiscreteTorus torus{gg_dim, 2.0 * M_PI, gg_grid};
      MomentumSet ms;
      ms.d = gg_dim;
      ms.L = torus.L;
      // symmetric momentum sets around zero with N points
      if (gg_dim != 1) throw std::invalid_argument("ggr --verify: 1D oracle only");
      if (gg_n % 2 == 1) {
        for (std::int64_t j = -(gg_n - 1) / 2; j <= (gg_n - 1) / 2; ++j) ms.pts.push_back({j, 0, 0});
      } else {
        for (std::int64_t j = 1; j <= gg_n / 2; ++j) {
          ms.pts.push_back({-j, 0, 0});
          ms.pts.push_back({j, 0, 0});
        }
      }
      if (!torus.alias_free(ms)) throw std::invalid_argument("ggr: grid aliases the momenta");
      OneBodyKernel kernel(ms);
      double a = gg_a > 0 ? gg_a : torus.L / 12.0;
      double b = gg_b > 0 ? gg_b : torus.L / 3.0;
      GProfile gp(torus, [a, b](double r) {
        double f = r >= b ? 1.0 : (r <= a ? 0.0 : (1.0 - a / r) / (1.0 - a / b));
        return f * f - 1.0;
      });
      double series = normalization_series(kernel, gp, gg_n);
      auto oracle0 = direct_oracle(kernel, gp, gg_n, 0, {});
      double res_norm = std::abs(series - oracle0.cn_over_fact);
      std::cout << "normalization residual " << format_g17(res_norm) << "\n";
      double res_rho1 = 0.0;
      double first = 0.0;
      for (int t = 0; t < 3; ++t) {
        auto oracle1 = direct_oracle(kernel, gp, gg_n, 1, {torus.node((t * 5) % torus.nodes())});
        if (t == 0)
          first = oracle1.rho_q_jas;
        else
          res_rho1 = std::max(res_rho1, std::abs(oracle1.rho_q_jas - first));
      }
      std::cout << "rho1 translation residual " << format_g17(res_rho1) << "\n";
      double res_rho2 = 0.0;
      std::uint64_t state = gg_c.seed * 2654435761u + 12345;
      for (int t = 0; t < 5; ++t) {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        auto x1 = torus.node(static_cast<std::int64_t>((state >> 17) % torus.nodes()));
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        auto x2 = torus.node(static_cast<std::int64_t>((state >> 17) % torus.nodes()));
        auto oracle2 = direct_oracle(kernel, gp, gg_n, 2, {x1, x2});
        double fin = finite_ggr_density_sum(kernel, gp, gg_n, 2, {x1, x2});
        double f12sq = 1.0 + gp.g({x1[0] - x2[0], x1[1] - x2[1], x1[2] - x2[2]});
        res_rho2 = std::max(res_rho2,
                            std::abs(oracle2.cn_over_fact * oracle2.rho_q_jas - f12sq * fin));
      }
      std::cout << "rho2 identity residual " << format_g17(res_rho2) << "\n";
      bool ok = res_norm <= 1e-10 && res_rho1 <= 1e-10 && res_rho2 <= 1e-10;
      std::cout << (ok ? "identities hold" : "identities violated") << "\n";
      return ok ? 0 : 2;
    }

    if (*en) {
      if (!en_c.config.empty()) apply_config(en, en_c.config);
      finish_common(en_c);
      if (en_budget) {
        double b = en_b > 0 ? en_b : en_a * std::pow(std::pow(en_a, en_d) * en_rho, -1.0 / 3.0);
        auto budget = error_budget(en_rho, en_a, b, en_s, en_N, en_d);
        std::cout << "leading kinetic " << format_g17(budget.leading_kinetic) << " interaction "
                  << format_g17(budget.leading_interaction) << " correction "
                  << format_g17(budget.leading_correction) << "\n";
        for (const auto& t : budget.terms)
          std::cout << "term " << t.label << " (" << t.signature << ") "
                    << format_g17(t.value) << "\n";
        auto pr = [](const char* name, const ExponentChoice& e) {
          std::cout << name << " alpha " << e.alpha.num << "/" << e.alpha.den << " beta "
                    << e.beta.num << "/" << e.beta.den << " delta " << e.delta.num << "/"
                    << e.delta.den << " gamma " << e.gamma.num << "/" << e.gamma.den
                    << " gamma2 " << e.gamma2 << "\n";
        };
        pr("paper", budget.paper_choice);
        pr("optimized", budget.optimized);
        return 0;
      }
      if (en_curve.empty()) throw std::invalid_argument("energy: need --curve or --budget");
      double reff_over_a;
      if (en_curve == "hc") {
        auto sol = solve_p_wave(RadialPotential::hard_core(1.0, 3), 10.0, 300);
        reff_over_a = sol.Reff / sol.a;
      } else if (en_curve == "sc") {
        double V0 = calibrate_soft_core(1.0, 2.0, 3);
        auto sol = solve_p_wave(RadialPotential::soft_core(2.0, V0, 3), 20.0, 400);
        reff_over_a = sol.Reff / sol.a;
      } else {
        throw std::invalid_argument("energy: --curve must be hc or sc");
      }
      auto rows = ding_zhang_curve(parse_sweep(en_kfa), reff_over_a);
      std::ostringstream os;
      os << provenance_header("energy_curve", config_string(en), en_c.seed,
                              {"kFa", "e_total", "e_k2", "e_k3", "e_k5", "e_k6"});
      os << "kFa,e_total,e_k2,e_k3,e_k5,e_k6\n";
      for (const auto& r : rows)
        os << format_g17(r.kFa) << "," << format_g17(r.e_total) << "," << format_g17(r.e_k2)
           << "," << format_g17(r.e_k3) << "," << format_g17(r.e_k5) << ","
           << format_g17(r.e_k6) << "\n";
      if (!en_c.out.empty())
        write_file(en_c.out, os.str());
      else
        std::cout << os.str();
      return 0;
    }

    if (*co) {
      if (!co_c.config.empty()) apply_config(co, co_c.config);
      finish_common(co_c);
      // model curve: skip comment lines, parse kFa,e_total,...
      std::vector<std::pair<double, double>> model, data;
      {
        std::istringstream in(read_file(co_curve));
        std::string line;
        while (std::getline(in, line)) {
          if (line.empty() || line[0] == '#' || line.rfind("kFa", 0) == 0) continue;
          double k, e;
          if (std::sscanf(line.c_str(), "%lf,%lf", &k, &e) == 2) model.push_back({k, e});
        }
      }
      {
        std::istringstream in(read_file(co_data));
        std::string line;
        while (std::getline(in, line)) {
          if (line.empty() || line[0] == '#' || line.rfind("kFa", 0) == 0) continue;
          double k, e;
          if (std::sscanf(line.c_str(), "%lf,%lf", &k, &e) == 2) data.push_back({k, e});
        }
      }
      if (model.empty() || data.empty())
        throw std::invalid_argument("compare: empty curve or dataset");
      std::ostringstream os;
      os << provenance_header("comparison", config_string(co), co_c.seed,
                              {"kFa", "e_model", "e_data"});
      os << "kFa,e_model,e_data\n";
      for (const auto& [k, e] : data) {
        const auto* best = &model[0];
        for (const auto& m : model)
          if (std::abs(m.first - k) < std::abs(best->first - k)) best = &m;
        os << format_g17(k) << "," << format_g17(best->second) << "," << format_g17(e) << "\n";
      }
      if (!co_c.out.empty())
        write_file(co_c.out, os.str());
      else
        std::cout << os.str();
      return 0;
    }
  } catch (const CapExceeded& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return 3;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return 3;
  } catch (const GridAliased& e) {
    std::cerr << "grid aliased: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
