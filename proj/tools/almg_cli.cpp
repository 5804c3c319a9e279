// almg: command-line driver for the spectrum, doublet, orbit, evolution,
// tau-scan, ensemble and rate-function workflows.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <thread>

#include "almg/config.hpp"
#include "almg/csv.hpp"
#include "almg/dpt1.hpp"
#include "almg/dpt2.hpp"
#include "almg/gme.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace almg;

namespace {

// Flags are written into the config only when given, so they override the
// preset and the config file but never mask them with defaults.
struct FlagSet {
  std::vector<std::function<void(RunConfig&)>> apply;

  template <class T>
  CLI::Option* add(CLI::App* app, const std::string& name, const std::string& key, const std::string& help) {
    auto v = std::make_shared<T>();
    CLI::Option* opt = app->add_option(name, *v, help);
    apply.push_back([opt, v, key](RunConfig& c) {
      if (opt->count()) c.set(key, *v);
    });
    return opt;
  }
};

struct Globals {
  std::string config_path;
  int fig = 0;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  FlagSet flags;
};

RunConfig resolve(const Globals& g, const FlagSet& local) {
  RunConfig cfg;
  if (g.fig) cfg = RunConfig::preset(g.fig);
  if (!g.config_path.empty()) cfg.merge(RunConfig::from_file(g.config_path));
  for (const auto& f : g.flags.apply) f(cfg);
  for (const auto& f : local.apply) f(cfg);
  return cfg;
}

void require(const RunConfig& cfg, const std::vector<std::string>& keys, const std::string& cmd) {
  const auto miss = cfg.missing(keys);
  if (miss.empty()) return;
  std::string msg = cmd + ": missing required fields:";
  for (const auto& m : miss) msg += " " + m;
  msg += " (give them in --config, as flags, or via --fig)";
  throw UsageError(msg);
}

fs::path out_dir(const RunConfig& cfg) {
  fs::path dir = cfg.string("out_dir", ".");
  fs::create_directories(dir);
  return dir;
}

std::string tau_tag(double tau) { return "tau" + csv::format_double(tau); }

// Writes every protocol field back so the echo is the fully resolved input.
ProtocolSpec protocol(RunConfig& cfg) {
  const ProtocolSpec s = cfg.protocol_spec();
  cfg.set("two_j", s.two_j);
  cfg.set("xi_ini", s.xi_ini);
  cfg.set("alpha_ini", s.alpha_ini);
  cfg.set("xi_int", s.xi_int);
  cfg.set("alpha_int", s.alpha_int);
  cfg.set("xi_fin", s.xi_fin);
  cfg.set("alpha_fin", s.alpha_fin);
  cfg.set("p", s.state.p);
  cfg.set("phi", s.state.phi);
  cfg.set("tau_fin", s.tau_fin);
  cfg.set("dt", s.dt);
  return s;
}

std::vector<double> taus_of(const RunConfig& cfg) {
  if (cfg.has("tau_list") || cfg.has("tau_min")) return cfg.tau_grid();
  return {cfg.number("tau_int")};
}

ModelParams model_params(const RunConfig& cfg, const char* xi_flag, const char* alpha_flag) {
  const double xi = cfg.number("xi"), alpha = cfg.number("alpha");
  if (!(xi >= 0.0 && xi <= 1.0)) throw UsageError(std::string(xi_flag) + ": xi must lie in [0, 1]");
  if (!std::isfinite(alpha)) throw UsageError(std::string(alpha_flag) + ": alpha must be finite");
  const int two_j = cfg.integer("two_j");
  if (two_j < 1) throw UsageError("--j2: must be >= 1");
  return {xi, alpha, two_j};
}

void note(const std::string& s) { std::cerr << "almg: " << s << '\n'; }

// ---------------------------------------------------------------------------

int cmd_spectrum_flow(const Globals& g, const FlagSet& local) {
  RunConfig cfg = resolve(g, local);
  const int two_j = cfg.integer("two_j", 40);
  const double alpha = cfg.number("alpha", -0.6);
  const double lo = cfg.number("xi_min", 0.0), hi = cfg.number("xi_max", 1.0);
  const int steps = cfg.integer("xi_steps", 200);
  if (two_j < 1) throw UsageError("--j2: must be >= 1");
  if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi)) throw UsageError("--xi-min/--xi-max: need 0 <= xi-min <= xi-max <= 1");
  if (steps < 1) throw UsageError("--steps: must be >= 1");
  if (steps > 1 && lo == hi) throw UsageError("--xi-min/--xi-max: an empty range needs --steps 1");
  cfg.set("two_j", two_j);
  cfg.set("alpha", alpha);
  cfg.set("xi_min", lo);
  cfg.set("xi_max", hi);
  cfg.set("xi_steps", steps);
  const fs::path path = out_dir(cfg) / "spectrum_flow.csv";
  csv::spectrum_flow(path, cfg.echo(), spectrum_flow(two_j, alpha, linear_grid(lo, hi, steps), g.threads));
  note("wrote " + path.string());
  return 0;
}

int cmd_doublets(const Globals& g, const FlagSet& local) {
  RunConfig cfg = resolve(g, local);
  if (!cfg.has("xi")) cfg.set("xi", 0.5);
  if (!cfg.has("alpha")) cfg.set("alpha", -0.6);
  if (!cfg.has("two_j")) cfg.set("two_j", 6400);
  const ModelParams par = model_params(cfg, "--xi", "--alpha");
  const EigenSystem eig = diagonalize(par);
  const auto crit = classical::critical_energies(par);
  DoubletTable table = doublet_pairing(eig, crit);
  doublet_matrix_elements(table, ChargeSet(par.two_j()), eig);
  const fs::path path = out_dir(cfg) / "doublets.csv";
  csv::doublets(path, cfg.echo(), table);
  note("wrote " + path.string() + " (" + std::to_string(table.rows.size()) + " doublets, " +
       std::to_string(table.unpaired.size()) + " unpaired levels)");
  return 0;
}

int cmd_orbit(const Globals& g, const FlagSet& local) {
  RunConfig cfg = resolve(g, local);
  const double T = cfg.number("orbit_T", 20.0);
  const double h = cfg.number("orbit_h", 1e-3);
  const int n = cfg.integer("contour_n", 201);
  if (!(T > 0.0)) throw UsageError("--duration: must be > 0");
  if (!(h > 0.0)) throw UsageError("--step: must be > 0");
  if (n < 2) throw UsageError("--contour-n: must be >= 2");
  cfg.set("orbit_T", T);
  cfg.set("orbit_h", h);
  cfg.set("contour_n", n);
  const fs::path dir = out_dir(cfg);

  if (cfg.has("orbit_q") || cfg.has("orbit_p")) {
    require(cfg, {"orbit_q", "orbit_p"}, "orbit");
    const ProtocolSpec spec = protocol(cfg);
    const classical::State s0{cfg.number("orbit_q"), cfg.number("orbit_p")};
    if (!classical::in_disk(s0)) throw UsageError("--start-q/--start-p: the point lies outside the disk Q^2 + P^2 <= 2");
    csv::orbit(dir / "orbit.csv", cfg.echo(), classical::integrate_orbit(s0, spec.theta_fin(), T, h));
    csv::contour(dir / "contour.csv", cfg.echo(), spec.theta_fin(), n);
    note("wrote orbit.csv and contour.csv in " + dir.string());
    return 0;
  }
  require(cfg, {"two_j", "tau_list|tau_min|tau_int"}, "orbit");
  const std::vector<double> taus = taus_of(cfg);
  const ProtocolSpec spec = protocol(cfg);
  const ProtocolContext ctx(spec);
  for (double tau : taus) {
    const auto fq = classical::from_quantum(ctx.state_at(tau), spec.two_j);
    if (fq.ill_conditioned) note(tau_tag(tau) + ": canonical point is ill-conditioned near the disk boundary");
    csv::orbit(dir / ("orbit_" + tau_tag(tau) + ".csv"), cfg.echo(),
               classical::integrate_orbit(fq.state, spec.theta_fin(), T, h));
  }
  csv::contour(dir / "contour.csv", cfg.echo(), spec.theta_fin(), n);
  note("wrote " + std::to_string(taus.size()) + " orbits and contour.csv in " + dir.string());
  return 0;
}

int cmd_evolve(const Globals& g, const FlagSet& local, bool no_classical) {
  RunConfig cfg = resolve(g, local);
  require(cfg, {"two_j", "tau_list|tau_min|tau_int", "t_max", "t_dt"}, "evolve");
  const std::vector<double> taus = taus_of(cfg);
  const double t_max = cfg.number("t_max"), t_dt = cfg.number("t_dt");
  if (!(t_dt > 0.0) || !(t_max >= 0.0)) throw UsageError("--t-max/--t-dt: need t-max >= 0 and t-dt > 0");
  const ProtocolSpec spec = protocol(cfg);
  const ProtocolContext ctx(spec);
  const auto crit = classical::critical_energies(spec.theta_fin());
  const auto t = uniform_grid(t_max, t_dt);
  const fs::path dir = out_dir(cfg);
  for (double tau : taus) {
    csv::evolution(dir / ("evolution_" + tau_tag(tau) + ".csv"), cfg.echo(),
                   track_evolution(ctx, tau, t, !no_classical), !no_classical);
    csv::ldos(dir / ("ldos_" + tau_tag(tau) + ".csv"), cfg.echo(), ldos(ctx.final_overlaps(tau), ctx.final_system(), crit),
              crit);
  }
  note("wrote evolution and LDOS files for " + std::to_string(taus.size()) + " tau_int values in " + dir.string());
  return 0;
}

int cmd_scan(const Globals& g, const FlagSet& local) {
  RunConfig cfg = resolve(g, local);
  require(cfg, {"two_j", "tau_list|tau_min", "tau_fin"}, "scan");
  const std::vector<double> taus = cfg.tau_grid();
  const ProtocolSpec spec = protocol(cfg);
  GmeOptions gme;
  gme.width_factor = cfg.number("gme_width_factor", gme.width_factor);
  cfg.set("gme_width_factor", gme.width_factor);
  const ScanContext ctx(spec, gme);
  const ScanResult res = tau_scan(ctx, taus, g.threads);
  const fs::path dir = out_dir(cfg);
  csv::scan(dir / "scan.csv", cfg.echo(), res);
  if (!res.failures.empty()) {
    csv::Writer w(dir / "scan_failures.csv", cfg.echo(), {"tau_int", "message"});
    for (const auto& f : res.failures) w.row({f.tau_int, f.message});
    note(std::to_string(res.failures.size()) + " tau_int values failed; see scan_failures.csv");
  }
  note("wrote scan.csv (" + std::to_string(res.rows.size()) + " rows) in " + dir.string());
  return 0;
}

json ensemble_json(const GmeEnsemble& e) {
  json d = json::array();
  for (const auto& x : e.doublets)
    d.push_back({{"eps_mean", x.row.eps_mean},
                 {"gap", x.row.gap},
                 {"phase", to_string(*x.row.phase)},
                 {"beta", {x.beta.real(), x.beta.imag()}}});
  return {{"eps_mean", e.eps_mean}, {"sigma", e.sigma}, {"half_width", e.half_width},
          {"window", {e.lo, e.hi}}, {"n_I", e.n_I}, {"n_II", e.n_II}, {"n_III", e.n_III},
          {"p", e.p}, {"c_x", e.c_x}, {"k_x", e.k_x}, {"c_y", e.c_y}, {"k_y", e.k_y},
          {"measured", {{"cx", e.measured_cx}, {"kx", e.measured_kx}, {"cy", e.measured_cy}, {"ky", e.measured_ky}}},
          {"s_x", e.s_x}, {"s_y", e.s_y}, {"physical", e.physical}, {"inconsistent", e.inconsistent},
          {"diagnostic", e.diagnostic}, {"doublets", d}};
}

int cmd_gme(const Globals& g, const FlagSet& local) {
  RunConfig cfg = resolve(g, local);
  require(cfg, {"two_j", "tau_list|tau_min|tau_int"}, "gme");
  const std::vector<double> taus = taus_of(cfg);
  const ProtocolSpec spec = protocol(cfg);
  GmeOptions opt;
  opt.width_factor = cfg.number("gme_width_factor", opt.width_factor);
  cfg.set("gme_width_factor", opt.width_factor);
  const ScanContext ctx(spec, opt);
  const fs::path dir = out_dir(cfg);
  for (double tau : taus) {
    const Overlaps c = ctx.protocol().final_overlaps(tau);
    const GmeEnsemble e = build_gme(c, ctx.protocol().final_system(), ctx.charges(), ctx.doublets(), ctx.critical(), opt);
    const ScanRow r = ctx.row(tau);
    json out = {{"config", cfg.values()},
                {"tau_int", tau},
                {"ensemble", ensemble_json(e)},
                {"gme", {{"jx", r.gme_jx}, {"jy", r.gme_jy}, {"jz", r.gme_jz}}},
                {"horizon_average", {{"jx", r.jx}, {"jy", r.jy}, {"jz", r.jz}, {"cx", r.cx}, {"cy", r.cy},
                                     {"kx", r.kx}, {"ky", r.ky}}}};
    std::ofstream(dir / ("gme_" + tau_tag(tau) + ".json")) << out.dump(2) << '\n';
  }
  note("wrote " + std::to_string(taus.size()) + " ensemble files in " + dir.string());
  return 0;
}

int cmd_dpt2(const Globals& g, const FlagSet& local, const std::string& arithmetic) {
  RunConfig cfg = resolve(g, local);
  require(cfg, {"two_j_list|two_j", "tau_list|tau_min|tau_int", "t_max", "t_dt"}, "dpt2");
  if (arithmetic != "extended" && arithmetic != "double")
    throw UsageError("--arithmetic: expected 'extended' or 'double'");
  const std::vector<int> js = cfg.has("two_j_list") ? cfg.integers("two_j_list") : std::vector<int>{cfg.integer("two_j")};
  for (int j2 : js)
    if (j2 < 1) throw UsageError("--j2-list: spin lengths must be >= 1");
  const std::vector<double> taus = taus_of(cfg);
  const double t_max = cfg.number("t_max"), t_dt = cfg.number("t_dt");
  if (!(t_dt > 0.0) || !(t_max > 0.0)) throw UsageError("--t-max/--t-dt: need both > 0");
  const ProtocolSpec spec = protocol(cfg);
  cfg.set("two_j_list", js);
  cfg.set("arithmetic", arithmetic);
  const auto t = uniform_grid(t_max, t_dt);
  const auto entries = size_scan(spec, js, taus, t, g.threads,
                                 arithmetic == "double" ? Arithmetic::double_precision : Arithmetic::extended);
  const fs::path dir = out_dir(cfg);
  std::vector<const SizeScanEntry*> failed;
  for (const auto& e : entries) {
    if (!e.series) {
      failed.push_back(&e);
      continue;
    }
    const RateSeries& s = *e.series;
    csv::rates(dir / ("rates_j2_" + std::to_string(e.two_j) + "_" + tau_tag(s.tau_int) + ".csv"), cfg.echo(), s);
    std::printf("2j=%d tau_int=%s digits=%d kink_t=%s%s\n", e.two_j, csv::format_double(s.tau_int).c_str(), s.digits,
                s.kink_time ? csv::format_double(*s.kink_time).c_str() : "none",
                s.underflow ? " (probabilities below the working resolution)" : "");
  }
  if (!failed.empty()) {
    csv::Writer w(dir / "dpt2_failures.csv", cfg.echo(), {"two_j", "message"});
    for (const auto* e : failed) w.row({e->two_j, e->error});
    note(std::to_string(failed.size()) + " runs failed; see dpt2_failures.csv");
  }
  return 0;
}

const std::map<int, std::string> kFigCommand = {{1, "spectrum-flow"}, {2, "orbit"}, {3, "doublets"}, {4, "evolve"},
                                                {5, "scan"},          {6, "scan"},  {7, "dpt2"},     {8, "dpt2"}};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anharmonic LMG double-quench simulations", "almg"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "JSON run configuration");
  app.add_option("--threads", g.threads, "worker threads (default: available parallelism)")->check(CLI::PositiveNumber);
  app.add_option("--fig", g.fig, "load the parameter preset of figure 1-8; alone, runs that figure's command");
  g.flags.add<std::string>(&app, "-o,--out-dir", "out_dir", "output directory (default .)");

  auto protocol_flags = [](CLI::App* sub, FlagSet& f) {
    f.add<int>(sub, "--j2", "two_j", "2j");
    f.add<double>(sub, "--xi-ini", "xi_ini", "initial xi");
    f.add<double>(sub, "--alpha-ini", "alpha_ini", "initial alpha");
    f.add<double>(sub, "--xi-int", "xi_int", "intermediate xi");
    f.add<double>(sub, "--alpha-int", "alpha_int", "intermediate alpha");
    f.add<double>(sub, "--xi-fin", "xi_fin", "final xi");
    f.add<double>(sub, "--alpha-fin", "alpha_fin", "final alpha");
    f.add<double>(sub, "--p", "p", "weight of the even top level");
    f.add<double>(sub, "--phi", "phi", "relative phase");
    f.add<double>(sub, "--tau-fin", "tau_fin", "final-stage horizon");
    f.add<double>(sub, "--tau-int", "tau_int", "single intermediate time");
    f.add<std::vector<double>>(sub, "--tau", "tau_list", "intermediate times")->delimiter(',');
    f.add<double>(sub, "--tau-min", "tau_min", "scan start");
    f.add<double>(sub, "--tau-max", "tau_max", "scan end");
    f.add<double>(sub, "--tau-step", "tau_step", "scan step");
  };

  // Also on the top level so preset runs (--fig alone) take overrides.
  protocol_flags(&app, g.flags);
  g.flags.add<std::vector<int>>(&app, "--j2-list", "two_j_list", "spin lengths 2j")->delimiter(',');
  g.flags.add<double>(&app, "--t-max", "t_max", "final-stage span");
  g.flags.add<double>(&app, "--t-dt", "t_dt", "sampling step");
  g.flags.add<double>(&app, "--gme-width", "gme_width_factor", "window half-width in sigma (default 2)");
  g.flags.add<double>(&app, "--xi", "xi", "single-Hamiltonian xi");
  g.flags.add<double>(&app, "--alpha", "alpha", "single-Hamiltonian alpha");
  g.flags.add<double>(&app, "--xi-min", "xi_min", "spectrum-flow range start");
  g.flags.add<double>(&app, "--xi-max", "xi_max", "spectrum-flow range end");
  g.flags.add<int>(&app, "--steps", "xi_steps", "spectrum-flow grid points");

  std::map<std::string, FlagSet> local;

  auto* flow = app.add_subcommand("spectrum-flow", "scaled spectrum versus xi");
  local["spectrum-flow"].add<int>(flow, "--j2", "two_j", "2j (default 40)");
  local["spectrum-flow"].add<double>(flow, "--alpha", "alpha", "anharmonicity (default -0.6)");
  local["spectrum-flow"].add<double>(flow, "--xi-min", "xi_min", "default 0");
  local["spectrum-flow"].add<double>(flow, "--xi-max", "xi_max", "default 1");
  local["spectrum-flow"].add<int>(flow, "--steps", "xi_steps", "grid points (default 200)");

  auto* dbl = app.add_subcommand("doublets", "parity doublets and charge elements");
  local["doublets"].add<int>(dbl, "--j2", "two_j", "2j (default 6400)");
  local["doublets"].add<double>(dbl, "--xi", "xi", "default 0.5");
  local["doublets"].add<double>(dbl, "--alpha", "alpha", "default -0.6");

  auto* orb = app.add_subcommand("orbit", "classical orbits in the final Hamiltonian");
  protocol_flags(orb, local["orbit"]);
  local["orbit"].add<double>(orb, "--start-q", "orbit_q", "explicit start Q");
  local["orbit"].add<double>(orb, "--start-p", "orbit_p", "explicit start P");
  local["orbit"].add<double>(orb, "--duration", "orbit_T", "duration (default 20)");
  local["orbit"].add<double>(orb, "--step", "orbit_h", "RK4 step (default 1e-3)");
  local["orbit"].add<int>(orb, "--contour-n", "contour_n", "energy contour grid (default 201)");

  auto* evo = app.add_subcommand("evolve", "final-stage spin expectations and LDOS");
  protocol_flags(evo, local["evolve"]);
  local["evolve"].add<double>(evo, "--t-max", "t_max", "final-stage span");
  local["evolve"].add<double>(evo, "--t-dt", "t_dt", "sampling step");
  bool no_classical = false;
  evo->add_flag("--no-classical", no_classical, "omit the classical columns");

  auto* scan = app.add_subcommand("scan", "finite-horizon averages and GME over tau_int");
  protocol_flags(scan, local["scan"]);
  local["scan"].add<double>(scan, "--gme-width", "gme_width_factor", "window half-width in sigma (default 2)");

  auto* gme = app.add_subcommand("gme", "ensemble parameters per tau_int (JSON)");
  protocol_flags(gme, local["gme"]);
  local["gme"].add<double>(gme, "--gme-width", "gme_width_factor", "window half-width in sigma (default 2)");

  auto* d2 = app.add_subcommand("dpt2", "return probabilities and rate functions");
  protocol_flags(d2, local["dpt2"]);
  local["dpt2"].add<std::vector<int>>(d2, "--j2-list", "two_j_list", "spin lengths 2j")->delimiter(',');
  local["dpt2"].add<double>(d2, "--t-max", "t_max", "final-stage span");
  local["dpt2"].add<double>(d2, "--t-dt", "t_dt", "sampling step");
  std::string arithmetic = "extended";
  d2->add_option("--arithmetic", arithmetic, "extended (default) or double");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    std::string cmd;
    for (const auto* sub : app.get_subcommands()) cmd = sub->get_name();
    if (cmd.empty()) {
      if (!g.fig) throw UsageError("no command given; see --help");
      const auto it = kFigCommand.find(g.fig);
      if (it == kFigCommand.end()) throw UsageError("--fig: unknown preset " + std::to_string(g.fig) + " (expected 1-8)");
      cmd = it->second;
    }
    const FlagSet& f = local[cmd];
    if (cmd == "spectrum-flow") return cmd_spectrum_flow(g, f);
    if (cmd == "doublets") return cmd_doublets(g, f);
    if (cmd == "orbit") return cmd_orbit(g, f);
    if (cmd == "evolve") return cmd_evolve(g, f, no_classical);
    if (cmd == "scan") return cmd_scan(g, f);
    if (cmd == "gme") return cmd_gme(g, f);
    if (cmd == "dpt2") return cmd_dpt2(g, f, arithmetic);
    throw UsageError("unknown command " + cmd);
  } catch (const UsageError& e) {
    std::cerr << "almg: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "almg: invalid input: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "almg: numerical failure: " << e.what() << '\n';
    return 3;
  }
}
