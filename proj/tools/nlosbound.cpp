// nlosbound: simulate campaigns, bound one scenario, generate scenarios, run oracles.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nlosbound/nlosbound.hpp"

namespace nb = nlosbound;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitInfeasible = 4;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SimulateArgs {
  int anchors = 10;
  int dim = 3;
  int trials = 1000;
  int inits = 200;
  std::uint64_t seed = 1;
  std::string noise = "exp:1.0";
  double cube = 10.0;
  int threads = 1;
  int pocs_iters = 500;
  double tol = 1e-8;
  std::string out;
  std::string config;
  bool timing = false;
  bool skip_emax = false;
};

struct BoundArgs {
  std::string scenario;
  std::string estimate;
  std::string report;
  int pocs_iters = 500;
  double tol = 1e-8;
};

struct GenerateArgs {
  int anchors = 10;
  int dim = 3;
  std::uint64_t seed = 1;
  std::string noise = "exp:1.0";
  double cube = 10.0;
  std::string out;
};

struct OracleArgs {
  std::string scenario;
  std::string estimate;
  int samples = 100000;
  std::uint64_t seed = 1;
};

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  nb::write_file(path, content);
}

/// Applies --config values over the flags; the config file wins.
void apply_config(SimulateArgs& a, const CLI::App& cmd) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(nb::read_file(a.config));
  } catch (const std::ios_base::failure& e) {
    throw ConfigError(std::string("--config: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("--config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("--config: expected a JSON object");
  auto take = [&](const char* key, auto& field) {
    if (!j.contains(key)) return;
    if (cmd.count(std::string("--") + key) > 0)
      std::cerr << "warning: --config overrides --" << key << " given on the command line\n";
    try {
      field = j[key].get<std::decay_t<decltype(field)>>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(std::string("--config: bad value for \"") + key + "\"");
    }
  };
  for (const auto& [key, value] : j.items()) {
    static const char* known[] = {"anchors", "dim", "trials", "inits", "seed", "noise", "cube", "threads", "pocs-iters", "tol"};
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError("--config: unknown key \"" + key + "\"");
  }
  take("anchors", a.anchors);
  take("dim", a.dim);
  take("trials", a.trials);
  take("inits", a.inits);
  take("seed", a.seed);
  take("noise", a.noise);
  take("cube", a.cube);
  take("threads", a.threads);
  take("pocs-iters", a.pocs_iters);
  take("tol", a.tol);
}

nb::ScenarioConfig scenario_config(int anchors, int dim, double cube, const std::string& noise) {
  if (anchors < 1 || anchors > static_cast<int>(nb::kMaxBalls)) throw ConfigError("--anchors must be between 1 and 64");
  if (dim != 2 && dim != 3) throw ConfigError("--dim must be 2 or 3");
  if (!(cube > 0.0)) throw ConfigError("--cube must be > 0");
  nb::ScenarioConfig sc;
  sc.num_anchors = anchors;
  sc.dim = dim;
  sc.cube_side = cube;
  try {
    sc.noise = nb::parse_noise(noise);
    nb::validate(sc.noise);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("--noise: ") + e.what());
  }
  return sc;
}

nb::SimConfig sim_config(const SimulateArgs& a) {
  nb::SimConfig cfg;
  cfg.scenario = scenario_config(a.anchors, a.dim, a.cube, a.noise);
  if (a.trials < 1) throw ConfigError("--trials must be >= 1");
  if (a.inits < 1) throw ConfigError("--inits must be >= 1");
  if (a.threads < 0) throw ConfigError("--threads must be >= 0");
  if (a.pocs_iters < 1) throw ConfigError("--pocs-iters must be >= 1");
  if (!(a.tol > 0.0) || a.tol >= 1.0) throw ConfigError("--tol must be in (0, 1)");
  cfg.trials = a.trials;
  cfg.pocs_inits = a.inits;
  cfg.master_seed = a.seed;
  cfg.threads = a.threads;
  cfg.pocs_max_iters = a.pocs_iters;
  cfg.solver.tol = a.tol;
  cfg.bound1_at_max = !a.skip_emax;
  return cfg;
}

int cmd_simulate(SimulateArgs a, const CLI::App& cmd) {
  if (!a.config.empty()) apply_config(a, cmd);
  const nb::SimConfig cfg = sim_config(a);
  const nb::BatchResult res = nb::run_batch(cfg);

  std::ostringstream trials;
  nb::write_trials_csv(trials, res.records);
  if (a.out.empty()) {
    std::cout << trials.str();
  } else {
    const std::filesystem::path dir(a.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::ios_base::failure("cannot create " + a.out + ": " + ec.message());
    nb::write_file((dir / "trials.csv").string(), trials.str());
    if (cfg.bound1_at_max) {
      std::ostringstream emax;
      nb::write_trials_emax_csv(emax, res.records);
      nb::write_file((dir / "trials_emax.csv").string(), emax.str());
    }
    for (nb::BoundKind k : nb::kAllBoundKinds) {
      const std::vector<double> ne = nb::normalized_errors(res.records, k);
      if (ne.empty()) continue;
      std::ostringstream cdf;
      nb::write_cdf_csv(cdf, nb::empirical_cdf(ne));
      nb::write_file((dir / (std::string("cdf_") + nb::to_string(k) + ".csv")).string(), cdf.str());
    }
    nb::write_file((dir / "summary.json").string(), nb::summary_to_json(cfg, res.summary, a.timing));
    if (a.timing) {
      std::ostringstream t;
      nb::write_timings_csv(t, res.records);
      nb::write_file((dir / "timings.csv").string(), t.str());
    }
  }
  for (const nb::BoundSummary& b : res.summary.bounds)
    if (b.violations > 0) std::cerr << "warning: " << nb::to_string(b.kind) << " violated in " << b.violations << " trials\n";
  if (res.summary.certificate_failures > 0)
    std::cerr << "warning: " << res.summary.certificate_failures << " solves failed their certificate check\n";
  return kExitOk;
}

nb::Point parse_point(const std::string& text, std::size_t dim, const char* flag) {
  std::vector<double> v;
  std::stringstream in(text);
  std::string cell;
  try {
    while (std::getline(in, cell, ',')) v.push_back(nb::detail::parse_double(cell, flag));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(flag) + ": " + e.what());
  }
  if (v.size() != dim)
    throw ConfigError(std::string(flag) + ": expected " + std::to_string(dim) + " comma-separated coordinates");
  nb::Point p(std::move(v));
  if (!p.is_finite()) throw ConfigError(std::string(flag) + ": coordinates must be finite");
  return p;
}

nb::Region load_region(const std::string& path) {
  const std::string text = nb::read_file(path);
  try {
    nb::Region r = nb::scenario_from_json(text).region();
    nb::check_solver_region(r);
    return r;
  } catch (const std::ios_base::failure&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("--scenario: ") + e.what());
  }
}

int cmd_bound(const BoundArgs& a) {
  const nb::Region region = load_region(a.scenario);
  nb::SolverOptions opts;
  opts.tol = a.tol;
  std::optional<nb::Point> estimate;
  if (!a.estimate.empty()) {
    estimate = parse_point(a.estimate, region.dim(), "--estimate");
  } else {
    nb::PocsOptions po;
    po.max_iters = a.pocs_iters;
    po.init = nb::relaxed_bounding_box(region).center();
    estimate = nb::pocs_estimate(region, po).point;
  }
  const nb::BoundReport rep = nb::compute_bounds(region, estimate, opts);
  write_output(a.report, nb::report_to_json(rep, estimate));
  if (rep.region_empty()) {
    std::cerr << "error: the balls have no common point\n";
    return kExitInfeasible;
  }
  return kExitOk;
}

int cmd_generate(const GenerateArgs& a) {
  const nb::Scenario s = nb::generate_scenario(scenario_config(a.anchors, a.dim, a.cube, a.noise), a.seed);
  write_output(a.out, nb::scenario_to_json(s));
  return kExitOk;
}

int cmd_oracle(const OracleArgs& a) {
  const nb::Region region = load_region(a.scenario);
  if (a.samples < 1) throw ConfigError("--samples must be >= 1");
  nb::OracleOptions oo;
  oo.mc_samples = a.samples;
  oo.seed = a.seed;
  std::optional<nb::Point> estimate;
  if (!a.estimate.empty()) estimate = parse_point(a.estimate, region.dim(), "--estimate");
  std::string out = "{\n  \"mc_diameter\": " + nb::detail::json_number(nb::oracle_max_mc(region, nb::Diameter{}, oo));
  if (estimate) {
    out += ",\n  \"mc_max_distance\": " +
           nb::detail::json_number(nb::oracle_max_mc(region, nb::MaxDistanceFrom{*estimate}, oo));
    if (region.dim() == 2) out += ",\n  \"exact_max_distance\": " + nb::detail::json_number(nb::oracle_vmax1_2d(*estimate, region));
  }
  std::cout << out << "\n}\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Position estimates and certified worst-case error bounds from positively biased ranges"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Run a Monte-Carlo campaign");
  simulate->add_option("--anchors", sim.anchors, "Anchors per network (N)");
  simulate->add_option("--dim", sim.dim, "Dimension (2 or 3)");
  simulate->add_option("--trials", sim.trials, "Random networks (T)");
  simulate->add_option("--inits", sim.inits, "Random POCS initializations per network (R)");
  simulate->add_option("--seed", sim.seed, "Master seed");
  simulate->add_option("--noise", sim.noise, "exp:RATE | uni:UPPER | posgauss:MEAN,STD");
  simulate->add_option("--cube", sim.cube, "Side of the deployment cube (m)");
  simulate->add_option("--threads", sim.threads, "Worker threads (0: all cores)");
  simulate->add_option("--pocs-iters", sim.pocs_iters, "POCS iteration cap");
  simulate->add_option("--tol", sim.tol, "Solver tolerance");
  simulate->add_option("--out", sim.out, "Output directory (trials CSV to stdout if absent)");
  simulate->add_option("--config", sim.config, "JSON file with the same keys; wins over flags");
  simulate->add_flag("--timing", sim.timing, "Also write runtimes (not reproducible)");
  simulate->add_flag("--skip-emax", sim.skip_emax, "Skip bound1 at the worst-init estimate");

  BoundArgs bnd;
  CLI::App* bound = app.add_subcommand("bound", "Bound the error of one estimate");
  bound->add_option("--scenario", bnd.scenario, "Scenario JSON")->required();
  bound->add_option("--estimate", bnd.estimate, "x,y[,z]; POCS from the box center if absent");
  bound->add_option("--report", bnd.report, "Report JSON path (stdout if absent)");
  bound->add_option("--pocs-iters", bnd.pocs_iters, "POCS iteration cap");
  bound->add_option("--tol", bnd.tol, "Solver tolerance");

  GenerateArgs gen;
  CLI::App* generate = app.add_subcommand("generate", "Write one random scenario");
  generate->add_option("--anchors", gen.anchors, "Anchors (N)");
  generate->add_option("--dim", gen.dim, "Dimension (2 or 3)");
  generate->add_option("--seed", gen.seed, "Seed");
  generate->add_option("--noise", gen.noise, "exp:RATE | uni:UPPER | posgauss:MEAN,STD");
  generate->add_option("--cube", gen.cube, "Side of the deployment cube (m)");
  generate->add_option("--out", gen.out, "Scenario JSON path (stdout if absent)");

  OracleArgs orc;
  CLI::App* oracle = app.add_subcommand("oracle", "Brute-force reference values for a scenario");
  oracle->add_option("--scenario", orc.scenario, "Scenario JSON")->required();
  oracle->add_option("--estimate", orc.estimate, "x,y[,z]");
  oracle->add_option("--samples", orc.samples, "Accepted Monte-Carlo samples");
  oracle->add_option("--seed", orc.seed, "Sampling seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*simulate) return cmd_simulate(sim, *simulate);
    if (*bound) {
      if (!(bnd.tol > 0.0) || bnd.tol >= 1.0) throw ConfigError("--tol must be in (0, 1)");
      if (bnd.pocs_iters < 1) throw ConfigError("--pocs-iters must be >= 1");
      return cmd_bound(bnd);
    }
    if (*generate) return cmd_generate(gen);
    if (*oracle) return cmd_oracle(orc);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitConfig;
}
