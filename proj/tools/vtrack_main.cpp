// vtrack: simulation workbench CLI.
//
// Subcommands:
//   simulate       run one closed-loop scenario, write telemetry/metrics/plots
//   compare        run the 3-controller robustness table across plant variants
//   estimate-test  feed a (t, y[, u]) CSV through the sliding-window estimators
//   gen-track      emit path geometry and the reference trajectory for a track
//
// Exit codes: 0 success, 1 configuration/usage error, 2 simulation fault.
// The CLI owns no physics: everything is delegated to the library so a
// programmatic harness call with the same config produces identical bytes.

#include <cmath>
#include <fstream>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vtrack/config.hpp"
#include "vtrack/errors.hpp"
#include "vtrack/estimators.hpp"
#include "vtrack/harness.hpp"
#include "vtrack/scenario.hpp"
#include "vtrack/telemetry.hpp"
#include "vtrack/track.hpp"

namespace {

namespace fs = std::filesystem;
using namespace vtrack;

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  bool out_dir_explicit = false;
  std::optional<std::uint64_t> seed;
  bool print_config = false;
  int verbosity = 0;
};

void add_common(CLI::App* sub, CommonOpts& opts, bool wants_seed = true) {
  sub->add_option("--config", opts.config_path, "Scenario config file")
      ->check(CLI::ExistingFile);
  sub->add_option("--out", opts.out_dir, "Output directory")
      ->each([&opts](const std::string&) { opts.out_dir_explicit = true; });
  if (wants_seed) {
    sub->add_option("--seed", [&opts](const std::vector<std::string>& v) {
      opts.seed = std::stoull(v.back());
      return true;
    }, "Noise seed override");
  }
  sub->add_flag("--print-config", opts.print_config,
                "Print the effective config and exit");
  sub->add_flag("-v,--verbose", opts.verbosity, "Increase verbosity");
}

// Output root: --out as given when explicit or absolute; otherwise resolved
// beneath $VTRACK_OUT_ROOT when that is set.
std::string resolve_out(const CommonOpts& opts) {
  fs::path out(opts.out_dir);
  if (!opts.out_dir_explicit && out.is_relative()) {
    if (const char* root = std::getenv("VTRACK_OUT_ROOT")) {
      if (*root != '\0') out = fs::path(root) / out;
    }
  }
  return out.string();
}

ScenarioConfig load_scenario(const CommonOpts& opts) {
  ScenarioConfig sc;
  if (!opts.config_path.empty()) {
    sc = scenario_from_config(Config::parse_file(opts.config_path));
  }
  if (opts.seed) sc.seed = *opts.seed;
  sc.params.validate();
  return sc;
}

void write_run_artifacts(const RunResult& result, const ScenarioConfig& sc,
                         const std::string& out_dir) {
  fs::create_directories(out_dir);
  write_csv(result.telemetry, (fs::path(out_dir) / "telemetry.csv").string());
  auto kv = metrics_kv(result.metrics, result.outcome);
  write_kv((fs::path(out_dir) / "metrics.txt").string(), kv);
  std::ofstream cfg_out(fs::path(out_dir) / "scenario.cfg");
  cfg_out << scenario_to_config(sc).to_string();
  emit_plot_data(result.telemetry, (fs::path(out_dir) / "plots").string());
}

int cmd_simulate(const CommonOpts& opts) {
  ScenarioConfig sc = load_scenario(opts);
  if (opts.print_config) {
    std::cout << scenario_to_config(sc).to_string();
    return 0;
  }
  RunResult result = run_scenario(sc);
  const std::string out = resolve_out(opts);
  write_run_artifacts(result, sc, out);
  if (opts.verbosity > 0) {
    std::cout << "outcome=" << to_string(result.outcome)
              << " lat_rms=" << format_double(result.metrics.lat_rms)
              << " speed_rms=" << format_double(result.metrics.speed_rms)
              << " samples=" << result.metrics.samples << "\n";
  }
  if (result.outcome != RunOutcome::Completed) {
    std::cerr << "simulation fault: " << to_string(result.outcome);
    if (!result.message.empty()) std::cerr << " (" << result.message << ")";
    std::cerr << "\n";
    return 2;
  }
  std::cout << "wrote " << out << "\n";
  return 0;
}

int cmd_compare(const CommonOpts& opts) {
  ScenarioConfig sc = load_scenario(opts);
  std::vector<std::pair<double, double>> perts;
  if (!opts.config_path.empty()) {
    perts = perturbations_from_config(Config::parse_file(opts.config_path));
  }
  if (opts.print_config) {
    Config cfg = scenario_to_config(sc);
    for (const auto& [cf, cr] : perts) {
      cfg.add_item("compare",
                   "perturb = " + format_double(cf) + " " + format_double(cr));
    }
    std::cout << cfg.to_string();
    return 0;
  }
  const std::string out = resolve_out(opts);
  ComparisonTable table = compare_controllers(sc, perts, out);
  if (opts.verbosity > 0) {
    for (const auto& e : table.entries) {
      std::cout << to_string(e.controller) << " cf=" << e.cf_scale
                << " cr=" << e.cr_scale << " -> " << to_string(e.outcome)
                << " lat_rms=" << format_double(e.metrics.lat_rms)
                << " rank=" << e.rank << "\n";
    }
  }
  std::cout << "wrote " << out << "\n";
  return 0;
}

int cmd_estimate_test(const std::string& input, const CommonOpts& opts,
                      double span, double alpha, int nu) {
  TelemetryLog in = read_csv(input);
  if (!in.has_column("t") || !in.has_column("y")) {
    throw DataError("estimate-test input needs columns t,y[,u]: " + input);
  }
  const bool with_u = in.has_column("u");
  if (in.rows() < 2) throw DataError("estimate-test input needs >= 2 rows");
  const std::size_t ti = in.column("t");
  const std::size_t yi = in.column("y");
  const std::size_t ui = with_u ? in.column("u") : 0;
  const double period = in.at(1, ti) - in.at(0, ti);

  EstimatorConfig ec;
  ec.span = span;
  ec.alpha = alpha;
  ec.nu = nu;
  ec.validate(period);

  SlidingWindow ywin(span, period);
  SlidingWindow uwin(span, period);

  std::vector<std::string> cols = {"t", "denoise", "derivative"};
  if (with_u) cols.push_back("F");
  TelemetryLog out_log(cols);
  const double nan = std::nan("");
  for (std::size_t r = 0; r < in.rows(); ++r) {
    const double t = in.at(r, ti);
    ywin.push(in.at(r, yi), t);
    if (with_u) uwin.push(in.at(r, ui), t);
    std::vector<double> row = {t, denoise(ywin).value_or(nan),
                               differentiate(ywin).value_or(nan)};
    if (with_u) {
      auto F = (nu == 2) ? estimate_F_order2(ywin, uwin, alpha)
                         : estimate_F_order1(ywin, uwin, alpha);
      row.push_back(F.value_or(nan));
    }
    out_log.add_row(row);
  }
  const std::string out = resolve_out(opts);
  fs::create_directories(out);
  write_csv(out_log, (fs::path(out) / "estimates.csv").string());
  std::cout << "wrote " << out << "\n";
  return 0;
}

int cmd_gen_track(const CommonOpts& opts) {
  ScenarioConfig sc = load_scenario(opts);
  if (opts.print_config) {
    std::cout << scenario_to_config(sc).to_string();
    return 0;
  }
  Path path(sc.track);
  ReferenceTrajectory traj(sc.track, sc.params, sc.dt);

  TelemetryLog path_log({"s", "X", "Y", "psi", "kappa"});
  for (const auto& pt : path.grid()) {
    path_log.add_row({pt.s, pt.X, pt.Y, pt.psi, pt.kappa});
  }
  TelemetryLog ref_log({"t", "s", "kappa", "Vx", "Vx_dot", "X", "Y", "psi",
                        "psi_dot", "y2", "y2_dot", "y2_ddot"});
  for (const auto& rs : traj.samples()) {
    ref_log.add_row({rs.t, rs.s, rs.kappa, rs.Vx, rs.Vx_dot, rs.X, rs.Y,
                     rs.psi, rs.psi_dot, rs.y2, rs.y2_dot, rs.y2_ddot});
  }
  const std::string out = resolve_out(opts);
  fs::create_directories(out);
  write_csv(path_log, (fs::path(out) / "path.csv").string());
  write_csv(ref_log, (fs::path(out) / "reference.csv").string());
  std::cout << "wrote " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vtrack: vehicle trajectory-tracking workbench"};
  app.require_subcommand(1);

  CommonOpts sim_opts, cmp_opts, est_opts, gen_opts;
  std::string est_input;
  double est_span = 0.05, est_alpha = 1.0;
  int est_nu = 1;

  CLI::App* sim = app.add_subcommand("simulate", "Run one scenario");
  add_common(sim, sim_opts);

  CLI::App* cmp = app.add_subcommand("compare", "Controller comparison table");
  add_common(cmp, cmp_opts);

  CLI::App* est = app.add_subcommand(
      "estimate-test", "Run estimators over a (t,y[,u]) CSV");
  est->add_option("--input", est_input, "Input CSV")
      ->required()
      ->check(CLI::ExistingFile);
  est->add_option("--span", est_span, "Window span [s]");
  est->add_option("--alpha", est_alpha, "Input gain for F estimation");
  est->add_option("--nu", est_nu, "Ultra-local order (1 or 2)")
      ->check(CLI::Range(1, 2));
  add_common(est, est_opts, /*wants_seed=*/false);

  CLI::App* gen = app.add_subcommand("gen-track", "Emit path + reference");
  add_common(gen, gen_opts, /*wants_seed=*/false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim_opts);
    if (cmp->parsed()) return cmd_compare(cmp_opts);
    if (est->parsed())
      return cmd_estimate_test(est_input, est_opts, est_span, est_alpha,
                               est_nu);
    if (gen->parsed()) return cmd_gen_track(gen_opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 1;
  } catch (const DivergenceError& e) {
    std::cerr << "simulation fault: " << e.what() << "\n";
    return 2;
  } catch (const ModelError& e) {
    std::cerr << "simulation fault: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
