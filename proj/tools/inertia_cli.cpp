// Command-line runner for the inertial solvers and their rate certification.
//
// Subcommands:
//   run     --config <json> [--out-dir <dir>]   solve + certify, write trace/report
//   sweep   --config <json> [--out-dir <dir>]   parameter grid, write summary
//   certify --trace <csv> --envelope <json>     re-check a stored trace
//   ode     --config <json> [--out-dir <dir>]   run forcing solver = "ode"
//
// Exit codes: 0 success, 1 certification failure, 2 configuration error,
// 3 numerical divergence.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "inertia/errors.hpp"
#include "inertia/experiment.hpp"

namespace {

constexpr int kExitCertFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitDivergence = 3;

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw inertia::ConfigError("cannot open " + path.string());
  try {
    nlohmann::json j;
    in >> j;
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw inertia::ConfigError(path.string() + ": " + e.what());
  }
}

int do_run(const std::string& config_path, const std::string& out_dir,
           bool force_ode) {
  nlohmann::json config = read_json_file(config_path);
  if (force_ode) config["solver"] = "ode";
  const auto base_dir = std::filesystem::path(config_path).parent_path();
  inertia::ExperimentOutcome outcome =
      inertia::run_experiment(config, out_dir, base_dir);
  for (const inertia::CertReport& r : outcome.reports) {
    std::cout << (r.passed ? "pass" : "FAIL") << "  " << r.inequality_name
              << "  points=" << r.points_checked
              << "  worst_margin=" << r.worst_margin << "  at="
              << r.worst_location << '\n';
  }
  return outcome.exit_code;
}

int do_sweep(const std::string& config_path, const std::string& out_dir) {
  nlohmann::json config = read_json_file(config_path);
  const auto base_dir = std::filesystem::path(config_path).parent_path();
  inertia::SweepOutcome outcome =
      inertia::sweep_experiment(config, out_dir, base_dir);
  std::cout << "index";
  for (const std::string& key : outcome.grid_keys) std::cout << ',' << key;
  std::cout << ",passed,worst_margin,regime_switch\n";
  for (const inertia::SweepRow& row : outcome.rows) {
    std::cout << row.index;
    for (const std::string& key : outcome.grid_keys)
      std::cout << ',' << row.point.at(key).get<double>();
    std::cout << ',' << (row.passed ? 1 : 0) << ',' << row.worst_margin << ','
              << row.regime_switch;
    if (!row.error.empty()) std::cout << "  # " << row.error;
    std::cout << '\n';
  }
  return 0;
}

int do_certify(const std::string& trace_path, const std::string& envelope_path,
               double rel_tol, double gap_floor_rel, const std::string& out) {
  std::ifstream trace_in(trace_path);
  if (!trace_in) throw inertia::ConfigError("cannot open " + trace_path);
  const inertia::Trace trace = inertia::Trace::read_csv(trace_in);
  const inertia::Envelope envelope =
      inertia::Envelope::from_json(read_json_file(envelope_path));

  const double gap_floor = gap_floor_rel * envelope.anchor_gap;
  const inertia::CertReport report = inertia::check_domination(
      trace, envelope, gap_floor, inertia::to_string(envelope.kind), rel_tol);

  const std::string dumped = report.to_json().dump(2);
  std::cout << dumped << '\n';
  if (!out.empty()) {
    std::ofstream f(out);
    f << dumped << '\n';
  }
  return report.passed ? 0 : kExitCertFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"inertial solvers with certified convergence envelopes"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::string trace_path;
  std::string envelope_path;
  std::string report_out;
  double rel_tol = 1e-9;
  double gap_floor_rel = 1e-12;

  CLI::App* run = app.add_subcommand("run", "run a configured experiment");
  run->add_option("--config", config_path, "experiment config JSON")->required();
  run->add_option("--out-dir", out_dir, "output directory");

  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter grid");
  sweep->add_option("--config", config_path, "experiment config JSON with grid")
      ->required();
  sweep->add_option("--out-dir", out_dir, "output directory");

  CLI::App* certify =
      app.add_subcommand("certify", "check a stored trace against an envelope");
  certify->add_option("--trace", trace_path, "trace CSV")->required();
  certify->add_option("--envelope", envelope_path, "envelope JSON")->required();
  certify->add_option("--rel-tol", rel_tol, "relative domination slack");
  certify->add_option("--gap-floor-rel", gap_floor_rel,
                      "gap floor relative to the envelope anchor gap");
  certify->add_option("--out", report_out, "also write the report here");

  CLI::App* ode = app.add_subcommand("ode", "integrate the continuous flow");
  ode->add_option("--config", config_path, "experiment config JSON")->required();
  ode->add_option("--out-dir", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return do_run(config_path, out_dir, false);
    if (ode->parsed()) return do_run(config_path, out_dir, true);
    if (sweep->parsed()) return do_sweep(config_path, out_dir);
    return do_certify(trace_path, envelope_path, rel_tol, gap_floor_rel,
                      report_out);
  } catch (const inertia::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const inertia::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
}
