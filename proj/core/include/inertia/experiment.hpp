#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "inertia/certify.hpp"
#include "inertia/problems.hpp"
#include "inertia/trace.hpp"

namespace inertia {

/// A problem document materialized into an objective. Smooth docs can be
/// promoted to composites (g = 0) and composites with g = 0 demoted, so any
/// solver can consume any compatible document.
struct LoadedProblem {
  std::optional<SmoothObjective> smooth;
  std::optional<CompositeObjective> composite;

  const SmoothObjective& require_smooth() const;
  const CompositeObjective& require_composite();
  int dimension() const;
};

/// Accepts the serialized kinds (quadratic, logistic, composite) plus the
/// seeded generator kinds (random_quadratic, diag_quadratic, random_lasso,
/// random_logistic) documented in the README.
LoadedProblem load_problem(const nlohmann::json& doc);

struct ExperimentOutcome {
  int exit_code = 0;  // 0: all certifications passed; 1: at least one failed
  Trace trace;
  std::vector<Envelope> envelopes;
  std::vector<CertReport> reports;
};

/// Execute one configured run: build the problem, validate the solver
/// parameters, run, certify, and write the trace CSV and report JSON under
/// out_dir. Throws ConfigError (exit 2) on bad configuration and
/// DivergenceError (exit 3) on numerical failure.
ExperimentOutcome run_experiment(const nlohmann::json& config,
                                 const std::filesystem::path& out_dir,
                                 const std::filesystem::path& base_dir = ".");

struct SweepRow {
  long index = 0;
  nlohmann::json point;  // grid key -> value
  bool executed = false;
  bool passed = false;
  double worst_margin = 0.0;
  double regime_switch = -1.0;
  std::string error;
};

struct SweepOutcome {
  std::vector<std::string> grid_keys;
  std::vector<SweepRow> rows;
};

/// Cartesian sweep over config["grid"] (subset of alpha, gamma, h, s, mu).
/// Each point runs independently in its own subdirectory; failures are
/// recorded in the summary and the sweep continues. Writes
/// sweep_summary.csv under out_dir.
SweepOutcome sweep_experiment(const nlohmann::json& config,
                              const std::filesystem::path& out_dir,
                              const std::filesystem::path& base_dir = ".");

}  // namespace inertia
