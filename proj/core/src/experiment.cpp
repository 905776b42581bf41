#include "inertia/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "inertia/agm.hpp"
#include "inertia/apm.hpp"
#include "inertia/dynamics.hpp"
#include "inertia/errors.hpp"
#include "inertia/rng.hpp"

namespace inertia {

namespace {

[[noreturn]] void config_fail(const std::string& msg) {
  throw ConfigError("config: " + msg);
}

double require_number(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_number())
    config_fail("missing numeric field '" + key + "'");
  return j.at(key).get<double>();
}

std::uint64_t seed_or(const nlohmann::json& j, const std::string& key,
                      std::uint64_t fallback) {
  return j.contains(key) ? j.at(key).get<std::uint64_t>() : fallback;
}

}  // namespace

const SmoothObjective& LoadedProblem::require_smooth() const {
  if (smooth) return *smooth;
  if (composite && composite->nonsmooth.kind() == ProxKind::zero)
    return composite->smooth;
  config_fail("this solver needs a smooth objective (or composite with g = 0)");
}

const CompositeObjective& LoadedProblem::require_composite() {
  if (!composite) {
    if (!smooth) config_fail("no problem loaded");
    composite = as_composite(*smooth);
  }
  return *composite;
}

int LoadedProblem::dimension() const {
  if (smooth) return smooth->dimension;
  if (composite) return composite->smooth.dimension;
  config_fail("no problem loaded");
}

LoadedProblem load_problem(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("kind"))
    config_fail("problem document needs a 'kind'");
  const std::string kind = doc.at("kind").get<std::string>();
  LoadedProblem out;
  if (kind == "quadratic" || kind == "logistic") {
    out.smooth = smooth_from_json(doc);
  } else if (kind == "composite") {
    out.composite = composite_from_json(doc);
  } else if (kind == "random_quadratic") {
    out.smooth = random_psd_quadratic(
        doc.at("dim").get<int>(), require_number(doc, "eig_min"),
        require_number(doc, "eig_max"), doc.at("seed").get<std::uint64_t>());
  } else if (kind == "diag_quadratic") {
    const auto spectrum = doc.at("spectrum").get<std::vector<double>>();
    out.smooth = quadratic_diag(
        Eigen::Map<const Vector>(spectrum.data(), spectrum.size()));
  } else if (kind == "random_lasso") {
    out.composite = random_lasso(
        doc.at("dim").get<int>(), require_number(doc, "eig_min"),
        require_number(doc, "eig_max"), require_number(doc, "lambda"),
        doc.at("seed").get<std::uint64_t>());
  } else if (kind == "random_logistic") {
    out.smooth = random_logistic(doc.at("rows").get<int>(),
                                 doc.at("cols").get<int>(),
                                 require_number(doc, "reg"),
                                 doc.at("seed").get<std::uint64_t>());
  } else {
    config_fail("unknown problem kind '" + kind + "'");
  }
  return out;
}

namespace {

nlohmann::json load_problem_doc(const nlohmann::json& config,
                                const std::filesystem::path& base_dir) {
  if (!config.contains("problem")) config_fail("missing 'problem'");
  const nlohmann::json& p = config.at("problem");
  if (p.is_object()) return p;
  if (p.is_string()) {
    const std::filesystem::path path = base_dir / p.get<std::string>();
    std::ifstream in(path);
    if (!in) config_fail("cannot open problem file " + path.string());
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      config_fail("problem file " + path.string() + ": " + e.what());
    }
    return doc;
  }
  config_fail("'problem' must be an object or a file path");
}

Vector parse_start(const nlohmann::json& config, int dim,
                   std::uint64_t fallback_seed) {
  const char* key = config.contains("x1") ? "x1" : "x0";
  if (!config.contains(key)) config_fail("missing start point 'x1' (or 'x0')");
  const nlohmann::json& j = config.at(key);
  if (j.is_array()) {
    const auto values = j.get<std::vector<double>>();
    if (static_cast<int>(values.size()) != dim)
      config_fail("start point dimension mismatch");
    return Eigen::Map<const Vector>(values.data(), dim);
  }
  if (j.is_object()) {
    Rng rng(seed_or(j, "seed", fallback_seed));
    const double scale = j.value("scale", 1.0);
    return scale * rng.normal_vector(dim);
  }
  config_fail("start point must be an array or {seed, scale}");
}

double solve_step_rule(const nlohmann::json& params, const char* value_key,
                       const char* rule_key, double L) {
  if (params.contains(value_key)) return require_number(params, value_key);
  if (!params.contains(rule_key))
    config_fail(std::string("missing '") + value_key + "' or '" + rule_key + "'");
  const std::string rule = params.at(rule_key).get<std::string>();
  if (std::string(value_key) == "h") {
    if (rule == "critical") return 1.0 / std::sqrt(L);
    if (rule == "half_critical") return 1.0 / std::sqrt(2.0 * L);
  } else {
    if (rule == "inv_L") return 1.0 / L;
    if (rule == "half_inv_L") return 0.5 / L;
  }
  config_fail(std::string("unknown ") + rule_key + " '" + rule + "'");
}

struct CertifySpec {
  nlohmann::json entry;
  std::string kind;  // auto kind, or "explicit"
  std::string name;
  double rel_tol = 1e-9;
  double rho_scale = 1.0;
};

std::vector<CertifySpec> parse_certify(const nlohmann::json& config) {
  std::vector<CertifySpec> specs;
  if (!config.contains("certify")) return specs;
  const nlohmann::json& list = config.at("certify");
  if (!list.is_array()) config_fail("'certify' must be an array");
  for (const nlohmann::json& entry : list) {
    CertifySpec spec;
    spec.entry = entry;
    if (!entry.contains("envelope")) config_fail("certify entry needs 'envelope'");
    if (entry.at("envelope").is_string())
      spec.kind = entry.at("envelope").get<std::string>();
    else
      spec.kind = "explicit";
    spec.name = entry.value("name", spec.kind);
    spec.rel_tol = entry.value("rel_tol", 1e-9);
    spec.rho_scale = entry.value("rho_scale", 1.0);
    specs.push_back(std::move(spec));
  }
  return specs;
}

double require_constant(const std::optional<double>& c, const char* what) {
  if (!c) config_fail(std::string("problem lacks ") + what);
  return *c;
}

}  // namespace

ExperimentOutcome run_experiment(const nlohmann::json& config,
                                 const std::filesystem::path& out_dir,
                                 const std::filesystem::path& base_dir) {
  if (!config.is_object()) config_fail("expected a JSON object");
  const std::string solver = [&] {
    if (!config.contains("solver")) config_fail("missing 'solver'");
    return config.at("solver").get<std::string>();
  }();
  if (solver != "agm" && solver != "apm" && solver != "ode")
    config_fail("solver must be one of agm, apm, ode");

  LoadedProblem problem = load_problem(load_problem_doc(config, base_dir));
  const std::uint64_t seed = seed_or(config, "seed", 0);
  const nlohmann::json params_json = config.value("params", nlohmann::json::object());
  const std::vector<CertifySpec> certify_specs = parse_certify(config);
  const double gap_floor_rel = config.value("gap_floor_rel", 1e-12);

  ExperimentOutcome outcome;
  double gap0 = 0.0;

  // Solver-specific state the envelope factories may need afterwards.
  std::optional<AgmParams> agm_params;
  std::optional<ApmParams> apm_params;
  std::optional<OdeParams> ode_params;
  std::optional<OdeRun> ode_run;

  if (solver == "agm") {
    const SmoothObjective& P = problem.require_smooth();
    AgmParams p;
    p.alpha = require_number(params_json, "alpha");
    p.gamma = params_json.value("gamma", 1.0);
    p.h = solve_step_rule(params_json, "h", "h_rule", P.lipschitz_L);
    bool strong_mode = false;
    for (const CertifySpec& s : certify_specs)
      strong_mode = strong_mode || s.kind == "linear_gradient";
    try {
      p.validate(P, strong_mode);
    } catch (const std::invalid_argument& e) {
      config_fail(e.what());
    }
    if (!P.f_star) config_fail("problem lacks f_star");
    const long iters = config.value("iterations", 0L);
    if (iters < 1) config_fail("'iterations' must be >= 1");
    const Vector x1 = parse_start(config, P.dimension, seed);
    gap0 = P.value(x1) - *P.f_star;
    AgmRun run = run_agm(P, p, x1, iters);
    outcome.trace = std::move(run.trace);
    agm_params = p;
  } else if (solver == "apm") {
    const CompositeObjective& P = problem.require_composite();
    ApmParams p;
    p.alpha = require_number(params_json, "alpha");
    p.s = solve_step_rule(params_json, "s", "s_rule", P.smooth.lipschitz_L);
    bool strong_mode = false;
    for (const CertifySpec& s : certify_specs)
      strong_mode = strong_mode || s.kind == "linear_prox";
    try {
      p.validate(P, strong_mode);
    } catch (const std::invalid_argument& e) {
      config_fail(e.what());
    }
    if (!P.F_star) config_fail("problem lacks F_star");
    const long iters = config.value("iterations", 0L);
    if (iters < 1) config_fail("'iterations' must be >= 1");
    const Vector x1 = parse_start(config, P.smooth.dimension, seed);
    if (!std::isfinite(P.nonsmooth.value(x1)))
      config_fail("start point infeasible for g");
    gap0 = P.value(x1) - *P.F_star;
    ApmRun run = run_apm(P, p, x1, iters);
    outcome.trace = std::move(run.trace);
    apm_params = p;
  } else {
    const SmoothObjective& P = problem.require_smooth();
    OdeParams p;
    p.alpha = require_number(params_json, "alpha");
    p.beta = require_number(params_json, "beta");
    p.gamma = params_json.value("gamma", 1.0);
    const std::string mode = params_json.value("mode", "pl");
    if (mode != "pl" && mode != "sc") config_fail("ode mode must be pl or sc");
    p.mode = mode == "pl" ? OdeMode::pl : OdeMode::sc;
    p.r = params_json.contains("r")
              ? require_number(params_json, "r")
              : (p.mode == OdeMode::pl ? p.alpha * p.beta
                                       : 0.5 * p.alpha * p.beta);
    p.t0 = params_json.value("t0", 1e-3);
    p.t_end = require_number(params_json, "t_end");
    p.step = params_json.value("step", 1e-3);
    try {
      p.validate(P);
    } catch (const std::invalid_argument& e) {
      config_fail(e.what());
    }
    if (!P.f_star) config_fail("problem lacks f_star");
    const Vector x0 = parse_start(config, P.dimension, seed);
    gap0 = P.value(x0) - *P.f_star;

    std::vector<double> sample_times;
    for (const CertifySpec& s : certify_specs) {
      if (s.kind == "continuous_sc") {
        const double T = continuous_sc_switch_time(
            require_constant(P.strong_mu, "strong_mu"), p.alpha, p.beta,
            p.gamma);
        if (p.t_end < T)
          config_fail("t_end is before the strongly-convex switch time");
        sample_times.push_back(T);
      }
    }
    ode_run = integrate(P, p, x0, sample_times);
    outcome.trace = ode_run->trace;
    ode_params = p;
  }

  // Envelopes and certification.
  for (const CertifySpec& spec : certify_specs) {
    Envelope env;
    if (spec.kind == "explicit") {
      env = Envelope::from_json(spec.entry.at("envelope"));
    } else if (spec.kind == "discrete_pl") {
      const SmoothObjective& P = problem.require_smooth();
      env = envelope_discrete_pl(require_constant(P.pl_mu, "pl_mu"),
                                 agm_params->h, agm_params->gamma,
                                 agm_params->alpha, gap0);
    } else if (spec.kind == "discrete_prox_pl") {
      const CompositeObjective& P = problem.require_composite();
      env = envelope_discrete_prox_pl(
          require_constant(P.smooth.strong_mu, "strong_mu"), apm_params->s,
          P.smooth.lipschitz_L, apm_params->alpha, gap0);
    } else if (spec.kind == "linear_gradient") {
      const SmoothObjective& P = problem.require_smooth();
      const double rho =
          spec.rho_scale *
          rate_rho_gradient(require_constant(P.strong_mu, "strong_mu"),
                            P.lipschitz_L, agm_params->gamma, agm_params->h);
      env = envelope_linear(1.0 - rho, gap0);
    } else if (spec.kind == "linear_prox") {
      const CompositeObjective& P = problem.require_composite();
      const double rho =
          spec.rho_scale *
          rate_rho_prox(require_constant(P.smooth.strong_mu, "strong_mu"),
                        P.smooth.lipschitz_L, apm_params->s);
      env = envelope_linear(1.0 / (1.0 + rho), gap0);
    } else if (spec.kind == "continuous_pl") {
      const SmoothObjective& P = problem.require_smooth();
      env = envelope_continuous_pl(require_constant(P.pl_mu, "pl_mu"),
                                   ode_params->alpha, ode_params->beta, gap0,
                                   ode_params->t0);
    } else if (spec.kind == "continuous_sc") {
      const SmoothObjective& P = problem.require_smooth();
      env = envelope_continuous_sc(*ode_run, P,
                                   require_constant(P.strong_mu, "strong_mu"),
                                   ode_params->alpha, ode_params->beta,
                                   ode_params->gamma);
    } else {
      config_fail("unknown envelope kind '" + spec.kind + "'");
    }
    outcome.envelopes.push_back(env);
    outcome.reports.push_back(check_domination(
        outcome.trace, env, gap_floor_rel * gap0, spec.name, spec.rel_tol));
  }

  if (!outcome.envelopes.empty()) {
    for (TraceRow& row : outcome.trace.rows()) {
      const double bound = outcome.envelopes.front().evaluate(row.index);
      row.envelope = std::isfinite(bound) ? bound : 0.0;
    }
  }

  for (const CertReport& r : outcome.reports)
    if (!r.passed) outcome.exit_code = 1;

  // Artifacts.
  std::filesystem::create_directories(out_dir);
  const nlohmann::json outputs = config.value("outputs", nlohmann::json::object());
  {
    std::ofstream out(out_dir / outputs.value("trace", "trace.csv"));
    outcome.trace.write_csv(out);
  }
  if (!outcome.reports.empty()) {
    nlohmann::json reports = nlohmann::json::array();
    for (const CertReport& r : outcome.reports) reports.push_back(r.to_json());
    std::ofstream out(out_dir / outputs.value("report", "report.json"));
    out << reports.dump(2) << '\n';
  }
  return outcome;
}

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

namespace {

const char* const kGridKeys[] = {"alpha", "gamma", "h", "s", "mu"};

void apply_grid_value(nlohmann::json& config, const std::string& key,
                      double value) {
  if (key == "mu") {
    nlohmann::json& problem = config.at("problem");
    if (!problem.is_object() || !problem.contains("kind") ||
        (problem.at("kind") != "random_quadratic" &&
         problem.at("kind") != "random_lasso"))
      config_fail("grid over mu needs a random_quadratic or random_lasso problem");
    problem["eig_min"] = value;
    return;
  }
  nlohmann::json& params = config["params"];
  params[key] = value;
  if (key == "h") params.erase("h_rule");
  if (key == "s") params.erase("s_rule");
}

}  // namespace

SweepOutcome sweep_experiment(const nlohmann::json& config,
                              const std::filesystem::path& out_dir,
                              const std::filesystem::path& base_dir) {
  if (!config.contains("grid") || !config.at("grid").is_object())
    config_fail("sweep needs a 'grid' object");
  const nlohmann::json& grid = config.at("grid");

  SweepOutcome outcome;
  std::vector<std::vector<double>> values;
  for (const char* key : kGridKeys) {
    if (!grid.contains(key)) continue;
    outcome.grid_keys.push_back(key);
    values.push_back(grid.at(key).get<std::vector<double>>());
  }
  for (const auto& [key, _] : grid.items()) {
    if (std::find(outcome.grid_keys.begin(), outcome.grid_keys.end(), key) ==
        outcome.grid_keys.end())
      config_fail("grid key '" + key + "' not in {alpha, gamma, h, s, mu}");
  }

  long total = values.empty() ? 0 : 1;
  for (const auto& v : values) {
    if (v.empty()) total = 0;
    total *= static_cast<long>(v.size());
  }

  std::filesystem::create_directories(out_dir);
  for (long index = 0; index < total; ++index) {
    SweepRow row;
    row.index = index;
    nlohmann::json point_config = config;
    point_config.erase("grid");
    long rem = index;
    for (std::size_t d = 0; d < values.size(); ++d) {
      const double v = values[d][rem % values[d].size()];
      rem /= static_cast<long>(values[d].size());
      row.point[outcome.grid_keys[d]] = v;
      apply_grid_value(point_config, outcome.grid_keys[d], v);
    }
    const std::filesystem::path point_dir =
        out_dir / ("point_" + std::to_string(index));
    try {
      ExperimentOutcome result =
          run_experiment(point_config, point_dir, base_dir);
      row.executed = true;
      row.passed = result.exit_code == 0;
      row.worst_margin = 1.0;
      for (const CertReport& r : result.reports)
        row.worst_margin = std::min(row.worst_margin, r.worst_margin);
      if (!result.envelopes.empty())
        row.regime_switch = result.envelopes.front().regime_switch;
    } catch (const std::exception& e) {
      row.executed = false;
      row.passed = false;
      row.worst_margin = -std::numeric_limits<double>::max();
      row.error = e.what();
    }
    outcome.rows.push_back(std::move(row));
  }

  std::ofstream out(out_dir / "sweep_summary.csv");
  out << "index";
  for (const std::string& key : outcome.grid_keys) out << ',' << key;
  out << ",passed,worst_margin,regime_switch\n";
  for (const SweepRow& row : outcome.rows) {
    out << row.index;
    for (const std::string& key : outcome.grid_keys)
      out << ',' << format_double(row.point.at(key).get<double>());
    out << ',' << (row.passed ? 1 : 0) << ',' << format_double(row.worst_margin)
        << ',' << format_double(row.regime_switch) << '\n';
  }
  return outcome;
}

}  // namespace inertia
