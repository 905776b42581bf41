// End-to-end acceptance suite. Every check prints exactly one line:
//   [PASS|FAIL] <nn> <name> -- <detail>
// and the process exits nonzero if any check fails. The first argument is
// the path to the CLI binary (used by the exit-code controls); the second is
// a scratch directory.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "inertia/agm.hpp"
#include "inertia/apm.hpp"
#include "inertia/certify.hpp"
#include "inertia/dynamics.hpp"
#include "inertia/experiment.hpp"
#include "inertia/oracle.hpp"
#include "inertia/problems.hpp"
#include "inertia/rng.hpp"

using namespace inertia;
namespace fs = std::filesystem;

namespace {

struct Checker {
  int failures = 0;

  void record(int num, const std::string& name, bool ok,
              const std::string& detail) {
    std::printf("[%s] %02d %s -- %s\n", ok ? "PASS" : "FAIL", num, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
};

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof(buf), pattern, args);
  va_end(args);
  return buf;
}

int run_cli(const std::string& bin, const std::string& args,
            const fs::path& log) {
  const std::string cmd = bin + " " + args + " > " + log.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  if (rc == -1) return -1;
  if (WIFEXITED(rc)) return WEXITSTATUS(rc);
  return -2;
}

// --------------------------------------------------------------------------
// 1. Linear rate of the gradient method at gamma = 1, h^2 = 1/(2L).
// --------------------------------------------------------------------------
void criterion_01(Checker& chk) {
  SmoothObjective P = random_psd_quadratic(20, 0.1, 1.0, 7);
  const double L = P.lipschitz_L;
  const double mu = *P.strong_mu;
  AgmParams params{.alpha = 3.0, .gamma = 1.0, .h = 1.0 / std::sqrt(2.0 * L)};
  const Vector x1 = 2.0 * Rng(8).normal_vector(20);
  const double gap0 = P.value(x1) - *P.f_star;

  const auto start = std::chrono::steady_clock::now();
  AgmRun run = run_agm(P, params, x1, 2000);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  const double rho = mu / (4.0 * (L + mu));
  Envelope env = envelope_linear(1.0 - rho, gap0);
  CertReport report =
      check_domination(run.trace, env, 1e-12 * gap0, "linear-gradient", 1e-9);

  const bool rate_matches =
      std::abs(rate_rho_gradient(mu, L, params.gamma, params.h) - rho) <
      1e-12 * rho;
  const bool ok = report.passed && rate_matches && seconds < 1.0;
  chk.record(1, "linear gradient rate, 20-D quadratic", ok,
             fmt("worst margin %.3e over %ld points, %.3f s",
                 report.worst_margin, report.points_checked, seconds));
}

// --------------------------------------------------------------------------
// 2. Piecewise geometric-then-power envelope on a rank-deficient quadratic.
// --------------------------------------------------------------------------
void criterion_02(Checker& chk) {
  Vector spectrum(5);
  spectrum << 1.0, 1.0, 0.3, 0.0, 0.0;
  SmoothObjective P = quadratic_diag(spectrum);
  const double mu = *P.pl_mu;
  const double h = 1.0 / std::sqrt(P.lipschitz_L);

  bool ok = std::abs(mu - 0.3) < 1e-12;
  std::string detail;
  for (const double alpha : {1.0, 3.0}) {
    AgmParams params{.alpha = alpha, .gamma = 1.0, .h = h};
    const Vector x1 = Rng(9).normal_vector(5);
    const double gap0 = P.value(x1) - *P.f_star;
    AgmRun run = run_agm(P, params, x1, 5000);

    Envelope env = envelope_discrete_pl(mu, h, params.gamma, alpha, gap0);
    CertReport report = check_domination(run.trace, env, 1e-12 * gap0,
                                         "piecewise-gradient", 1e-9);

    const long K = switch_K_gradient(mu, h, params.gamma, alpha);
    const double c = mu * h * h * (2.0 - params.gamma);
    const auto scan =
        oracle::scan_switch_integer(c, -2.0 * alpha, -alpha * alpha, K + 1000);
    const bool K_ok = scan.k.has_value() && *scan.k == K &&
                      env.regime_switch == static_cast<double>(K);
    ok = ok && report.passed && K_ok;
    detail += fmt("alpha=%.0f: K=%ld margin=%.3e; ", alpha, K,
                  report.worst_margin);
  }
  chk.record(2, "piecewise envelope, rank-deficient quadratic", ok, detail);
}

// --------------------------------------------------------------------------
// 3. Linear rate of the proximal method on a strongly convex lasso.
// --------------------------------------------------------------------------
void criterion_03(Checker& chk) {
  CompositeObjective P = random_lasso(20, 0.2, 1.0, 0.1, 11);
  const double L = P.smooth.lipschitz_L;
  const double mu = *P.smooth.strong_mu;
  ApmParams params{.alpha = 3.0, .s = 0.5 / L};
  const Vector x1 = Rng(12).normal_vector(20);
  const double gap0 = P.value(x1) - *P.F_star;

  ApmRun run = run_apm(P, params, x1, 2000);
  const double rho = mu / (4.0 * L + mu);
  Envelope env = envelope_linear(1.0 / (1.0 + rho), gap0);
  CertReport report =
      check_domination(run.trace, env, 1e-12 * gap0, "linear-prox", 1e-9);

  const bool rate_matches =
      std::abs(rate_rho_prox(mu, L, params.s) - rho) < 1e-12 * rho;
  chk.record(3, "linear proximal rate, strongly convex lasso",
             report.passed && rate_matches,
             fmt("rho=%.6f worst margin %.3e over %ld points", rho,
                 report.worst_margin, report.points_checked));
}

// --------------------------------------------------------------------------
// 4. Continuous piecewise envelope along the integrated flow.
// --------------------------------------------------------------------------
void criterion_04(Checker& chk) {
  Vector spectrum(2);
  spectrum << 1.0, 0.5;
  SmoothObjective P = quadratic_diag(spectrum);
  const double mu = *P.pl_mu;  // 0.5
  OdeParams params{.alpha = 2.0, .beta = 1.0, .gamma = 1.0, .r = 2.0,
                   .t0 = 1e-3, .t_end = 20.0, .step = 1e-3,
                   .mode = OdeMode::pl};
  const double T = params.alpha / (mu * params.beta);

  const Vector x0 = Rng(13).normal_vector(2);
  const double gap0 = P.value(x0) - *P.f_star;
  OdeRun run = integrate(P, params, x0);

  Envelope env =
      envelope_continuous_pl(mu, params.alpha, params.beta, gap0, params.t0);
  CertReport report = check_domination(run.trace, env, 1e-12 * gap0,
                                       "piecewise-continuous", 1e-9);

  // Continuity of the bound at the switch, and the analytic identity behind it.
  const double at_T = env.evaluate(T);
  const double after_T = env.evaluate(std::nextafter(T, 1e9));
  const bool continuous = std::abs(after_T - at_T) <= 1e-12 * at_T;
  const double lhs = std::exp(-2.0 * mu * params.beta * T);
  const double rhs =
      std::pow(params.alpha / (mu * params.beta * std::numbers::e),
               2.0 * params.alpha) /
      std::pow(T, 2.0 * params.alpha);
  const bool identity = std::abs(lhs - rhs) <= 1e-12 * lhs;

  chk.record(4, "continuous piecewise envelope (T = 4)",
             report.passed && continuous && identity && T == 4.0,
             fmt("worst margin %.3e over %ld points", report.worst_margin,
                 report.points_checked));
}

// --------------------------------------------------------------------------
// 5. Anchored strongly convex envelope past the switch time.
// --------------------------------------------------------------------------
void criterion_05(Checker& chk) {
  Vector spectrum(2);
  spectrum << 1.0, 0.5;
  SmoothObjective P = quadratic_diag(spectrum);
  const double mu = *P.strong_mu;  // 0.5
  OdeParams params{.alpha = 1.0, .beta = 1.0, .gamma = 1.0, .r = 0.5,
                   .t0 = 1e-3, .t_end = 0.0, .step = 1e-3,
                   .mode = OdeMode::sc};
  const double T =
      continuous_sc_switch_time(mu, params.alpha, params.beta, params.gamma);
  params.t_end = 4.0 * T;

  const Vector x0 = Rng(14).normal_vector(2);
  OdeRun run = integrate(P, params, x0, std::vector<double>{T});
  Envelope env = envelope_continuous_sc(run, P, mu, params.alpha, params.beta,
                                        params.gamma);

  const double gap0 = P.value(x0) - *P.f_star;
  CertReport report = check_domination(run.trace, env, 1e-12 * gap0,
                                       "anchored-strongly-convex", 1e-9);
  chk.record(5, "strongly convex flow envelope on [T, 4T]", report.passed,
             fmt("T=%.4f anchor=%.4f worst margin %.3e over %ld points", T,
                 env.anchor, report.worst_margin, report.points_checked));
}

// --------------------------------------------------------------------------
// 6. Per-step energy inequalities and the two pointwise lemmas.
// --------------------------------------------------------------------------
void criterion_06(Checker& chk) {
  bool ok = true;
  std::string detail;

  // Gradient-side per-step bound over 5 seeds, 500 consecutive steps.
  double worst_slack = 1e9;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SmoothObjective P =
        random_psd_quadratic(8, seed % 2 == 0 ? 0.0 : 0.15, 1.0, seed);
    AgmParams params{.alpha = 2.0 + 0.5 * seed, .gamma = 1.1,
                     .h = 0.9 / std::sqrt(P.lipschitz_L)};
    AgmState s = agm_init(P, params, Rng(100 + seed).normal_vector(8));
    for (int k = 0; k < 500; ++k) {
      const AgmState next = agm_step(P, params, s);
      for (const double omega : {0.0, 1.0}) {
        const double slack = check_energy_difference(P, params, s, next, omega);
        worst_slack = std::min(worst_slack, slack);
        ok = ok && slack >= -1e-10;
      }
      s = next;
    }
  }
  detail += fmt("gradient slack >= %.2e; ", worst_slack);

  // Proximal per-step identity over 5 seeds.
  double worst_abs = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    CompositeObjective P = random_lasso(8, 0.1, 1.0, 0.12, 200 + seed);
    ApmParams params{.alpha = 3.0, .s = 0.6 / P.smooth.lipschitz_L};
    ApmState s = apm_init(P, params, Rng(300 + seed).normal_vector(8));
    for (int k = 0; k < 500; ++k) {
      const ApmState next = apm_step(P, params, s);
      const double slack =
          std::abs(check_prox_energy_difference(P, params, s, next));
      worst_abs = std::max(worst_abs, slack);
      ok = ok && slack <= 1e-10;
      s = next;
    }
  }
  detail += fmt("prox |slack| <= %.2e; ", worst_abs);

  // Pointwise descent inequality (1000 points) on a strongly convex lasso.
  CompositeObjective P = random_lasso(10, 0.3, 1.0, 0.2, 17);
  const double L = P.smooth.lipschitz_L;
  const double mu = *P.smooth.strong_mu;
  Rng rng(18);
  double worst_lemma = 1e9;
  for (int i = 0; i < 1000; ++i) {
    const Vector x = rng.normal_vector(10);
    const Vector y = rng.normal_vector(10);
    const double s = rng.uniform(0.05, 1.0) / L;
    const Vector G = gradient_mapping(P, x, s);
    const double slack = P.value(y) + G.dot(x - y) -
                         0.5 * s * (2.0 - s * L) * G.squaredNorm() -
                         0.5 * mu * (x - y).squaredNorm() -
                         P.value(x - s * G);
    worst_lemma = std::min(worst_lemma, slack);
    ok = ok && slack >= -1e-10;
  }
  detail += fmt("descent slack >= %.2e; ", worst_lemma);

  // Pointwise gradient-dominance of the mapping (1000 points).
  std::vector<Vector> pts;
  for (int i = 0; i < 1000; ++i) pts.push_back(rng.normal_vector(10));
  const double ratio = check_pl(P, pts, 1.0 / L);
  ok = ok && ratio >= mu * (1.0 - 1e-9);
  detail += fmt("mapping ratio %.4f >= mu %.4f", ratio, mu);

  chk.record(6, "per-step inequalities and pointwise lemmas", ok, detail);
}

// --------------------------------------------------------------------------
// 7. Structural equivalences between the recursion forms.
// --------------------------------------------------------------------------
void criterion_07(Checker& chk) {
  SmoothObjective P = random_psd_quadratic(10, 0.1, 1.0, 19);
  const double h = 0.8 / std::sqrt(P.lipschitz_L);
  const Vector x1 = Rng(20).normal_vector(10);

  // Velocity form vs two-point form with the matching y1.
  AgmParams params{.alpha = 2.0, .gamma = 1.3, .h = h};
  AgmState s = agm_init(P, params, x1);
  std::vector<Vector> velocity_xs{x1};
  for (int k = 1; k <= 1000; ++k) {
    s = agm_step(P, params, s);
    velocity_xs.push_back(s.x);
  }
  const Vector y1 = x1 - params.gamma * h * h * P.gradient(x1);
  const auto two_point = run_agm_two_point(P, params, x1, y1, 1000);
  double worst_a = 0.0;
  for (std::size_t i = 0; i < two_point.size(); ++i)
    worst_a = std::max(worst_a, (two_point[i] - velocity_xs[i]).norm());

  // Two-point form at gamma = 1 started from y1 = x1 vs the proximal method
  // with g = 0 and s = h^2.
  AgmParams unit{.alpha = 2.0, .gamma = 1.0, .h = h};
  const auto gradient_xs = run_agm_two_point(P, unit, x1, x1, 1000);
  CompositeObjective C = as_composite(P);
  ApmParams prox_params{.alpha = 2.0, .s = h * h};
  ApmRun prox_run = run_apm(C, prox_params, x1, 1000, /*keep_iterates=*/true);
  double worst_b = 0.0;
  for (std::size_t i = 0; i < prox_run.iterates.size(); ++i)
    worst_b = std::max(worst_b, (gradient_xs[i] - prox_run.iterates[i]).norm());

  const bool ok = worst_a < 1e-12 && worst_b < 1e-12;
  chk.record(7, "recursion-form equivalences", ok,
             fmt("velocity/two-point %.2e, gradient/proximal %.2e", worst_a,
                 worst_b));
}

// --------------------------------------------------------------------------
// 8. Scaled-gap tail statistic for the discrete and continuous runs.
// --------------------------------------------------------------------------
void criterion_08(Checker& chk) {
  Vector spectrum(5);
  spectrum << 1.0, 1.0, 0.3, 0.0, 0.0;
  SmoothObjective P = quadratic_diag(spectrum);
  AgmParams params{.alpha = 1.0, .gamma = 1.0,
                   .h = 1.0 / std::sqrt(P.lipschitz_L)};
  const Vector x1 = Rng(9).normal_vector(5);
  const double gap0 = P.value(x1) - *P.f_star;
  AgmRun run = run_agm(P, params, x1, 5000);
  const long K = switch_K_gradient(*P.pl_mu, params.h, params.gamma, params.alpha);
  const auto discrete = little_o_statistic(run.trace, 2.0 * params.alpha,
                                           static_cast<double>(K + 1),
                                           1e-12 * gap0);

  Vector spectrum2(2);
  spectrum2 << 1.0, 0.5;
  SmoothObjective Q = quadratic_diag(spectrum2);
  OdeParams ode{.alpha = 2.0, .beta = 1.0, .gamma = 1.0, .r = 2.0,
                .t0 = 1e-3, .t_end = 20.0, .step = 1e-3, .mode = OdeMode::pl};
  const Vector x0 = Rng(13).normal_vector(2);
  const double ode_gap0 = Q.value(x0) - *Q.f_star;
  OdeRun ode_run = integrate(Q, ode, x0);
  const double T = ode.alpha / (*Q.pl_mu * ode.beta);
  const auto continuous = little_o_statistic(ode_run.trace, 2.0 * ode.alpha, T,
                                             1e-12 * ode_gap0);

  const bool ok = discrete.quartile_decrease && continuous.quartile_decrease;
  chk.record(8, "scaled-gap tail statistic", ok,
             fmt("discrete %d (%.3e -> %.3e), continuous %d (%.3e -> %.3e)",
                 discrete.quartile_decrease, discrete.first_quartile_max,
                 discrete.last_quartile_max, continuous.quartile_decrease,
                 continuous.first_quartile_max, continuous.last_quartile_max));
}

// --------------------------------------------------------------------------
// 9. Oracle agreement across the shipped problem families.
// --------------------------------------------------------------------------
void criterion_09(Checker& chk) {
  bool ok = true;
  std::string detail;

  {  // switch index: closed form vs exhaustive scan on 1000 draws
    Rng rng(41);
    int agreed = 0;
    for (int i = 0; i < 1000; ++i) {
      const double mu = rng.uniform(0.05, 2.0);
      const double h = rng.uniform(0.3, 1.0);
      const double gamma = rng.uniform(0.05, 1.9);
      const double alpha = rng.uniform(0.1, 5.0);
      const long K = switch_K_gradient(mu, h, gamma, alpha);
      const double c = mu * h * h * (2.0 - gamma);
      const auto scan = oracle::scan_switch_integer(c, -2.0 * alpha,
                                                    -alpha * alpha, K + 1000);
      if (scan.k && *scan.k == K) ++agreed;
    }
    ok = ok && agreed == 1000;
    detail += fmt("switch scan %d/1000; ", agreed);
  }

  {  // prox closed forms vs the dense grid, 50 draws
    Rng rng(42);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const double z = 4.0 * rng.normal();
      const double tau = 0.05 + 2.0 * rng.uniform();
      ProxFriendly g = (i % 2 == 0) ? ProxFriendly::l1(rng.uniform(0.0, 2.0))
                                    : ProxFriendly::box(-0.75, 0.75);
      const double grid =
          oracle::grid_prox_1d(g, z, tau, -9.0, 9.0, 1e-5).argmin;
      worst = std::max(worst, std::abs(g.prox1d(z, tau) - grid));
    }
    ok = ok && worst <= 1e-4;
    detail += fmt("prox grid err %.2e; ", worst);
  }

  {  // finite differences across every shipped family
    std::vector<SmoothObjective> family;
    family.push_back(random_psd_quadratic(8, 0.2, 1.5, 51));
    Vector spectrum(4);
    spectrum << 1.0, 0.6, 0.0, 0.0;
    family.push_back(quadratic_diag(spectrum));
    family.push_back(random_logistic(40, 6, 0.1, 52));
    family.push_back(random_lasso(6, 0.3, 1.0, 0.1, 53).smooth);

    Rng rng(54);
    double worst = 0.0;
    for (const SmoothObjective& F : family) {
      for (int i = 0; i < 20; ++i) {
        const Vector x = rng.normal_vector(F.dimension);
        const Vector v = rng.normal_vector(F.dimension);
        const Vector g = F.gradient(x);
        const Vector gfd = oracle::fd_gradient(F, x, 1e-5);
        worst = std::max(worst, (g - gfd).norm() / std::max(g.norm(), 1e-12));
        const Vector hv = F.hess_vec(x, v);
        const Vector hfd = oracle::fd_hess_vec(F, x, v, 1e-5);
        worst = std::max(worst, (hv - hfd).norm() / std::max(hv.norm(), 1e-12));
      }
    }
    ok = ok && worst <= 1e-6;
    detail += fmt("fd rel err %.2e", worst);
  }

  chk.record(9, "oracle agreement", ok, detail);
}

// --------------------------------------------------------------------------
// 10. Negative controls: corrupted trace and tightened envelope.
// --------------------------------------------------------------------------
void criterion_10(Checker& chk, const std::string& cli, const fs::path& work) {
  bool ok = true;
  std::string detail;

  {  // corrupted trace is caught at the corrupted index
    SmoothObjective P = random_psd_quadratic(6, 0.2, 1.0, 71);
    AgmParams params{.alpha = 3.0, .gamma = 1.0,
                     .h = 1.0 / std::sqrt(2.0 * P.lipschitz_L)};
    const Vector x1 = Rng(72).normal_vector(6);
    const double gap0 = P.value(x1) - *P.f_star;
    AgmRun run = run_agm(P, params, x1, 500);
    const double rho =
        rate_rho_gradient(*P.strong_mu, P.lipschitz_L, params.gamma, params.h);
    Envelope env = envelope_linear(1.0 - rho, gap0);

    Trace corrupted = run.trace;
    const std::size_t bad = 25;
    corrupted.rows()[bad].gap =
        10.0 * env.evaluate(corrupted.rows()[bad].index);
    CertReport report =
        check_domination(corrupted, env, 1e-12 * gap0, "corrupted");
    const bool caught =
        !report.passed && report.worst_location == corrupted.rows()[bad].index;
    ok = ok && caught;
    detail += fmt("corrupted index caught=%d; ", caught);
  }

  if (cli.empty()) {
    ok = false;
    detail += "no CLI path given";
  } else {
    fs::create_directories(work);
    nlohmann::json config = {
        {"problem",
         {{"kind", "random_quadratic"}, {"dim", 20}, {"eig_min", 0.1},
          {"eig_max", 1.0}, {"seed", 7}}},
        {"solver", "agm"},
        {"params",
         {{"alpha", 3.0}, {"gamma", 1.0}, {"h_rule", "half_critical"}}},
        {"iterations", 2000},
        {"x1", {{"seed", 8}, {"scale", 2.0}}},
        {"certify", nlohmann::json::array(
                        {{{"envelope", "linear_gradient"},
                          {"name", "linear-rate"}}})},
    };
    const fs::path good_cfg = work / "good.json";
    std::ofstream(good_cfg) << config.dump(2);
    const int good_rc = run_cli(cli, "run --config " + good_cfg.string() +
                                         " --out-dir " +
                                         (work / "good_out").string(),
                                work / "good.log");

    config["certify"][0]["rho_scale"] = 2.0;
    config["certify"][0]["name"] = "doubled-rate";
    const fs::path bad_cfg = work / "doubled.json";
    std::ofstream(bad_cfg) << config.dump(2);
    const int bad_rc = run_cli(cli, "run --config " + bad_cfg.string() +
                                        " --out-dir " +
                                        (work / "doubled_out").string(),
                               work / "doubled.log");

    nlohmann::json broken = config;
    broken["solver"] = "nope";
    const fs::path broken_cfg = work / "broken.json";
    std::ofstream(broken_cfg) << broken.dump(2);
    const int broken_rc = run_cli(cli, "run --config " + broken_cfg.string() +
                                           " --out-dir " +
                                           (work / "broken_out").string(),
                                  work / "broken.log");

    ok = ok && good_rc == 0 && bad_rc == 1 && broken_rc == 2;
    detail += fmt("exit codes: certified=%d doubled=%d malformed=%d", good_rc,
                  bad_rc, broken_rc);
  }

  chk.record(10, "negative controls", ok, detail);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const fs::path work =
      argc > 2 ? fs::path(argv[2])
               : fs::temp_directory_path() / "inertia_acceptance";

  Checker chk;
  criterion_01(chk);
  criterion_02(chk);
  criterion_03(chk);
  criterion_04(chk);
  criterion_05(chk);
  criterion_06(chk);
  criterion_07(chk);
  criterion_08(chk);
  criterion_09(chk);
  criterion_10(chk, cli, work);

  std::printf("%d/10 criteria passed\n", 10 - chk.failures);
  return chk.failures == 0 ? 0 : 1;
}
