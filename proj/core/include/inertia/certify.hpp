#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "inertia/dynamics.hpp"
#include "inertia/problems.hpp"
#include "inertia/trace.hpp"

namespace inertia {

enum class EnvelopeKind {
  continuous_pl,    // exp(-2 mu beta t) until T = alpha/(mu beta), then t^{-2 alpha}
  continuous_sc,    // anchored at T: exp(-mu beta (t-T)/2) / (t/T)^{2 alpha}
  discrete_pl,      // geometric to K, then ((K+1+alpha)/(k+1+alpha))^{2 alpha}
  discrete_prox_pl, // geometric to K, then ((K+alpha)/(k+alpha))^{2 alpha}
  discrete_linear,  // pure geometric ratio^{k-1}
};

std::string to_string(EnvelopeKind kind);
EnvelopeKind envelope_kind_from_string(const std::string& s);

/// A theorem-shaped upper bound on the function gap, evaluable at any index.
/// Piecewise: a geometric (or exponential) regime up to the switch point,
/// then a power regime; both branches agree at the switch.
struct Envelope {
  EnvelopeKind kind = EnvelopeKind::discrete_linear;
  double regime_switch = 1.0;  // T (continuous) or K (discrete)
  double linear_factor = 1.0;  // exp rate for continuous, per-step ratio for discrete
  double sublinear_power = 0.0;  // 2 alpha
  double anchor_gap = 0.0;       // gap scale at the anchor index
  double anchor = 0.0;  // start of the certified domain (t0, T, or k=1)
  double alpha = 0.0;   // index offset of the discrete power branch
  bool degenerate = false;  // prox boundary case without a geometric regime

  /// The bound at time t or iteration k. +infinity below the anchor of an
  /// anchored (continuous_sc) envelope.
  double evaluate(double idx) const;

  nlohmann::json to_json() const;
  static Envelope from_json(const nlohmann::json& j);
};

/// Per-inequality certification outcome. Margins are relative:
/// (bound - observed) / bound, so passed means worst_margin >= -tolerance.
struct CertReport {
  std::string inequality_name;
  long points_checked = 0;
  double worst_margin = 1.0;
  double worst_location = -1.0;
  bool passed = true;

  nlohmann::json to_json() const;
  static CertReport from_json(const nlohmann::json& j);
};

// ---------------------------------------------------------------------------
// Switch points
// ---------------------------------------------------------------------------

/// Largest integer K with mu h^2 (2-gamma) K^2 - 2 alpha K - alpha^2 <= 0:
/// closed form floor(alpha (1 + sqrt(1+c)) / c) adjusted by a local scan so
/// the defining inequality holds exactly.
long switch_K_gradient(double mu, double h, double gamma, double alpha);

/// Same with coefficient mu s (1-sL) in the shifted variable K-1. Empty when
/// the coefficient vanishes (s = 1/L): every K satisfies the inequality and
/// no geometric regime exists.
std::optional<long> switch_K_prox(double mu, double s, double L, double alpha);

/// Switch time of the anchored strongly-convex envelope:
/// 4 alpha / (mu beta) + 4 alpha beta / (4 gamma - mu beta^2).
double continuous_sc_switch_time(double mu, double alpha, double beta,
                                 double gamma);

// ---------------------------------------------------------------------------
// Envelope factories
// ---------------------------------------------------------------------------

/// Exponential-then-power bound with switch T = alpha/(mu beta). t_anchor is
/// the time the trajectory starts; the bound for a start at t_anchor > 0 is
/// the t_anchor = 0 bound with the exponential branch shifted accordingly.
Envelope envelope_continuous_pl(double mu, double alpha, double beta,
                                double gap0, double t_anchor = 0.0);

/// Anchored bound for the strongly convex flow; the constant is assembled
/// from the trajectory state at the first grid point at or past the switch
/// time. Throws if the run does not reach it.
Envelope envelope_continuous_sc(const OdeRun& run, const SmoothObjective& P,
                                double mu, double alpha, double beta,
                                double gamma);

Envelope envelope_discrete_pl(double mu, double h, double gamma, double alpha,
                              double gap0);

Envelope envelope_discrete_prox_pl(double mu, double s, double L, double alpha,
                                   double gap0);

/// gap0 * ratio^{k-1} with ratio in (0, 1].
Envelope envelope_linear(double ratio, double gap0);

// ---------------------------------------------------------------------------
// Linear rates
// ---------------------------------------------------------------------------

/// mu min{ gamma h^2 / (1 + 2 L gamma h^2), h^2 (2-gamma-Lh^2) / (1+mu/L) }.
double rate_rho_gradient(double mu, double L, double gamma, double h);

/// mu min{ s/2, s(1-sL) / (1 + mu L s^2) }.
double rate_rho_prox(double mu, double L, double s);

// ---------------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------------

/// Assert gap <= envelope * (1 + rel_tol) at every trace row whose gap
/// exceeds gap_floor and whose index lies in the envelope's domain.
/// Failure is recorded in the report, never thrown.
CertReport check_domination(const Trace& trace, const Envelope& envelope,
                            double gap_floor, std::string inequality_name,
                            double rel_tol = 1e-9);

/// The scaled-gap statistic m = idx^power * gap over the tail of a trace,
/// restricted to rows with gap above gap_floor. The finite-sample surrogate
/// for "gap is o(idx^-power)": the last quartile's max must undercut the
/// first quartile's max.
struct LittleOStatistic {
  std::vector<double> index;
  std::vector<double> m;
  double first_quartile_max = 0.0;
  double last_quartile_max = 0.0;
  bool quartile_decrease = false;
};

LittleOStatistic little_o_statistic(const Trace& trace, double power,
                                    double tail_start, double gap_floor);

}  // namespace inertia
