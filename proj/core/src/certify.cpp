#include "inertia/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace inertia {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool switch_inequality(double c, double alpha, double k) {
  return c * k * k - 2.0 * alpha * k - alpha * alpha <= 0.0;
}

/// Largest integer k >= 0 with c k^2 - 2 alpha k - alpha^2 <= 0, c > 0.
long largest_switch_integer(double c, double alpha) {
  long k = static_cast<long>(
      std::floor(alpha * (1.0 + std::sqrt(1.0 + c)) / c));
  if (k < 0) k = 0;
  while (switch_inequality(c, alpha, static_cast<double>(k + 1))) ++k;
  while (k > 0 && !switch_inequality(c, alpha, static_cast<double>(k))) --k;
  return k;
}

double clamp_margin(double m) { return std::clamp(m, -1e300, 1e300); }

}  // namespace

std::string to_string(EnvelopeKind kind) {
  switch (kind) {
    case EnvelopeKind::continuous_pl: return "continuous_pl";
    case EnvelopeKind::continuous_sc: return "continuous_sc";
    case EnvelopeKind::discrete_pl: return "discrete_pl";
    case EnvelopeKind::discrete_prox_pl: return "discrete_prox_pl";
    case EnvelopeKind::discrete_linear: return "discrete_linear";
  }
  return "discrete_linear";
}

EnvelopeKind envelope_kind_from_string(const std::string& s) {
  if (s == "continuous_pl") return EnvelopeKind::continuous_pl;
  if (s == "continuous_sc") return EnvelopeKind::continuous_sc;
  if (s == "discrete_pl") return EnvelopeKind::discrete_pl;
  if (s == "discrete_prox_pl") return EnvelopeKind::discrete_prox_pl;
  if (s == "discrete_linear") return EnvelopeKind::discrete_linear;
  throw std::invalid_argument("unknown envelope kind '" + s + "'");
}

double Envelope::evaluate(double idx) const {
  switch (kind) {
    case EnvelopeKind::continuous_pl: {
      const double T = regime_switch;
      if (idx <= T)
        return anchor_gap * std::exp(-linear_factor * (idx - anchor));
      return anchor_gap * std::exp(-linear_factor * (T - anchor)) *
             std::pow(T / idx, sublinear_power);
    }
    case EnvelopeKind::continuous_sc: {
      if (idx < anchor) return kInf;
      return anchor_gap * std::exp(-linear_factor * (idx - anchor)) *
             std::pow(anchor / idx, sublinear_power);
    }
    case EnvelopeKind::discrete_pl: {
      const double K = regime_switch;
      if (idx <= K) return anchor_gap * std::pow(linear_factor, idx - 1.0);
      return anchor_gap * std::pow(linear_factor, K - 1.0) *
             std::pow((K + 1.0 + alpha) / (idx + 1.0 + alpha), sublinear_power);
    }
    case EnvelopeKind::discrete_prox_pl: {
      const double K = regime_switch;
      if (idx <= K) return anchor_gap * std::pow(linear_factor, idx - 1.0);
      return anchor_gap * std::pow(linear_factor, K - 1.0) *
             std::pow((K + alpha) / (idx + alpha), sublinear_power);
    }
    case EnvelopeKind::discrete_linear:
      return anchor_gap * std::pow(linear_factor, idx - 1.0);
  }
  return kInf;
}

nlohmann::json Envelope::to_json() const {
  return {{"kind", to_string(kind)},
          {"regime_switch", regime_switch},
          {"linear_factor", linear_factor},
          {"sublinear_power", sublinear_power},
          {"anchor_gap", anchor_gap},
          {"anchor", anchor},
          {"alpha", alpha},
          {"degenerate", degenerate}};
}

Envelope Envelope::from_json(const nlohmann::json& j) {
  Envelope e;
  e.kind = envelope_kind_from_string(j.at("kind").get<std::string>());
  e.regime_switch = j.at("regime_switch").get<double>();
  e.linear_factor = j.at("linear_factor").get<double>();
  e.sublinear_power = j.at("sublinear_power").get<double>();
  e.anchor_gap = j.at("anchor_gap").get<double>();
  e.anchor = j.value("anchor", 0.0);
  e.alpha = j.value("alpha", 0.0);
  e.degenerate = j.value("degenerate", false);
  return e;
}

nlohmann::json CertReport::to_json() const {
  return {{"inequality", inequality_name},
          {"points", points_checked},
          {"worst_margin", worst_margin},
          {"at", worst_location},
          {"passed", passed}};
}

CertReport CertReport::from_json(const nlohmann::json& j) {
  CertReport r;
  r.inequality_name = j.at("inequality").get<std::string>();
  r.points_checked = j.at("points").get<long>();
  r.worst_margin = j.at("worst_margin").get<double>();
  r.worst_location = j.at("at").get<double>();
  r.passed = j.at("passed").get<bool>();
  return r;
}

// ---------------------------------------------------------------------------
// Switch points
// ---------------------------------------------------------------------------

long switch_K_gradient(double mu, double h, double gamma, double alpha) {
  if (!(mu > 0.0) || !(h > 0.0) || !(gamma > 0.0 && gamma < 2.0) ||
      !(alpha > 0.0))
    throw std::invalid_argument("switch_K_gradient: bad parameters");
  const double c = mu * h * h * (2.0 - gamma);
  return largest_switch_integer(c, alpha);
}

std::optional<long> switch_K_prox(double mu, double s, double L, double alpha) {
  if (!(mu > 0.0) || !(s > 0.0) || !(L > 0.0) || !(alpha > 0.0))
    throw std::invalid_argument("switch_K_prox: bad parameters");
  const double c = mu * s * (1.0 - s * L);
  // The step-size boundary s = 1/L zeroes the coefficient and the defining
  // inequality holds for every K.
  if (!(c > 1e-14 * mu * s)) return std::nullopt;
  return largest_switch_integer(c, alpha) + 1;
}

double continuous_sc_switch_time(double mu, double alpha, double beta,
                                 double gamma) {
  return 4.0 * alpha / (mu * beta) +
         4.0 * alpha * beta / (4.0 * gamma - mu * beta * beta);
}

// ---------------------------------------------------------------------------
// Envelope factories
// ---------------------------------------------------------------------------

Envelope envelope_continuous_pl(double mu, double alpha, double beta,
                                double gap0, double t_anchor) {
  if (!(mu > 0.0) || !(alpha > 0.0) || !(beta > 0.0))
    throw std::invalid_argument("envelope_continuous_pl: bad parameters");
  Envelope e;
  e.kind = EnvelopeKind::continuous_pl;
  e.regime_switch = alpha / (mu * beta);
  e.linear_factor = 2.0 * mu * beta;
  e.sublinear_power = 2.0 * alpha;
  e.anchor_gap = gap0;
  e.anchor = t_anchor;
  e.alpha = alpha;
  return e;
}

Envelope envelope_continuous_sc(const OdeRun& run, const SmoothObjective& P,
                                double mu, double alpha, double beta,
                                double gamma) {
  if (!(gamma > 0.25 * mu * beta * beta))
    throw std::invalid_argument("envelope_continuous_sc: gamma too small");
  const double T = continuous_sc_switch_time(mu, alpha, beta, gamma);

  const OdeState* at_T = nullptr;
  for (const OdeState& s : run.samples) {
    if (s.t >= T - 1e-12) {
      at_T = &s;
      break;
    }
  }
  if (!at_T && run.final_state.t >= T - 1e-12) at_T = &run.final_state;
  if (!at_T)
    throw std::invalid_argument(
        "envelope_continuous_sc: trajectory does not reach the switch time");
  if (!P.f_star)
    throw std::invalid_argument("envelope_continuous_sc: f_star unknown");

  const Vector grad = P.gradient(at_T->x);
  const double theta = 2.0 * gamma - 0.5 * mu * beta * beta;
  const double C = 0.5 * (at_T->v + beta * grad).squaredNorm() +
                   0.5 * at_T->v.squaredNorm() +
                   theta * (P.value(at_T->x) - *P.f_star);

  Envelope e;
  e.kind = EnvelopeKind::continuous_sc;
  e.regime_switch = T;
  e.linear_factor = 0.5 * mu * beta;
  e.sublinear_power = 2.0 * alpha;
  e.anchor_gap = C;
  e.anchor = at_T->t;
  e.alpha = alpha;
  return e;
}

Envelope envelope_discrete_pl(double mu, double h, double gamma, double alpha,
                              double gap0) {
  const double c = mu * h * h * (2.0 - gamma);
  const long K = std::max<long>(switch_K_gradient(mu, h, gamma, alpha), 1);
  Envelope e;
  e.kind = EnvelopeKind::discrete_pl;
  e.regime_switch = static_cast<double>(K);
  e.linear_factor = 1.0 / (1.0 + c);
  e.sublinear_power = 2.0 * alpha;
  e.anchor_gap = gap0;
  e.anchor = 1.0;
  e.alpha = alpha;
  return e;
}

Envelope envelope_discrete_prox_pl(double mu, double s, double L, double alpha,
                                   double gap0) {
  Envelope e;
  e.kind = EnvelopeKind::discrete_prox_pl;
  e.sublinear_power = 2.0 * alpha;
  e.anchor_gap = gap0;
  e.anchor = 1.0;
  e.alpha = alpha;
  const std::optional<long> K = switch_K_prox(mu, s, L, alpha);
  if (!K) {
    // No geometric regime; the bound is the power branch anchored at k = 1.
    e.regime_switch = 1.0;
    e.linear_factor = 1.0;
    e.degenerate = true;
    return e;
  }
  const double c = mu * s * (1.0 - s * L);
  e.regime_switch = static_cast<double>(std::max<long>(*K, 1));
  e.linear_factor = 1.0 / (1.0 + c);
  return e;
}

Envelope envelope_linear(double ratio, double gap0) {
  if (!(ratio > 0.0 && ratio <= 1.0))
    throw std::invalid_argument("envelope_linear: ratio must be in (0, 1]");
  Envelope e;
  e.kind = EnvelopeKind::discrete_linear;
  e.regime_switch = 1.0;
  e.linear_factor = ratio;
  e.sublinear_power = 0.0;
  e.anchor_gap = gap0;
  e.anchor = 1.0;
  return e;
}

// ---------------------------------------------------------------------------
// Linear rates
// ---------------------------------------------------------------------------

double rate_rho_gradient(double mu, double L, double gamma, double h) {
  const double h2 = h * h;
  const double a = gamma * h2 / (1.0 + 2.0 * L * gamma * h2);
  const double b = h2 * (2.0 - gamma - L * h2) / (1.0 + mu / L);
  return mu * std::min(a, b);
}

double rate_rho_prox(double mu, double L, double s) {
  const double a = 0.5 * s;
  const double b = s * (1.0 - s * L) / (1.0 + mu * L * s * s);
  return mu * std::min(a, b);
}

// ---------------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------------

CertReport check_domination(const Trace& trace, const Envelope& envelope,
                            double gap_floor, std::string inequality_name,
                            double rel_tol) {
  CertReport report;
  report.inequality_name = std::move(inequality_name);
  double worst = kInf;
  for (const TraceRow& row : trace.rows()) {
    if (!(row.gap > gap_floor)) continue;
    const double bound = envelope.evaluate(row.index);
    if (!std::isfinite(bound)) continue;  // outside the certified domain
    ++report.points_checked;
    const double margin =
        (bound - row.gap) / std::max(bound, std::numeric_limits<double>::min());
    if (margin < worst) {
      worst = margin;
      report.worst_location = row.index;
    }
  }
  if (report.points_checked > 0) report.worst_margin = clamp_margin(worst);
  report.passed = report.worst_margin >= -rel_tol;
  return report;
}

LittleOStatistic little_o_statistic(const Trace& trace, double power,
                                    double tail_start, double gap_floor) {
  LittleOStatistic stat;
  for (const TraceRow& row : trace.rows()) {
    if (row.index < tail_start || !(row.gap > gap_floor)) continue;
    stat.index.push_back(row.index);
    stat.m.push_back(std::pow(row.index, power) * row.gap);
  }
  const std::size_t n = stat.m.size();
  if (n < 8)
    throw std::invalid_argument(
        "little_o_statistic: tail too short before the gap floor");
  const std::size_t q = n / 4;
  stat.first_quartile_max =
      *std::max_element(stat.m.begin(), stat.m.begin() + q);
  stat.last_quartile_max = *std::max_element(stat.m.end() - q, stat.m.end());
  stat.quartile_decrease = stat.last_quartile_max < stat.first_quartile_max;
  return stat;
}

}  // namespace inertia
