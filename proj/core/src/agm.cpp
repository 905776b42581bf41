#include "inertia/agm.hpp"

#include <cmath>
#include <stdexcept>

#include "inertia/errors.hpp"

namespace inertia {

void AgmParams::validate(const SmoothObjective& P, bool strongly_convex) const {
  if (!(alpha > 0.0)) throw std::invalid_argument("agm: alpha must be positive");
  if (!(gamma > 0.0 && gamma < 2.0))
    throw std::invalid_argument("agm: gamma must lie in (0, 2)");
  const double h_max = 1.0 / std::sqrt(P.lipschitz_L);
  if (!(h > 0.0) || h > h_max * (1.0 + 1e-12))
    throw std::invalid_argument("agm: need 0 < h <= 1/sqrt(L)");
  if (strongly_convex && !(gamma < 2.0 - P.lipschitz_L * h * h))
    throw std::invalid_argument("agm: strongly convex mode needs gamma < 2 - L h^2");
}

AgmState agm_init(const SmoothObjective& P, const AgmParams& params,
                  const Vector& x1) {
  params.validate(P);
  if (!all_finite(x1)) throw std::invalid_argument("agm_init: x1 not finite");
  AgmState s;
  s.k = 1;
  s.x = x1;
  s.grad = P.gradient(x1);
  s.v = -params.h * s.grad;
  return s;
}

AgmState agm_step(const SmoothObjective& P, const AgmParams& params,
                  const AgmState& state) {
  const double h = params.h;
  const double a = params.alpha / static_cast<double>(state.k + 1);

  AgmState next;
  next.k = state.k + 1;
  next.x = state.x + h * state.v;
  next.grad = P.gradient(next.x);
  next.v = (state.v + h * state.grad -
            (1.0 + params.gamma + a) * h * next.grad) /
           (1.0 + a);
  if (!all_finite(next.x) || !all_finite(next.v) || !all_finite(next.grad))
    throw DivergenceError("agm_step: non-finite state at k=" +
                          std::to_string(next.k));
  return next;
}

DiscreteEnergy energy_discrete(const SmoothObjective& P,
                               const AgmParams& params, const AgmState& state,
                               double omega) {
  if (!P.f_star) throw std::invalid_argument("energy_discrete: f_star unknown");
  if (!(omega >= 0.0 && omega <= 1.0))
    throw std::invalid_argument("energy_discrete: omega must be in [0, 1]");
  const double h = params.h;
  const double fstar = *P.f_star;

  DiscreteEnergy e;
  e.omega = omega;
  e.half_phi_sq = 0.5 * (state.v + h * state.grad).squaredNorm();
  e.psi_part = P.value(state.x) - fstar -
               0.5 * h * h * state.grad.squaredNorm();
  e.gap_part = P.value(state.forward_point(h)) - fstar;
  e.value = e.half_phi_sq +
            params.gamma * ((1.0 - omega) * e.psi_part + omega * e.gap_part);
  return e;
}

double check_energy_difference(const SmoothObjective& P,
                               const AgmParams& params, const AgmState& state_k,
                               const AgmState& state_k1, double omega) {
  if (state_k1.k != state_k.k + 1)
    throw std::invalid_argument("check_energy_difference: states not consecutive");
  const double h = params.h;
  const double g = params.gamma;
  const double kp1 = static_cast<double>(state_k.k + 1);
  const double a = params.alpha / kp1;

  const double delta = energy_discrete(P, params, state_k1, omega).value -
                       energy_discrete(P, params, state_k, omega).value;

  const double phi1_sq = (state_k1.v + h * state_k1.grad).squaredNorm();
  const double grad1_sq = state_k1.grad.squaredNorm();
  const double cross = state_k1.grad.dot(state_k1.v);
  const double f_x1 = P.value(state_k1.x);
  const double f_y1 = P.value(state_k.forward_point(h));
  const double Lh2 = P.lipschitz_L * h * h;

  double bound = -a * (1.0 + 0.5 * a) * phi1_sq -
                 g * h * h * (1.0 - 0.5 * g) * grad1_sq;
  bound += omega * g * (f_x1 - f_y1);
  bound -= omega * g * h * ((kp1 + params.alpha) / kp1) * cross;
  bound -= omega * g * h * h * (1.0 + g + a - 0.5 * Lh2) * grad1_sq;

  return bound - delta;
}

double step_residual(const SmoothObjective& P, const AgmParams& params,
                     const AgmState& state_k, const AgmState& state_k1) {
  (void)P;
  const double h = params.h;
  const double a = params.alpha / static_cast<double>(state_k.k + 1);
  const Vector residual = (state_k1.v - state_k.v) +
                          h * (state_k1.grad - state_k.grad) +
                          a * state_k1.v + (params.gamma + a) * h * state_k1.grad;
  return residual.norm();
}

AgmRun run_agm(const SmoothObjective& P, const AgmParams& params,
               const Vector& x1, long iters, bool keep_iterates) {
  if (!P.f_star) throw std::invalid_argument("run_agm: f_star unknown");
  if (iters < 1) throw std::invalid_argument("run_agm: iters >= 1");

  AgmRun run;
  AgmState state = agm_init(P, params, x1);
  if (keep_iterates) run.iterates.push_back(state.x);

  const double gap0 = P.value(x1) - *P.f_star;
  const double guard = 1e6 * std::max(gap0, 1e-12);

  for (long k = 1; k <= iters; ++k) {
    DiscreteEnergy e0 = energy_discrete(P, params, state, 0.0);
    DiscreteEnergy e1 = energy_discrete(P, params, state, 1.0);
    const double gap = e1.gap_part;
    if (!std::isfinite(gap) || gap > guard)
      throw DivergenceError("run_agm: diverged at k=" + std::to_string(k));
    run.trace.append(TraceRow{static_cast<double>(k), gap, state.grad.norm(),
                              e0.value, e1.value, 0.0});
    state = agm_step(P, params, state);
    if (keep_iterates) run.iterates.push_back(state.x);
  }
  run.final_state = std::move(state);
  return run;
}

std::vector<Vector> run_agm_two_point(const SmoothObjective& P,
                                      const AgmParams& params, const Vector& x1,
                                      const Vector& y1, long iters) {
  params.validate(P);
  const double h2 = params.h * params.h;
  std::vector<Vector> xs;
  xs.reserve(static_cast<std::size_t>(iters) + 1);
  Vector x = x1;
  Vector y = y1;
  xs.push_back(x);
  for (long k = 1; k <= iters; ++k) {
    const Vector y_next = x - h2 * P.gradient(x);
    const double momentum = static_cast<double>(k) / (static_cast<double>(k) + params.alpha);
    Vector x_next = y_next + momentum * (y_next - y);
    if (params.gamma != 1.0)
      x_next += momentum * (params.gamma - 1.0) * (y_next - x);
    if (!all_finite(x_next))
      throw DivergenceError("run_agm_two_point: non-finite at k=" +
                            std::to_string(k));
    x = std::move(x_next);
    y = y_next;
    xs.push_back(x);
  }
  return xs;
}

}  // namespace inertia
