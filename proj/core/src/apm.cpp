#include "inertia/apm.hpp"

#include <cmath>
#include <stdexcept>

#include "inertia/errors.hpp"

namespace inertia {

void ApmParams::validate(const CompositeObjective& P,
                         bool strongly_convex) const {
  if (!(alpha > 0.0)) throw std::invalid_argument("apm: alpha must be positive");
  const double L = P.smooth.lipschitz_L;
  if (!(s > 0.0) || s > (1.0 + 1e-12) / L)
    throw std::invalid_argument("apm: need 0 < s <= 1/L");
  if (strongly_convex && !(s * L < 1.0))
    throw std::invalid_argument("apm: strongly convex mode needs s < 1/L");
}

ApmState apm_init(const CompositeObjective& P, const ApmParams& params,
                  const Vector& x1) {
  params.validate(P);
  if (!all_finite(x1)) throw std::invalid_argument("apm_init: x1 not finite");
  if (!std::isfinite(P.nonsmooth.value(x1)))
    throw std::invalid_argument("apm_init: x1 is infeasible for g");
  ApmState s;
  s.k = 1;
  s.x = x1;
  s.y = x1;
  s.Gs = gradient_mapping(P, x1, params.s);
  return s;
}

ApmState apm_step(const CompositeObjective& P, const ApmParams& params,
                  const ApmState& state) {
  const double k = static_cast<double>(state.k);
  ApmState next;
  next.k = state.k + 1;
  next.y = state.x - params.s * state.Gs;
  next.x = next.y + (k / (k + params.alpha)) * (next.y - state.y);
  next.Gs = gradient_mapping(P, next.x, params.s);
  if (!all_finite(next.x) || !all_finite(next.y) || !all_finite(next.Gs))
    throw DivergenceError("apm_step: non-finite state at k=" +
                          std::to_string(next.k));
  return next;
}

ProxEnergy prox_energy(const CompositeObjective& P, const ApmParams& params,
                       const ApmState& state) {
  if (!P.F_star) throw std::invalid_argument("prox_energy: F_star unknown");
  ProxEnergy e;
  e.half_phi_sq = 0.5 * (state.x - state.y).squaredNorm();
  e.gap_part = P.value(state.y) - *P.F_star;
  e.value = e.half_phi_sq + params.s * e.gap_part;
  return e;
}

double check_prox_energy_difference(const CompositeObjective& P,
                                    const ApmParams& params,
                                    const ApmState& state_k,
                                    const ApmState& state_k1) {
  if (state_k1.k != state_k.k + 1)
    throw std::invalid_argument(
        "check_prox_energy_difference: states not consecutive");
  const double s = params.s;
  const double k = static_cast<double>(state_k.k);
  const double a = params.alpha / k;

  const double delta = prox_energy(P, params, state_k1).value -
                       prox_energy(P, params, state_k).value;

  const double closed_form =
      -a * (1.0 + 0.5 * a) * (state_k1.x - state_k1.y).squaredNorm() -
      s * state_k.Gs.dot(state_k.x - state_k.y) +
      0.5 * s * s * state_k.Gs.squaredNorm() +
      s * (P.value(state_k1.y) - P.value(state_k.y));

  return closed_form - delta;
}

ApmRun run_apm(const CompositeObjective& P, const ApmParams& params,
               const Vector& x1, long iters, bool keep_iterates) {
  if (!P.F_star) throw std::invalid_argument("run_apm: F_star unknown");
  if (iters < 1) throw std::invalid_argument("run_apm: iters >= 1");

  ApmRun run;
  ApmState state = apm_init(P, params, x1);
  if (keep_iterates) run.iterates.push_back(state.x);

  const double gap0 = P.value(x1) - *P.F_star;
  const double guard = 1e6 * std::max(gap0, 1e-12);

  for (long k = 1; k <= iters; ++k) {
    const ProxEnergy e = prox_energy(P, params, state);
    if (!std::isfinite(e.gap_part) || e.gap_part > guard)
      throw DivergenceError("run_apm: diverged at k=" + std::to_string(k));
    run.trace.append(TraceRow{static_cast<double>(k), e.gap_part,
                              state.Gs.norm(), e.value, e.value, 0.0});
    state = apm_step(P, params, state);
    if (keep_iterates) run.iterates.push_back(state.x);
  }
  run.final_state = std::move(state);
  return run;
}

}  // namespace inertia
