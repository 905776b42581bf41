#include "inertia/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "inertia/errors.hpp"

namespace inertia {

void OdeParams::validate(const SmoothObjective& P) const {
  if (!(alpha > 0.0 && beta > 0.0 && gamma > 0.0))
    throw std::invalid_argument("ode: alpha, beta, gamma must be positive");
  if (!(r >= 0.0)) throw std::invalid_argument("ode: r must be nonnegative");
  if (!(t0 > 0.0) || !(t0 < t_end))
    throw std::invalid_argument("ode: need 0 < t0 < t_end");
  if (!(step > 0.0)) throw std::invalid_argument("ode: step must be positive");

  const double tol = 1e-12 * std::max(1.0, alpha * beta);
  if (mode == OdeMode::pl) {
    if (std::abs(r - alpha * beta) > tol)
      throw std::invalid_argument("ode: pl mode requires r = alpha*beta");
    if (!P.pl_mu)
      throw std::invalid_argument("ode: pl mode requires a known pl_mu");
  } else {
    if (std::abs(r - 0.5 * alpha * beta) > tol)
      throw std::invalid_argument("ode: sc mode requires r = alpha*beta/2");
    if (!P.strong_mu)
      throw std::invalid_argument("ode: sc mode requires a known strong_mu");
    if (!(gamma > 0.25 * (*P.strong_mu) * beta * beta))
      throw std::invalid_argument("ode: sc mode requires gamma > mu*beta^2/4");
  }
}

ContinuousEnergyParams ContinuousEnergyParams::coupled(double omega, double eta,
                                                       double gamma,
                                                       double beta) {
  ContinuousEnergyParams e;
  e.omega = omega;
  e.eta = eta;
  e.theta = (1.0 + omega) * gamma - omega * eta * beta * beta / (1.0 + omega);
  return e;
}

OdeDerivative rhs(const SmoothObjective& P, const OdeParams& params,
                  const OdeState& state) {
  if (!(state.t > 0.0))
    throw std::invalid_argument("rhs: t must be positive (coefficient singularity)");
  OdeDerivative d;
  d.dx = state.v;
  d.dv = -(params.alpha / state.t) * state.v -
         params.beta * P.hess_vec(state.x, state.v) -
         (params.gamma + params.r / state.t) * P.gradient(state.x);
  return d;
}

OdeState rk4_step(const SmoothObjective& P, const OdeParams& params,
                  const OdeState& state, double dt) {
  const OdeDerivative k1 = rhs(P, params, state);
  const OdeState s2{state.t + 0.5 * dt, state.x + 0.5 * dt * k1.dx,
                    state.v + 0.5 * dt * k1.dv};
  const OdeDerivative k2 = rhs(P, params, s2);
  const OdeState s3{state.t + 0.5 * dt, state.x + 0.5 * dt * k2.dx,
                    state.v + 0.5 * dt * k2.dv};
  const OdeDerivative k3 = rhs(P, params, s3);
  const OdeState s4{state.t + dt, state.x + dt * k3.dx, state.v + dt * k3.dv};
  const OdeDerivative k4 = rhs(P, params, s4);

  OdeState next;
  next.t = state.t + dt;
  next.x = state.x + (dt / 6.0) * (k1.dx + 2.0 * (k2.dx + k3.dx) + k4.dx);
  next.v = state.v + (dt / 6.0) * (k1.dv + 2.0 * (k2.dv + k3.dv) + k4.dv);
  return next;
}

double energy_continuous(const SmoothObjective& P,
                         const ContinuousEnergyParams& e, double beta,
                         const OdeState& state) {
  if (!P.f_star) throw std::invalid_argument("energy_continuous: f_star unknown");
  const Vector grad = P.gradient(state.x);
  return 0.5 * (state.v + beta * grad).squaredNorm() +
         0.5 * e.omega * state.v.squaredNorm() +
         e.theta * (P.value(state.x) - *P.f_star);
}

double energy_derivative_closed_form(const SmoothObjective& P,
                                     const OdeParams& params,
                                     const ContinuousEnergyParams& e,
                                     const OdeState& state) {
  const double w = e.omega;
  const double beta = params.beta;
  const double expected_r = params.alpha * beta / (1.0 + w);
  if (std::abs(params.r - expected_r) >
      1e-12 * std::max(1.0, params.alpha * beta))
    throw std::invalid_argument(
        "energy_derivative_closed_form: requires r = alpha*beta/(1+omega)");

  const Vector grad = P.gradient(state.x);
  const double kinetic = 0.5 * (state.v + beta * grad).squaredNorm() +
                         0.5 * w * state.v.squaredNorm();
  const double grad_sq = grad.squaredNorm();
  const double curvature = P.hess_vec(state.x, state.v).dot(state.v);

  double out = -(2.0 * params.alpha / state.t) * kinetic;
  out -= (w * e.eta * beta / (1.0 + w)) * kinetic;
  out -= (beta / (1.0 + w)) *
         (e.theta + (w * (1.0 - w) / (2.0 * (1.0 + w))) * e.eta * beta * beta -
          w * params.alpha * beta / state.t) *
         grad_sq;
  out -= w * beta * curvature;
  out += 0.5 * w * e.eta * beta * state.v.squaredNorm();
  return out;
}

double check_energy_derivative(const SmoothObjective& P, const OdeParams& params,
                               const ContinuousEnergyParams& e,
                               const OdeState& state, double delta) {
  const OdeState fwd = rk4_step(P, params, state, delta);
  const OdeState bwd = rk4_step(P, params, state, -delta);
  const double fd = (energy_continuous(P, e, params.beta, fwd) -
                     energy_continuous(P, e, params.beta, bwd)) /
                    (2.0 * delta);
  return std::abs(energy_derivative_closed_form(P, params, e, state) - fd);
}

OdeRun integrate(const SmoothObjective& P, const OdeParams& params,
                 const Vector& x0, std::span<const double> sample_times) {
  params.validate(P);
  if (!P.f_star) throw std::invalid_argument("integrate: f_star unknown");
  if (!all_finite(x0)) throw std::invalid_argument("integrate: x0 not finite");

  const ContinuousEnergyParams energy =
      params.mode == OdeMode::pl
          ? ContinuousEnergyParams::coupled(0.0, *P.pl_mu, params.gamma,
                                            params.beta)
          : ContinuousEnergyParams::coupled(1.0, *P.strong_mu, params.gamma,
                                            params.beta);

  const long n_steps =
      static_cast<long>(std::llround((params.t_end - params.t0) / params.step));
  if (n_steps < 1) throw std::invalid_argument("integrate: empty time range");

  OdeRun run;
  OdeState state{params.t0, x0, -params.beta * P.gradient(x0)};

  double prev_energy = 0.0;
  double energy_floor = 0.0;
  std::size_t next_sample = 0;

  for (long i = 0; i <= n_steps; ++i) {
    const Vector grad = P.gradient(state.x);
    const double gap = P.value(state.x) - *P.f_star;
    const double eps = 0.5 * (state.v + params.beta * grad).squaredNorm() +
                       0.5 * energy.omega * state.v.squaredNorm() +
                       energy.theta * gap;
    if (!std::isfinite(eps) || !all_finite(state.x))
      throw DivergenceError("integrate: non-finite state at t=" +
                            std::to_string(state.t));
    if (i == 0) {
      energy_floor = 1e-16 * (1.0 + eps);
    } else if (params.mode == OdeMode::pl &&
               eps - prev_energy > 1e-8 * std::max(prev_energy, energy_floor)) {
      throw DivergenceError(
          "integrate: energy increased beyond integrator slack at t=" +
          std::to_string(state.t) + "; reduce the step");
    }
    prev_energy = eps;

    run.trace.append(
        TraceRow{state.t, gap, grad.norm(), eps, eps, 0.0});
    while (next_sample < sample_times.size() &&
           state.t >= sample_times[next_sample] - 1e-12) {
      run.samples.push_back(state);
      ++next_sample;
    }

    if (i < n_steps) state = rk4_step(P, params, state, params.step);
  }
  run.final_state = std::move(state);
  return run;
}

}  // namespace inertia
