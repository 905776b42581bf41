#pragma once

#include <span>
#include <vector>

#include "inertia/problems.hpp"
#include "inertia/trace.hpp"

namespace inertia {

/// Which rate certificate an integration is set up for. The two regimes pin
/// the gradient coefficient r and, for the strongly convex one, a lower
/// bound on gamma.
enum class OdeMode { pl, sc };

/// Coefficients of the second-order flow
///   x'' + (alpha/t) x' + beta Hf(x) x' + (gamma + r/t) grad f(x) = 0
/// integrated with fixed-step classic Runge-Kutta from t0 to t_end.
/// The start time t0 keeps the vanishing-damping coefficient alpha/t finite.
struct OdeParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double r = 0.0;
  double t0 = 1e-3;
  double t_end = 0.0;
  double step = 1e-3;
  OdeMode mode = OdeMode::pl;

  /// pl mode requires r = alpha beta; sc mode requires r = alpha beta / 2
  /// and gamma > mu beta^2 / 4 with mu the strong-convexity modulus.
  void validate(const SmoothObjective& P) const;
};

struct OdeState {
  double t = 0.0;
  Vector x;
  Vector v;
};

struct OdeDerivative {
  Vector dx;
  Vector dv;
};

/// Weights of the continuous energy
///   (1/2)||v + beta grad f||^2 + (omega/2)||v||^2 + theta (f - f*).
struct ContinuousEnergyParams {
  double omega = 0.0;
  double theta = 0.0;
  double eta = 0.0;

  /// theta chosen so the energy derivative has the closed form below:
  /// theta = (1+omega) gamma - omega eta beta^2 / (1+omega).
  static ContinuousEnergyParams coupled(double omega, double eta, double gamma,
                                        double beta);
};

/// Right-hand side of the flow; rejects t <= 0.
OdeDerivative rhs(const SmoothObjective& P, const OdeParams& params,
                  const OdeState& state);

/// One classic Runge-Kutta step of signed size dt.
OdeState rk4_step(const SmoothObjective& P, const OdeParams& params,
                  const OdeState& state, double dt);

double energy_continuous(const SmoothObjective& P,
                         const ContinuousEnergyParams& e, double beta,
                         const OdeState& state);

/// Closed form of d/dt energy under the coupling r = alpha beta / (1+omega).
double energy_derivative_closed_form(const SmoothObjective& P,
                                     const OdeParams& params,
                                     const ContinuousEnergyParams& e,
                                     const OdeState& state);

/// |closed form - centered finite difference along the flow| with
/// micro-steps of size delta. O(delta^2) for smooth objectives.
double check_energy_derivative(const SmoothObjective& P, const OdeParams& params,
                               const ContinuousEnergyParams& e,
                               const OdeState& state, double delta = 1e-4);

struct OdeRun {
  Trace trace;  // per grid time: gap, ||grad f||, energy in both columns
  std::vector<OdeState> samples;  // first grid state at/after each sample time
  OdeState final_state;
};

/// Integrate from x(t0) = x0, v(t0) = -beta grad f(x0), recording every grid
/// point. In pl mode the energy must be nonincreasing along the grid (up to
/// 1e-8 relative integrator slack); a violation aborts with DivergenceError
/// since it signals too coarse a step.
OdeRun integrate(const SmoothObjective& P, const OdeParams& params,
                 const Vector& x0, std::span<const double> sample_times = {});

}  // namespace inertia
