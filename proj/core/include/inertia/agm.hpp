#pragma once

#include <vector>

#include "inertia/problems.hpp"
#include "inertia/trace.hpp"

namespace inertia {

/// Coefficients of the inertial gradient method. The step h plays the role
/// of the damping length: the scheme uses a difference of consecutive
/// gradients scaled by h where the flow has the Hessian term.
struct AgmParams {
  double alpha = 3.0;
  double gamma = 1.0;
  double h = 0.0;

  /// Throws unless alpha > 0, gamma in (0,2) and 0 < h <= 1/sqrt(L).
  /// With strongly_convex set, additionally gamma < 2 - L h^2.
  void validate(const SmoothObjective& P, bool strongly_convex = false) const;
};

/// Iterate snapshot. `grad` caches the gradient at x so the energy and
/// certification layers never re-evaluate it.
struct AgmState {
  long k = 1;
  Vector x;
  Vector v;
  Vector grad;

  /// The forward point x - h^2 grad, whose function gap the rate bounds.
  Vector forward_point(double h) const { return x - (h * h) * grad; }
};

/// The energy at an iterate: (1/2)||v + h grad||^2 plus gamma times a blend
/// of the descent-adjusted gap psi and the forward-point gap.
struct DiscreteEnergy {
  double omega = 0.0;
  double value = 0.0;
  double half_phi_sq = 0.0;  // (1/2)||v + h grad f(x)||^2
  double psi_part = 0.0;     // f(x) - f* - (h^2/2)||grad f(x)||^2
  double gap_part = 0.0;     // f(x - h^2 grad f(x)) - f*
};

/// Start state: v1 = -h grad f(x1).
AgmState agm_init(const SmoothObjective& P, const AgmParams& params,
                  const Vector& x1);

/// One step of the velocity recursion:
///   x+ = x + h v
///   v+ = [v + h grad f(x) - (1 + gamma + alpha/(k+1)) h grad f(x+)]
///        / (1 + alpha/(k+1))
AgmState agm_step(const SmoothObjective& P, const AgmParams& params,
                  const AgmState& state);

DiscreteEnergy energy_discrete(const SmoothObjective& P,
                               const AgmParams& params, const AgmState& state,
                               double omega);

/// One-sided per-step energy certificate: evaluates the closed-form upper
/// bound on E_{k+1} - E_k and returns bound - (E_{k+1} - E_k).
/// Nonnegative (up to rounding) for convex L-smooth objectives.
double check_energy_difference(const SmoothObjective& P,
                               const AgmParams& params, const AgmState& state_k,
                               const AgmState& state_k1, double omega);

/// Residual of the defining velocity recursion between two consecutive
/// states; zero up to rounding by construction.
double step_residual(const SmoothObjective& P, const AgmParams& params,
                     const AgmState& state_k, const AgmState& state_k1);

struct AgmRun {
  Trace trace;  // per k: gap at forward point, ||grad||, energies w=0 and w=1
  AgmState final_state;
  std::vector<Vector> iterates;  // x_1 .. x_{iters+1}
};

/// Run `iters` steps from x1. Aborts with DivergenceError on non-finite
/// values or once the gap exceeds 1e6 times the initial gap.
AgmRun run_agm(const SmoothObjective& P, const AgmParams& params,
               const Vector& x1, long iters, bool keep_iterates = false);

/// The equivalent two-point recursion
///   y+ = x - h^2 grad f(x)
///   x+ = y+ + k/(k+alpha) (y+ - y) + k/(k+alpha)(gamma - 1)(y+ - x)
/// driven from an explicit y1. Returns x_1 .. x_{iters+1}. With
/// y1 = x1 - gamma h^2 grad f(x1) it reproduces the velocity form exactly.
std::vector<Vector> run_agm_two_point(const SmoothObjective& P,
                                      const AgmParams& params, const Vector& x1,
                                      const Vector& y1, long iters);

}  // namespace inertia
