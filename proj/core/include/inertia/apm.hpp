#pragma once

#include "inertia/problems.hpp"
#include "inertia/trace.hpp"

namespace inertia {

/// Coefficients of the accelerated proximal method (FISTA-type momentum
/// k/(k+alpha) with a fixed step s).
struct ApmParams {
  double alpha = 3.0;
  double s = 0.0;

  /// Throws unless alpha > 0 and 0 < s <= 1/L; with strongly_convex set the
  /// step must be strictly below 1/L.
  void validate(const CompositeObjective& P, bool strongly_convex = false) const;
};

/// Iterate snapshot; Gs caches the gradient mapping at x.
struct ApmState {
  long k = 1;
  Vector x;
  Vector y;
  Vector Gs;
};

/// E_k = (1/2)||x_k - y_k||^2 + s (F(y_k) - F*).
struct ProxEnergy {
  double value = 0.0;
  double half_phi_sq = 0.0;
  double gap_part = 0.0;  // F(y_k) - F*
};

/// Start state with x1 = y1. Rejects starts where g is infinite.
ApmState apm_init(const CompositeObjective& P, const ApmParams& params,
                  const Vector& x1);

/// One step:
///   y+ = x - s G_s(x)
///   x+ = y+ + k/(k+alpha) (y+ - y)
ApmState apm_step(const CompositeObjective& P, const ApmParams& params,
                  const ApmState& state);

ProxEnergy prox_energy(const CompositeObjective& P, const ApmParams& params,
                       const ApmState& state);

/// Exact per-step energy identity: evaluates the closed form of
/// E_{k+1} - E_k and returns closed_form - (E_{k+1} - E_k), which is zero up
/// to rounding.
double check_prox_energy_difference(const CompositeObjective& P,
                                    const ApmParams& params,
                                    const ApmState& state_k,
                                    const ApmState& state_k1);

struct ApmRun {
  Trace trace;  // per k: F(y_k) - F*, ||G_s(x_k)||, energy in both columns
  ApmState final_state;
  std::vector<Vector> iterates;  // x_1 .. x_{iters+1}
};

/// Run `iters` steps from x1 = y1, with the same divergence guard as the
/// gradient method.
ApmRun run_apm(const CompositeObjective& P, const ApmParams& params,
               const Vector& x1, long iters, bool keep_iterates = false);

}  // namespace inertia
