#pragma once

#include <optional>

#include "inertia/problems.hpp"

namespace inertia::oracle {

// Brute-force reference routes, kept deliberately independent of the
// production code paths they are used to check.

/// Centered finite-difference gradient. delta in [1e-7, 1e-4].
Vector fd_gradient(const SmoothObjective& P, const Vector& x, double delta);

/// Centered finite difference of the gradient along v.
Vector fd_hess_vec(const SmoothObjective& P, const Vector& x, const Vector& v,
                   double delta);

/// Dense 1-D grid minimization of g(u) + (u - z)^2 / (2 tau) over [lo, hi].
struct GridProxResult {
  double argmin = 0.0;
  bool at_boundary = false;  // argmin landed on a grid endpoint
};
GridProxResult grid_prox_1d(const ProxFriendly& g, double z, double tau,
                            double lo, double hi, double step);

/// Exhaustive scan for the largest k in [0, k_max] with
/// a2 k^2 + a1 k + a0 <= 0.
struct ScanResult {
  std::optional<long> k;  // empty: no k in range satisfies the inequality
  bool all_satisfied = false;
  bool k_max_binding = false;  // largest satisfying k hit the scan limit
};
ScanResult scan_switch_integer(double a2, double a1, double a0, long k_max);

/// Reference minimum value of a composite objective. Quadratic with g = 0 is
/// solved directly; anything else runs the accelerated proximal method with
/// s = 1/(2L), alpha = 3 until the best value stagnates (relative change
/// below 1e-15 across a 1000-iteration window) or 10^6 iterations pass.
/// The returned value is an upper bound on the true minimum.
struct ReferenceMin {
  double F_star = 0.0;
  bool stagnated = false;
  long iterations = 0;
};
ReferenceMin reference_min(const CompositeObjective& P);

}  // namespace inertia::oracle
