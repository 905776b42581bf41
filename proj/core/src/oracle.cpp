#include "inertia/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "inertia/apm.hpp"

namespace inertia::oracle {

Vector fd_gradient(const SmoothObjective& P, const Vector& x, double delta) {
  if (!(delta >= 1e-7 && delta <= 1e-4))
    throw std::invalid_argument("fd_gradient: delta out of [1e-7, 1e-4]");
  Vector g(x.size());
  Vector probe = x;
  for (int i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + delta;
    const double fp = P.value(probe);
    probe[i] = x[i] - delta;
    const double fm = P.value(probe);
    probe[i] = x[i];
    g[i] = (fp - fm) / (2.0 * delta);
  }
  return g;
}

Vector fd_hess_vec(const SmoothObjective& P, const Vector& x, const Vector& v,
                   double delta) {
  if (!(delta >= 1e-7 && delta <= 1e-4))
    throw std::invalid_argument("fd_hess_vec: delta out of [1e-7, 1e-4]");
  const Vector gp = P.gradient(x + delta * v);
  const Vector gm = P.gradient(x - delta * v);
  return (gp - gm) / (2.0 * delta);
}

GridProxResult grid_prox_1d(const ProxFriendly& g, double z, double tau,
                            double lo, double hi, double step) {
  if (!(tau > 0.0) || !(step > 0.0) || !(lo < hi))
    throw std::invalid_argument("grid_prox_1d: bad grid");
  GridProxResult result;
  double best = std::numeric_limits<double>::infinity();
  const long n = static_cast<long>(std::floor((hi - lo) / step));
  for (long i = 0; i <= n; ++i) {
    const double u = lo + static_cast<double>(i) * step;
    const double obj = g.value1d(u) + (u - z) * (u - z) / (2.0 * tau);
    if (obj < best) {
      best = obj;
      result.argmin = u;
      result.at_boundary = (i == 0 || i == n);
    }
  }
  return result;
}

ScanResult scan_switch_integer(double a2, double a1, double a0, long k_max) {
  if (k_max < 1) throw std::invalid_argument("scan_switch_integer: k_max >= 1");
  ScanResult result;
  long count = 0;
  for (long k = 0; k <= k_max; ++k) {
    const double kk = static_cast<double>(k);
    if (a2 * kk * kk + a1 * kk + a0 <= 0.0) {
      result.k = k;
      ++count;
    }
  }
  result.all_satisfied = (count == k_max + 1);
  result.k_max_binding = (result.k && *result.k == k_max);
  return result;
}

ReferenceMin reference_min(const CompositeObjective& P) {
  ReferenceMin out;

  // Quadratic with no nonsmooth part: direct solve.
  if (P.nonsmooth.kind() == ProxKind::zero && P.smooth.quadratic_data()) {
    if (!P.smooth.f_star)
      throw std::invalid_argument("reference_min: quadratic lacks f_star");
    out.F_star = *P.smooth.f_star;
    out.stagnated = true;
    return out;
  }

  constexpr long kMaxIters = 1'000'000;
  constexpr long kWindow = 1'000;
  constexpr double kStagnationTol = 1e-15;

  ApmParams params;
  params.alpha = 3.0;
  params.s = 0.5 / P.smooth.lipschitz_L;

  ApmState state = apm_init(P, params, Vector::Zero(P.smooth.dimension));
  double best = P.value(state.y);
  double window_best = best;
  long iters = 0;
  while (iters < kMaxIters) {
    for (long i = 0; i < kWindow && iters < kMaxIters; ++i, ++iters) {
      state = apm_step(P, params, state);
      best = std::min(best, P.value(state.y));
    }
    const double scale = std::max(std::abs(best), 1.0);
    if (window_best - best < kStagnationTol * scale) {
      out.stagnated = true;
      break;
    }
    window_best = best;
  }
  out.F_star = best;
  out.iterations = iters;
  return out;
}

}  // namespace inertia::oracle
