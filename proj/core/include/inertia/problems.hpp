#pragma once

#include <functional>
#include <optional>
#include <span>
#include <variant>

#include "json.hpp"

#include "inertia/linalg.hpp"

namespace inertia {

/// Construction payload kept with a quadratic objective so it can be
/// serialized and solved directly.
struct QuadraticData {
  Matrix A;
  Vector b;
  double c = 0.0;
};

/// Construction payload of a regularized logistic-regression objective.
struct LogisticData {
  Matrix X;   // rows are data points
  Vector y;   // labels in {-1, +1}
  double reg = 0.0;
};

/// A smooth objective with analytic first and second order oracles and the
/// constants the rate certificates need. Immutable after construction.
struct SmoothObjective {
  int dimension = 0;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::function<Vector(const Vector&, const Vector&)> hess_vec;
  double lipschitz_L = 0.0;
  std::optional<double> pl_mu;      // gradient-dominance constant
  std::optional<double> strong_mu;  // strong-convexity modulus
  std::optional<double> f_star;

  std::variant<std::monostate, QuadraticData, LogisticData> source;

  const QuadraticData* quadratic_data() const {
    return std::get_if<QuadraticData>(&source);
  }
  const LogisticData* logistic_data() const {
    return std::get_if<LogisticData>(&source);
  }
};

enum class ProxKind { zero, l1, box };

/// A nonsmooth term with a closed-form proximal map: the zero function,
/// a weighted l1 norm, or the indicator of a coordinate box.
class ProxFriendly {
 public:
  static ProxFriendly zero();
  static ProxFriendly l1(double weight);
  static ProxFriendly box(double lower, double upper);

  ProxKind kind() const { return kind_; }
  double l1_weight() const { return weight_; }
  double box_lower() const { return lower_; }
  double box_upper() const { return upper_; }

  /// Extended-real value; +infinity outside the box.
  double value(const Vector& x) const;
  double value1d(double x) const;

  /// argmin_u { g(u) + ||u - z||^2 / (2 tau) }, componentwise closed form.
  Vector prox(const Vector& z, double tau) const;
  double prox1d(double z, double tau) const;

 private:
  ProxFriendly() = default;
  ProxKind kind_ = ProxKind::zero;
  double weight_ = 0.0;
  double lower_ = 0.0;
  double upper_ = 0.0;
};

/// F = f + g with the smooth part carrying the constants.
struct CompositeObjective {
  SmoothObjective smooth;
  ProxFriendly nonsmooth = ProxFriendly::zero();
  std::optional<double> F_star;

  double value(const Vector& x) const {
    return smooth.value(x) + nonsmooth.value(x);
  }
};

// ---------------------------------------------------------------------------
// Factories
// ---------------------------------------------------------------------------

/// (1/2) x'Ax - b'x + c for symmetric PSD A with b in range(A).
/// L, the strong-convexity modulus and the gradient-dominance constant come
/// from a dense symmetric eigendecomposition; f* from the direct solve.
SmoothObjective quadratic(const Matrix& A, const Vector& b, double c = 0.0);

/// Convenience: quadratic(diag(spectrum), 0, 0).
SmoothObjective quadratic_diag(const Vector& spectrum);

/// (1/n) sum log(1 + exp(-y_i a_i'x)) + (reg/2)||x||^2 with reg > 0.
/// L = lambda_max(X'X)/(4n) + reg; f* from a long reference run.
SmoothObjective logistic(const Matrix& X, const Vector& y, double reg);

/// Wrap a smooth objective as a composite with g = 0 (F* = f*).
CompositeObjective as_composite(SmoothObjective f);

/// Composite with an l1 term; F* filled in by the reference-run oracle.
CompositeObjective lasso(const Matrix& A, const Vector& b, double lambda);

// Seeded generators. All draws go through Rng (documented in the README),
// so instances are reproducible from (shape, seed).
SmoothObjective random_psd_quadratic(int dim, double eig_min, double eig_max,
                                     std::uint64_t seed);
CompositeObjective random_lasso(int dim, double eig_min, double eig_max,
                                double lambda, std::uint64_t seed);
SmoothObjective random_logistic(int rows, int cols, double reg,
                                std::uint64_t seed);

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// The composite-gradient operator: (x - prox_{s g}(x - s grad f(x))) / s.
/// Vanishes exactly at minimizers of F. Requires 0 < s <= 1/L.
Vector gradient_mapping(const CompositeObjective& P, const Vector& x, double s);

/// Worst (smallest) gradient-dominance ratio ||grad f||^2 / (2 (f - f*))
/// over the samples. Samples with gap below 1e-14 are skipped.
double check_pl(const SmoothObjective& P, std::span<const Vector> samples);

/// Composite variant using the gradient mapping:
/// ||G_s(x)||^2 / (2 (F(x - s G_s(x)) - F*)).
double check_pl(const CompositeObjective& P, std::span<const Vector> samples,
                double s);

// ---------------------------------------------------------------------------
// Serialization: {"kind": "quadratic" | "logistic" | "composite", ...}
// with matrices as row-major arrays of doubles.
// ---------------------------------------------------------------------------

nlohmann::json to_json(const SmoothObjective& P);
nlohmann::json to_json(const CompositeObjective& P);
SmoothObjective smooth_from_json(const nlohmann::json& j);
CompositeObjective composite_from_json(const nlohmann::json& j);

}  // namespace inertia
