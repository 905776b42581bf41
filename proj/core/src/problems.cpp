#include "inertia/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "inertia/oracle.hpp"
#include "inertia/rng.hpp"

namespace inertia {

namespace {

constexpr double kRangeResidualTol = 1e-8;  // least-squares residual gate

double softplus(double u) {
  // log(1 + exp(u)) without overflow on either side.
  if (u > 0.0) return u + std::log1p(std::exp(-u));
  return std::log1p(std::exp(u));
}

double sigmoid(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

void require_symmetric(const Matrix& A) {
  if (A.rows() != A.cols())
    throw std::invalid_argument("quadratic: A must be square");
  const double scale = 1.0 + A.cwiseAbs().maxCoeff();
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("quadratic: A must be symmetric");
}

}  // namespace

// ---------------------------------------------------------------------------
// ProxFriendly
// ---------------------------------------------------------------------------

ProxFriendly ProxFriendly::zero() { return ProxFriendly{}; }

ProxFriendly ProxFriendly::l1(double weight) {
  if (!(weight >= 0.0))
    throw std::invalid_argument("l1 weight must be nonnegative");
  ProxFriendly g;
  g.kind_ = ProxKind::l1;
  g.weight_ = weight;
  return g;
}

ProxFriendly ProxFriendly::box(double lower, double upper) {
  if (!(lower <= upper))
    throw std::invalid_argument("box: lower bound exceeds upper bound");
  ProxFriendly g;
  g.kind_ = ProxKind::box;
  g.lower_ = lower;
  g.upper_ = upper;
  return g;
}

double ProxFriendly::value1d(double x) const {
  switch (kind_) {
    case ProxKind::zero:
      return 0.0;
    case ProxKind::l1:
      return weight_ * std::abs(x);
    case ProxKind::box:
      return (x >= lower_ && x <= upper_)
                 ? 0.0
                 : std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

double ProxFriendly::value(const Vector& x) const {
  switch (kind_) {
    case ProxKind::zero:
      return 0.0;
    case ProxKind::l1:
      return weight_ * x.lpNorm<1>();
    case ProxKind::box: {
      for (int i = 0; i < x.size(); ++i)
        if (x[i] < lower_ || x[i] > upper_)
          return std::numeric_limits<double>::infinity();
      return 0.0;
    }
  }
  return 0.0;
}

double ProxFriendly::prox1d(double z, double tau) const {
  if (!(tau > 0.0)) throw std::invalid_argument("prox: tau must be positive");
  switch (kind_) {
    case ProxKind::zero:
      return z;
    case ProxKind::l1: {
      const double shrink = tau * weight_;
      const double mag = std::abs(z) - shrink;
      return mag > 0.0 ? std::copysign(mag, z) : 0.0;
    }
    case ProxKind::box:
      return std::clamp(z, lower_, upper_);
  }
  return z;
}

Vector ProxFriendly::prox(const Vector& z, double tau) const {
  if (!(tau > 0.0)) throw std::invalid_argument("prox: tau must be positive");
  if (kind_ == ProxKind::zero) return z;
  Vector out(z.size());
  for (int i = 0; i < z.size(); ++i) out[i] = prox1d(z[i], tau);
  return out;
}

// ---------------------------------------------------------------------------
// Quadratic family
// ---------------------------------------------------------------------------

SmoothObjective quadratic(const Matrix& A, const Vector& b, double c) {
  require_symmetric(A);
  if (b.size() != A.rows())
    throw std::invalid_argument("quadratic: b dimension mismatch");

  Eigen::SelfAdjointEigenSolver<Matrix> eig(A);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("quadratic: eigendecomposition failed");
  const Vector lambda = eig.eigenvalues();
  const Matrix U = eig.eigenvectors();

  const double lam_max = lambda.maxCoeff();
  const double zero_tol = 1e-12 * std::max(lam_max, 1.0);
  if (lambda.minCoeff() < -zero_tol)
    throw std::invalid_argument("quadratic: A must be positive semidefinite");

  // Minimizer through the spectral pseudo-inverse; components of b outside
  // the range show up as residual.
  Vector coeffs = U.transpose() * b;
  Vector x_star = Vector::Zero(b.size());
  double min_nonzero = std::numeric_limits<double>::infinity();
  for (int i = 0; i < lambda.size(); ++i) {
    if (lambda[i] > zero_tol) {
      x_star += (coeffs[i] / lambda[i]) * U.col(i);
      min_nonzero = std::min(min_nonzero, lambda[i]);
    }
  }
  if ((A * x_star - b).norm() > kRangeResidualTol)
    throw std::invalid_argument("quadratic: b is not in the range of A");

  SmoothObjective P;
  P.dimension = static_cast<int>(A.rows());
  QuadraticData data{A, b, c};
  P.value = [data](const Vector& x) {
    return 0.5 * x.dot(data.A * x) - data.b.dot(x) + data.c;
  };
  P.gradient = [data](const Vector& x) -> Vector { return data.A * x - data.b; };
  P.hess_vec = [data](const Vector&, const Vector& v) -> Vector {
    return data.A * v;
  };
  P.lipschitz_L = std::max(lam_max, 0.0);
  const double lam_min = lambda.minCoeff();
  if (lam_min > zero_tol) P.strong_mu = lam_min;
  if (std::isfinite(min_nonzero)) P.pl_mu = min_nonzero;
  P.f_star = 0.5 * x_star.dot(A * x_star) - b.dot(x_star) + c;
  P.source = std::move(data);
  return P;
}

SmoothObjective quadratic_diag(const Vector& spectrum) {
  Matrix A = spectrum.asDiagonal();
  return quadratic(A, Vector::Zero(spectrum.size()), 0.0);
}

// ---------------------------------------------------------------------------
// Logistic regression with l2 term
// ---------------------------------------------------------------------------

SmoothObjective logistic(const Matrix& X, const Vector& y, double reg) {
  if (X.rows() != y.size())
    throw std::invalid_argument("logistic: row/label count mismatch");
  if (!(reg > 0.0))
    throw std::invalid_argument("logistic: reg must be positive");
  for (int i = 0; i < y.size(); ++i)
    if (y[i] != 1.0 && y[i] != -1.0)
      throw std::invalid_argument("logistic: labels must be +/-1");

  const double n = static_cast<double>(X.rows());
  LogisticData data{X, y, reg};

  SmoothObjective P;
  P.dimension = static_cast<int>(X.cols());
  P.value = [data, n](const Vector& x) {
    const Vector z = (data.X * x).cwiseProduct(data.y);
    double sum = 0.0;
    for (int i = 0; i < z.size(); ++i) sum += softplus(-z[i]);
    return sum / n + 0.5 * data.reg * x.squaredNorm();
  };
  P.gradient = [data, n](const Vector& x) -> Vector {
    const Vector z = (data.X * x).cwiseProduct(data.y);
    Vector w(z.size());
    for (int i = 0; i < z.size(); ++i) w[i] = -data.y[i] * sigmoid(-z[i]);
    return data.X.transpose() * w / n + data.reg * x;
  };
  P.hess_vec = [data, n](const Vector& x, const Vector& v) -> Vector {
    const Vector z = (data.X * x).cwiseProduct(data.y);
    const Vector Xv = data.X * v;
    Vector w(z.size());
    for (int i = 0; i < z.size(); ++i) {
      const double s = sigmoid(z[i]);
      w[i] = s * (1.0 - s) * Xv[i];
    }
    return data.X.transpose() * w / n + data.reg * v;
  };

  Eigen::SelfAdjointEigenSolver<Matrix> gram(X.transpose() * X);
  P.lipschitz_L = 0.25 * gram.eigenvalues().maxCoeff() / n + reg;
  P.strong_mu = reg;
  P.pl_mu = reg;
  P.source = std::move(data);
  P.f_star = oracle::reference_min(as_composite(P)).F_star;
  return P;
}

// ---------------------------------------------------------------------------
// Composites
// ---------------------------------------------------------------------------

CompositeObjective as_composite(SmoothObjective f) {
  CompositeObjective P;
  P.F_star = f.f_star;
  P.smooth = std::move(f);
  P.nonsmooth = ProxFriendly::zero();
  return P;
}

CompositeObjective lasso(const Matrix& A, const Vector& b, double lambda) {
  CompositeObjective P;
  P.smooth = quadratic(A, b, 0.0);
  P.nonsmooth = ProxFriendly::l1(lambda);
  P.F_star = oracle::reference_min(P).F_star;
  return P;
}

// ---------------------------------------------------------------------------
// Seeded generators
// ---------------------------------------------------------------------------

SmoothObjective random_psd_quadratic(int dim, double eig_min, double eig_max,
                                     std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("random_psd_quadratic: dim >= 1");
  if (!(eig_min >= 0.0) || !(eig_max >= eig_min))
    throw std::invalid_argument("random_psd_quadratic: bad spectrum bounds");
  Rng rng(seed);
  Vector eigs(dim);
  for (int i = 0; i < dim; ++i)
    eigs[i] = dim == 1 ? eig_max
                       : eig_min + (eig_max - eig_min) * i / (dim - 1.0);
  Eigen::HouseholderQR<Matrix> qr(rng.normal_matrix(dim, dim));
  Matrix Q = qr.householderQ();
  Matrix A = Q * eigs.asDiagonal() * Q.transpose();
  A = 0.5 * (A + A.transpose());
  // b = A z keeps b in the range of A even when the spectrum hits zero.
  Vector b = A * rng.normal_vector(dim);
  return quadratic(A, b, 0.0);
}

CompositeObjective random_lasso(int dim, double eig_min, double eig_max,
                                double lambda, std::uint64_t seed) {
  SmoothObjective f = random_psd_quadratic(dim, eig_min, eig_max, seed);
  const QuadraticData* q = f.quadratic_data();
  return lasso(q->A, q->b, lambda);
}

SmoothObjective random_logistic(int rows, int cols, double reg,
                                std::uint64_t seed) {
  Rng rng(seed);
  Matrix X = rng.normal_matrix(rows, cols);
  Vector w = rng.normal_vector(cols);
  Vector y(rows);
  for (int i = 0; i < rows; ++i) {
    const double score = X.row(i).dot(w) + 0.1 * rng.normal();
    y[i] = score >= 0.0 ? 1.0 : -1.0;
  }
  return logistic(X, y, reg);
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

Vector gradient_mapping(const CompositeObjective& P, const Vector& x,
                        double s) {
  const double L = P.smooth.lipschitz_L;
  if (!(s > 0.0) || s > (1.0 + 1e-12) / L)
    throw std::invalid_argument("gradient_mapping: need 0 < s <= 1/L");
  const Vector forward = x - s * P.smooth.gradient(x);
  return (x - P.nonsmooth.prox(forward, s)) / s;
}

double check_pl(const SmoothObjective& P, std::span<const Vector> samples) {
  if (!P.f_star) throw std::invalid_argument("check_pl: f_star unknown");
  double worst = std::numeric_limits<double>::infinity();
  for (const Vector& x : samples) {
    const double gap = P.value(x) - *P.f_star;
    if (gap < 1e-14) continue;  // division degeneracy
    worst = std::min(worst, P.gradient(x).squaredNorm() / (2.0 * gap));
  }
  return worst;
}

double check_pl(const CompositeObjective& P, std::span<const Vector> samples,
                double s) {
  if (!P.F_star) throw std::invalid_argument("check_pl: F_star unknown");
  double worst = std::numeric_limits<double>::infinity();
  for (const Vector& x : samples) {
    const Vector G = gradient_mapping(P, x, s);
    const double gap = P.value(x - s * G) - *P.F_star;
    if (gap < 1e-14) continue;
    worst = std::min(worst, G.squaredNorm() / (2.0 * gap));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

namespace {

nlohmann::json matrix_to_json(const Matrix& A) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(A.size()));
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) flat.push_back(A(i, j));
  return flat;
}

Matrix matrix_from_json(const nlohmann::json& j, int rows, int cols) {
  const auto flat = j.get<std::vector<double>>();
  if (static_cast<int>(flat.size()) != rows * cols)
    throw std::invalid_argument("problem json: matrix payload size mismatch");
  Matrix A(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int jcol = 0; jcol < cols; ++jcol)
      A(i, jcol) = flat[static_cast<std::size_t>(i) * cols + jcol];
  return A;
}

nlohmann::json vector_to_json(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Vector vector_from_json(const nlohmann::json& j) {
  const auto flat = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(flat.data(), static_cast<int>(flat.size()));
}

nlohmann::json prox_to_json(const ProxFriendly& g) {
  switch (g.kind()) {
    case ProxKind::zero:
      return {{"kind", "zero"}};
    case ProxKind::l1:
      return {{"kind", "l1"}, {"lambda", g.l1_weight()}};
    case ProxKind::box:
      return {{"kind", "box"}, {"lower", g.box_lower()}, {"upper", g.box_upper()}};
  }
  return {{"kind", "zero"}};
}

ProxFriendly prox_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "zero") return ProxFriendly::zero();
  if (kind == "l1") return ProxFriendly::l1(j.at("lambda").get<double>());
  if (kind == "box")
    return ProxFriendly::box(j.at("lower").get<double>(),
                             j.at("upper").get<double>());
  throw std::invalid_argument("problem json: unknown prox kind '" + kind + "'");
}

}  // namespace

nlohmann::json to_json(const SmoothObjective& P) {
  nlohmann::json j;
  if (const QuadraticData* q = P.quadratic_data()) {
    j["kind"] = "quadratic";
    j["n"] = P.dimension;
    j["A"] = matrix_to_json(q->A);
    j["b"] = vector_to_json(q->b);
    j["c"] = q->c;
  } else if (const LogisticData* l = P.logistic_data()) {
    j["kind"] = "logistic";
    j["rows"] = static_cast<int>(l->X.rows());
    j["cols"] = static_cast<int>(l->X.cols());
    j["X"] = matrix_to_json(l->X);
    j["y"] = vector_to_json(l->y);
    j["reg"] = l->reg;
  } else {
    throw std::invalid_argument("to_json: objective has no serializable source");
  }
  if (P.f_star) j["f_star"] = *P.f_star;
  return j;
}

nlohmann::json to_json(const CompositeObjective& P) {
  nlohmann::json j;
  j["kind"] = "composite";
  j["smooth"] = to_json(P.smooth);
  j["g"] = prox_to_json(P.nonsmooth);
  if (P.F_star) j["F_star"] = *P.F_star;
  return j;
}

SmoothObjective smooth_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  SmoothObjective P;
  if (kind == "quadratic") {
    const int n = j.at("n").get<int>();
    P = quadratic(matrix_from_json(j.at("A"), n, n), vector_from_json(j.at("b")),
                  j.value("c", 0.0));
  } else if (kind == "logistic") {
    const int rows = j.at("rows").get<int>();
    const int cols = j.at("cols").get<int>();
    P = logistic(matrix_from_json(j.at("X"), rows, cols),
                 vector_from_json(j.at("y")), j.at("reg").get<double>());
  } else {
    throw std::invalid_argument("problem json: unknown smooth kind '" + kind +
                                "'");
  }
  if (j.contains("f_star")) P.f_star = j.at("f_star").get<double>();
  return P;
}

CompositeObjective composite_from_json(const nlohmann::json& j) {
  if (j.at("kind").get<std::string>() != "composite")
    throw std::invalid_argument("problem json: expected kind 'composite'");
  CompositeObjective P;
  P.smooth = smooth_from_json(j.at("smooth"));
  P.nonsmooth = prox_from_json(j.at("g"));
  if (j.contains("F_star"))
    P.F_star = j.at("F_star").get<double>();
  else
    P.F_star = oracle::reference_min(P).F_star;
  return P;
}

}  // namespace inertia
