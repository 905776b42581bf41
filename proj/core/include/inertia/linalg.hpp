#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

namespace inertia {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline bool all_finite(const Vector& v) { return v.allFinite(); }

/// Squared Euclidean norm, the workhorse of every energy expression.
inline double sq_norm(const Vector& v) { return v.squaredNorm(); }

}  // namespace inertia
