#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "inertia/oracle.hpp"
#include "inertia/problems.hpp"
#include "inertia/rng.hpp"
#include "test_support.hpp"

using namespace inertia;
using test_support::random_points;
using test_support::rel_err;

TEST_CASE("identity quadratic: value, gradient, minimum") {
  SmoothObjective P = quadratic(Matrix::Identity(2, 2), Vector::Zero(2));
  Vector x(2);
  x << 1.0, 1.0;
  CHECK(P.value(x) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK((P.gradient(x) - x).norm() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(*P.f_star == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(P.lipschitz_L == doctest::Approx(1.0));
  CHECK(*P.strong_mu == doctest::Approx(1.0));
}

TEST_CASE("rank-deficient diagonal quadratic: constants") {
  Vector spectrum(2);
  spectrum << 1.0, 0.0;
  SmoothObjective P = quadratic_diag(spectrum);
  CHECK(*P.pl_mu == doctest::Approx(1.0));
  CHECK_FALSE(P.strong_mu.has_value());
  CHECK(*P.f_star == doctest::Approx(0.0));
}

TEST_CASE("random PSD quadratic: f_star agrees with an independent solve") {
  SmoothObjective P = random_psd_quadratic(20, 0.1, 1.0, 42);
  const QuadraticData* q = P.quadratic_data();
  REQUIRE(q != nullptr);
  const Vector x_star = q->A.llt().solve(q->b);
  CHECK(rel_err(*P.f_star, P.value(x_star)) < 1e-10);
  CHECK(P.lipschitz_L == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(*P.strong_mu == doctest::Approx(0.1).epsilon(1e-8));
  CHECK(*P.pl_mu >= *P.strong_mu - 1e-12);
}

TEST_CASE("quadratic rejects bad inputs") {
  Matrix A(2, 2);
  A << 1.0, 0.5, 0.0, 1.0;  // not symmetric
  CHECK_THROWS_AS(quadratic(A, Vector::Zero(2)), std::invalid_argument);

  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 1.0;
  Vector b(2);
  b << 0.0, 1.0;  // outside range(diag(1, 0))
  CHECK_THROWS_AS(quadratic(D, b), std::invalid_argument);

  Matrix N = -Matrix::Identity(2, 2);
  CHECK_THROWS_AS(quadratic(N, Vector::Zero(2)), std::invalid_argument);
}

TEST_CASE("gradients and Hessian products match finite differences") {
  Rng rng(7);
  std::vector<SmoothObjective> family;
  family.push_back(random_psd_quadratic(8, 0.2, 2.0, 11));
  {
    Vector spectrum(5);
    spectrum << 1.0, 1.0, 0.3, 0.0, 0.0;
    family.push_back(quadratic_diag(spectrum));
  }
  family.push_back(random_logistic(40, 6, 0.1, 13));

  for (const SmoothObjective& P : family) {
    for (const Vector& x : random_points(rng, 20, P.dimension)) {
      CHECK(rel_err(P.gradient(x), oracle::fd_gradient(P, x, 1e-5)) < 1e-6);
      const Vector v = rng.normal_vector(P.dimension);
      CHECK(rel_err(P.hess_vec(x, v), oracle::fd_hess_vec(P, x, v, 1e-5)) <
            1e-6);
    }
  }
}

TEST_CASE("gradient is L-Lipschitz on sampled pairs") {
  Rng rng(3);
  SmoothObjective P = random_logistic(30, 5, 0.05, 21);
  for (int i = 0; i < 30; ++i) {
    const Vector x = rng.normal_vector(P.dimension);
    const Vector y = rng.normal_vector(P.dimension);
    const double lhs = (P.gradient(x) - P.gradient(y)).norm();
    CHECK(lhs <= P.lipschitz_L * (x - y).norm() * (1.0 + 1e-9));
  }
}

TEST_CASE("strong convexity implies the gradient-dominance constant") {
  SmoothObjective P = random_psd_quadratic(6, 0.5, 1.5, 5);
  REQUIRE(P.strong_mu.has_value());
  REQUIRE(P.pl_mu.has_value());
  CHECK(*P.pl_mu >= *P.strong_mu - 1e-12);
}

TEST_CASE("soft threshold closed form") {
  ProxFriendly g = ProxFriendly::l1(1.0);
  Vector z(2);
  z << 3.0, -0.5;
  const Vector p = g.prox(z, 1.0);
  CHECK(p[0] == doctest::Approx(2.0));
  CHECK(p[1] == doctest::Approx(0.0));
}

TEST_CASE("zero prox is the identity") {
  ProxFriendly g = ProxFriendly::zero();
  Rng rng(9);
  const Vector z = rng.normal_vector(4);
  CHECK((g.prox(z, 0.7) - z).norm() == 0.0);
}

TEST_CASE("box prox clamps and rejects inverted bounds") {
  ProxFriendly g = ProxFriendly::box(0.0, 1.0);
  Vector z(3);
  z << -2.0, 0.4, 7.0;
  const Vector p = g.prox(z, 2.0);
  CHECK(p[0] == 0.0);
  CHECK(p[1] == doctest::Approx(0.4));
  CHECK(p[2] == 1.0);
  CHECK_THROWS_AS(ProxFriendly::box(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("prox closed forms agree with the 1-D grid oracle") {
  // The cited spot check first.
  {
    ProxFriendly g = ProxFriendly::l1(0.7);
    const auto grid = oracle::grid_prox_1d(g, 1.3, 0.5, -3.0, 3.0, 1e-5);
    CHECK_FALSE(grid.at_boundary);
    CHECK(std::abs(g.prox1d(1.3, 0.5) - grid.argmin) < 1e-4);
  }
  Rng rng(17);
  for (int i = 0; i < 50; ++i) {
    const double z = 4.0 * rng.normal();
    const double tau = 0.05 + 2.0 * rng.uniform();
    ProxFriendly g = (i % 2 == 0)
                         ? ProxFriendly::l1(rng.uniform(0.0, 2.0))
                         : ProxFriendly::box(-0.5, 1.25);
    const auto grid = oracle::grid_prox_1d(g, z, tau, -8.0, 8.0, 1e-5);
    CHECK(std::abs(g.prox1d(z, tau) - grid.argmin) < 1e-4);
  }
}

TEST_CASE("prox is nonexpansive on sampled pairs") {
  Rng rng(23);
  ProxFriendly g = ProxFriendly::l1(0.8);
  for (int i = 0; i < 40; ++i) {
    const Vector a = rng.normal_vector(5);
    const Vector b = rng.normal_vector(5);
    const double tau = 0.1 + rng.uniform();
    CHECK((g.prox(a, tau) - g.prox(b, tau)).norm() <=
          (a - b).norm() * (1.0 + 1e-12));
  }
}

TEST_CASE("gradient mapping with g = 0 is the gradient") {
  CompositeObjective P = as_composite(random_psd_quadratic(4, 0.3, 1.0, 2));
  Rng rng(14);
  for (int i = 0; i < 10; ++i) {
    const Vector x = rng.normal_vector(4);
    CHECK(rel_err(gradient_mapping(P, x, 0.5), P.smooth.gradient(x)) < 1e-12);
  }
}

TEST_CASE("gradient mapping on the hand-checkable lasso") {
  CompositeObjective P = lasso(Matrix::Identity(2, 2), Vector{{2.0, 0.0}}, 1.0);
  const Vector G = gradient_mapping(P, Vector::Zero(2), 0.5);
  CHECK(G[0] == doctest::Approx(-1.0));
  CHECK(G[1] == doctest::Approx(0.0));

  // Same composition with the grid oracle in place of the closed-form prox.
  const Vector forward = Vector::Zero(2) - 0.5 * P.smooth.gradient(Vector::Zero(2));
  for (int i = 0; i < 2; ++i) {
    const double proxed =
        oracle::grid_prox_1d(P.nonsmooth, forward[i], 0.5, -4.0, 4.0, 1e-5)
            .argmin;
    CHECK(std::abs((0.0 - proxed) / 0.5 - G[i]) < 1e-4);
  }

  // The composite minimizer (1, 0) is a fixed point.
  CHECK(gradient_mapping(P, Vector{{1.0, 0.0}}, 0.5).norm() < 1e-12);
  CHECK(*P.F_star == doctest::Approx(-0.5).epsilon(1e-9));
}

TEST_CASE("gradient-dominance ratio is exact on the scaled identity") {
  const double mu = 0.4;
  SmoothObjective P = quadratic(mu * Matrix::Identity(3, 3), Vector::Zero(3));
  Rng rng(31);
  const auto pts = random_points(rng, 15, 3);
  CHECK(check_pl(P, pts) == doctest::Approx(mu).epsilon(1e-12));
}

TEST_CASE("gradient-dominance ratio on the rank-deficient diagonal") {
  Vector spectrum(2);
  spectrum << 1.0, 0.0;
  SmoothObjective P = quadratic_diag(spectrum);
  Rng rng(6);
  const auto pts = random_points(rng, 200, 2);
  CHECK(check_pl(P, pts) >= 1.0 - 1e-10);
}

TEST_CASE("composite gradient-dominance holds for a strongly convex lasso") {
  CompositeObjective P = random_lasso(8, 0.5, 1.0, 0.3, 77);
  Rng rng(78);
  const auto pts = random_points(rng, 1000, 8, 2.0);
  const double s = 1.0 / P.smooth.lipschitz_L;
  CHECK(check_pl(P, pts, s) >= 0.5 - 1e-9);
}

TEST_CASE("descent inequality for the prox-gradient step holds pointwise") {
  // Strongly convex and merely convex composites, random anchors.
  std::vector<CompositeObjective> instances;
  instances.push_back(random_lasso(6, 0.4, 1.2, 0.25, 15));
  {
    Vector spectrum(6);
    spectrum << 1.2, 0.9, 0.6, 0.3, 0.1, 0.0;  // rank deficient, mu = 0
    CompositeObjective P;
    P.smooth = quadratic_diag(spectrum);
    P.nonsmooth = ProxFriendly::l1(0.2);
    P.F_star = oracle::reference_min(P).F_star;
    instances.push_back(std::move(P));
  }

  Rng rng(19);
  for (const CompositeObjective& P : instances) {
    const double L = P.smooth.lipschitz_L;
    const double mu = P.smooth.strong_mu.value_or(0.0);
    for (int i = 0; i < 1000; ++i) {
      const Vector x = rng.normal_vector(P.smooth.dimension);
      const Vector y = rng.normal_vector(P.smooth.dimension);
      const double s = rng.uniform(0.05, 1.0) / L;
      const Vector G = gradient_mapping(P, x, s);
      const double lhs = P.value(x - s * G);
      const double rhs = P.value(y) + G.dot(x - y) -
                         0.5 * s * (2.0 - s * L) * G.squaredNorm() -
                         0.5 * mu * (x - y).squaredNorm();
      CHECK(lhs <= rhs + 1e-10);
    }
  }
}

TEST_CASE("composite value splits and respects the stored minimum") {
  CompositeObjective P = random_lasso(5, 0.3, 1.0, 0.2, 33);
  Rng rng(34);
  for (int i = 0; i < 50; ++i) {
    const Vector x = rng.normal_vector(5);
    CHECK(P.value(x) ==
          doctest::Approx(P.smooth.value(x) + P.nonsmooth.value(x)));
    CHECK(P.value(x) >= *P.F_star - 1e-12);
  }
}

TEST_CASE("problem JSON round trip preserves values and constants") {
  SmoothObjective P = random_psd_quadratic(5, 0.2, 1.0, 91);
  const SmoothObjective Q = smooth_from_json(to_json(P));
  Rng rng(92);
  for (int i = 0; i < 10; ++i) {
    const Vector x = rng.normal_vector(5);
    CHECK(P.value(x) == Q.value(x));
    CHECK((P.gradient(x) - Q.gradient(x)).norm() == 0.0);
  }
  CHECK(*P.f_star == *Q.f_star);
  CHECK(P.lipschitz_L == doctest::Approx(Q.lipschitz_L).epsilon(1e-14));

  CompositeObjective C = random_lasso(4, 0.3, 1.0, 0.15, 55);
  const CompositeObjective D = composite_from_json(to_json(C));
  CHECK(*C.F_star == *D.F_star);
  const Vector x = Rng(56).normal_vector(4);
  CHECK(C.value(x) == D.value(x));
}

TEST_CASE("logistic objective carries usable constants") {
  SmoothObjective P = random_logistic(50, 6, 0.2, 3);
  CHECK(*P.strong_mu == doctest::Approx(0.2));
  CHECK(P.lipschitz_L > 0.2);
  REQUIRE(P.f_star.has_value());
  // The reference minimum is attained (up to solver accuracy) below any
  // sampled value.
  Rng rng(4);
  for (const Vector& x : random_points(rng, 20, 6))
    CHECK(P.value(x) >= *P.f_star - 1e-10);
}
