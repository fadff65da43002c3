#include <doctest.h>

#include <cmath>

#include "marginflow/rng.hpp"
#include "marginflow/smooth_margin.hpp"
#include "oracles.hpp"

using namespace marginflow;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// the soft-min at inverse temperature beta, test-side
double soft_min(LossKind loss, const Eigen::VectorXd& u, double beta) {
  return smooth_margin(loss, (beta * u).eval()) / beta;
}

}  // namespace

TEST_SUITE_BEGIN("smoothmargin");

TEST_CASE("smooth margin closed-form values") {
  CHECK(smooth_margin(LossKind::Exponential, vec({0, 0})) == doctest::Approx(0.0).epsilon(1e-15));
  const double l2 = std::log(2.0);
  CHECK(smooth_margin(LossKind::Exponential, vec({l2, l2})) == doctest::Approx(l2).epsilon(1e-14));
  CHECK(smooth_margin(LossKind::Logistic, vec({0})) ==
        doctest::Approx(-std::log(std::log(2.0))).epsilon(1e-14));
}

TEST_CASE("exponential gradient is a softmax") {
  const Eigen::VectorXd g = smooth_margin_grad(LossKind::Exponential, vec({0, 0}));
  CHECK(g[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g[1] == doctest::Approx(0.5).epsilon(1e-15));

  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::VectorXd u = 10.0 * rng.gaussian_vector(1 + rng.next_u64() % 8);
    const Eigen::VectorXd grad = smooth_margin_grad(LossKind::Exponential, u);
    CHECK(grad.minCoeff() > 0.0);
    CHECK(std::abs(grad.sum() - 1.0) <= 1e-12);
  }
}

TEST_CASE("logistic gradient value at zero") {
  const Eigen::VectorXd g = smooth_margin_grad(LossKind::Logistic, vec({0, 0}));
  // l'(0) / (2 l(0)) = 0.5 / (2 log 2)
  const double expected = 0.5 / (2.0 * std::log(2.0));
  CHECK(g[0] == doctest::Approx(expected).epsilon(1e-12));
  CHECK(g[1] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("gradients match central finite differences") {
  Rng rng(42);
  for (LossKind loss : {LossKind::Exponential, LossKind::Logistic}) {
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 1 + static_cast<int>(rng.next_u64() % 6);
      const Eigen::VectorXd u = 10.0 * rng.gaussian_vector(n);
      const Eigen::VectorXd g = smooth_margin_grad(loss, u);
      const Eigen::VectorXd fd =
          oracles::central_diff([&](const Eigen::VectorXd& v) { return smooth_margin(loss, v); }, u);
      CHECK((g - fd).norm() <= 1e-6 * (1.0 + g.norm()));
    }
  }
}

TEST_CASE("shift equivariance of the exponential smooth margin") {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::VectorXd u = 5.0 * rng.gaussian_vector(4);
    const double c = rng.uniform(-100.0, 100.0);
    const double lhs = smooth_margin(LossKind::Exponential, (u.array() + c).matrix().eval());
    const double rhs = smooth_margin(LossKind::Exponential, u) + c;
    CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(rhs)));
  }
}

TEST_CASE("smooth margin is stable for extreme inputs") {
  // margins this large appear late in training; values must stay finite
  CHECK(std::isfinite(smooth_margin(LossKind::Exponential, vec({1e8, 2e8}))));
  CHECK(std::isfinite(smooth_margin(LossKind::Exponential, vec({-1e4, 1e4}))));
  CHECK(std::isfinite(smooth_margin(LossKind::Logistic, vec({1e8, 2e8}))));
  CHECK(smooth_margin(LossKind::Logistic, vec({900.0})) == doctest::Approx(900.0));
  const Eigen::VectorXd g = smooth_margin_grad(LossKind::Logistic, vec({900.0, 901.0}));
  CHECK(g.minCoeff() > 0.0);
  CHECK(std::isfinite(g.sum()));
}

TEST_CASE("g_beta closed-form values") {
  Eigen::MatrixXd Z1(1, 1);
  Z1 << 1.0;
  CHECK(g_beta(Z1, vec({1}), 7.0) == doctest::Approx(1.0).epsilon(1e-14));

  Eigen::MatrixXd Z2(2, 1);
  Z2 << 1.0, -1.0;
  CHECK(g_beta(Z2, vec({1}), 1.0) == doctest::Approx(-std::log(std::cosh(1.0))).epsilon(1e-13));

  CHECK_THROWS_AS(g_beta(Z1, vec({1}), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(g_beta(Z1, vec({1}), -2.0), std::invalid_argument);
}

TEST_CASE("sandwich bound is tight at machine precision") {
  Rng rng(77);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 8);
    const int m = 1 + static_cast<int>(rng.next_u64() % 8);
    const Eigen::MatrixXd Z = oracles::random_matrix(n, m, trial);
    Eigen::VectorXd a(m);
    for (int j = 0; j < m; ++j) a[j] = rng.uniform(0.0, 10.0);
    const double beta = rng.uniform(1e-3, 100.0);
    const double g = g_beta(Z, a, beta);
    const double mn = (Z * a).minCoeff();
    CHECK(g - mn >= -1e-12);
    CHECK(g - mn <= std::log(static_cast<double>(n)) / beta + 1e-12);
  }
}

TEST_CASE("g_beta gradient: n = 1 gives the single row") {
  Eigen::MatrixXd Z(1, 3);
  Z << 0.5, -0.25, 2.0;
  const Eigen::VectorXd g = g_beta_grad(Z, vec({1, 2, 3}), 3.0);
  CHECK((g - Z.row(0).transpose()).norm() <= 1e-14);
}

TEST_CASE("g_beta gradient matches finite differences") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 5);
    const int m = 1 + static_cast<int>(rng.next_u64() % 5);
    const Eigen::MatrixXd Z = oracles::random_matrix(n, m, 1000 + trial);
    const Eigen::VectorXd a = 5.0 * rng.gaussian_vector(m);
    const double beta = rng.uniform(0.1, 10.0);
    const Eigen::VectorXd g = g_beta_grad(Z, a, beta);
    const Eigen::VectorXd fd =
        oracles::central_diff([&](const Eigen::VectorXd& v) { return g_beta(Z, v, beta); }, a);
    CHECK((g - fd).norm() <= 1e-6 * (1.0 + g.norm()));
  }
}

TEST_CASE("gradient scale identity grad G_1(a) = grad G_beta(a/beta)") {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 4);
    const int m = 2 + static_cast<int>(rng.next_u64() % 4);
    const Eigen::MatrixXd Z = oracles::random_matrix(n, m, 2000 + trial);
    Eigen::VectorXd a(m);
    for (int j = 0; j < m; ++j) a[j] = rng.uniform(0.1, 5.0);
    const double beta = a.lpNorm<1>();
    const Eigen::VectorXd lhs = g_beta_grad(Z, a, 1.0);
    const Eigen::VectorXd rhs = g_beta_grad(Z, (a / beta).eval(), beta);
    CHECK((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
  }
}

TEST_CASE("soft-min limit at growing inverse temperature") {
  Rng rng(55);
  for (LossKind loss : {LossKind::Exponential, LossKind::Logistic}) {
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 2 + static_cast<int>(rng.next_u64() % 6);
      Eigen::VectorXd u(n);
      for (int i = 0; i < n; ++i) u[i] = rng.uniform(0.5, 3.0);
      const double mn = u.minCoeff();
      for (double beta : {10.0, 100.0, 1000.0}) {
        const double s = soft_min(loss, u, beta);
        const double slack = loss == LossKind::Exponential ? 1e-12 : std::exp(-beta * mn);
        CHECK(s - mn >= -slack - 1e-12);
        CHECK(s - mn <= std::log(static_cast<double>(n)) / beta + slack + 1e-12);
      }
    }
  }
}

TEST_CASE("concavity of G_beta along random chords") {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 4);
    const int m = 2 + static_cast<int>(rng.next_u64() % 4);
    const Eigen::MatrixXd Z = oracles::random_matrix(n, m, 3000 + trial);
    const Eigen::VectorXd a1 = 2.0 * rng.gaussian_vector(m);
    const Eigen::VectorXd a2 = 2.0 * rng.gaussian_vector(m);
    const double beta = rng.uniform(0.1, 20.0);
    const double t = rng.uniform();
    const double mid = g_beta(Z, (t * a1 + (1.0 - t) * a2).eval(), beta);
    CHECK(mid >= t * g_beta(Z, a1, beta) + (1.0 - t) * g_beta(Z, a2, beta) - 1e-10);
  }
}

TEST_SUITE_END();
