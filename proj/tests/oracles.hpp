#pragma once

// Test-side oracles, independent of the library's solver and gradient
// paths: brute-force grids, Monte Carlo bounds and finite differences.

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include <Eigen/Core>

#include "marginflow/rng.hpp"

namespace oracles {

// Central finite difference of a scalar function at x, step h per coordinate.
inline Eigen::VectorXd central_diff(const std::function<double(const Eigen::VectorXd&)>& f,
                                    const Eigen::VectorXd& x, double h = 1e-5) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd lo = x, hi = x;
    lo[i] -= h;
    hi[i] += h;
    g[i] = (f(hi) - f(lo)) / (2.0 * h);
  }
  return g;
}

// max_{a in simplex} min_i (Z a)_i by exhaustive grid search over the
// simplex at a given resolution; m = Z.cols() must be <= 3.
inline double gamma1_grid(const Eigen::MatrixXd& Z, double resolution) {
  const int m = static_cast<int>(Z.cols());
  const long steps = std::lround(1.0 / resolution);
  double best = -std::numeric_limits<double>::infinity();
  if (m == 1) {
    return Z.col(0).minCoeff();
  }
  if (m == 2) {
    for (long i = 0; i <= steps; ++i) {
      const double a0 = static_cast<double>(i) / steps;
      const Eigen::VectorXd v = a0 * Z.col(0) + (1.0 - a0) * Z.col(1);
      best = std::max(best, v.minCoeff());
    }
    return best;
  }
  if (m == 3) {
    // row values are affine in the inner index: evaluate incrementally
    const int n = static_cast<int>(Z.rows());
    for (long i = 0; i <= steps; ++i) {
      const double a0 = static_cast<double>(i) / steps;
      Eigen::VectorXd v = a0 * Z.col(0) + (1.0 - a0) * Z.col(2);
      const Eigen::VectorXd dv = (Z.col(1) - Z.col(2)) / static_cast<double>(steps);
      for (long j = 0; j <= steps - i; ++j) {
        double mn = v[0];
        for (int r = 1; r < n; ++r) mn = std::min(mn, v[r]);
        best = std::max(best, mn);
        v += dv;
      }
    }
    return best;
  }
  throw std::invalid_argument("gamma1_grid: m must be <= 3");
}

// Monte Carlo upper bound of min_{p in simplex} |Z^T p|_2 / sqrt(m):
// the minimum over `samples` Dirichlet(1) draws.
inline double gamma2_mc_upper(const Eigen::MatrixXd& Z, long samples, std::uint64_t seed) {
  const int n = static_cast<int>(Z.rows());
  const double sqrt_m = std::sqrt(static_cast<double>(Z.cols()));
  marginflow::Rng rng(marginflow::substream(seed, 0x3c0));
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd p(n);
  for (long s = 0; s < samples; ++s) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      double u = rng.uniform();
      while (u <= 0.0) u = rng.uniform();
      p[i] = -std::log(u);
      total += p[i];
    }
    p /= total;
    best = std::min(best, (Z.transpose() * p).norm() / sqrt_m);
  }
  // the simplex corners are cheap certified candidates too
  for (int i = 0; i < n; ++i) best = std::min(best, Z.row(i).norm() / sqrt_m);
  return best;
}

inline Eigen::MatrixXd random_matrix(int n, int m, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  marginflow::Rng rng(marginflow::substream(seed, 0x2a7));
  Eigen::MatrixXd Z(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) Z(i, j) = rng.uniform(lo, hi);
  return Z;
}

}  // namespace oracles
