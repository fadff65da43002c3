#include "marginflow/margins.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "marginflow/rng.hpp"

namespace marginflow {

double margin(const Eigen::VectorXd& u) {
  if (u.size() < 1) throw std::invalid_argument("margin: empty vector");
  return u.minCoeff();
}

namespace {

constexpr double kLpGapTol = 1e-9;
constexpr double kPgGapTol = 1e-8;

// ---- dense two-phase tableau simplex -----------------------------------
//
// Solves   min c.x   s.t.  A x >= b,  x >= 0   with b > 0, returning the
// optimal x and the dual vector y >= 0 of the inequality rows. Columns are
// [x | surplus | artificial]; phase 1 drives the artificial basis out,
// phase 2 optimizes c. Entering column: most negative reduced cost, with a
// permanent switch to Bland's rule after a run of degenerate pivots, which
// guarantees termination. Leaving row: ratio test, ties broken towards the
// smallest basis index.
struct SimplexResult {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  bool ok = false;
  std::string message;
};

SimplexResult solve_cover_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(A.cols());
  const int cols = m + n + n;
  const double tol = 1e-11;

  Eigen::MatrixXd T(n, cols);
  T.leftCols(m) = A;
  T.middleCols(m, n) = -Eigen::MatrixXd::Identity(n, n);
  T.rightCols(n) = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd rhs = b;
  std::vector<int> basis(n);
  for (int i = 0; i < n; ++i) basis[i] = m + n + i;

  Eigen::VectorXd cost1 = Eigen::VectorXd::Zero(cols);
  cost1.tail(n).setOnes();
  Eigen::VectorXd cost2 = Eigen::VectorXd::Zero(cols);
  cost2.head(m) = c;

  const long max_pivots = 200L * (n + m + 10);
  long degenerate_run = 0;
  bool bland = false;

  auto objective = [&](const Eigen::VectorXd& cost) {
    double v = 0.0;
    for (int i = 0; i < n; ++i) v += cost[basis[i]] * rhs[i];
    return v;
  };

  auto pivot = [&](int row, int col) {
    const double piv = T(row, col);
    T.row(row) /= piv;
    rhs[row] /= piv;
    for (int i = 0; i < n; ++i) {
      if (i == row) continue;
      const double f = T(i, col);
      if (f == 0.0) continue;
      T.row(i) -= f * T.row(row);
      rhs[i] -= f * rhs[row];
    }
    basis[row] = col;
  };

  auto run_phase = [&](const Eigen::VectorXd& cost, bool allow_artificial) -> bool {
    long pivots = 0;
    double prev_obj = objective(cost);
    while (true) {
      // reduced costs r_j = c_j - c_B . T_j
      Eigen::VectorXd cb(n);
      for (int i = 0; i < n; ++i) cb[i] = cost[basis[i]];
      Eigen::VectorXd reduced = cost - T.transpose() * cb;

      int enter = -1;
      if (bland) {
        for (int j = 0; j < cols; ++j) {
          if (!allow_artificial && j >= m + n) continue;
          if (reduced[j] < -tol) {
            enter = j;
            break;
          }
        }
      } else {
        double best = -tol;
        for (int j = 0; j < cols; ++j) {
          if (!allow_artificial && j >= m + n) continue;
          if (reduced[j] < best) {
            best = reduced[j];
            enter = j;
          }
        }
      }
      if (enter < 0) return true;  // optimal for this phase

      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < n; ++i) {
        if (T(i, enter) > tol) {
          const double ratio = rhs[i] / T(i, enter);
          if (ratio < best_ratio - 1e-12 ||
              (ratio < best_ratio + 1e-12 && (leave < 0 || basis[i] < basis[leave]))) {
            best_ratio = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return false;  // unbounded (cannot happen for our LPs)

      pivot(leave, enter);
      if (++pivots > max_pivots) return false;

      const double obj = objective(cost);
      if (obj > prev_obj - 1e-13 * (1.0 + std::abs(prev_obj))) {
        if (++degenerate_run > 2 * (n + 4)) bland = true;
      } else {
        degenerate_run = 0;
      }
      prev_obj = obj;
    }
  };

  SimplexResult result;
  if (!run_phase(cost1, true)) {
    result.message = "phase-1 simplex failed to terminate";
    return result;
  }
  if (objective(cost1) > 1e-7) {
    result.message = "phase-1 left a nonzero infeasibility";
    return result;
  }
  // drive any leftover artificial out of the basis where possible
  for (int i = 0; i < n; ++i) {
    if (basis[i] < m + n) continue;
    for (int j = 0; j < m + n; ++j) {
      if (std::abs(T(i, j)) > 1e-9) {
        pivot(i, j);
        break;
      }
    }
  }
  degenerate_run = 0;
  if (!run_phase(cost2, false)) {
    result.message = "phase-2 simplex failed to terminate";
    return result;
  }

  result.x = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < n; ++i)
    if (basis[i] < m) result.x[basis[i]] = rhs[i];

  // dual of row i = reduced cost of its surplus column
  Eigen::VectorXd cb(n);
  for (int i = 0; i < n; ++i) cb[i] = cost2[basis[i]];
  result.y = Eigen::VectorXd(n);
  for (int i = 0; i < n; ++i) result.y[i] = -cb.dot(T.col(m + i));
  result.ok = true;
  return result;
}

void fill_support_residuals(const SignedFeatureMatrix& Z, MarginCertificate& cert, double tol) {
  const Eigen::VectorXd row_margins = Z.Z * cert.primal;   // z_i . a
  const Eigen::VectorXd col_scores = Z.Z.transpose() * cert.dual;  // (Z^T p)_j
  const double min_margin = row_margins.minCoeff();
  double dual_res = 0.0;
  for (int i = 0; i < Z.n(); ++i)
    if (row_margins[i] > min_margin + tol) dual_res += cert.dual[i];
  cert.support_residual_dual = dual_res;

  if (cert.problem == MarginProblem::Simplex) {
    const double max_score = col_scores.maxCoeff();
    double primal_res = 0.0;
    for (int j = 0; j < Z.m(); ++j)
      if (col_scores[j] < max_score - tol) primal_res += cert.primal[j];
    cert.support_residual_primal = primal_res;
  } else {
    // alignment with the dual direction on the ball boundary
    const double norm = col_scores.norm();
    const double sqrt_m = std::sqrt(static_cast<double>(Z.m()));
    if (norm > 0.0) {
      cert.support_residual_primal = (cert.primal - col_scores / (sqrt_m * norm)).cwiseAbs().maxCoeff();
    } else {
      cert.support_residual_primal = cert.primal.cwiseAbs().maxCoeff();
    }
  }
}

MarginCertificate finalize_certificate(const SignedFeatureMatrix& Z, MarginProblem problem,
                                       Eigen::VectorXd a, Eigen::VectorXd p, double support_tol) {
  MarginCertificate cert;
  cert.problem = problem;
  cert.primal = std::move(a);
  cert.dual = std::move(p);
  cert.primal_value = (Z.Z * cert.primal).minCoeff();
  if (problem == MarginProblem::Simplex) {
    cert.dual_value = (Z.Z.transpose() * cert.dual).maxCoeff();
  } else {
    cert.dual_value = (Z.Z.transpose() * cert.dual).norm() / std::sqrt(static_cast<double>(Z.m()));
  }
  cert.gap = cert.dual_value - cert.primal_value;
  cert.separable = cert.primal_value > 0.0;
  fill_support_residuals(Z, cert, support_tol);
  return cert;
}

}  // namespace

Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
  const int n = static_cast<int>(v.size());
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cssv = 0.0;
  double theta = 0.0;
  for (int i = 0; i < n; ++i) {
    cssv += u[i];
    const double t = (cssv - 1.0) / (i + 1);
    if (u[i] - t > 0.0) theta = t;
  }
  return (v.array() - theta).max(0.0);
}

MarginCertificate gamma1_lp(const SignedFeatureMatrix& Z) {
  const int n = Z.n();
  const int m = Z.m();
  const double shift = 1.0 + Z.inf_norm;
  const Eigen::MatrixXd A = Z.Z.array() + shift;  // entries >= 1

  const SimplexResult lp =
      solve_cover_lp(A, Eigen::VectorXd::Ones(n), Eigen::VectorXd::Ones(m));
  MarginCertificate fallback = finalize_certificate(
      Z, MarginProblem::Simplex, Eigen::VectorXd::Constant(m, 1.0 / m),
      Eigen::VectorXd::Constant(n, 1.0 / n), 1e-6);
  if (!lp.ok) throw MarginSolveError("gamma1_lp: " + lp.message, fallback);

  Eigen::VectorXd a = lp.x.cwiseMax(0.0);
  const double ax = a.sum();
  Eigen::VectorXd p = lp.y.cwiseMax(0.0);
  const double py = p.sum();
  if (ax <= 0.0 || py <= 0.0)
    throw MarginSolveError("gamma1_lp: degenerate scaling", fallback);
  a /= ax;
  p /= py;

  MarginCertificate cert = finalize_certificate(Z, MarginProblem::Simplex, std::move(a), std::move(p), 1e-6);
  if (cert.gap > kLpGapTol * std::max(1.0, Z.inf_norm))
    throw MarginSolveError("gamma1_lp: duality gap above tolerance", cert);
  return cert;
}

MarginCertificate gamma2_dual(const SignedFeatureMatrix& Z) {
  const int n = Z.n();
  const int m = Z.m();
  const double sqrt_m = std::sqrt(static_cast<double>(m));
  const double scale = std::max(1.0, Z.inf_norm);

  if (Z.inf_norm == 0.0) {
    return finalize_certificate(Z, MarginProblem::L2Ball, Eigen::VectorXd::Zero(m),
                                Eigen::VectorXd::Constant(n, 1.0 / n), 1e-6);
  }

  // L = |Z|_op^2 / m by power iteration on the n x n Gram matrix
  const Eigen::MatrixXd G = Z.Z * Z.Z.transpose();
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = 1.0 + 0.01 * (i + 1);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 50; ++it) {
    const Eigen::VectorXd w = G * v;
    const double nw = w.norm();
    if (nw == 0.0) break;
    const double next = v.dot(w);
    v = w / nw;
    if (std::abs(next - lambda) <= 1e-10 * std::max(1.0, std::abs(next))) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  const double L = std::max(lambda, 1e-30) / static_cast<double>(m);

  Eigen::VectorXd p = Eigen::VectorXd::Constant(n, 1.0 / n);
  MarginCertificate best;
  double best_gap = std::numeric_limits<double>::infinity();
  const long max_iters = 2000000;

  for (long it = 0; it <= max_iters; ++it) {
    const Eigen::VectorXd zp = Z.Z.transpose() * p;  // m
    const double norm_zp = zp.norm();
    const double dual_value = norm_zp / sqrt_m;

    Eigen::VectorXd a;
    double primal_value;
    if (dual_value <= 1e-9 * scale) {
      a = Eigen::VectorXd::Zero(m);
      primal_value = 0.0;
    } else {
      a = zp / (sqrt_m * norm_zp);
      primal_value = (Z.Z * a).minCoeff();
    }
    const double gap = dual_value - primal_value;
    if (gap < best_gap) {
      best_gap = gap;
      best = finalize_certificate(Z, MarginProblem::L2Ball, a, p, 1e-6);
    }
    if (best_gap <= kPgGapTol * scale) return best;

    const Eigen::VectorXd grad = (Z.Z * zp) / static_cast<double>(m);
    p = project_simplex(p - grad / L);
  }
  throw MarginSolveError("gamma2_dual: iteration cap before reaching gap tolerance", best);
}

CertifyReport certify(const SignedFeatureMatrix& Z, const MarginCertificate& cert, double tol) {
  CertifyReport report;
  const Eigen::VectorXd row_margins = Z.Z * cert.primal;
  const Eigen::VectorXd col_scores = Z.Z.transpose() * cert.dual;

  double primal_feas = 0.0;
  if (cert.problem == MarginProblem::Simplex) {
    primal_feas = std::abs(cert.primal.sum() - 1.0);
    primal_feas = std::max(primal_feas, std::max(0.0, -cert.primal.minCoeff()));
  } else {
    primal_feas = std::max(0.0, std::sqrt(static_cast<double>(Z.m())) * cert.primal.norm() - 1.0);
  }
  double dual_feas = std::abs(cert.dual.sum() - 1.0);
  dual_feas = std::max(dual_feas, std::max(0.0, -cert.dual.minCoeff()));

  const double primal_value = row_margins.minCoeff();
  const double dual_value = cert.problem == MarginProblem::Simplex
                                ? col_scores.maxCoeff()
                                : col_scores.norm() / std::sqrt(static_cast<double>(Z.m()));
  report.gap = dual_value - primal_value;
  report.primal_feasibility = primal_feas;
  report.dual_feasibility = dual_feas;

  MarginCertificate scratch = cert;
  fill_support_residuals(Z, scratch, tol);
  report.support_residual_primal = scratch.support_residual_primal;
  report.support_residual_dual = scratch.support_residual_dual;

  report.pass = primal_feas <= tol && dual_feas <= tol && report.gap <= tol &&
                report.support_residual_primal <= tol && report.support_residual_dual <= tol;
  return report;
}

double f1_margin(const SphereMeasure& nu, const LabeledDataset& data, const FeatureModel& model) {
  const SphereMeasure bar = nu.normalized();
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < data.size(); ++i)
    worst = std::min(worst, data.y[i] * predict(bar, model, data.X.row(i)));
  return worst;
}

Eigen::MatrixXd reference_directions(const FeatureModel& model, int M, std::uint64_t seed) {
  if (M < 1) throw std::invalid_argument("reference_directions: M must be >= 1");
  const int p = model.param_dim();
  Eigen::MatrixXd thetas(2 * M, p);
  if (model.kind == FeatureKind::ReLU) {
    SphereSequence seq(p, seed);
    for (int k = 0; k < M; ++k) {
      const Eigen::VectorXd theta = seq.point(k);
      thetas.row(2 * k) = theta;
      thetas.row(2 * k + 1) = balance_map(model, theta);
    }
  } else {
    SphereSequence seq(p - 1, seed);
    for (int k = 0; k < M; ++k) {
      Eigen::VectorXd theta(p);
      theta.head(p - 1) = seq.point(k);
      theta[p - 1] = 1.0;
      thetas.row(2 * k) = theta;
      thetas.row(2 * k + 1) = balance_map(model, theta);
    }
  }
  return thetas;
}

double gamma1_reference(const LabeledDataset& data, const FeatureModel& model, int M, std::uint64_t seed) {
  const Eigen::MatrixXd thetas = reference_directions(model, M, seed);
  const SignedFeatureMatrix Z = build_signed_features(data, model, thetas);
  return gamma1_lp(Z).value();
}

std::string certificate_to_json(const MarginCertificate& cert) {
  nlohmann::json j;
  j["value"] = cert.primal_value;
  j["dual_value"] = cert.dual_value;
  j["gap"] = cert.gap;
  j["primal"] = std::vector<double>(cert.primal.data(), cert.primal.data() + cert.primal.size());
  j["dual"] = std::vector<double>(cert.dual.data(), cert.dual.data() + cert.dual.size());
  j["residuals"] = {{"primal_support", cert.support_residual_primal},
                    {"dual_support", cert.support_residual_dual}};
  j["separable"] = cert.separable;
  j["problem"] = cert.problem == MarginProblem::Simplex ? "simplex" : "l2ball";
  return j.dump(2);
}

}  // namespace marginflow
