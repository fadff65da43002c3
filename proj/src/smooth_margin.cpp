#include "marginflow/smooth_margin.hpp"

#include <cmath>
#include <stdexcept>

namespace marginflow {

namespace {

double softplus(double t) {
  if (t > 30.0) return t + std::log1p(std::exp(-t));
  if (t < -30.0) return std::exp(t);
  return std::log1p(std::exp(t));
}

void check_margin_vector(const Eigen::VectorXd& u) {
  if (u.size() < 1) throw std::invalid_argument("smooth_margin: empty margin vector");
}

}  // namespace

double log_sum_exp(const Eigen::VectorXd& v) {
  const double shift = v.maxCoeff();
  if (!std::isfinite(shift)) return shift;
  return shift + std::log((v.array() - shift).exp().sum());
}

double log_softplus(double t) {
  if (t < -710.0) return t;  // log1p(exp(t)) = t up to O(exp(t))
  return std::log(softplus(t));
}

double smooth_margin(LossKind loss, const Eigen::VectorXd& u) {
  check_margin_vector(u);
  const double log_n = std::log(static_cast<double>(u.size()));
  if (loss == LossKind::Exponential) return log_n - log_sum_exp(-u);
  Eigen::VectorXd log_losses(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) log_losses[i] = log_softplus(-u[i]);
  return log_n - log_sum_exp(log_losses);
}

Eigen::VectorXd smooth_margin_grad(LossKind loss, const Eigen::VectorXd& u) {
  check_margin_vector(u);
  if (loss == LossKind::Exponential) {
    const Eigen::VectorXd neg = -u;
    const double lse = log_sum_exp(neg);
    return (neg.array() - lse).exp();
  }
  Eigen::VectorXd log_losses(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) log_losses[i] = log_softplus(-u[i]);
  const double lse = log_sum_exp(log_losses);
  Eigen::VectorXd grad(u.size());
  // l'(-u_i) = sigmoid(-u_i), log of which is -softplus(u_i)
  for (Eigen::Index i = 0; i < u.size(); ++i) grad[i] = std::exp(-softplus(u[i]) - lse);
  return grad;
}

double g_beta(const Eigen::MatrixXd& Z, const Eigen::VectorXd& a, double beta) {
  if (beta <= 0.0) throw std::invalid_argument("g_beta: beta must be positive");
  if (Z.cols() != a.size()) throw std::invalid_argument("g_beta: dimension mismatch");
  const Eigen::VectorXd v = Z * a;
  const double log_n = std::log(static_cast<double>(Z.rows()));
  return (log_n - log_sum_exp(-beta * v)) / beta;
}

Eigen::VectorXd g_beta_weights(const Eigen::MatrixXd& Z, const Eigen::VectorXd& a, double beta) {
  if (beta <= 0.0) throw std::invalid_argument("g_beta_grad: beta must be positive");
  if (Z.cols() != a.size()) throw std::invalid_argument("g_beta_grad: dimension mismatch");
  const Eigen::VectorXd e = -beta * (Z * a);
  const double lse = log_sum_exp(e);
  return (e.array() - lse).exp();
}

Eigen::VectorXd g_beta_grad(const Eigen::MatrixXd& Z, const Eigen::VectorXd& a, double beta) {
  return Z.transpose() * g_beta_weights(Z, a, beta);
}

}  // namespace marginflow
