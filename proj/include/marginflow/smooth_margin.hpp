#pragma once

#include <Eigen/Core>

namespace marginflow {

// Losses with an exponential tail: l(u) ~ l'(u) ~ exp(u) as u -> -inf.
enum class LossKind { Exponential, Logistic };

// log(sum_i exp(v_i)), max-shifted. Every log-sum-exp in the library goes
// through here; during training the exponents grow without bound.
double log_sum_exp(const Eigen::VectorXd& v);

// log(log(1 + exp(t))), stable over the full double range.
double log_softplus(double t);

// S(u) = -log( (1/n) sum_i l(-u_i) ).
//
// For the exponential loss this is the soft-min: it is concave, shift
// equivariant (S(u + c 1) = S(u) + c) and sandwiches min_i u_i within
// log(n)/1 of it at unit scale.
double smooth_margin(LossKind loss, const Eigen::VectorXd& u);

// grad_i S(u) = l'(-u_i) / sum_{i'} l(-u_{i'}).  All components are
// strictly positive; for the exponential loss they sum to one.
Eigen::VectorXd smooth_margin_grad(LossKind loss, const Eigen::VectorXd& u);

// Scaled soft-min family for the exponential loss:
//   G_beta(a) = -(1/beta) log( (1/n) sum_i exp(-beta z_i.a) )
// with min_i z_i.a <= G_beta(a) <= min_i z_i.a + log(n)/beta, tight at
// machine precision. Throws std::invalid_argument for beta <= 0.
double g_beta(const Eigen::MatrixXd& Z, const Eigen::VectorXd& a, double beta);

// grad G_beta(a) = Z^T p with p = softmax(-beta Z a) in the simplex.
Eigen::VectorXd g_beta_grad(const Eigen::MatrixXd& Z, const Eigen::VectorXd& a, double beta);

// Softmax weights p of G_beta's gradient (exposed for the trainers, which
// reuse them to form margins and step sizes without a second pass).
Eigen::VectorXd g_beta_weights(const Eigen::MatrixXd& Z, const Eigen::VectorXd& a, double beta);

}  // namespace marginflow
