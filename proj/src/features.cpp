#include "marginflow/features.hpp"

#include <cmath>
#include <stdexcept>

namespace marginflow {

namespace {

// a . (x, 1) for the leading d+1 block of w
double augmented_dot(const Eigen::VectorXd& a_block, const Eigen::VectorXd& x) {
  return a_block.head(x.size()).dot(x) + a_block[x.size()];
}

void check_dims(const FeatureModel& model, const Eigen::VectorXd& w, const Eigen::VectorXd& x) {
  if (w.size() != model.param_dim())
    throw std::invalid_argument("eval_feature: parameter vector has wrong dimension");
  if (x.size() != model.input_dim)
    throw std::invalid_argument("eval_feature: input vector has wrong dimension");
}

}  // namespace

double eval_feature(const FeatureModel& model, const Eigen::VectorXd& w, const Eigen::VectorXd& x) {
  check_dims(model, w, x);
  const int p = model.param_dim();
  const double act = augmented_dot(w, x);
  if (model.kind == FeatureKind::ReLU) {
    return w[p - 1] * std::max(0.0, act);
  }
  const double eps = w[p - 1] >= 0.0 ? 1.0 : -1.0;
  const double r = std::max(0.0, act);
  return eps * r * r;
}

Eigen::VectorXd feature_grad(const FeatureModel& model, const Eigen::VectorXd& w, const Eigen::VectorXd& x) {
  check_dims(model, w, x);
  const int p = model.param_dim();
  const int d = model.input_dim;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(p);
  const double act = augmented_dot(w, x);
  if (model.kind == FeatureKind::ReLU) {
    if (act > 0.0) {
      g.head(d) = w[p - 1] * x;
      g[d] = w[p - 1];
    }
    g[p - 1] = std::max(0.0, act);
    return g;
  }
  if (act > 0.0) {
    const double eps = w[p - 1] >= 0.0 ? 1.0 : -1.0;
    g.head(d) = (2.0 * eps * act) * x;
    g[d] = 2.0 * eps * act;
  }
  return g;
}

Eigen::VectorXd balance_map(const FeatureModel& model, const Eigen::VectorXd& theta) {
  if (theta.size() != model.param_dim())
    throw std::invalid_argument("balance_map: parameter vector has wrong dimension");
  Eigen::VectorXd out = theta;
  out[model.param_dim() - 1] = -out[model.param_dim() - 1];
  return out;
}

double radial_norm(const FeatureModel& model, const Eigen::VectorXd& w) {
  if (model.kind == FeatureKind::ReLU) return w.norm();
  return w.head(model.param_dim() - 1).norm();
}

Eigen::VectorXd unit_direction(const FeatureModel& model, const Eigen::VectorXd& w) {
  const double r = radial_norm(model, w);
  if (r <= 0.0) throw std::domain_error("unit_direction: zero radial norm");
  if (model.kind == FeatureKind::ReLU) return w / r;
  Eigen::VectorXd theta = w / r;
  theta[model.param_dim() - 1] = w[model.param_dim() - 1] >= 0.0 ? 1.0 : -1.0;
  return theta;
}

double NeuronCloud::predict(const Eigen::VectorXd& x) const {
  double acc = 0.0;
  for (int j = 0; j < size(); ++j) acc += eval_feature(model, weights.row(j), x);
  return acc / static_cast<double>(size());
}

double SphereMeasure::total_mass() const {
  double acc = 0.0;
  for (const auto& atom : atoms) acc += atom.mass;
  return acc;
}

SphereMeasure SphereMeasure::normalized() const {
  const double total = total_mass();
  if (total == 0.0) throw std::domain_error("SphereMeasure::normalized: zero total mass");
  SphereMeasure out = *this;
  for (auto& atom : out.atoms) atom.mass /= total;
  return out;
}

SphereMeasure project_h2(const NeuronCloud& cloud) {
  SphereMeasure out;
  const double inv_m = 1.0 / static_cast<double>(cloud.size());
  out.atoms.reserve(cloud.size());
  for (int j = 0; j < cloud.size(); ++j) {
    const Eigen::VectorXd w = cloud.weights.row(j);
    const double r = radial_norm(cloud.model, w);
    if (r == 0.0) continue;
    out.atoms.push_back({unit_direction(cloud.model, w), r * r * inv_m});
  }
  return out;
}

double predict(const SphereMeasure& nu, const FeatureModel& model, const Eigen::VectorXd& x) {
  double acc = 0.0;
  for (const auto& atom : nu.atoms) acc += atom.mass * eval_feature(model, atom.theta, x);
  return acc;
}

double eval_unit_relu(const Eigen::VectorXd& a, const Eigen::VectorXd& x) {
  if (a.size() != x.size() + 1)
    throw std::invalid_argument("eval_unit_relu: direction must have dimension d+1");
  return std::max(0.0, a.head(x.size()).dot(x) + a[x.size()]);
}

double predict_unit_relu(const std::vector<SignedAtom>& nu, const Eigen::VectorXd& x) {
  double acc = 0.0;
  for (const auto& atom : nu) acc += atom.mass * eval_unit_relu(atom.point, x);
  return acc;
}

SphereMeasure lift_unit_atoms(const std::vector<SignedAtom>& nu) {
  static const double inv_sqrt2 = 0.70710678118654752440084436210485;
  SphereMeasure out;
  out.atoms.reserve(nu.size());
  for (const auto& atom : nu) {
    if (atom.mass == 0.0) continue;
    Eigen::VectorXd theta(atom.point.size() + 1);
    theta.head(atom.point.size()) = inv_sqrt2 * atom.point;
    theta[atom.point.size()] = atom.mass > 0.0 ? inv_sqrt2 : -inv_sqrt2;
    out.atoms.push_back({std::move(theta), 2.0 * std::abs(atom.mass)});
  }
  return out;
}

std::vector<SignedAtom> project_unit_atoms(const SphereMeasure& nu) {
  std::vector<SignedAtom> out;
  out.reserve(nu.atoms.size());
  for (const auto& atom : nu.atoms) {
    const int p = static_cast<int>(atom.theta.size());
    const Eigen::VectorXd a = atom.theta.head(p - 1);
    const double c = atom.theta[p - 1];
    const double norm_a = a.norm();
    if (norm_a == 0.0) continue;
    out.push_back({a / norm_a, c * norm_a * atom.mass});
  }
  return out;
}

double total_variation(const std::vector<SignedAtom>& nu) {
  double acc = 0.0;
  for (const auto& atom : nu) acc += std::abs(atom.mass);
  return acc;
}

}  // namespace marginflow
