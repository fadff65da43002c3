#pragma once

#include <vector>

#include <Eigen/Core>

namespace marginflow {

// Feature maps of two-layer units, positively 2-homogeneous in the
// parameter and balanced (a sign-flip map T negates the output).
//
//   ReLU : phi(w, x) = b * (a.(x,1))_+        w = (a, b),  a in R^{d+1}
//   SReLU: phi(w, x) = eps * (a.(x,1))_+^2    w = (a, eps), eps in {-1,+1}
//
// For SReLU the last coordinate is a discrete sign channel: only its sign
// matters, it receives no gradient and carries no radial mass.
enum class FeatureKind { ReLU, SReLU };

struct FeatureModel {
  FeatureKind kind = FeatureKind::ReLU;
  int input_dim = 1;  // d

  int param_dim() const { return input_dim + 2; }  // p
};

// phi(w, x). Throws std::invalid_argument on dimension mismatch.
double eval_feature(const FeatureModel& model, const Eigen::VectorXd& w, const Eigen::VectorXd& x);

// Subgradient of phi in w, with (u)_+' taken as 0 at u = 0.
// The SReLU sign channel gets component 0.
Eigen::VectorXd feature_grad(const FeatureModel& model, const Eigen::VectorXd& w, const Eigen::VectorXd& x);

// The balance map T with phi(T(theta), .) = -phi(theta, .). An involution.
Eigen::VectorXd balance_map(const FeatureModel& model, const Eigen::VectorXd& theta);

// Radial coordinate used by the 2-homogeneous projection: full norm for
// ReLU, norm of the a-block for SReLU.
double radial_norm(const FeatureModel& model, const Eigen::VectorXd& w);

// Unit direction of w on the model's direction manifold (SReLU keeps the
// sign channel at +-1). Requires radial_norm(w) > 0.
Eigen::VectorXd unit_direction(const FeatureModel& model, const Eigen::VectorXd& w);

// m unit parameter vectors, each carrying mass 1/m:
//   mu_m = (1/m) sum_j delta_{w_j},  h_m(x) = (1/m) sum_j phi(w_j, x).
struct NeuronCloud {
  FeatureModel model;
  Eigen::MatrixXd weights;  // m x p, one neuron per row

  int size() const { return static_cast<int>(weights.rows()); }
  double predict(const Eigen::VectorXd& x) const;
};

// Weighted atoms on the direction manifold (unit sphere; for SReLU the
// product of the sphere in a and the sign channel).
struct SphereAtom {
  Eigen::VectorXd theta;
  double mass = 0.0;
};

struct SphereMeasure {
  std::vector<SphereAtom> atoms;

  double total_mass() const;
  // Divides all masses by the total. Throws std::domain_error if the
  // total mass is zero.
  SphereMeasure normalized() const;
};

// 2-homogeneous projection: one atom (w_j/|w_j|, |w_j|^2/m) per neuron,
// zero-norm neurons dropped. Preserves the predictor exactly.
SphereMeasure project_h2(const NeuronCloud& cloud);

// h(nu, x) = sum_k mass_k phi(theta_k, x).
double predict(const SphereMeasure& nu, const FeatureModel& model, const Eigen::VectorXd& x);

// ---- Variation-norm equivalence maps (ReLU geometry) -------------------
//
// The same hypothesis class is spanned by the unit-output-weight features
// phi_tilde(a, x) = (a.(x,1))_+ with a on the sphere of R^{d+1}, against
// signed measures. The two representations have predictors in bijection
// and total masses in exact ratio 2:1.

struct SignedAtom {
  Eigen::VectorXd point;  // on the sphere of R^{p-1}
  double mass = 0.0;      // signed
};

double eval_unit_relu(const Eigen::VectorXd& a, const Eigen::VectorXd& x);
double predict_unit_relu(const std::vector<SignedAtom>& nu, const Eigen::VectorXd& x);

// Lift of a signed measure nu on S^{p-2}: positive atoms are pushed to
// (a, 1)/sqrt(2), negative atoms to (a, -1)/sqrt(2), masses doubled in
// absolute value. The result is nonnegative on S^{p-1}, has total mass
// 2 |nu|, and the same predictor under phi as nu has under phi_tilde.
SphereMeasure lift_unit_atoms(const std::vector<SignedAtom>& nu);

// Reverse map: an atom ((a, c), mass) goes to signed mass c * |a| * mass at
// a/|a| (atoms with a = 0 vanish). Predictor preserved; the total variation
// of the output is at most half the input mass.
std::vector<SignedAtom> project_unit_atoms(const SphereMeasure& nu);

double total_variation(const std::vector<SignedAtom>& nu);

}  // namespace marginflow
