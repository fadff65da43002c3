#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "marginflow/datagen.hpp"
#include "marginflow/features.hpp"
#include "marginflow/signed_features.hpp"

namespace marginflow {

// min_i u_i
double margin(const Eigen::VectorXd& u);

enum class MarginProblem {
  Simplex,  // gamma_1^(m): a in the simplex
  L2Ball,   // gamma_2^(m): sqrt(m) |a|_2 <= 1
};

// Saddle-point certificate for max_{a in K} min_i z_i.a. Weak duality
// gives primal_value <= dual_value for every feasible (a, p); a zero gap
// together with the two support conditions proves global optimality.
struct MarginCertificate {
  MarginProblem problem = MarginProblem::Simplex;
  Eigen::VectorXd primal;  // a, feasible for K
  Eigen::VectorXd dual;    // p in the simplex over data points
  double primal_value = 0.0;  // min_i z_i . a
  double dual_value = 0.0;    // max_j (Z^T p)_j  or  |Z^T p|_2 / sqrt(m)
  double gap = 0.0;           // dual_value - primal_value
  double support_residual_primal = 0.0;  // primal mass off the dual argmax
  double support_residual_dual = 0.0;    // dual mass off the primal argmin
  bool separable = false;                // value > 0

  double value() const { return primal_value; }
};

struct CertifyReport {
  bool pass = false;
  double gap = 0.0;
  double primal_feasibility = 0.0;
  double dual_feasibility = 0.0;
  double support_residual_primal = 0.0;
  double support_residual_dual = 0.0;
};

// Thrown when a solver cannot reach its gap tolerance; carries the best
// certificate found so far.
class MarginSolveError : public std::runtime_error {
public:
  MarginSolveError(const std::string& what, MarginCertificate best)
      : std::runtime_error(what), certificate(std::move(best)) {}
  MarginCertificate certificate;
};

// Exact solution of gamma_1^(m) = max_{a in simplex} min_i z_i.a by a
// dense two-phase simplex on the equivalent game LP, Bland's rule for
// anti-cycling. Certificate gap <= 1e-9 or MarginSolveError.
MarginCertificate gamma1_lp(const SignedFeatureMatrix& Z);

// gamma_2^(m) = max_{sqrt(m)|a| <= 1} min_i z_i.a via its dual
// min_{p in simplex} |Z^T p|_2 / sqrt(m), solved by projected gradient
// with Euclidean simplex projection and step 1/L, L = |Z|_op^2 / m from
// power iteration. Refined until the certificate gap is <= 1e-8; a dual
// optimum at zero means the fixed features do not separate the data and
// yields value 0 with separable = false.
MarginCertificate gamma2_dual(const SignedFeatureMatrix& Z);

// Recomputes the certificate quantities from scratch and checks
// feasibility, the duality gap and both complementary slackness
// conditions at tolerance tol.
CertifyReport certify(const SignedFeatureMatrix& Z, const MarginCertificate& cert, double tol = 1e-6);

// Margin of the normalized measure: min_i y_i h(nu/|nu|, x_i).
// Throws std::domain_error on zero total mass.
double f1_margin(const SphereMeasure& nu, const LabeledDataset& data, const FeatureModel& model);

// Lower bound of the variation-norm max margin from M quasi-uniform
// directions (plus their balance images). Direction sets are nested in M
// for a fixed seed, so the value is nondecreasing in M.
double gamma1_reference(const LabeledDataset& data, const FeatureModel& model, int M, std::uint64_t seed);

// The direction grid used by gamma1_reference (2M rows: each sampled
// direction followed by its balance image).
Eigen::MatrixXd reference_directions(const FeatureModel& model, int M, std::uint64_t seed);

// Euclidean projection onto the probability simplex (sort-based).
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v);

std::string certificate_to_json(const MarginCertificate& cert);

}  // namespace marginflow
