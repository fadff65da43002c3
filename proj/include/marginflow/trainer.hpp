#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "marginflow/datagen.hpp"
#include "marginflow/features.hpp"
#include "marginflow/signed_features.hpp"
#include "marginflow/smooth_margin.hpp"

namespace marginflow {

enum class TrainMode { TwoLayer, FixedDirections, OutputLayer };

// PaperSchedule pins the step sizes of the two radial dynamics:
//   fixed directions: eta(t) = 1 / (16 |z|_inf sqrt(t+1))
//   output layer:     eta(t) = beta(t) sqrt(2) / (|z|_inf sqrt(t+1))
// The two-layer dynamics has no published discrete schedule and runs with
// a constant step only.
enum class StepRule { PaperSchedule, Constant };

enum class InitKind {
  BalancedSphere,  // a uniform on the radius-1/sqrt(2) sphere, b = +-1/sqrt(2)
  Gaussian,        // i.i.d. N(0, sigma^2) entries
  UniformMass,     // radial modes: r(0) = sigma * 1
  Zero,            // radial modes: r(0) = 0
};

struct InitScheme {
  InitKind kind = InitKind::BalancedSphere;
  double sigma = 1.0;

  static InitScheme balanced_sphere() { return {InitKind::BalancedSphere, 1.0}; }
  static InitScheme gaussian(double sigma) { return {InitKind::Gaussian, sigma}; }
  static InitScheme uniform_mass(double scale = 1.0) { return {InitKind::UniformMass, scale}; }
  static InitScheme zero() { return {InitKind::Zero, 0.0}; }
};

struct TrainConfig {
  TrainMode mode = TrainMode::TwoLayer;
  LossKind loss = LossKind::Exponential;
  int width = 100;  // m (TwoLayer mode)
  long steps = 1000;
  StepRule step_rule = StepRule::Constant;
  double eta = 0.0;  // Constant rule; <= 0 picks the data-scaled default (TwoLayer)
  InitScheme init;
  std::uint64_t seed = 0;
  long record_every = 1000;
  // Radial modes: keep the normalized iterate at every recorded step
  // (diagnostics; lets tests check the per-step update identities).
  bool record_iterates = false;
};

// One recorded state. `beta` is |a|_1 (fixed directions), the running
// max{1, sqrt(m)|a|_2} (output layer) or the total 2-homogeneous mass of
// the neuron cloud (two-layer). `mirror_sum` accumulates
// sum_{s<t} 1/(beta(s) sqrt(s+1)) exactly for the radial modes.
struct TrajectoryPoint {
  long t = 0;
  double objective = 0.0;
  double raw_margin = 0.0;
  double beta = 0.0;
  double norm_margin = 0.0;
  double best_margin = 0.0;
  double mirror_sum = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  // True once some recorded iterate certifies a positive normalized
  // margin; when false the rate guarantees do not apply.
  bool margin_positive = false;

  const TrajectoryPoint& final_point() const;
  // CSV schema: t,objective,raw_margin,beta,norm_margin,best_margin
  void write_csv(std::ostream& os) const;
};

// States are recorded at t = 0, powers of two, multiples of record_every
// and the final step.
bool is_record_step(long t, long total, long record_every);

// Neuron-cloud initialization (BalancedSphere or Gaussian); deterministic
// in (scheme, seed).
NeuronCloud init_params(const InitScheme& scheme, const FeatureModel& model, int m, std::uint64_t seed);

// Radial initialization for the fixed-direction and output-layer modes.
Eigen::VectorXd init_radial(const InitScheme& scheme, int m);

struct TwoLayerResult {
  NeuronCloud cloud;
  Trajectory trajectory;
  double balance_drift = 0.0;  // max_j | (|a_j|^2 - b_j^2) - initial |
};

// Explicit Euler ascent w <- w + eta m grad F_m(w) on the smooth margin
// of the finite-width model; gradients use the kink convention from the
// features module. Throws on a non-finite iterate, naming the step.
TwoLayerResult train_two_layer(const LabeledDataset& data, const FeatureModel& model, const TrainConfig& cfg);

struct RadialResult {
  Eigen::VectorXd a_final;      // a(T)
  Eigen::VectorXd abar_best;    // normalized iterate with the best margin
  Trajectory trajectory;
  std::vector<Eigen::VectorXd> iterates;  // abar at recorded steps, if requested
};

// Fixed-direction dynamics on a_j = r_j^2 / m, iterated in the
// mathematically identical multiplicative form
//   a_j <- a_j (1 + 4 eta g_j + 4 eta^2 g_j^2),  g = grad G_1(a),
// which keeps a >= 0 exactly and avoids squaring large radii.
RadialResult train_fixed_directions(const SignedFeatureMatrix& Z, const TrainConfig& cfg);

// Output-layer ascent a <- a + (eta/m) grad G_1(a) from a = 0 with the
// self-normalized step of the paper schedule.
RadialResult train_output_layer(const SignedFeatureMatrix& Z, const TrainConfig& cfg);

}  // namespace marginflow
