#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

namespace marginflow {

struct LabeledDataset {
  Eigen::MatrixXd X;  // n x d
  Eigen::VectorXd y;  // entries in {-1, +1}

  int size() const { return static_cast<int>(X.rows()); }
  int dim() const { return static_cast<int>(X.cols()); }
};

void write_dataset_csv(std::ostream& os, const LabeledDataset& data);
LabeledDataset read_dataset_csv(std::istream& is);

// Mixture of k^2 uniform disks of radius 1/(3k-1) on a k x k grid of step
// 3/(3k-1) in the first two coordinates; remaining coordinates uniform on
// [-1/2, 1/2]. Each cluster carries a fixed random class sign drawn from
// an independent substream of the seed, so resampling points never
// reshuffles classes. Support is contained in [-1/2, 1/2]^d.
struct ClusterGridSpec {
  int k = 3;
  int d = 2;
  std::uint64_t seed = 0;
  std::vector<int> cluster_class;  // k*k signs

  double disk_radius() const { return 1.0 / (3.0 * k - 1.0); }
  double grid_step() const { return 3.0 / (3.0 * k - 1.0); }
};

// Draws the class assignment; throws std::invalid_argument if d < 2 or k < 1.
ClusterGridSpec make_cluster_grid(int k, int d, std::uint64_t seed);

// Same distribution (identical cluster classes), fresh point stream:
// replicate datasets in repeated experiments are drawn this way.
ClusterGridSpec resample_points(const ClusterGridSpec& spec, std::uint64_t salt);

// Deterministic given (spec, n): sample i is a pure function of
// (spec.seed, i) via counter-based substreams.
LabeledDataset sample_cluster_grid(const ClusterGridSpec& spec, int n);

// Projected interclass distance at rank r:
//   Delta_r = sup over rank-r orthogonal projections P of
//             min_{y_i != y_i'} |P(x_i) - P(x_i')|.
// Exact only at r = d, where the identity projection is optimal because
// projections are 1-Lipschitz. Other strategies return certified lower
// bounds.
struct ProjectionStrategy {
  enum class Kind { ExactFull, KnownPlane, RandomSearch };
  Kind kind = Kind::ExactFull;
  Eigen::MatrixXd basis;  // KnownPlane: d x r, orthonormal columns
  int trials = 100;       // RandomSearch
  std::uint64_t seed = 0;

  static ProjectionStrategy exact_full();
  static ProjectionStrategy known_plane(Eigen::MatrixXd basis);
  static ProjectionStrategy random_search(int trials, std::uint64_t seed);
};

struct InterclassResult {
  double value = 0.0;
  bool exact = false;  // true only for the r = d identity projection
};

InterclassResult interclass_distance(const LabeledDataset& data, int r, const ProjectionStrategy& strategy);

// Monte Carlo estimate of P[y f(x) <= 0] on fresh samples from the spec
// (ties f(x) = 0 count as errors).
double test_error(const std::function<double(const Eigen::VectorXd&)>& f, const ClusterGridSpec& spec,
                  int n_test, std::uint64_t seed);

}  // namespace marginflow
