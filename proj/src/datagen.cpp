#include "marginflow/datagen.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "marginflow/rng.hpp"

namespace marginflow {

namespace {

constexpr std::uint64_t kClassStream = 0xc1a5;
constexpr std::uint64_t kSampleStream = 0x5a3b1e;

}  // namespace

void write_dataset_csv(std::ostream& os, const LabeledDataset& data) {
  for (int j = 0; j < data.dim(); ++j) os << "x" << (j + 1) << ",";
  os << "y\n";
  os.precision(17);
  for (int i = 0; i < data.size(); ++i) {
    for (int j = 0; j < data.dim(); ++j) os << data.X(i, j) << ",";
    os << static_cast<int>(data.y[i]) << "\n";
  }
}

LabeledDataset read_dataset_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("read_dataset_csv: empty input");
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("read_dataset_csv: no data rows");
  const int d = static_cast<int>(rows.front().size()) - 1;
  LabeledDataset data;
  data.X.resize(rows.size(), d);
  data.y.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<int>(rows[i].size()) != d + 1)
      throw std::runtime_error("read_dataset_csv: ragged row");
    for (int j = 0; j < d; ++j) data.X(i, j) = rows[i][j];
    data.y[i] = rows[i][d] >= 0.0 ? 1.0 : -1.0;
  }
  return data;
}

ClusterGridSpec make_cluster_grid(int k, int d, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("make_cluster_grid: k must be >= 1");
  if (d < 2) throw std::invalid_argument("make_cluster_grid: d must be >= 2");
  ClusterGridSpec spec;
  spec.k = k;
  spec.d = d;
  spec.seed = seed;
  spec.cluster_class.resize(k * k);
  Rng rng(substream(seed, kClassStream));
  for (int c = 0; c < k * k; ++c) spec.cluster_class[c] = rng.sign();
  return spec;
}

ClusterGridSpec resample_points(const ClusterGridSpec& spec, std::uint64_t salt) {
  ClusterGridSpec fresh = spec;
  fresh.seed = substream(spec.seed, 0xf2e5, salt);
  fresh.cluster_class = spec.cluster_class;
  return fresh;
}

LabeledDataset sample_cluster_grid(const ClusterGridSpec& spec, int n) {
  if (n < 1) throw std::invalid_argument("sample_cluster_grid: n must be >= 1");
  if (spec.d < 2) throw std::invalid_argument("sample_cluster_grid: d must be >= 2");
  if (static_cast<int>(spec.cluster_class.size()) != spec.k * spec.k)
    throw std::invalid_argument("sample_cluster_grid: class assignment has wrong size");
  const int k = spec.k;
  const double radius = spec.disk_radius();
  const double step = spec.grid_step();
  const double origin = -0.5 * step * (k - 1);
  LabeledDataset data;
  data.X.resize(n, spec.d);
  data.y.resize(n);
  for (int i = 0; i < n; ++i) {
    Rng rng(substream(spec.seed, kSampleStream, static_cast<std::uint64_t>(i)));
    const int cluster = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(k * k));
    const double cx = origin + step * (cluster % k);
    const double cy = origin + step * (cluster / k);
    // rejection from the bounding square, acceptance pi/4
    double dx = 0.0, dy = 0.0;
    do {
      dx = rng.uniform(-radius, radius);
      dy = rng.uniform(-radius, radius);
    } while (dx * dx + dy * dy > radius * radius);
    data.X(i, 0) = cx + dx;
    data.X(i, 1) = cy + dy;
    for (int j = 2; j < spec.d; ++j) data.X(i, j) = rng.uniform(-0.5, 0.5);
    data.y[i] = spec.cluster_class[cluster];
  }
  return data;
}

ProjectionStrategy ProjectionStrategy::exact_full() {
  ProjectionStrategy s;
  s.kind = Kind::ExactFull;
  return s;
}

ProjectionStrategy ProjectionStrategy::known_plane(Eigen::MatrixXd basis) {
  ProjectionStrategy s;
  s.kind = Kind::KnownPlane;
  s.basis = std::move(basis);
  return s;
}

ProjectionStrategy ProjectionStrategy::random_search(int trials, std::uint64_t seed) {
  ProjectionStrategy s;
  s.kind = Kind::RandomSearch;
  s.trials = trials;
  s.seed = seed;
  return s;
}

namespace {

// min over inter-class pairs of |B^T (x_i - x_i')| for orthonormal B
double min_projected_pair(const LabeledDataset& data, const Eigen::MatrixXd* basis) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < data.size(); ++i) {
    for (int j = i + 1; j < data.size(); ++j) {
      if (data.y[i] == data.y[j]) continue;
      const Eigen::VectorXd diff = data.X.row(i) - data.X.row(j);
      const double dist = basis ? (basis->transpose() * diff).norm() : diff.norm();
      best = std::min(best, dist);
    }
  }
  return best;
}

}  // namespace

InterclassResult interclass_distance(const LabeledDataset& data, int r, const ProjectionStrategy& strategy) {
  const int d = data.dim();
  if (r < 1 || r > d) throw std::invalid_argument("interclass_distance: rank out of range");
  bool has_pos = false, has_neg = false;
  for (int i = 0; i < data.size(); ++i) (data.y[i] > 0 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) throw std::invalid_argument("interclass_distance: single-class dataset");

  switch (strategy.kind) {
    case ProjectionStrategy::Kind::ExactFull: {
      if (r != d)
        throw std::invalid_argument("interclass_distance: ExactFull is exact only at r = d");
      return {min_projected_pair(data, nullptr), true};
    }
    case ProjectionStrategy::Kind::KnownPlane: {
      if (strategy.basis.rows() != d || strategy.basis.cols() != r)
        throw std::invalid_argument("interclass_distance: basis must be d x r");
      if ((strategy.basis.transpose() * strategy.basis - Eigen::MatrixXd::Identity(r, r)).norm() > 1e-8)
        throw std::invalid_argument("interclass_distance: basis columns must be orthonormal");
      return {min_projected_pair(data, &strategy.basis), r == d};
    }
    case ProjectionStrategy::Kind::RandomSearch: {
      if (strategy.trials < 1) throw std::invalid_argument("interclass_distance: trials must be >= 1");
      double best = 0.0;
      for (int t = 0; t < strategy.trials; ++t) {
        Rng rng(substream(strategy.seed, 0xf7a3e, static_cast<std::uint64_t>(t)));
        Eigen::MatrixXd G(d, r);
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < r; ++j) G(i, j) = rng.gaussian();
        const Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
        const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(d, r);
        best = std::max(best, min_projected_pair(data, &Q));
      }
      return {best, false};
    }
  }
  throw std::logic_error("interclass_distance: unreachable");
}

double test_error(const std::function<double(const Eigen::VectorXd&)>& f, const ClusterGridSpec& spec,
                  int n_test, std::uint64_t seed) {
  if (n_test < 1) throw std::invalid_argument("test_error: n_test must be >= 1");
  ClusterGridSpec fresh = spec;
  fresh.seed = substream(spec.seed, 0x7e57, seed);
  fresh.cluster_class = spec.cluster_class;  // same classes, fresh points
  const LabeledDataset sample = sample_cluster_grid(fresh, n_test);
  long errors = 0;
  for (int i = 0; i < n_test; ++i) {
    if (sample.y[i] * f(sample.X.row(i)) <= 0.0) ++errors;
  }
  return static_cast<double>(errors) / static_cast<double>(n_test);
}

}  // namespace marginflow
