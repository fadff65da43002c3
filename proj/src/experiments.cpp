#include "marginflow/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "marginflow/margins.hpp"
#include "marginflow/rng.hpp"

namespace marginflow {

namespace {

constexpr std::uint64_t kFrameStream = 0xd14;

Eigen::MatrixXd sample_directions(const FeatureModel& model, int m, std::uint64_t seed) {
  const int p = model.param_dim();
  Eigen::MatrixXd thetas(m, p);
  for (int j = 0; j < m; ++j) {
    Rng rng(substream(seed, kFrameStream, static_cast<std::uint64_t>(j)));
    if (model.kind == FeatureKind::ReLU) {
      thetas.row(j) = rng.sphere(p);
    } else {
      thetas.row(j).head(p - 1) = rng.sphere(p - 1);
      thetas(j, p - 1) = rng.sign();
    }
  }
  return thetas;
}

}  // namespace

RunSummary run_two_layer_replicate(const ReplicateSetup& setup, int replicate) {
  RunSummary out;
  const ClusterGridSpec spec = resample_points(setup.spec, static_cast<std::uint64_t>(replicate));
  const LabeledDataset data = sample_cluster_grid(spec, setup.n);
  TrainConfig cfg = setup.train;
  cfg.mode = TrainMode::TwoLayer;
  cfg.seed = setup.train.seed + static_cast<std::uint64_t>(replicate);
  try {
    const TwoLayerResult result = train_two_layer(data, setup.model, cfg);
    out.trajectory = result.trajectory;
    const TrajectoryPoint& last = result.trajectory.final_point();
    out.final_margin = last.norm_margin;
    out.best_margin = last.best_margin;
    out.final_beta = last.beta;
    out.balance_drift = result.balance_drift;
    if (setup.test_n > 0) {
      const NeuronCloud& cloud = result.cloud;
      out.test_error = test_error(
          [&cloud](const Eigen::VectorXd& x) { return cloud.predict(x); }, setup.spec,
          setup.test_n, setup.test_seed + static_cast<std::uint64_t>(replicate));
    }
  } catch (const std::runtime_error& err) {
    out.failed = true;
    out.message = err.what();
  }
  return out;
}

RunSummary run_output_layer_replicate(const ReplicateSetup& setup, int replicate) {
  RunSummary out;
  const ClusterGridSpec spec = resample_points(setup.spec, static_cast<std::uint64_t>(replicate));
  const LabeledDataset data = sample_cluster_grid(spec, setup.n);
  const int m = setup.train.width;
  const std::uint64_t frame_seed = setup.train.seed + 0x0f00 + static_cast<std::uint64_t>(replicate);
  Eigen::MatrixXd frames(m, setup.spec.d + 1);
  for (int j = 0; j < m; ++j) {
    Rng rng(substream(frame_seed, kFrameStream, static_cast<std::uint64_t>(j)));
    frames.row(j) = rng.sphere(setup.spec.d + 1);
  }
  try {
    const SignedFeatureMatrix Z = build_signed_features_units(data, frames);
    TrainConfig cfg = setup.train;
    cfg.mode = TrainMode::OutputLayer;
    cfg.init = InitScheme::zero();
    const RadialResult result = train_output_layer(Z, cfg);
    out.trajectory = result.trajectory;
    const TrajectoryPoint& last = result.trajectory.final_point();
    out.final_margin = last.norm_margin;
    out.best_margin = last.best_margin;
    out.final_beta = last.beta;
    if (setup.solve_design) out.solver_value = gamma2_dual(Z).value();
    if (setup.test_n > 0) {
      const Eigen::VectorXd a = result.a_final;
      const int d = setup.spec.d;
      out.test_error = test_error(
          [&](const Eigen::VectorXd& x) {
            Eigen::VectorXd xa(d + 1);
            xa.head(d) = x;
            xa[d] = 1.0;
            return (frames * xa).cwiseMax(0.0).dot(a);
          },
          setup.spec, setup.test_n, setup.test_seed + static_cast<std::uint64_t>(replicate));
    }
  } catch (const std::runtime_error& err) {
    out.failed = true;
    out.message = err.what();
  }
  return out;
}

RunSummary run_fixed_directions_replicate(const ReplicateSetup& setup, int replicate) {
  RunSummary out;
  const ClusterGridSpec spec = resample_points(setup.spec, static_cast<std::uint64_t>(replicate));
  const LabeledDataset data = sample_cluster_grid(spec, setup.n);
  const int m = setup.train.width;
  const Eigen::MatrixXd thetas = sample_directions(
      setup.model, m, setup.train.seed + 0x0d17 + static_cast<std::uint64_t>(replicate));
  try {
    const SignedFeatureMatrix Z = build_signed_features(data, setup.model, thetas);
    TrainConfig cfg = setup.train;
    cfg.mode = TrainMode::FixedDirections;
    cfg.init = InitScheme::uniform_mass(setup.train.init.kind == InitKind::UniformMass
                                            ? setup.train.init.sigma
                                            : 1.0);
    const RadialResult result = train_fixed_directions(Z, cfg);
    out.trajectory = result.trajectory;
    const TrajectoryPoint& last = result.trajectory.final_point();
    out.final_margin = last.norm_margin;
    out.best_margin = last.best_margin;
    out.final_beta = last.beta;
    if (setup.solve_design) out.solver_value = gamma1_lp(Z).value();
    if (setup.test_n > 0) {
      const Eigen::VectorXd a = result.a_final;
      const FeatureModel model = setup.model;
      out.test_error = test_error(
          [&](const Eigen::VectorXd& x) {
            double acc = 0.0;
            for (int j = 0; j < m; ++j) acc += a[j] * eval_feature(model, thetas.row(j), x);
            return acc;
          },
          setup.spec, setup.test_n, setup.test_seed + static_cast<std::uint64_t>(replicate));
    }
  } catch (const std::runtime_error& err) {
    out.failed = true;
    out.message = err.what();
  }
  return out;
}

std::vector<RunSummary> run_replicates(const std::function<RunSummary(int)>& one, int count, int jobs) {
  if (count < 1) throw std::invalid_argument("run_replicates: count must be >= 1");
  std::vector<RunSummary> results(count);
  if (jobs <= 1) {
    for (int r = 0; r < count; ++r) results[r] = one(r);
    return results;
  }
  std::atomic<int> next{0};
  auto worker = [&]() {
    while (true) {
      const int r = next.fetch_add(1);
      if (r >= count) return;
      results[r] = one(r);
    }
  };
  std::vector<std::thread> pool;
  const int threads = std::min(jobs, count);
  pool.reserve(threads);
  for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return results;
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile: empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "sweep_value,replicate,metric,value\n";
  os.precision(17);
  for (const auto& row : rows)
    os << row.sweep_value << "," << row.replicate << "," << row.metric << "," << row.value << "\n";
}

}  // namespace marginflow
