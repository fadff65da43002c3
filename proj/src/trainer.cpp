#include "marginflow/trainer.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "marginflow/margins.hpp"
#include "marginflow/rng.hpp"

namespace marginflow {

namespace {

constexpr std::uint64_t kInitStream = 0x1217;

[[noreturn]] void overflow_error(const char* where, long step) {
  std::ostringstream msg;
  msg << where << ": non-finite iterate at step " << step;
  throw std::runtime_error(msg.str());
}

double paper_eta_fixed(double inf_norm, long t) {
  return 1.0 / (16.0 * inf_norm * std::sqrt(static_cast<double>(t + 1)));
}

double paper_eta_output(double inf_norm, double beta, long t) {
  return beta * std::sqrt(2.0) / (inf_norm * std::sqrt(static_cast<double>(t + 1)));
}

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

const TrajectoryPoint& Trajectory::final_point() const {
  if (points.empty()) throw std::logic_error("Trajectory::final_point: empty trajectory");
  return points.back();
}

void Trajectory::write_csv(std::ostream& os) const {
  os << "t,objective,raw_margin,beta,norm_margin,best_margin\n";
  os.precision(17);
  for (const auto& pt : points) {
    os << pt.t << "," << pt.objective << "," << pt.raw_margin << "," << pt.beta << ","
       << pt.norm_margin << "," << pt.best_margin << "\n";
  }
}

bool is_record_step(long t, long total, long record_every) {
  if (t == 0 || t == total) return true;
  if (record_every > 0 && t % record_every == 0) return true;
  return (t & (t - 1)) == 0;  // power of two
}

NeuronCloud init_params(const InitScheme& scheme, const FeatureModel& model, int m, std::uint64_t seed) {
  require(m >= 1, "init_params: m must be >= 1");
  const int p = model.param_dim();
  const int d1 = p - 1;  // size of the a-block
  NeuronCloud cloud;
  cloud.model = model;
  cloud.weights.resize(m, p);
  static const double inv_sqrt2 = 0.70710678118654752440084436210485;
  for (int j = 0; j < m; ++j) {
    Rng rng(substream(seed, kInitStream, static_cast<std::uint64_t>(j)));
    switch (scheme.kind) {
      case InitKind::BalancedSphere: {
        const Eigen::VectorXd a = rng.sphere(d1);
        const double s = rng.sign();
        if (model.kind == FeatureKind::ReLU) {
          cloud.weights.row(j).head(d1) = inv_sqrt2 * a;
          cloud.weights(j, p - 1) = s * inv_sqrt2;
        } else {
          cloud.weights.row(j).head(d1) = a;
          cloud.weights(j, p - 1) = s;
        }
        break;
      }
      case InitKind::Gaussian: {
        require(scheme.sigma > 0.0, "init_params: Gaussian sigma must be positive");
        for (int i = 0; i < d1; ++i) cloud.weights(j, i) = scheme.sigma * rng.gaussian();
        if (model.kind == FeatureKind::ReLU) {
          cloud.weights(j, p - 1) = scheme.sigma * rng.gaussian();
        } else {
          cloud.weights(j, p - 1) = rng.sign();
        }
        break;
      }
      default:
        throw std::invalid_argument("init_params: radial scheme is not a cloud initialization");
    }
  }
  return cloud;
}

Eigen::VectorXd init_radial(const InitScheme& scheme, int m) {
  require(m >= 1, "init_radial: m must be >= 1");
  switch (scheme.kind) {
    case InitKind::UniformMass:
      return Eigen::VectorXd::Constant(m, scheme.sigma);
    case InitKind::Zero:
      return Eigen::VectorXd::Zero(m);
    default:
      throw std::invalid_argument("init_radial: cloud scheme is not a radial initialization");
  }
}

TwoLayerResult train_two_layer(const LabeledDataset& data, const FeatureModel& model, const TrainConfig& cfg) {
  require(cfg.mode == TrainMode::TwoLayer, "train_two_layer: wrong mode");
  require(cfg.steps >= 1, "train_two_layer: steps must be >= 1");
  require(cfg.step_rule == StepRule::Constant,
          "train_two_layer: no paper schedule exists for this mode, use a constant step");
  require(cfg.init.kind == InitKind::BalancedSphere || cfg.init.kind == InitKind::Gaussian,
          "train_two_layer: init must be BalancedSphere or Gaussian");
  require(data.size() >= 1, "train_two_layer: empty dataset");

  const int n = data.size();
  const int d = data.dim();
  const int m = cfg.width;
  const int p = model.param_dim();
  const bool relu = model.kind == FeatureKind::ReLU;

  Eigen::MatrixXd Xa(n, d + 1);
  Xa.leftCols(d) = data.X;
  Xa.col(d).setOnes();

  double eta = cfg.eta;
  if (eta <= 0.0) eta = 0.05 / Xa.rowwise().squaredNorm().maxCoeff();

  NeuronCloud cloud = init_params(cfg.init, model, m, cfg.seed);
  Eigen::MatrixXd A = cloud.weights.leftCols(d + 1);  // m x (d+1)
  Eigen::VectorXd b = cloud.weights.col(p - 1);       // output weights / sign channel

  const Eigen::VectorXd balance0 =
      A.rowwise().squaredNorm() - b.cwiseProduct(b);  // conserved in continuous time (ReLU)

  Trajectory traj;
  double best = -std::numeric_limits<double>::infinity();

  auto sync_cloud = [&]() {
    cloud.weights.leftCols(d + 1) = A;
    cloud.weights.col(p - 1) = b;
  };

  Eigen::VectorXd eps_sign;
  if (!relu) eps_sign = b.unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });

  for (long t = 0; t <= cfg.steps; ++t) {
    const Eigen::MatrixXd pre = A * Xa.transpose();       // m x n
    const Eigen::MatrixXd pos = pre.cwiseMax(0.0);        // (a.(x,1))_+
    Eigen::VectorXd h(n);
    if (relu) {
      h = pos.transpose() * b / static_cast<double>(m);
    } else {
      h = pos.cwiseProduct(pos).transpose() * eps_sign / static_cast<double>(m);
    }
    const Eigen::VectorXd u = data.y.cwiseProduct(h);

    if (is_record_step(t, cfg.steps, cfg.record_every)) {
      sync_cloud();
      TrajectoryPoint pt;
      pt.t = t;
      pt.objective = smooth_margin(cfg.loss, u);
      pt.raw_margin = u.minCoeff();
      const SphereMeasure nu = project_h2(cloud);
      pt.beta = nu.total_mass();
      pt.norm_margin = pt.beta > 0.0 ? f1_margin(nu, data, model) : 0.0;
      best = std::max(best, pt.norm_margin);
      pt.best_margin = best;
      pt.mirror_sum = 0.0;
      traj.points.push_back(pt);
    }
    if (t == cfg.steps) break;

    const Eigen::VectorXd q = smooth_margin_grad(cfg.loss, u);
    const Eigen::VectorXd c = q.cwiseProduct(data.y);  // n

    if (relu) {
      const Eigen::MatrixXd active =
          (pre.array() > 0.0).cast<double>().matrix();  // kink convention: 0 at the kink
      const Eigen::MatrixXd weighted = active.array().rowwise() * c.transpose().array();
      A.noalias() += eta * (b.asDiagonal() * (weighted * Xa));
      b.noalias() += eta * (pos * c);
    } else {
      const Eigen::MatrixXd weighted = pos.array().rowwise() * c.transpose().array();
      A.noalias() += (2.0 * eta) * (eps_sign.asDiagonal() * (weighted * Xa));
      // the sign channel is discrete and receives no gradient
    }
    if (!A.allFinite() || !b.allFinite()) overflow_error("train_two_layer", t);
  }

  sync_cloud();
  TwoLayerResult result;
  result.balance_drift =
      ((A.rowwise().squaredNorm() - b.cwiseProduct(b)) - balance0).cwiseAbs().maxCoeff();
  result.cloud = std::move(cloud);
  traj.margin_positive = best > 0.0;
  result.trajectory = std::move(traj);
  return result;
}

RadialResult train_fixed_directions(const SignedFeatureMatrix& Z, const TrainConfig& cfg) {
  require(cfg.mode == TrainMode::FixedDirections, "train_fixed_directions: wrong mode");
  require(cfg.loss == LossKind::Exponential, "train_fixed_directions: exponential loss only");
  require(cfg.steps >= 1, "train_fixed_directions: steps must be >= 1");
  if (cfg.step_rule == StepRule::PaperSchedule) {
    require(cfg.init.kind == InitKind::UniformMass,
            "train_fixed_directions: the paper schedule assumes a uniform initialization");
    require(Z.inf_norm > 0.0, "train_fixed_directions: all-zero features have no paper step size");
  } else {
    require(cfg.eta > 0.0, "train_fixed_directions: constant step must be positive");
  }

  const int m = Z.m();
  const Eigen::VectorXd r0 = init_radial(cfg.init, m);
  Eigen::VectorXd a = r0.cwiseProduct(r0) / static_cast<double>(m);

  Trajectory traj;
  RadialResult result;
  double best = -std::numeric_limits<double>::infinity();
  double mirror_sum = 0.0;

  for (long t = 0; t <= cfg.steps; ++t) {
    const Eigen::VectorXd v = Z.Z * a;  // = u, the raw margins
    const double beta = a.sum();
    if (beta <= 0.0) throw std::runtime_error("train_fixed_directions: mass collapsed to zero");
    const double norm_margin = v.minCoeff() / beta;
    if (norm_margin > best) {
      best = norm_margin;
      result.abar_best = a / beta;
    }

    if (is_record_step(t, cfg.steps, cfg.record_every)) {
      TrajectoryPoint pt;
      pt.t = t;
      pt.objective = smooth_margin(LossKind::Exponential, v);
      pt.raw_margin = v.minCoeff();
      pt.beta = beta;
      pt.norm_margin = norm_margin;
      pt.best_margin = best;
      pt.mirror_sum = mirror_sum;
      traj.points.push_back(pt);
      if (cfg.record_iterates) result.iterates.push_back(a / beta);
    }
    if (t == cfg.steps) break;

    const Eigen::VectorXd p = smooth_margin_grad(LossKind::Exponential, v);  // softmax(-v)
    const Eigen::VectorXd g = Z.Z.transpose() * p;                           // grad G_1(a)
    const double eta =
        cfg.step_rule == StepRule::PaperSchedule ? paper_eta_fixed(Z.inf_norm, t) : cfg.eta;
    a.array() *= 1.0 + 4.0 * eta * g.array() + 4.0 * eta * eta * g.array().square();
    if (!a.allFinite()) overflow_error("train_fixed_directions", t);
    mirror_sum += 1.0 / (beta * std::sqrt(static_cast<double>(t + 1)));
  }

  traj.margin_positive = best > 0.0;
  result.a_final = std::move(a);
  result.trajectory = std::move(traj);
  return result;
}

RadialResult train_output_layer(const SignedFeatureMatrix& Z, const TrainConfig& cfg) {
  require(cfg.mode == TrainMode::OutputLayer, "train_output_layer: wrong mode");
  require(cfg.loss == LossKind::Exponential, "train_output_layer: exponential loss only");
  require(cfg.steps >= 1, "train_output_layer: steps must be >= 1");
  require(cfg.init.kind == InitKind::Zero, "train_output_layer: initialization is r(0) = 0");
  if (cfg.step_rule == StepRule::PaperSchedule) {
    require(Z.inf_norm > 0.0, "train_output_layer: all-zero features have no paper step size");
  } else {
    require(cfg.eta > 0.0, "train_output_layer: constant step must be positive");
  }

  const int m = Z.m();
  const double sqrt_m = std::sqrt(static_cast<double>(m));
  Eigen::VectorXd a = Eigen::VectorXd::Zero(m);

  Trajectory traj;
  RadialResult result;
  double best = -std::numeric_limits<double>::infinity();
  double beta = 1.0;
  double mirror_sum = 0.0;

  for (long t = 0; t <= cfg.steps; ++t) {
    const Eigen::VectorXd v = Z.Z * a;
    beta = std::max(beta, sqrt_m * a.norm());
    const double norm_margin = v.minCoeff() / beta;
    if (norm_margin > best) {
      best = norm_margin;
      result.abar_best = a / beta;
    }

    if (is_record_step(t, cfg.steps, cfg.record_every)) {
      TrajectoryPoint pt;
      pt.t = t;
      pt.objective = smooth_margin(LossKind::Exponential, v);
      pt.raw_margin = v.minCoeff();
      pt.beta = beta;
      pt.norm_margin = norm_margin;
      pt.best_margin = best;
      pt.mirror_sum = mirror_sum;
      traj.points.push_back(pt);
      if (cfg.record_iterates) result.iterates.push_back(a / beta);
    }
    if (t == cfg.steps) break;

    const Eigen::VectorXd p = smooth_margin_grad(LossKind::Exponential, v);
    const Eigen::VectorXd g = Z.Z.transpose() * p;
    const double eta =
        cfg.step_rule == StepRule::PaperSchedule ? paper_eta_output(Z.inf_norm, beta, t) : cfg.eta;
    a.noalias() += (eta / static_cast<double>(m)) * g;
    if (!a.allFinite()) overflow_error("train_output_layer", t);
    mirror_sum += 1.0 / (beta * std::sqrt(static_cast<double>(t + 1)));
  }

  traj.margin_positive = best > 0.0;
  result.a_final = std::move(a);
  result.trajectory = std::move(traj);
  return result;
}

}  // namespace marginflow
