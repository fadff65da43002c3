#include <doctest.h>

#include <cmath>
#include <sstream>

#include "marginflow/datagen.hpp"
#include "marginflow/margins.hpp"
#include "marginflow/rng.hpp"
#include "marginflow/trainer.hpp"
#include "oracles.hpp"

using namespace marginflow;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

LabeledDataset toy_separable_2d(int n, std::uint64_t seed) {
  Rng rng(substream(seed, 0x70f));
  LabeledDataset data;
  data.X = Eigen::MatrixXd(n, 2);
  data.y.resize(n);
  for (int i = 0; i < n; ++i) {
    const double cls = i % 2 == 0 ? 1.0 : -1.0;
    data.X(i, 0) = 0.3 * cls + 0.05 * rng.gaussian();
    data.X(i, 1) = 0.1 * rng.gaussian();
    data.y[i] = cls;
  }
  return data;
}

}  // namespace

TEST_SUITE_BEGIN("trainer");

TEST_CASE("signed feature matrix basics") {
  FeatureModel model{FeatureKind::ReLU, 1};
  LabeledDataset data;
  data.X = Eigen::MatrixXd(1, 1);
  data.X << 1.0;
  data.y = vec({1});
  // single direction with phi(theta, x) = 0.5: a = (0.5, 0), b = 1
  Eigen::MatrixXd theta(1, 3);
  theta << 0.5, 0.0, 1.0;
  const auto Z = build_signed_features(data, model, theta);
  CHECK(Z.Z(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(Z.inf_norm == doctest::Approx(0.5));

  // flipping the label negates the row
  LabeledDataset flipped = data;
  flipped.y[0] = -1.0;
  CHECK(build_signed_features(flipped, model, theta).Z(0, 0) == doctest::Approx(-0.5));

  LabeledDataset empty;
  empty.X = Eigen::MatrixXd(0, 1);
  empty.y = Eigen::VectorXd(0);
  CHECK_THROWS_AS(build_signed_features(empty, model, theta), std::invalid_argument);
}

TEST_CASE("signed features match eval_feature elementwise") {
  Rng rng(40);
  FeatureModel model{FeatureKind::ReLU, 2};
  LabeledDataset data;
  const int n = 8, m = 6;
  data.X = Eigen::MatrixXd(n, 2);
  data.y.resize(n);
  for (int i = 0; i < n; ++i) {
    data.X.row(i) = rng.gaussian_vector(2);
    data.y[i] = rng.sign();
  }
  Eigen::MatrixXd thetas(m, model.param_dim());
  for (int j = 0; j < m; ++j) thetas.row(j) = rng.sphere(model.param_dim());
  const auto Z = build_signed_features(data, model, thetas);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      CHECK(Z.Z(i, j) ==
            doctest::Approx(data.y[i] * eval_feature(model, thetas.row(j), data.X.row(i)))
                .epsilon(1e-14));

  // unit builder: plain relu of theta.(x,1)
  const auto Zu = build_signed_features_units(data, thetas.leftCols(3).eval());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      const Eigen::VectorXd th = thetas.row(j).head(3);
      CHECK(Zu.Z(i, j) ==
            doctest::Approx(data.y[i] * eval_unit_relu(th, data.X.row(i))).epsilon(1e-14));
    }
}

TEST_CASE("balanced sphere init sits on the invariant set") {
  FeatureModel model{FeatureKind::ReLU, 4};
  const auto cloud = init_params(InitScheme::balanced_sphere(), model, 64, 3);
  for (int j = 0; j < cloud.size(); ++j) {
    const Eigen::VectorXd w = cloud.weights.row(j);
    const double a2 = w.head(5).squaredNorm();
    const double b2 = w[5] * w[5];
    CHECK(std::abs(a2 - b2) <= 1e-12);
    CHECK(std::abs(w.norm() - 1.0) <= 1e-12);
  }
  const auto again = init_params(InitScheme::balanced_sphere(), model, 64, 3);
  CHECK((again.weights - cloud.weights).norm() == 0.0);
  const auto other = init_params(InitScheme::balanced_sphere(), model, 64, 4);
  CHECK((other.weights - cloud.weights).norm() != 0.0);
}

TEST_CASE("gaussian init has the requested variance") {
  FeatureModel model{FeatureKind::ReLU, 5};
  const auto cloud = init_params(InitScheme::gaussian(40.0), model, 20000, 9);
  const double mean = cloud.weights.mean();
  const double var = (cloud.weights.array() - mean).square().mean();
  CHECK(std::abs(var - 1600.0) <= 0.05 * 1600.0);
}

TEST_CASE("hand-rolled single two-layer step") {
  // one data point, one relu neuron, exponential loss: with n = 1 the
  // objective is S(u) = u, so the update is w += eta * grad phi weighted
  // by y; both blocks are written out by hand below.
  FeatureModel model{FeatureKind::ReLU, 1};
  LabeledDataset data;
  data.X = Eigen::MatrixXd(1, 1);
  data.X << 3.0;
  data.y = vec({1});

  TrainConfig cfg;
  cfg.mode = TrainMode::TwoLayer;
  cfg.width = 1;
  cfg.steps = 1;
  cfg.step_rule = StepRule::Constant;
  cfg.eta = 0.1;
  cfg.init = InitScheme::balanced_sphere();
  cfg.seed = 12;

  const NeuronCloud start = init_params(cfg.init, model, 1, cfg.seed);
  const double a0 = start.weights(0, 0), a1 = start.weights(0, 1), b = start.weights(0, 2);
  const double act = a0 * 3.0 + a1;
  const double s = std::max(0.0, act);
  Eigen::VectorXd expected(3);
  expected << a0 + (act > 0 ? cfg.eta * b * 3.0 : 0.0), a1 + (act > 0 ? cfg.eta * b : 0.0),
      b + cfg.eta * s;

  const auto result = train_two_layer(data, model, cfg);
  CHECK((result.cloud.weights.row(0).transpose() - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("two-layer objective ascends at small constant step") {
  FeatureModel model{FeatureKind::ReLU, 2};
  const auto data = toy_separable_2d(16, 5);
  TrainConfig cfg;
  cfg.mode = TrainMode::TwoLayer;
  cfg.width = 24;
  cfg.steps = 3000;
  cfg.step_rule = StepRule::Constant;
  cfg.eta = 0.0;  // data-scaled default
  cfg.init = InitScheme::balanced_sphere();
  cfg.seed = 2;
  const auto result = train_two_layer(data, model, cfg);
  const auto& pts = result.trajectory.points;
  REQUIRE(pts.size() > 3);
  for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i].objective >= pts[i - 1].objective - 1e-12);
  // separable toy data trains to a positive margin
  CHECK(result.trajectory.final_point().norm_margin > 0.0);
  CHECK(result.trajectory.margin_positive);
}

TEST_CASE("two-layer rejects bad configurations and flags overflow") {
  FeatureModel model{FeatureKind::ReLU, 2};
  const auto data = toy_separable_2d(8, 6);
  TrainConfig cfg;
  cfg.mode = TrainMode::TwoLayer;
  cfg.width = 4;
  cfg.steps = 10;
  cfg.step_rule = StepRule::PaperSchedule;
  CHECK_THROWS_AS(train_two_layer(data, model, cfg), std::invalid_argument);

  cfg.step_rule = StepRule::Constant;
  cfg.eta = 1e200;
  cfg.steps = 2000;
  bool threw = false;
  try {
    train_two_layer(data, model, cfg);
  } catch (const std::runtime_error& err) {
    threw = true;
    CHECK(std::string(err.what()).find("step") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("balance drift halves with the step at a fixed horizon") {
  FeatureModel model{FeatureKind::ReLU, 2};
  const auto spec = make_cluster_grid(3, 2, 11);
  const auto data = sample_cluster_grid(spec, 20);
  TrainConfig cfg;
  cfg.mode = TrainMode::TwoLayer;
  cfg.width = 32;
  cfg.step_rule = StepRule::Constant;
  cfg.init = InitScheme::balanced_sphere();
  cfg.seed = 7;
  cfg.eta = 1e-3;
  cfg.steps = 2000;
  const double drift_full = train_two_layer(data, model, cfg).balance_drift;
  cfg.eta = 5e-4;
  cfg.steps = 4000;
  const double drift_half = train_two_layer(data, model, cfg).balance_drift;
  CHECK(drift_full > 0.0);
  const double ratio = drift_half / drift_full;
  CHECK(ratio >= 0.3);
  CHECK(ratio <= 0.7);
}

TEST_CASE("normalized predictions are invariant under mass rescaling") {
  FeatureModel model{FeatureKind::ReLU, 3};
  const auto cloud = init_params(InitScheme::gaussian(1.5), model, 20, 8);
  NeuronCloud scaled = cloud;
  scaled.weights *= std::sqrt(7.0);
  Rng rng(14);
  const auto bar = project_h2(cloud).normalized();
  const auto bar_scaled = project_h2(scaled).normalized();
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::VectorXd x = rng.gaussian_vector(3);
    CHECK(std::abs(predict(bar, model, x) - predict(bar_scaled, model, x)) <= 1e-10);
  }
}

TEST_CASE("fixed-direction multiplicative update matches the radial dynamics") {
  Rng rng(61);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 4);
    const int m = 2 + static_cast<int>(rng.next_u64() % 6);
    const auto Z = SignedFeatureMatrix::from_matrix(oracles::random_matrix(n, m, 606 + trial));
    const double eta = rng.uniform(0.001, 0.02);
    const long steps = 5;

    TrainConfig cfg;
    cfg.mode = TrainMode::FixedDirections;
    cfg.steps = steps;
    cfg.step_rule = StepRule::Constant;
    cfg.eta = eta;
    cfg.init = InitScheme::uniform_mass(1.0);
    const auto result = train_fixed_directions(Z, cfg);

    // reference: iterate r directly, r_j <- r_j (1 + 2 eta g_j)
    Eigen::VectorXd r = Eigen::VectorXd::Ones(m);
    for (long t = 0; t < steps; ++t) {
      const Eigen::VectorXd a = r.cwiseProduct(r) / static_cast<double>(m);
      const Eigen::VectorXd g = g_beta_grad(Z.Z, a, 1.0);
      r = r.cwiseProduct((1.0 + 2.0 * eta * g.array()).matrix());
    }
    const Eigen::VectorXd a_ref = r.cwiseProduct(r) / static_cast<double>(m);
    CHECK((result.a_final - a_ref).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + a_ref.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("fixed directions on the scalar instance") {
  const auto Z = SignedFeatureMatrix::from_matrix(Eigen::MatrixXd::Ones(1, 1));
  TrainConfig cfg;
  cfg.mode = TrainMode::FixedDirections;
  cfg.steps = 64;
  cfg.step_rule = StepRule::PaperSchedule;
  cfg.init = InitScheme::uniform_mass(1.0);
  cfg.record_every = 1;
  const auto result = train_fixed_directions(Z, cfg);
  double prev_beta = 0.0;
  for (const auto& pt : result.trajectory.points) {
    CHECK(pt.norm_margin == doctest::Approx(1.0).epsilon(1e-12));  // abar = 1 always
    CHECK(pt.beta > prev_beta);                                    // beta strictly increasing
    prev_beta = pt.beta;
  }
}

TEST_CASE("fixed directions trajectory bookkeeping") {
  const auto Z = SignedFeatureMatrix::from_matrix(oracles::random_matrix(4, 6, 17));
  TrainConfig cfg;
  cfg.mode = TrainMode::FixedDirections;
  cfg.steps = 50;
  cfg.step_rule = StepRule::PaperSchedule;
  cfg.init = InitScheme::uniform_mass(1.0);
  cfg.record_every = 1;
  const auto result = train_fixed_directions(Z, cfg);
  const auto& pts = result.trajectory.points;
  REQUIRE(pts.size() == 51);
  double best = -1e300;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i > 0) {
      CHECK(pts[i].t == pts[i - 1].t + 1);
      // mirror sum accumulates 1/(beta(s) sqrt(s+1)) exactly
      const double inc = 1.0 / (pts[i - 1].beta * std::sqrt(static_cast<double>(pts[i - 1].t + 1)));
      CHECK(pts[i].mirror_sum == doctest::Approx(pts[i - 1].mirror_sum + inc).epsilon(1e-14));
    }
    best = std::max(best, pts[i].norm_margin);
    CHECK(pts[i].best_margin == doctest::Approx(best).epsilon(1e-15));
  }
  CHECK(std::abs(result.abar_best.lpNorm<1>() - 1.0) <= 1e-10);
}

TEST_CASE("fixed directions approach the LP margin on a desk instance") {
  Rng rng(88);
  Eigen::MatrixXd M = oracles::random_matrix(5, 20, 4096);
  const auto Z = SignedFeatureMatrix::from_matrix(std::move(M));
  const auto cert = gamma1_lp(Z);
  REQUIRE(cert.value() > 0.02);  // seed chosen separable

  TrainConfig cfg;
  cfg.mode = TrainMode::FixedDirections;
  cfg.steps = 100000;
  cfg.step_rule = StepRule::PaperSchedule;
  cfg.init = InitScheme::uniform_mass(1.0);
  cfg.record_every = 10000;
  const auto result = train_fixed_directions(Z, cfg);
  const double best = result.trajectory.final_point().best_margin;
  CHECK(best <= cert.value() + 1e-9);
  CHECK(best >= 0.95 * cert.value());
  // beta eventually increases
  const auto& pts = result.trajectory.points;
  const double bT = pts.back().beta;
  double b_half = 0.0, b_quarter = 0.0;
  for (const auto& pt : pts) {
    if (pt.t <= cfg.steps / 2) b_half = pt.beta;
    if (pt.t <= cfg.steps / 4) b_quarter = pt.beta;
  }
  CHECK(bT > b_half);
  CHECK(b_half > b_quarter);
}

TEST_CASE("output layer on the scalar instance") {
  const auto Z = SignedFeatureMatrix::from_matrix(Eigen::MatrixXd::Ones(1, 1));
  TrainConfig cfg;
  cfg.mode = TrainMode::OutputLayer;
  cfg.steps = 128;
  cfg.step_rule = StepRule::PaperSchedule;
  cfg.init = InitScheme::zero();
  cfg.record_every = 1;
  const auto result = train_output_layer(Z, cfg);
  const auto& pts = result.trajectory.points;
  CHECK(pts.front().norm_margin == 0.0);
  CHECK(result.a_final[0] > 0.0);  // first step moves in the positive direction
  for (std::size_t i = 1; i < pts.size(); ++i) {
    CHECK(pts[i].norm_margin >= pts[i - 1].norm_margin - 1e-12);
    CHECK(pts[i].beta >= pts[i - 1].beta);  // running max by definition
  }
}

TEST_CASE("output layer follows the projected-ascent recursion") {
  const auto Z = SignedFeatureMatrix::from_matrix(oracles::random_matrix(5, 8, 303));
  const int m = Z.m();
  const double sqrt_m = std::sqrt(static_cast<double>(m));
  TrainConfig cfg;
  cfg.mode = TrainMode::OutputLayer;
  cfg.steps = 200;
  cfg.step_rule = StepRule::PaperSchedule;
  cfg.init = InitScheme::zero();
  cfg.record_every = 1;
  cfg.record_iterates = true;
  const auto result = train_output_layer(Z, cfg);
  const auto& pts = result.trajectory.points;
  REQUIRE(pts.size() == 201);
  REQUIRE(result.iterates.size() == 201);

  // each step must satisfy b(t+1) = abar(t) + eta/(m beta) grad G_beta(abar(t)),
  // abar(t+1) = b(t+1)/max{1, sqrt(m) |b(t+1)|}
  for (std::size_t t = 0; t + 1 < pts.size(); ++t) {
    const Eigen::VectorXd& abar = result.iterates[t];
    const double beta = pts[t].beta;
    const double eta = beta * std::sqrt(2.0) / (Z.inf_norm * std::sqrt(static_cast<double>(t + 1)));
    const Eigen::VectorXd g = g_beta_grad(Z.Z, abar, beta);
    const Eigen::VectorXd b = abar + (eta / (m * beta)) * g;
    const Eigen::VectorXd next = b / std::max(1.0, sqrt_m * b.norm());
    CHECK((next - result.iterates[t + 1]).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(std::abs((Z.Z * next).minCoeff() - pts[t + 1].norm_margin) <= 1e-10);
    CHECK(sqrt_m * result.iterates[t + 1].norm() <= 1.0 + 1e-10);
  }
}

TEST_CASE("output layer reaches the dual margin on a desk instance") {
  const auto Z = SignedFeatureMatrix::from_matrix(oracles::random_matrix(8, 50, 2025));
  const auto cert = gamma2_dual(Z);
  REQUIRE(cert.value() > 0.05);

  TrainConfig cfg;
  cfg.mode = TrainMode::OutputLayer;
  cfg.steps = 100000;
  cfg.step_rule = StepRule::PaperSchedule;
  cfg.init = InitScheme::zero();
  cfg.record_every = 10000;
  const auto result = train_output_layer(Z, cfg);
  const double best = result.trajectory.final_point().best_margin;
  CHECK(best <= cert.value() + 1e-9);
  CHECK(best >= 0.95 * cert.value());
  CHECK(std::sqrt(static_cast<double>(Z.m())) * result.abar_best.norm() <= 1.0 + 1e-10);
}

TEST_CASE("radial modes reject invalid configurations") {
  const auto Z = SignedFeatureMatrix::from_matrix(oracles::random_matrix(3, 4, 5));
  TrainConfig cfg;
  cfg.mode = TrainMode::FixedDirections;
  cfg.loss = LossKind::Logistic;
  CHECK_THROWS_AS(train_fixed_directions(Z, cfg), std::invalid_argument);

  cfg.loss = LossKind::Exponential;
  cfg.step_rule = StepRule::PaperSchedule;
  cfg.init = InitScheme::zero();
  CHECK_THROWS_AS(train_fixed_directions(Z, cfg), std::invalid_argument);

  cfg.mode = TrainMode::OutputLayer;
  cfg.init = InitScheme::uniform_mass();
  CHECK_THROWS_AS(train_output_layer(Z, cfg), std::invalid_argument);

  // all-zero features have no paper step size
  auto Z0 = SignedFeatureMatrix::from_matrix(Eigen::MatrixXd::Zero(2, 2));
  cfg.mode = TrainMode::FixedDirections;
  cfg.init = InitScheme::uniform_mass();
  CHECK_THROWS_AS(train_fixed_directions(Z0, cfg), std::invalid_argument);
}

TEST_CASE("srelu two-layer training ascends and keeps the sign channel") {
  FeatureModel model{FeatureKind::SReLU, 2};
  const auto data = toy_separable_2d(12, 9);
  TrainConfig cfg;
  cfg.mode = TrainMode::TwoLayer;
  cfg.width = 16;
  cfg.steps = 1500;
  cfg.step_rule = StepRule::Constant;
  cfg.eta = 0.0;
  cfg.init = InitScheme::balanced_sphere();
  cfg.seed = 4;
  const auto start = init_params(cfg.init, model, cfg.width, cfg.seed);
  const auto result = train_two_layer(data, model, cfg);
  const auto& pts = result.trajectory.points;
  for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i].objective >= pts[i - 1].objective - 1e-12);
  // the sign channel is excluded from updates
  CHECK((result.cloud.weights.col(3) - start.weights.col(3)).norm() == 0.0);
  CHECK(result.trajectory.final_point().norm_margin > 0.0);

  // logistic loss is allowed in this mode
  cfg.loss = LossKind::Logistic;
  cfg.steps = 200;
  const auto logi = train_two_layer(data, model, cfg);
  CHECK(logi.trajectory.final_point().objective > logi.trajectory.points.front().objective);
}

TEST_CASE("trajectory csv has the pinned schema") {
  const auto Z = SignedFeatureMatrix::from_matrix(oracles::random_matrix(3, 4, 15));
  TrainConfig cfg;
  cfg.mode = TrainMode::FixedDirections;
  cfg.steps = 40;
  cfg.step_rule = StepRule::PaperSchedule;
  cfg.init = InitScheme::uniform_mass();
  cfg.record_every = 16;
  const auto result = train_fixed_directions(Z, cfg);
  std::stringstream ss;
  result.trajectory.write_csv(ss);
  std::string header;
  std::getline(ss, header);
  CHECK(header == "t,objective,raw_margin,beta,norm_margin,best_margin");
  long prev = -1;
  std::string line;
  int rows = 0;
  while (std::getline(ss, line)) {
    const long t = std::stol(line.substr(0, line.find(',')));
    CHECK(t > prev);
    prev = t;
    ++rows;
  }
  CHECK(rows == static_cast<int>(result.trajectory.points.size()));
  // powers of two and multiples of record_every are present
  CHECK(prev == 40);
}

TEST_SUITE_END();
