// Experiment harness: exposes the library as `train`, `figure` and `solve`
// subcommands with key = value config files, CSV/JSON outputs and native
// SVG plots. Exit codes: 0 success, 2 configuration error, 3 numerical
// failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "marginflow/bounds.hpp"
#include "marginflow/experiments.hpp"
#include "marginflow/margins.hpp"
#include "marginflow/rng.hpp"
#include "marginflow/svg_plot.hpp"
#include "marginflow/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace marginflow;

namespace {

struct CommonOptions {
  int k = 3;
  int d = 2;
  int n = 64;
  std::uint64_t data_seed = 1;
  std::string data_file;

  std::string model = "relu";
  int m = 100;

  std::string mode = "two-layer";
  long steps = 3000;
  std::string step_rule = "constant";
  double eta = 0.0;
  std::string init = "";
  double sigma = 1.0;
  std::uint64_t seed = 1;
  long record_every = 1000;

  int replicates = 1;
  int jobs = 1;
  int test_n = 10000;
  std::string out_dir = "out";
  bool solve_design = false;
};

FeatureModel parse_model(const CommonOptions& opt) {
  FeatureModel model;
  model.input_dim = opt.d;
  if (opt.model == "relu") {
    model.kind = FeatureKind::ReLU;
  } else if (opt.model == "srelu") {
    model.kind = FeatureKind::SReLU;
  } else {
    throw CLI::ValidationError("--model must be relu or srelu");
  }
  return model;
}

TrainMode parse_mode(const std::string& mode) {
  if (mode == "two-layer") return TrainMode::TwoLayer;
  if (mode == "fixed-directions") return TrainMode::FixedDirections;
  if (mode == "output-layer") return TrainMode::OutputLayer;
  throw CLI::ValidationError("--mode must be two-layer, fixed-directions or output-layer");
}

TrainConfig parse_train_config(const CommonOptions& opt) {
  TrainConfig cfg;
  cfg.mode = parse_mode(opt.mode);
  cfg.width = opt.m;
  cfg.steps = opt.steps;
  cfg.eta = opt.eta;
  cfg.seed = opt.seed;
  cfg.record_every = opt.record_every;
  if (opt.step_rule == "paper") {
    cfg.step_rule = StepRule::PaperSchedule;
  } else if (opt.step_rule == "constant") {
    cfg.step_rule = StepRule::Constant;
  } else {
    throw CLI::ValidationError("--step-rule must be paper or constant");
  }
  std::string init = opt.init;
  if (init.empty()) {
    switch (cfg.mode) {
      case TrainMode::TwoLayer: init = "balanced-sphere"; break;
      case TrainMode::FixedDirections: init = "uniform-mass"; break;
      case TrainMode::OutputLayer: init = "zero"; break;
    }
  }
  if (init == "balanced-sphere") {
    cfg.init = InitScheme::balanced_sphere();
  } else if (init == "gaussian") {
    cfg.init = InitScheme::gaussian(opt.sigma);
  } else if (init == "uniform-mass") {
    cfg.init = InitScheme::uniform_mass(opt.sigma > 0.0 ? opt.sigma : 1.0);
  } else if (init == "zero") {
    cfg.init = InitScheme::zero();
  } else {
    throw CLI::ValidationError("--init must be balanced-sphere, gaussian, uniform-mass or zero");
  }
  // constant-step radial modes need an explicit positive step
  if (cfg.step_rule == StepRule::Constant && cfg.mode != TrainMode::TwoLayer && cfg.eta <= 0.0)
    cfg.step_rule = StepRule::PaperSchedule;
  return cfg;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << contents;
}

void add_common_options(CLI::App* cmd, CommonOptions& opt, bool trainer_opts) {
  cmd->option_defaults()->always_capture_default();
  cmd->add_option("--k", opt.k, "cluster grid side");
  cmd->add_option("--d", opt.d, "ambient dimension");
  cmd->add_option("--n", opt.n, "training sample size");
  cmd->add_option("--data-seed", opt.data_seed, "cluster grid seed");
  cmd->add_option("--data", opt.data_file, "CSV dataset (x1..xd,y) instead of generated data");
  cmd->add_option("--model", opt.model, "feature model: relu or srelu");
  cmd->add_option("--m", opt.m, "width / number of directions");
  if (trainer_opts) {
    cmd->add_option("--mode", opt.mode, "two-layer, fixed-directions or output-layer");
    cmd->add_option("--steps", opt.steps, "training steps");
    cmd->add_option("--step-rule", opt.step_rule, "paper or constant");
    cmd->add_option("--eta", opt.eta, "constant step size (0 = data-scaled default)");
    cmd->add_option("--init", opt.init, "balanced-sphere, gaussian, uniform-mass or zero");
    cmd->add_option("--sigma", opt.sigma, "init scale");
    cmd->add_option("--seed", opt.seed, "training seed");
    cmd->add_option("--record-every", opt.record_every, "trajectory cadence");
    cmd->add_option("--replicates", opt.replicates, "independent runs");
    cmd->add_option("--jobs", opt.jobs, "concurrent replicates");
    cmd->add_option("--test-n", opt.test_n, "test-error sample size (0 = skip)");
    cmd->add_flag("--solve-design", opt.solve_design, "also solve the fixed-design margin problem");
  }
  cmd->add_option("--out", opt.out_dir, "output directory");
}

json summary_entry(const RunSummary& s) {
  json j;
  j["failed"] = s.failed;
  if (s.failed) {
    j["message"] = s.message;
    return j;
  }
  j["final_margin"] = s.final_margin;
  j["best_margin"] = s.best_margin;
  j["beta"] = s.final_beta;
  j["margin_positive"] = s.trajectory.margin_positive;
  if (s.test_error >= 0.0) j["test_error"] = s.test_error;
  if (s.balance_drift >= 0.0) j["balance_drift"] = s.balance_drift;
  if (s.solver_value != 0.0) j["solver_value"] = s.solver_value;
  return j;
}

int cmd_train(const CommonOptions& opt, const std::string& resolved) {
  const FeatureModel model = parse_model(opt);
  const TrainConfig cfg = parse_train_config(opt);
  fs::create_directories(opt.out_dir);
  write_file(fs::path(opt.out_dir) / "config.resolved", resolved);

  ReplicateSetup setup;
  setup.n = opt.n;
  setup.model = model;
  setup.train = cfg;
  setup.test_n = opt.test_n;
  setup.solve_design = opt.solve_design;

  std::function<RunSummary(int)> one;
  if (!opt.data_file.empty()) {
    std::ifstream is(opt.data_file);
    if (!is) throw CLI::ValidationError("cannot read --data file " + opt.data_file);
    const LabeledDataset data = read_dataset_csv(is);
    if (cfg.mode != TrainMode::TwoLayer)
      throw CLI::ValidationError("file datasets currently train in two-layer mode only");
    one = [data, model, cfg](int replicate) {
      RunSummary out;
      TrainConfig local = cfg;
      local.seed = cfg.seed + static_cast<std::uint64_t>(replicate);
      try {
        const TwoLayerResult result = train_two_layer(data, model, local);
        out.trajectory = result.trajectory;
        out.final_margin = result.trajectory.final_point().norm_margin;
        out.best_margin = result.trajectory.final_point().best_margin;
        out.final_beta = result.trajectory.final_point().beta;
        out.balance_drift = result.balance_drift;
      } catch (const std::runtime_error& err) {
        out.failed = true;
        out.message = err.what();
      }
      return out;
    };
  } else {
    setup.spec = make_cluster_grid(opt.k, opt.d, opt.data_seed);
    switch (cfg.mode) {
      case TrainMode::TwoLayer:
        one = [setup](int r) { return run_two_layer_replicate(setup, r); };
        break;
      case TrainMode::FixedDirections:
        one = [setup](int r) { return run_fixed_directions_replicate(setup, r); };
        break;
      case TrainMode::OutputLayer:
        one = [setup](int r) { return run_output_layer_replicate(setup, r); };
        break;
    }
  }

  const std::vector<RunSummary> results = run_replicates(one, opt.replicates, opt.jobs);

  json summary;
  summary["replicates"] = json::array();
  std::vector<double> margins, errors;
  for (int r = 0; r < opt.replicates; ++r) {
    const RunSummary& s = results[r];
    summary["replicates"].push_back(summary_entry(s));
    if (!s.failed) {
      const fs::path dir = fs::path(opt.out_dir) / ("replicate_" + std::to_string(r));
      fs::create_directories(dir);
      std::ofstream os(dir / "trajectory.csv");
      s.trajectory.write_csv(os);
      margins.push_back(s.final_margin);
      if (s.test_error >= 0.0) errors.push_back(s.test_error);
    }
  }
  if (!margins.empty()) summary["median_final_margin"] = median(margins);
  if (!errors.empty()) summary["median_test_error"] = median(errors);
  write_file(fs::path(opt.out_dir) / "summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << std::endl;
  for (const auto& s : results)
    if (s.failed) std::cerr << "replicate failed: " << s.message << "\n";
  return 0;
}

// figure helpers ----------------------------------------------------------

std::vector<SweepRow> read_sweep_csv(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  std::getline(is, line);  // header
  std::vector<SweepRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    SweepRow row;
    std::getline(ss, cell, ',');
    row.sweep_value = std::stod(cell);
    std::getline(ss, cell, ',');
    row.replicate = std::stoi(cell);
    std::getline(ss, row.metric, ',');
    std::getline(ss, cell, ',');
    row.value = std::stod(cell);
    rows.push_back(std::move(row));
  }
  return rows;
}

// one series per metric: median with interquartile band over replicates
std::string render_sweep_svg(const std::vector<SweepRow>& rows, const std::string& title,
                             const std::string& x_label, bool log_x) {
  const std::vector<std::string> palette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::map<std::string, std::map<double, std::vector<double>>> by_metric;
  for (const auto& row : rows) by_metric[row.metric][row.sweep_value].push_back(row.value);

  SvgChart chart;
  chart.title = title;
  chart.x_label = x_label;
  chart.y_label = "value";
  chart.log_x = log_x;
  int color = 0;
  for (const auto& [metric, points] : by_metric) {
    SvgSeries series;
    series.label = metric;
    series.color = palette[color++ % palette.size()];
    for (const auto& [x, values] : points) {
      series.x.push_back(x);
      series.y.push_back(median(values));
      series.band_lo.push_back(quantile(values, 0.25));
      series.band_hi.push_back(quantile(values, 0.75));
    }
    chart.series.push_back(std::move(series));
  }
  return render_svg(chart);
}

int cmd_figure(const std::string& which, bool replot, const std::vector<int>& sweep_override,
               const CommonOptions& opt, const std::string& resolved) {
  std::string x_label = which;
  bool log_x = which == "margin-vs-m" || which == "test-vs-n" || which == "lazy";
  if (which == "margin-vs-m") x_label = "m";
  if (which == "test-vs-n") x_label = "n";
  if (which == "test-vs-d") x_label = "d";
  if (which == "lazy") x_label = "t";

  if (replot) {
    // pure presentation: rebuild the SVG from the CSV already on disk
    const auto parsed = read_sweep_csv(fs::path(opt.out_dir) / "sweep.csv");
    write_file(fs::path(opt.out_dir) / "figure.svg", render_sweep_svg(parsed, which, x_label, log_x));
    return 0;
  }

  fs::create_directories(opt.out_dir);
  write_file(fs::path(opt.out_dir) / "config.resolved", resolved);

  std::vector<SweepRow> rows;

  if (which == "margin-vs-m") {
    // final variation-norm margin of two-layer training as width grows
    const auto spec = make_cluster_grid(opt.k, opt.d, opt.data_seed);
    const std::vector<int> sweep = sweep_override.empty() ? std::vector<int>{50, 200, 800} : sweep_override;
    for (int m : sweep) {
      ReplicateSetup setup;
      setup.spec = spec;
      setup.n = opt.n;
      setup.model = parse_model(opt);
      setup.train = parse_train_config(opt);
      setup.train.mode = TrainMode::TwoLayer;
      setup.train.width = m;
      setup.test_n = 0;
      const auto results = run_replicates(
          [&](int r) { return run_two_layer_replicate(setup, r); }, opt.replicates, opt.jobs);
      for (int r = 0; r < opt.replicates; ++r) {
        if (results[r].failed) continue;
        rows.push_back({static_cast<double>(m), r, "f1_margin", results[r].final_margin});
      }
    }
  } else if (which == "test-vs-n" || which == "test-vs-d") {
    const bool vs_n = which == "test-vs-n";
    std::vector<int> sweep = vs_n ? std::vector<int>{32, 64, 128, 256} : std::vector<int>{5, 10, 15};
    if (!sweep_override.empty()) sweep = sweep_override;
    for (int v : sweep) {
      CommonOptions local = opt;
      if (vs_n) {
        local.n = v;
      } else {
        local.d = v;
      }
      const auto spec = make_cluster_grid(local.k, local.d, local.data_seed);
      ReplicateSetup setup;
      setup.spec = spec;
      setup.n = local.n;
      setup.model = parse_model(local);
      setup.train = parse_train_config(local);
      setup.test_n = local.test_n;

      ReplicateSetup both = setup;
      both.train.mode = TrainMode::TwoLayer;
      const auto res_two = run_replicates(
          [&](int r) { return run_two_layer_replicate(both, r); }, opt.replicates, opt.jobs);

      ReplicateSetup out_layer = setup;
      out_layer.train.mode = TrainMode::OutputLayer;
      out_layer.train.step_rule = StepRule::PaperSchedule;
      out_layer.train.init = InitScheme::zero();
      out_layer.train.steps = std::max<long>(setup.train.steps, 20000);
      const auto res_out = run_replicates(
          [&](int r) { return run_output_layer_replicate(out_layer, r); }, opt.replicates, opt.jobs);

      for (int r = 0; r < opt.replicates; ++r) {
        if (!res_two[r].failed)
          rows.push_back({static_cast<double>(v), r, "test_error_two_layer", res_two[r].test_error});
        if (!res_out[r].failed)
          rows.push_back({static_cast<double>(v), r, "test_error_output_layer", res_out[r].test_error});
      }
    }
  } else if (which == "lazy") {
    // large-variance initialization: the projected mass is flat while the
    // dynamics stays in its linearized regime, then grows
    CommonOptions local = opt;
    local.d = 2;
    const auto spec = make_cluster_grid(local.k, local.d, local.data_seed);
    ReplicateSetup setup;
    setup.spec = spec;
    setup.n = local.n;
    setup.model = parse_model(local);
    setup.train = parse_train_config(local);
    setup.train.mode = TrainMode::TwoLayer;
    const double scale = local.sigma > 1.0 ? local.sigma : 40.0;
    setup.train.init = InitScheme::gaussian(scale);
    if (setup.train.eta <= 0.0) setup.train.eta = 1.0 / scale;  // step ~ 1/init scale
    setup.train.record_every = std::max<long>(1, setup.train.steps / 50);
    setup.test_n = 0;
    const auto results = run_replicates(
        [&](int r) { return run_two_layer_replicate(setup, r); }, opt.replicates, opt.jobs);
    for (int r = 0; r < opt.replicates; ++r) {
      if (results[r].failed) continue;
      for (const auto& pt : results[r].trajectory.points) {
        if (pt.t == 0) continue;
        rows.push_back({static_cast<double>(pt.t), r, "mass", pt.beta});
        rows.push_back({static_cast<double>(pt.t), r, "norm_margin", pt.norm_margin});
      }
    }
  } else {
    throw CLI::ValidationError("--which must be test-vs-n, test-vs-d, margin-vs-m or lazy");
  }

  {
    std::ofstream os(fs::path(opt.out_dir) / "sweep.csv");
    write_sweep_csv(os, rows);
  }
  // the plot is rendered from the CSV so that regenerating it from the
  // file yields identical markup
  const auto parsed = read_sweep_csv(fs::path(opt.out_dir) / "sweep.csv");
  write_file(fs::path(opt.out_dir) / "figure.svg",
             render_sweep_svg(parsed, which, x_label, log_x));
  std::cout << "wrote " << rows.size() << " rows to " << opt.out_dir << "/sweep.csv" << std::endl;
  return 0;
}

// solve helpers -----------------------------------------------------------

SignedFeatureMatrix load_z(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw CLI::ValidationError("cannot read --z file " + path);
  return SignedFeatureMatrix::from_matrix(read_matrix_csv(is));
}

LabeledDataset load_or_generate(const CommonOptions& opt) {
  if (!opt.data_file.empty()) {
    std::ifstream is(opt.data_file);
    if (!is) throw CLI::ValidationError("cannot read --data file " + opt.data_file);
    return read_dataset_csv(is);
  }
  return sample_cluster_grid(make_cluster_grid(opt.k, opt.d, opt.data_seed), opt.n);
}

void emit(const json& j, const std::string& out_file) {
  if (!out_file.empty()) {
    fs::path path(out_file);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    write_file(path, j.dump(2) + "\n");
  }
  std::cout << j.dump(2) << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"max-margin training dynamics for two-layer homogeneous networks"};
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "key = value configuration file ('#' comments)");
  app.require_subcommand(1);

  CommonOptions train_opt;
  CLI::App* train = app.add_subcommand("train", "run training replicates");
  add_common_options(train, train_opt, true);

  CommonOptions figure_opt;
  figure_opt.d = 5;
  figure_opt.m = 400;
  figure_opt.n = 64;
  figure_opt.replicates = 10;
  std::string which;
  std::vector<int> sweep;
  CLI::App* figure = app.add_subcommand("figure", "replicated sweeps with CSV + SVG output");
  figure->option_defaults()->always_capture_default();
  figure->add_option("--which", which, "test-vs-n, test-vs-d, margin-vs-m or lazy")->required();
  figure->add_option("--sweep", sweep, "override the swept values (m, n or d)")->delimiter(',');
  bool replot = false;
  figure->add_flag("--replot", replot, "rebuild figure.svg from the sweep.csv already in --out");
  add_common_options(figure, figure_opt, true);

  CLI::App* solve = app.add_subcommand("solve", "margin solvers and bound evaluators");
  CommonOptions solve_opt;
  std::string z_file, out_file;
  int rank = 0;
  std::string strategy = "exact";
  int trials = 200;
  std::uint64_t search_seed = 1;
  int grid_m = 1000;
  std::uint64_t dir_seed = 1;
  double bound_gamma = 0.0, bound_c = 0.0, bound_delta = 0.05, bound_rad = -1.0;
  long bound_n = 0;

  CLI::App* s_g1 = solve->add_subcommand("gamma1", "simplex max margin of a design matrix");
  s_g1->option_defaults()->always_capture_default();
  s_g1->add_option("--z", z_file, "CSV matrix of signed features")->required();
  s_g1->add_option("--out", out_file, "write the certificate JSON here");

  CLI::App* s_g2 = solve->add_subcommand("gamma2", "scaled-ball max margin of a design matrix");
  s_g2->option_defaults()->always_capture_default();
  s_g2->add_option("--z", z_file, "CSV matrix of signed features")->required();
  s_g2->add_option("--out", out_file, "write the certificate JSON here");

  CLI::App* s_ref = solve->add_subcommand("gamma1-ref", "direction-grid lower bound of the variation-norm margin");
  s_ref->option_defaults()->always_capture_default();
  add_common_options(s_ref, solve_opt, false);
  s_ref->add_option("--grid-m", grid_m, "number of sampled directions");
  s_ref->add_option("--dir-seed", dir_seed, "direction sequence seed");
  s_ref->add_option("--out-file", out_file, "write the JSON here");

  CLI::App* s_delta = solve->add_subcommand("delta", "projected interclass distance");
  s_delta->option_defaults()->always_capture_default();
  add_common_options(s_delta, solve_opt, false);
  s_delta->add_option("--r", rank, "projection rank")->required();
  s_delta->add_option("--strategy", strategy, "exact, plane (first r coordinates) or random");
  s_delta->add_option("--trials", trials, "random-search trials");
  s_delta->add_option("--search-seed", search_seed, "random-search seed");
  s_delta->add_option("--out-file", out_file, "write the JSON here");

  CLI::App* s_bound = solve->add_subcommand("bound", "margin-based generalization bound");
  s_bound->option_defaults()->always_capture_default();
  s_bound->add_option("--gamma", bound_gamma, "margin")->required();
  s_bound->add_option("--n", bound_n, "sample size")->required();
  s_bound->add_option("--C", bound_c, "sup-norm bound")->required();
  s_bound->add_option("--delta", bound_delta, "confidence level");
  s_bound->add_option("--rad", bound_rad, "Rademacher complexity (default 1/sqrt(n))");
  s_bound->add_option("--out", out_file, "write the JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (train->parsed()) return cmd_train(train_opt, app.config_to_str(true, true));
    if (figure->parsed()) return cmd_figure(which, replot, sweep, figure_opt, app.config_to_str(true, true));
    if (solve->parsed()) {
      if (s_g1->parsed()) {
        const auto cert = gamma1_lp(load_z(z_file));
        emit(json::parse(certificate_to_json(cert)), out_file);
        return 0;
      }
      if (s_g2->parsed()) {
        const auto cert = gamma2_dual(load_z(z_file));
        emit(json::parse(certificate_to_json(cert)), out_file);
        return 0;
      }
      if (s_ref->parsed()) {
        const LabeledDataset data = load_or_generate(solve_opt);
        FeatureModel model = parse_model(solve_opt);
        model.input_dim = data.dim();
        const double value = gamma1_reference(data, model, grid_m, dir_seed);
        json j;
        j["gamma1_reference"] = value;
        j["grid_m"] = grid_m;
        j["directions"] = 2 * grid_m;
        emit(j, out_file);
        return 0;
      }
      if (s_delta->parsed()) {
        const LabeledDataset data = load_or_generate(solve_opt);
        ProjectionStrategy ps = ProjectionStrategy::exact_full();
        if (strategy == "plane") {
          Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(data.dim(), rank);
          for (int i = 0; i < rank; ++i) basis(i, i) = 1.0;
          ps = ProjectionStrategy::known_plane(std::move(basis));
        } else if (strategy == "random") {
          ps = ProjectionStrategy::random_search(trials, search_seed);
        } else if (strategy != "exact") {
          throw CLI::ValidationError("--strategy must be exact, plane or random");
        }
        const auto res = interclass_distance(data, rank, ps);
        json j;
        j["delta"] = res.value;
        j["rank"] = rank;
        j["exact"] = res.exact;
        emit(j, out_file);
        return 0;
      }
      if (s_bound->parsed()) {
        BoundInputs in;
        in.gamma = bound_gamma;
        in.C = bound_c;
        in.n = bound_n;
        in.delta = bound_delta;
        in.rad = bound_rad;
        const auto out = margin_bound(in);
        json j;
        j["bound"] = out.clamped;
        j["raw"] = out.raw;
        j["terms"] = {{"complexity", out.term_complexity},
                      {"levels", out.term_levels},
                      {"confidence", out.term_confidence}};
        emit(j, out_file);
        return 0;
      }
      std::cerr << "solve requires a subcommand (gamma1, gamma2, gamma1-ref, delta, bound)\n";
      return 2;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const MarginSolveError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    std::cerr << certificate_to_json(e.certificate) << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
