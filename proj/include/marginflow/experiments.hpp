#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "marginflow/datagen.hpp"
#include "marginflow/trainer.hpp"

namespace marginflow {

// One training run on cluster-grid data, summarized. Shared between the
// command-line harness and the acceptance suite so both measure the same
// quantities the same way.
struct RunSummary {
  Trajectory trajectory;
  double final_margin = 0.0;   // normalized margin at the last step
  double best_margin = 0.0;
  double final_beta = 0.0;
  double test_error = -1.0;    // -1 when not measured
  double balance_drift = -1.0; // two-layer mode only
  double solver_value = 0.0;   // gamma_1^(m) / gamma_2^(m) of the design, radial modes
  bool failed = false;         // trainer overflow; message holds the reason
  std::string message;
};

struct ReplicateSetup {
  ClusterGridSpec spec;      // class assignment fixed, points resampled per replicate
  int n = 64;                // training points
  FeatureModel model;
  TrainConfig train;
  int test_n = 10000;        // 0 skips the test-error estimate
  std::uint64_t test_seed = 1;
  bool solve_design = false; // radial modes: also run the matching margin solver
};

// Two-layer run: trains h_m on a fresh sample, measures the final
// F1-margin, the total projected mass and the Monte Carlo test error.
RunSummary run_two_layer_replicate(const ReplicateSetup& setup, int replicate);

// Output-layer run: m fixed ReLU units with frames uniform on S^d, the
// self-normalized ascent of the paper schedule, test error of the final
// linear combination.
RunSummary run_output_layer_replicate(const ReplicateSetup& setup, int replicate);

// Fixed-direction run: m directions uniform on the model's sphere.
RunSummary run_fixed_directions_replicate(const ReplicateSetup& setup, int replicate);

// Runs `count` replicates (optionally on worker threads), collecting
// results in replicate order regardless of completion order.
std::vector<RunSummary> run_replicates(const std::function<RunSummary(int)>& one, int count, int jobs);

double median(std::vector<double> values);
double quantile(std::vector<double> values, double q);

// Long-format sweep row, the canonical figure output.
struct SweepRow {
  double sweep_value = 0.0;
  int replicate = 0;
  std::string metric;
  double value = 0.0;
};

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

}  // namespace marginflow
