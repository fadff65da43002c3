#pragma once

#include <iosfwd>

#include <Eigen/Core>

#include "marginflow/datagen.hpp"
#include "marginflow/features.hpp"

namespace marginflow {

// Fixed design of signed features, z_{i,j} = y_i * (feature j at x_i).
struct SignedFeatureMatrix {
  Eigen::MatrixXd Z;      // n x m
  double inf_norm = 0.0;  // max |z_{i,j}|

  int n() const { return static_cast<int>(Z.rows()); }
  int m() const { return static_cast<int>(Z.cols()); }

  static SignedFeatureMatrix from_matrix(Eigen::MatrixXd Z);
};

// z_{i,j} = y_i phi(theta_j, x_i) for a 2-homogeneous model; directions are
// the rows of `thetas` (m x p). Throws on empty data.
SignedFeatureMatrix build_signed_features(const LabeledDataset& data, const FeatureModel& model,
                                          const Eigen::MatrixXd& thetas);

// z_{i,j} = y_i (theta_j . (x_i, 1))_+ for fixed first-layer units
// theta_j in R^{d+1} (rows of `frames`); the design of output-layer
// training with ReLU activation.
SignedFeatureMatrix build_signed_features_units(const LabeledDataset& data, const Eigen::MatrixXd& frames);

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& Z);
Eigen::MatrixXd read_matrix_csv(std::istream& is);

}  // namespace marginflow
