#include "marginflow/signed_features.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace marginflow {

SignedFeatureMatrix SignedFeatureMatrix::from_matrix(Eigen::MatrixXd Z) {
  if (Z.rows() < 1 || Z.cols() < 1)
    throw std::invalid_argument("SignedFeatureMatrix: empty matrix");
  if (!Z.allFinite()) throw std::invalid_argument("SignedFeatureMatrix: non-finite entries");
  SignedFeatureMatrix out;
  out.inf_norm = Z.cwiseAbs().maxCoeff();
  out.Z = std::move(Z);
  return out;
}

SignedFeatureMatrix build_signed_features(const LabeledDataset& data, const FeatureModel& model,
                                          const Eigen::MatrixXd& thetas) {
  if (data.size() < 1) throw std::invalid_argument("build_signed_features: empty dataset");
  if (thetas.rows() < 1) throw std::invalid_argument("build_signed_features: no directions");
  if (thetas.cols() != model.param_dim())
    throw std::invalid_argument("build_signed_features: direction dimension mismatch");
  Eigen::MatrixXd Z(data.size(), thetas.rows());
  for (int i = 0; i < data.size(); ++i) {
    const Eigen::VectorXd x = data.X.row(i);
    for (int j = 0; j < thetas.rows(); ++j)
      Z(i, j) = data.y[i] * eval_feature(model, thetas.row(j), x);
  }
  return SignedFeatureMatrix::from_matrix(std::move(Z));
}

SignedFeatureMatrix build_signed_features_units(const LabeledDataset& data, const Eigen::MatrixXd& frames) {
  if (data.size() < 1) throw std::invalid_argument("build_signed_features_units: empty dataset");
  if (frames.rows() < 1) throw std::invalid_argument("build_signed_features_units: no units");
  if (frames.cols() != data.dim() + 1)
    throw std::invalid_argument("build_signed_features_units: units must live in R^{d+1}");
  Eigen::MatrixXd Xa(data.size(), data.dim() + 1);
  Xa.leftCols(data.dim()) = data.X;
  Xa.col(data.dim()).setOnes();
  Eigen::MatrixXd Z = (Xa * frames.transpose()).cwiseMax(0.0);
  Z.array().colwise() *= data.y.array();
  return SignedFeatureMatrix::from_matrix(std::move(Z));
}

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& Z) {
  os.precision(17);
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    for (Eigen::Index j = 0; j < Z.cols(); ++j) {
      if (j > 0) os << ",";
      os << Z(i, j);
    }
    os << "\n";
  }
}

Eigen::MatrixXd read_matrix_csv(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("read_matrix_csv: no rows");
  Eigen::MatrixXd Z(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) throw std::runtime_error("read_matrix_csv: ragged rows");
    for (std::size_t j = 0; j < rows[i].size(); ++j) Z(i, j) = rows[i][j];
  }
  return Z;
}

}  // namespace marginflow
