// Dense eigendecomposition oracle (Eigen) for the top-2 PCA projection,
// applying the same centering, variance ordering, and sign convention as
// the implementation under test.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace oracles {

inline std::vector<std::array<double, 2>> pca2_eigen(
    const std::vector<std::vector<double>>& pts) {
  const int n = static_cast<int>(pts.size());
  const int d = static_cast<int>(pts[0].size());
  Eigen::MatrixXd x(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) x(i, j) = pts[i][j];
  }
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean;
  const Eigen::MatrixXd cov =
      centered.transpose() * centered / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigensolver failed");
  }

  Eigen::VectorXd c1 = solver.eigenvectors().col(d - 1);  // ascending order
  Eigen::VectorXd c2 = solver.eigenvectors().col(d - 2);
  auto fix_sign = [](Eigen::VectorXd& v) {
    int arg = 0;
    for (int j = 1; j < v.size(); ++j) {
      if (std::abs(v(j)) > std::abs(v(arg))) arg = j;
    }
    if (v(arg) < 0) v = -v;
  };
  fix_sign(c1);
  fix_sign(c2);

  std::vector<std::array<double, 2>> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    out.push_back({centered.row(i).dot(c1), centered.row(i).dot(c2)});
  }
  return out;
}

}  // namespace oracles
