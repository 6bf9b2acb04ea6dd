// SPDX-License-Identifier: Apache-2.0
#include <hapnet/errors.hpp>
#include <hapnet/haptic/pca.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace hapnet::haptic {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::vector<double> PcaModel::project(std::span<const double> x) const {
  if (x.size() != dims())
    throw InvalidInput("pca_project: expected " + std::to_string(dims()) +
                       " values, got " + std::to_string(x.size()));
  const std::size_t k = rank();
  std::vector<double> out(k, 0.0);
  for (std::size_t d = 0; d < dims(); ++d) {
    const double centered = x[d] - mean[d];
    for (std::size_t j = 0; j < k; ++j)
      out[j] += components.at(d, j) * centered;
  }
  return out;
}

PcaModel pca_fit(const nn::Tensor &samples, std::size_t k) {
  if (samples.rank() != 2)
    throw InvalidInput("pca_fit: samples must be an [N, D] matrix");
  const std::size_t N = samples.dim(0), D = samples.dim(1);
  if (k == 0 || k > D)
    throw InvalidInput("pca_fit: cannot keep " + std::to_string(k) +
                       " components of " + std::to_string(D) + " dimensions");
  if (N < k || N < 2)
    throw InvalidInput("pca_fit: " + std::to_string(N) +
                       " samples is too few for " + std::to_string(k) +
                       " components");

  Eigen::Map<const RowMatrix> X(samples.values().data(),
                                static_cast<Eigen::Index>(N),
                                static_cast<Eigen::Index>(D));
  const Eigen::RowVectorXd mean = X.colwise().mean();
  const RowMatrix centered = X.rowwise() - mean;
  const Eigen::MatrixXd cov =
      (centered.transpose() * centered) / static_cast<double>(N - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success)
    throw InvalidInput("pca_fit: eigendecomposition did not converge");
  // Eigen sorts ascending.
  const Eigen::VectorXd values = eig.eigenvalues();
  const Eigen::MatrixXd vectors = eig.eigenvectors();
  double total = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i)
    total += std::max(values[i], 0.0);

  PcaModel model;
  model.mean.assign(mean.data(), mean.data() + D);
  model.components = nn::Tensor({D, k});
  model.explained_ratio.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    const Eigen::Index src = static_cast<Eigen::Index>(D - 1 - j);
    Eigen::VectorXd v = vectors.col(src);
    Eigen::Index argmax = 0;
    v.cwiseAbs().maxCoeff(&argmax);
    if (v[argmax] < 0.0)
      v = -v;
    for (std::size_t d = 0; d < D; ++d)
      model.components.at(d, j) = v[static_cast<Eigen::Index>(d)];
    model.explained_ratio[j] =
        total > 0.0 ? std::max(values[src], 0.0) / total : 0.0;
  }
  return model;
}

} // namespace hapnet::haptic
