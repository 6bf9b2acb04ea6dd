// SPDX-License-Identifier: Apache-2.0
/**
 * @file   pca.hpp
 * @brief  Principal components of the electrode impedance channels.
 */
#pragma once

#include <hapnet/nn/tensor.hpp>

#include <span>
#include <vector>

namespace hapnet::haptic {

struct PcaModel {
  std::vector<double> mean;            ///< D column means
  nn::Tensor components;               ///< [D, k], orthonormal columns
  std::vector<double> explained_ratio; ///< k values, non-increasing

  std::size_t dims() const { return mean.size(); }
  std::size_t rank() const { return explained_ratio.size(); }

  /// Coefficients of (x - mean) on the k components.
  std::vector<double> project(std::span<const double> x) const;
};

/**
 * Top-@p k eigenvectors of the column-centered covariance of @p samples
 * ([N, D]), ordered by descending eigenvalue. Each component's sign is fixed
 * so that its largest-magnitude entry is positive.
 */
PcaModel pca_fit(const nn::Tensor &samples, std::size_t k = 4);

} // namespace hapnet::haptic
