// SPDX-License-Identifier: Apache-2.0
/**
 * @file   features.hpp
 * @brief  Average-pool + L2 head over ingested image-network feature maps,
 *         and multi-view concatenation.
 */
#pragma once

#include <hapnet/nn/tensor.hpp>

#include <span>
#include <string>
#include <vector>

namespace hapnet::visual {

inline constexpr std::size_t kViews = 8;

/// One view's activations at the frozen trunk cut, [H, W, C].
struct VisualFeatureMap {
  std::string object_id;
  std::size_t view_index = 0;
  nn::Tensor grid;
};

struct VisualFeature {
  std::string object_id;
  std::vector<double> values; ///< C (one view) or 8 C (combined)
  bool degenerate = false;    ///< some view had an all-zero pooled vector
};

/// Spatial mean followed by L2 normalization.
VisualFeature pool_normalize(const VisualFeatureMap &featmap);

/**
 * Concatenates exactly one feature per view index 0..7 in index order.
 * @p features pairs each feature with its view index; arrival order is
 * irrelevant.
 */
VisualFeature combine_views(
    std::span<const std::pair<std::size_t, VisualFeature>> features);

} // namespace hapnet::visual
