// SPDX-License-Identifier: Apache-2.0
/**
 * @file   signal.hpp
 * @brief  Per-series preprocessing: z-scoring, P_AC decimation and
 *         fixed-length index subsampling.
 */
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hapnet::haptic {

struct ZScored {
  std::vector<double> values;
  bool constant = false; ///< sigma was 0; values are all zero
};

/// (s - mean) / sigma with the population standard deviation.
ZScored zscore_normalize(std::span<const double> series);

/// Non-overlapping window means of @p factor samples; a trailing partial
/// window is dropped.
std::vector<double> decimate_pac(std::span<const double> series,
                                 std::size_t factor = 22);

/// Index of output sample @p j: offset + round(j (len-1-offset) / (L-1)).
std::size_t resample_index(std::size_t j, std::size_t len, std::size_t length,
                           std::size_t offset);

/// Uniform index subsampling to @p length samples starting at @p offset.
std::vector<double> resample_fixed(std::span<const double> series,
                                   std::size_t length = 150,
                                   std::size_t offset = 0);

} // namespace hapnet::haptic
