// SPDX-License-Identifier: Apache-2.0
/**
 * @file   split.hpp
 * @brief  Object-level stratified train/test splits, one per adjective.
 */
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hapnet::eval {

struct SplitPlan {
  std::string adjective;
  std::uint64_t seed = 0;
  std::vector<std::string> train; ///< in input object order
  std::vector<std::string> test;  ///< in input object order

  bool is_test(const std::string &object_id) const;
  bool operator==(const SplitPlan &) const = default;
};

/**
 * @brief Stratified draw at object granularity.
 *
 * The test side holds max(1, round((1 - ratio) N)) objects, raised to 2 when
 * needed so each side gets at least one positive and one negative object.
 * Positives and negatives are drawn separately in proportion to their counts.
 * Throws InfeasibleSplit naming @p adjective when either class has fewer
 * than two objects.
 */
SplitPlan make_split(std::span<const std::string> objects,
                     std::span<const bool> positive,
                     const std::string &adjective, std::uint64_t seed,
                     double ratio = 0.9);

} // namespace hapnet::eval
