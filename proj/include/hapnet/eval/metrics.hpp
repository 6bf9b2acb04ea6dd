// SPDX-License-Identifier: Apache-2.0
/**
 * @file   metrics.hpp
 * @brief  ROC-AUC and leakage-checked scoring of a split's test side.
 */
#pragma once

#include <hapnet/eval/split.hpp>

#include <map>
#include <span>
#include <string>
#include <vector>

namespace hapnet::eval {

/**
 * @brief Mann-Whitney AUC: the fraction of (positive, negative) pairs with
 *        the positive scored higher, ties counting one half.
 *
 * Computed from midranks in O(n log n) with an integer numerator, so the
 * result is the exactly rounded quotient. Labels are +1 / -1. Throws
 * UndefinedAuc when either class is absent.
 */
double roc_auc(std::span<const double> scores, std::span<const int> labels);

struct ScoredItem {
  std::string object_id;
  double score = 0.0;
};

/**
 * @brief AUC over test-side items of @p split.
 *
 * Throws LeakageDetected if the split's sides overlap, if any object in
 * @p trained_objects is on the test side, or if a scored item belongs to a
 * training object. Every test object must have at least one item.
 */
double evaluate(std::span<const ScoredItem> items, const SplitPlan &split,
                const std::map<std::string, int> &labels,
                std::span<const std::string> trained_objects);

} // namespace hapnet::eval
