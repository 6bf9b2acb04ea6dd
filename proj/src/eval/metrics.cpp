// SPDX-License-Identifier: Apache-2.0
#include <hapnet/errors.hpp>
#include <hapnet/eval/metrics.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>

namespace hapnet::eval {

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size())
    throw InvalidInput("roc_auc: " + std::to_string(scores.size()) +
                       " scores but " + std::to_string(labels.size()) +
                       " labels");
  std::uint64_t n_pos = 0, n_neg = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (std::isnan(scores[i]))
      throw InvalidInput("roc_auc: NaN score at index " + std::to_string(i));
    if (labels[i] == 1)
      ++n_pos;
    else if (labels[i] == -1)
      ++n_neg;
    else
      throw InvalidInput("roc_auc: labels must be -1 or +1");
  }
  if (n_pos == 0 || n_neg == 0)
    throw UndefinedAuc("roc_auc: need both classes, got " +
                       std::to_string(n_pos) + " positive and " +
                       std::to_string(n_neg) + " negative");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });
  // Twice the rank sum of the positives; tied runs share rank lo + hi.
  std::uint64_t twice_rank_sum = 0;
  for (std::size_t lo = 0; lo < order.size();) {
    std::size_t hi = lo;
    while (hi + 1 < order.size() && scores[order[hi + 1]] == scores[order[lo]])
      ++hi;
    std::uint64_t pos_in_run = 0;
    for (std::size_t k = lo; k <= hi; ++k)
      pos_in_run += labels[order[k]] == 1;
    twice_rank_sum += pos_in_run * (lo + 1 + hi + 1);
    lo = hi + 1;
  }
  // 2U = 2 R - P (P + 1); AUC = 2U / (2 P N)
  const std::uint64_t twice_u = twice_rank_sum - n_pos * (n_pos + 1);
  return static_cast<double>(twice_u) / static_cast<double>(2 * n_pos * n_neg);
}

double evaluate(std::span<const ScoredItem> items, const SplitPlan &split,
                const std::map<std::string, int> &labels,
                std::span<const std::string> trained_objects) {
  const std::set<std::string> test(split.test.begin(), split.test.end());
  for (const auto &id : split.train)
    if (test.count(id))
      throw LeakageDetected("object '" + id +
                            "' is on both sides of the split for '" +
                            split.adjective + "'");
  for (const auto &id : trained_objects)
    if (test.count(id))
      throw LeakageDetected("test object '" + id +
                            "' was used to train the model");

  std::vector<double> scores;
  std::vector<int> ys;
  std::set<std::string> seen;
  for (const auto &item : items) {
    if (!test.count(item.object_id)) {
      if (std::find(split.train.begin(), split.train.end(), item.object_id) !=
          split.train.end())
        throw LeakageDetected("scored item of training object '" +
                              item.object_id + "'");
      throw InvalidInput("scored object '" + item.object_id +
                         "' is not part of the split");
    }
    auto it = labels.find(item.object_id);
    if (it == labels.end())
      throw InvalidInput("no label for object '" + item.object_id + "'");
    scores.push_back(item.score);
    ys.push_back(it->second);
    seen.insert(item.object_id);
  }
  for (const auto &id : split.test)
    if (!seen.count(id))
      throw InvalidInput("no scores for test object '" + id + "'");
  return roc_auc(scores, ys);
}

} // namespace hapnet::eval
