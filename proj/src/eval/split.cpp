// SPDX-License-Identifier: Apache-2.0
#include <hapnet/errors.hpp>
#include <hapnet/eval/split.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace hapnet::eval {

bool SplitPlan::is_test(const std::string &object_id) const {
  return std::find(test.begin(), test.end(), object_id) != test.end();
}

namespace {

std::uint64_t split_seed(std::uint64_t seed, const std::string &adjective) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : adjective) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h ^ (seed * 0x9e3779b97f4a7c15ULL);
}

} // namespace

SplitPlan make_split(std::span<const std::string> objects,
                     std::span<const bool> positive,
                     const std::string &adjective, std::uint64_t seed,
                     double ratio) {
  if (objects.size() != positive.size())
    throw InvalidInput("make_split: " + std::to_string(objects.size()) +
                       " objects but " + std::to_string(positive.size()) +
                       " labels");
  if (!(ratio > 0.0 && ratio < 1.0))
    throw InvalidSpec("make_split: ratio must lie in (0, 1)");
  if (std::set<std::string>(objects.begin(), objects.end()).size() !=
      objects.size())
    throw InvalidInput("make_split: duplicate object ids");

  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < objects.size(); ++i)
    (positive[i] ? pos : neg).push_back(i);
  if (pos.size() < 2 || neg.size() < 2)
    throw InfeasibleSplit("adjective '" + adjective + "' has " +
                          std::to_string(pos.size()) + " positive and " +
                          std::to_string(neg.size()) +
                          " negative objects; need at least 2 of each");

  const double n = static_cast<double>(objects.size());
  std::size_t n_test = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::llround((1.0 - ratio) * n)));
  std::size_t test_pos = static_cast<std::size_t>(std::llround(
      static_cast<double>(n_test) * static_cast<double>(pos.size()) / n));
  test_pos = std::clamp<std::size_t>(test_pos, 1, pos.size() - 1);
  std::size_t test_neg =
      std::clamp<std::size_t>(n_test - std::min(n_test, test_pos), 1,
                              neg.size() - 1);

  std::mt19937_64 rng(split_seed(seed, adjective));
  std::shuffle(pos.begin(), pos.end(), rng);
  std::shuffle(neg.begin(), neg.end(), rng);
  std::vector<bool> in_test(objects.size(), false);
  for (std::size_t i = 0; i < test_pos; ++i)
    in_test[pos[i]] = true;
  for (std::size_t i = 0; i < test_neg; ++i)
    in_test[neg[i]] = true;

  SplitPlan plan;
  plan.adjective = adjective;
  plan.seed = seed;
  for (std::size_t i = 0; i < objects.size(); ++i)
    (in_test[i] ? plan.test : plan.train).push_back(objects[i]);
  return plan;
}

} // namespace hapnet::eval
