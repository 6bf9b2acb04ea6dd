// SPDX-License-Identifier: Apache-2.0
#include <hapnet/errors.hpp>
#include <hapnet/eval/labels.hpp>

namespace hapnet::eval {

const std::array<std::string_view, kAdjectives> &adjective_names() {
  static const std::array<std::string_view, kAdjectives> names = {
      "absorbent", "bumpy",    "compressible", "cool",     "crinkly",
      "fuzzy",     "hairy",    "hard",         "metallic", "nice",
      "porous",    "rough",    "scratchy",     "slippery", "smooth",
      "soft",      "solid",    "springy",      "squishy",  "sticky",
      "textured",  "thick",    "thin",         "unpleasant"};
  return names;
}

std::optional<std::size_t> adjective_index(std::string_view name) {
  const auto &names = adjective_names();
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name)
      return i;
  return std::nullopt;
}

std::size_t require_adjective(std::string_view name) {
  if (auto i = adjective_index(name))
    return *i;
  throw InvalidInput("unknown adjective '" + std::string(name) + "'");
}

std::vector<int> signed_labels(std::span<const AdjectiveLabelSet> table,
                               std::size_t adjective) {
  if (adjective >= kAdjectives)
    throw InvalidInput("adjective index " + std::to_string(adjective) +
                       " out of range");
  std::vector<int> out;
  out.reserve(table.size());
  for (const auto &row : table)
    out.push_back(row.labels[adjective] ? 1 : -1);
  return out;
}

} // namespace hapnet::eval
