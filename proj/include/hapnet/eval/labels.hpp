// SPDX-License-Identifier: Apache-2.0
/**
 * @file   labels.hpp
 * @brief  The 24 haptic adjectives and per-object binary label rows.
 *
 * Adjective order is fixed and alphabetical:
 * absorbent, bumpy, compressible, cool, crinkly, fuzzy, hairy, hard,
 * metallic, nice, porous, rough, scratchy, slippery, smooth, soft, solid,
 * springy, squishy, sticky, textured, thick, thin, unpleasant.
 */
#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hapnet::eval {

inline constexpr std::size_t kAdjectives = 24;

const std::array<std::string_view, kAdjectives> &adjective_names();
/// Index in the fixed order, or nullopt for unknown names.
std::optional<std::size_t> adjective_index(std::string_view name);
/// Like adjective_index but throws InvalidInput for unknown names.
std::size_t require_adjective(std::string_view name);

struct AdjectiveLabelSet {
  std::string object_id;
  std::array<bool, kAdjectives> labels{};

  bool has(std::string_view adjective) const {
    return labels[require_adjective(adjective)];
  }
  bool operator==(const AdjectiveLabelSet &) const = default;
};

/// Labels of one adjective as +1 / -1, in table order.
std::vector<int> signed_labels(std::span<const AdjectiveLabelSet> table,
                               std::size_t adjective);

} // namespace hapnet::eval
