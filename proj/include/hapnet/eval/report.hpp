// SPDX-License-Identifier: Apache-2.0
/**
 * @file   report.hpp
 * @brief  Averaging per-adjective AUCs over split seeds, and the report's
 *         key-value, CSV and table renderings.
 */
#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hapnet::eval {

/// Per-adjective AUCs from one split seed.
struct SeedRun {
  std::uint64_t seed = 0;
  std::map<std::string, double> auc;

  bool operator==(const SeedRun &) const = default;
};

struct AdjectiveSummary {
  std::string adjective;
  std::vector<double> per_seed; ///< in run order
  double mean = 0.0;
};

struct EvalReport {
  std::string fingerprint;
  std::vector<std::uint64_t> seeds;
  std::vector<AdjectiveSummary> adjectives; ///< fixed adjective order
  double mean_auc = 0.0;                    ///< unweighted over adjectives

  /// key=value lines; numbers printed with round-trip precision.
  std::string to_text() const;
  /// One header row, then one row per adjective.
  std::string to_csv() const;
  /// Aligned human-readable table ending in the mean.
  std::string to_table() const;
};

/// Stable 64-bit FNV-1a of a configuration description, as 16 hex digits.
std::string fingerprint(std::string_view config);

/**
 * Means over seeds per adjective, then over adjectives. Every run must cover
 * the same adjectives; otherwise InvalidInput names the missing one.
 */
EvalReport aggregate(std::span<const SeedRun> runs, std::string_view config);

/// Reads the seed runs back out of to_text() output (one run per seed).
std::vector<SeedRun> parse_report(std::string_view text);

} // namespace hapnet::eval
