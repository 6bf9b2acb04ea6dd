// SPDX-License-Identifier: Apache-2.0
/**
 * @file   manifest.hpp
 * @brief  Dataset manifests, the labels table and manifest validation.
 *
 * A manifest is a JSON document listing every object with its haptic trial
 * files and visual feature file, the labels CSV, and the preprocessing
 * parameters. File references are relative to the manifest's directory.
 *
 * Labels CSV: header `object_id,<24 adjectives in fixed order>`, then one
 * row per object with 0/1 values.
 */
#pragma once

#include <hapnet/eval/labels.hpp>
#include <hapnet/haptic/trial.hpp>

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace hapnet::io {

namespace fs = std::filesystem;

struct TrialEntry {
  int trial = 0;
  std::size_t finger = 0;
  haptic::Ep ep = haptic::Ep::squeeze;
  std::string file;

  bool operator==(const TrialEntry &) const = default;
};

struct ObjectEntry {
  std::string id;
  std::string name;
  std::vector<TrialEntry> trials;
  std::string visual;

  bool operator==(const ObjectEntry &) const = default;
};

struct PreprocessParams {
  std::size_t length = 150;
  std::size_t decimation = 22;
  std::size_t pca_components = 4;
  std::vector<std::size_t> offsets{0, 1, 2, 3, 4};
  std::size_t trials_per_object = 10;
  std::size_t views = 8;

  bool operator==(const PreprocessParams &) const = default;
};

struct DatasetManifest {
  std::string name;
  std::vector<ObjectEntry> objects;
  std::string labels_file = "labels.csv";
  PreprocessParams preprocessing;
  nlohmann::json generator = nullptr; ///< synthetic config, when generated
  fs::path base_dir;                  ///< not serialized

  fs::path resolve(const std::string &relative) const {
    return base_dir / relative;
  }
  bool operator==(const DatasetManifest &) const = default;
};

std::string format_manifest(const DatasetManifest &manifest);
/// Strict parse; throws InvalidInput / UnsupportedFormat.
DatasetManifest parse_manifest(std::string_view text, const fs::path &base_dir,
                               const std::string &where = "manifest");
DatasetManifest load_manifest(const fs::path &path);

struct Finding {
  std::string file;
  std::string field;
  std::string message;

  std::string to_string() const;
};

/**
 * Checks counts (trials per object, 2 fingers x 4 EPs, views), labels
 * coverage and, when @p deep, that every referenced file parses with
 * consistent provenance and sample-rate ratio. Never throws.
 */
std::vector<Finding> validate_manifest(const DatasetManifest &manifest,
                                       bool deep = true);
/// Parses then validates; parse failures become findings.
std::vector<Finding> validate_manifest_file(const fs::path &path,
                                            bool deep = true);

std::string format_labels_csv(std::span<const eval::AdjectiveLabelSet> rows);
std::vector<eval::AdjectiveLabelSet>
parse_labels_csv(std::string_view text, const std::string &where = "labels");
/// Labels in manifest object order; throws if any object is missing.
std::vector<eval::AdjectiveLabelSet> load_labels(const DatasetManifest &m);

} // namespace hapnet::io
