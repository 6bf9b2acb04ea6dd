// SPDX-License-Identifier: Apache-2.0
/**
 * @file   dataset.hpp
 * @brief  Writing generated datasets to disk and reading manifest-described
 *         datasets back.
 */
#pragma once

#include <hapnet/io/manifest.hpp>
#include <hapnet/io/synth.hpp>

#include <filesystem>

namespace hapnet::io {

nlohmann::json synth_config_json(const SynthConfig &config);

/**
 * Writes manifest.json, labels.csv, haptic/<object>/t<k>_f<f>_<ep>.txt (with
 * sidecars) and visual/<object>.hnvf under @p dir. Returns the manifest.
 */
DatasetManifest write_dataset(const SynthDataset &dataset,
                              const std::filesystem::path &dir,
                              const std::string &name);

/// Trials ordered by object (manifest order) then trial index.
std::vector<haptic::HapticTrial> load_trials(const DatasetManifest &m);
/// Views ordered by object then view index.
std::vector<visual::VisualFeatureMap> load_views(const DatasetManifest &m);

} // namespace hapnet::io
