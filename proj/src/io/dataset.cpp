// SPDX-License-Identifier: Apache-2.0
#include <hapnet/errors.hpp>
#include <hapnet/io/dataset.hpp>
#include <hapnet/io/files.hpp>

#include <map>

namespace hapnet::io {

nlohmann::json synth_config_json(const SynthConfig &c) {
  nlohmann::json rules = nlohmann::json::array();
  for (const auto &r : c.rules)
    rules.push_back({r.primary, r.secondary, r.secondary_weight});
  return {{"preset", c.preset},
          {"objects", c.objects},
          {"trials", c.trials},
          {"factors", c.factors},
          {"noise", c.noise},
          {"margin", c.margin},
          {"seed", c.seed},
          {"informativeness", c.informativeness},
          {"rules", rules},
          {"base_length", c.base_length},
          {"grid", {c.grid_height, c.grid_width, c.grid_channels}}};
}

DatasetManifest write_dataset(const SynthDataset &ds,
                              const std::filesystem::path &dir,
                              const std::string &name) {
  DatasetManifest m;
  m.name = name;
  m.base_dir = dir;
  m.generator = synth_config_json(ds.config);
  m.preprocessing.trials_per_object = ds.config.trials;

  std::map<std::string, std::size_t> index;
  for (const auto &o : ds.objects) {
    index[o.id] = m.objects.size();
    m.objects.push_back({o.id, o.name, {}, "visual/" + o.id + ".hnvf"});
  }
  for (const auto &t : ds.trials) {
    auto &entry = m.objects.at(index.at(t.object_id));
    for (std::size_t f = 0; f < haptic::kFingers; ++f)
      for (const auto &[ep, rec] : t.fingers[f]) {
        const std::string file = "haptic/" + t.object_id + "/t" +
                                 std::to_string(t.trial_index) + "_f" +
                                 std::to_string(f) + "_" +
                                 std::string(haptic::ep_name(ep)) + ".txt";
        write_trial_file(dir / file, rec,
                         {t.object_id, t.trial_index, f, ep,
                          haptic::kPacRateHz, haptic::kBaseRateHz});
        entry.trials.push_back({t.trial_index, f, ep, file});
      }
  }
  std::map<std::string, std::vector<visual::VisualFeatureMap>> views;
  for (const auto &v : ds.views)
    views[v.object_id].push_back(v);
  for (const auto &o : m.objects)
    write_file(dir / o.visual, encode_visual_features(views.at(o.id)));
  write_file(dir / m.labels_file, format_labels_csv(ds.labels));
  write_file(dir / "manifest.json", format_manifest(m));
  return m;
}

std::vector<haptic::HapticTrial> load_trials(const DatasetManifest &m) {
  std::vector<haptic::HapticTrial> out;
  for (const auto &o : m.objects) {
    std::map<int, haptic::HapticTrial> trials;
    for (const auto &t : o.trials) {
      auto [rec, meta] = read_trial_file(m.resolve(t.file));
      if (meta.object_id != o.id || meta.trial_index != t.trial ||
          meta.finger != t.finger || meta.ep != t.ep)
        throw InvalidInput(t.file + ": sidecar provenance does not match the "
                                    "manifest entry");
      if (t.finger >= haptic::kFingers)
        throw InvalidInput(t.file + ": finger out of range");
      auto &trial = trials[t.trial];
      trial.object_id = o.id;
      trial.trial_index = t.trial;
      trial.fingers[t.finger][t.ep] = std::move(rec);
    }
    for (auto &[k, t] : trials)
      out.push_back(std::move(t));
  }
  return out;
}

std::vector<visual::VisualFeatureMap> load_views(const DatasetManifest &m) {
  std::vector<visual::VisualFeatureMap> out;
  for (const auto &o : m.objects) {
    auto views = decode_visual_features(read_file(m.resolve(o.visual)), o.id,
                                        o.visual);
    for (auto &v : views)
      out.push_back(std::move(v));
  }
  return out;
}

} // namespace hapnet::io
