// SPDX-License-Identifier: Apache-2.0
#include <hapnet/errors.hpp>
#include <hapnet/io/files.hpp>
#include <hapnet/io/manifest.hpp>

#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace hapnet::io {

namespace {

constexpr std::uint32_t kVersion = 1;

} // namespace

std::string format_manifest(const DatasetManifest &m) {
  nlohmann::ordered_json j;
  j["format"] = "hapnet-manifest";
  j["version"] = kVersion;
  j["name"] = m.name;
  j["adjectives"] = nlohmann::json::array();
  for (auto a : eval::adjective_names())
    j["adjectives"].push_back(std::string(a));
  j["labels"] = m.labels_file;
  const auto &p = m.preprocessing;
  j["preprocessing"] = {{"length", p.length},
                        {"decimation", p.decimation},
                        {"pca_components", p.pca_components},
                        {"offsets", p.offsets},
                        {"trials_per_object", p.trials_per_object},
                        {"views", p.views}};
  auto &objs = j["objects"] = nlohmann::ordered_json::array();
  for (const auto &o : m.objects) {
    nlohmann::ordered_json e;
    e["id"] = o.id;
    e["name"] = o.name;
    e["visual"] = o.visual;
    auto &trials = e["haptic"] = nlohmann::ordered_json::array();
    for (const auto &t : o.trials)
      trials.push_back({{"trial", t.trial},
                        {"finger", t.finger},
                        {"ep", std::string(haptic::ep_name(t.ep))},
                        {"file", t.file}});
    objs.push_back(std::move(e));
  }
  if (!m.generator.is_null())
    j["generator"] = m.generator;
  return j.dump(1) + "\n";
}

DatasetManifest parse_manifest(std::string_view text, const fs::path &base_dir,
                               const std::string &where) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw InvalidInput(where + ": not valid JSON: " + e.what());
  }
  try {
    if (!j.is_object() || j.value("format", "") != "hapnet-manifest")
      throw UnsupportedFormat(where + ": not a hapnet manifest");
    if (j.at("version") != kVersion)
      throw UnsupportedFormat(where + ": unsupported manifest version " +
                              j.at("version").dump());
    DatasetManifest m;
    m.base_dir = base_dir;
    m.name = j.at("name").get<std::string>();
    m.labels_file = j.at("labels").get<std::string>();
    const auto &adj = j.at("adjectives");
    const auto &names = eval::adjective_names();
    if (adj.size() != names.size())
      throw InvalidInput(where + ": adjectives: expected 24 entries");
    for (std::size_t i = 0; i < names.size(); ++i)
      if (adj.at(i).get<std::string>() != names[i])
        throw InvalidInput(where + ": adjectives[" + std::to_string(i) +
                           "]: expected '" + std::string(names[i]) + "'");
    const auto &p = j.at("preprocessing");
    m.preprocessing.length = p.at("length").get<std::size_t>();
    m.preprocessing.decimation = p.at("decimation").get<std::size_t>();
    m.preprocessing.pca_components = p.at("pca_components").get<std::size_t>();
    m.preprocessing.offsets = p.at("offsets").get<std::vector<std::size_t>>();
    m.preprocessing.trials_per_object =
        p.at("trials_per_object").get<std::size_t>();
    m.preprocessing.views = p.at("views").get<std::size_t>();
    for (const auto &o : j.at("objects")) {
      ObjectEntry e;
      e.id = o.at("id").get<std::string>();
      e.name = o.at("name").get<std::string>();
      e.visual = o.at("visual").get<std::string>();
      for (const auto &t : o.at("haptic")) {
        TrialEntry te;
        te.trial = t.at("trial").get<int>();
        te.finger = t.at("finger").get<std::size_t>();
        auto ep = haptic::parse_ep(t.at("ep").get<std::string>());
        if (!ep)
          throw InvalidInput(where + ": object '" + e.id + "': unknown EP " +
                             t.at("ep").dump());
        te.ep = *ep;
        te.file = t.at("file").get<std::string>();
        e.trials.push_back(std::move(te));
      }
      m.objects.push_back(std::move(e));
    }
    if (j.contains("generator"))
      m.generator = j.at("generator");
    return m;
  } catch (const nlohmann::json::exception &e) {
    throw InvalidInput(where + ": " + e.what());
  }
}

DatasetManifest load_manifest(const fs::path &path) {
  return parse_manifest(read_file(path), path.parent_path(), path.string());
}

std::string Finding::to_string() const {
  return file + ": " + field + ": " + message;
}

namespace {

class Validator {
public:
  Validator(const DatasetManifest &m, bool deep) : m_(m), deep_(deep) {}

  std::vector<Finding> run() {
    guard("manifest", "preprocessing", [&] { check_params(); });
    guard("manifest", "objects", [&] { check_objects(); });
    guard(m_.labels_file, "labels", [&] { check_labels(); });
    return std::move(findings_);
  }

private:
  void add(std::string file, std::string field, std::string msg) {
    findings_.push_back({std::move(file), std::move(field), std::move(msg)});
  }

  /// Runs one check, turning any exception into a finding.
  template <class F> void guard(const std::string &file,
                                const std::string &field, F &&f) {
    try {
      f();
    } catch (const std::exception &e) {
      add(file, field, e.what());
    }
  }

  void check_params() {
    const auto &p = m_.preprocessing;
    if (p.length != 150)
      add("manifest", "preprocessing.length",
          "unsupported instance length " + std::to_string(p.length));
    if (p.decimation != haptic::kDecimation)
      add("manifest", "preprocessing.decimation",
          "unsupported decimation " + std::to_string(p.decimation));
    if (p.pca_components != 4)
      add("manifest", "preprocessing.pca_components",
          "unsupported component count " + std::to_string(p.pca_components));
    if (p.offsets != std::vector<std::size_t>{0, 1, 2, 3, 4})
      add("manifest", "preprocessing.offsets", "offsets must be 0..4");
    if (p.views != 8)
      add("manifest", "preprocessing.views",
          "unsupported view count " + std::to_string(p.views));
    if (p.trials_per_object == 0)
      add("manifest", "preprocessing.trials_per_object", "must be positive");
  }

  void check_objects() {
    if (m_.objects.empty())
      add("manifest", "objects", "no objects");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < m_.objects.size(); ++i) {
      const auto &o = m_.objects[i];
      const std::string field = "objects[" + std::to_string(i) + "]";
      if (o.id.empty())
        add("manifest", field + ".id", "empty object id");
      if (!ids.insert(o.id).second)
        add("manifest", field + ".id", "duplicate object id '" + o.id + "'");
      guard("manifest", field + ".haptic", [&] { check_trials(o, field); });
      guard(o.visual, field + ".visual", [&] { check_visual(o); });
    }
  }

  void check_trials(const ObjectEntry &o, const std::string &field) {
    std::map<int, std::set<std::pair<std::size_t, haptic::Ep>>> per_trial;
    for (const auto &t : o.trials) {
      if (t.finger >= haptic::kFingers)
        add("manifest", field + ".haptic",
            "object '" + o.id + "' finger " + std::to_string(t.finger) +
                " out of range");
      else if (!per_trial[t.trial].insert({t.finger, t.ep}).second)
        add("manifest", field + ".haptic",
            "object '" + o.id + "' trial " + std::to_string(t.trial) +
                " lists finger " + std::to_string(t.finger) + " " +
                std::string(haptic::ep_name(t.ep)) + " twice");
    }
    const auto expected = m_.preprocessing.trials_per_object;
    if (per_trial.size() != expected)
      add("manifest", field + ".haptic",
          "object '" + o.id + "' has " + std::to_string(per_trial.size()) +
              " trials, expected " + std::to_string(expected));
    for (const auto &[trial, recs] : per_trial)
      if (recs.size() != haptic::kFingers * haptic::kAllEps.size())
        add("manifest", field + ".haptic",
            "object '" + o.id + "' trial " + std::to_string(trial) + " has " +
                std::to_string(recs.size()) + " recordings, expected " +
                std::to_string(haptic::kFingers * haptic::kAllEps.size()));
    if (!deep_)
      return;
    for (const auto &t : o.trials)
      guard(t.file, "file", [&] { check_trial_file(o, t); });
  }

  void check_trial_file(const ObjectEntry &o, const TrialEntry &t) {
    auto [rec, meta] = read_trial_file(m_.resolve(t.file));
    if (meta.object_id != o.id || meta.trial_index != t.trial ||
        meta.finger != t.finger || meta.ep != t.ep)
      add(t.file, "meta", "sidecar provenance does not match the manifest");
    if (!(meta.base_rate_hz > 0.0) ||
        std::abs(meta.pac_rate_hz / meta.base_rate_hz -
                 static_cast<double>(m_.preprocessing.decimation)) > 1e-9)
      add(t.file, "rates_hz",
          "P_AC/base sample-rate ratio " +
              std::to_string(meta.pac_rate_hz / meta.base_rate_hz) +
              ", expected " + std::to_string(m_.preprocessing.decimation));
    haptic::HapticTrial trial;
    trial.object_id = o.id;
    trial.fingers[0][t.ep] = std::move(rec);
    for (const auto &gap : haptic::recording_gaps(trial, 0))
      if (gap.find(std::string(haptic::ep_name(t.ep))) != std::string::npos)
        add(t.file, gap.find("P_AC") != std::string::npos ? "P_AC"
                                                          : "channels",
            gap);
  }

  void check_visual(const ObjectEntry &o) {
    if (o.visual.empty()) {
      add("manifest", "visual", "object '" + o.id + "' has no visual file");
      return;
    }
    if (!deep_) {
      if (!fs::exists(m_.resolve(o.visual)))
        add(o.visual, "file", "missing");
      return;
    }
    auto views = decode_visual_features(read_file(m_.resolve(o.visual)), o.id,
                                        o.visual);
    if (views.size() != m_.preprocessing.views)
      add(o.visual, "views",
          "object '" + o.id + "' has " + std::to_string(views.size()) +
              " views, expected " + std::to_string(m_.preprocessing.views));
  }

  void check_labels() {
    auto rows = parse_labels_csv(read_file(m_.resolve(m_.labels_file)),
                                 m_.labels_file);
    std::set<std::string> labelled;
    for (const auto &r : rows)
      labelled.insert(r.object_id);
    std::set<std::string> known;
    for (const auto &o : m_.objects) {
      known.insert(o.id);
      if (!labelled.count(o.id))
        add(m_.labels_file, "object_id", "no labels for object '" + o.id + "'");
    }
    for (const auto &id : labelled)
      if (!known.count(id))
        add(m_.labels_file, "object_id",
            "labels for unknown object '" + id + "'");
  }

  const DatasetManifest &m_;
  bool deep_;
  std::vector<Finding> findings_;
};

} // namespace

std::vector<Finding> validate_manifest(const DatasetManifest &manifest,
                                       bool deep) {
  return Validator(manifest, deep).run();
}

std::vector<Finding> validate_manifest_file(const fs::path &path, bool deep) {
  try {
    return validate_manifest(load_manifest(path), deep);
  } catch (const std::exception &e) {
    return {{path.string(), "manifest", e.what()}};
  }
}

std::string format_labels_csv(std::span<const eval::AdjectiveLabelSet> rows) {
  std::string out = "object_id";
  for (auto a : eval::adjective_names())
    out += "," + std::string(a);
  out += '\n';
  for (const auto &r : rows) {
    out += r.object_id;
    for (bool b : r.labels)
      out += b ? ",1" : ",0";
    out += '\n';
  }
  return out;
}

std::vector<eval::AdjectiveLabelSet> parse_labels_csv(std::string_view text,
                                                      const std::string &where) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line))
    throw InvalidInput(where + ": empty labels file");
  if (!line.empty() && line.back() == '\r')
    line.pop_back();
  {
    std::string expected = "object_id";
    for (auto a : eval::adjective_names())
      expected += "," + std::string(a);
    if (line != expected)
      throw InvalidInput(where + ": header must list object_id and the 24 "
                                 "adjectives in fixed order");
  }
  std::vector<eval::AdjectiveLabelSet> rows;
  std::set<std::string> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ','))
      cells.push_back(cell);
    if (cells.size() != 1 + eval::kAdjectives)
      throw InvalidInput(where + " line " + std::to_string(line_no) + ": " +
                         std::to_string(cells.size()) + " cells, expected 25");
    eval::AdjectiveLabelSet row{cells[0], {}};
    if (!seen.insert(row.object_id).second)
      throw InvalidInput(where + " line " + std::to_string(line_no) +
                         ": duplicate object '" + row.object_id + "'");
    for (std::size_t a = 0; a < eval::kAdjectives; ++a) {
      if (cells[a + 1] != "0" && cells[a + 1] != "1")
        throw InvalidInput(where + " line " + std::to_string(line_no) + ": " +
                           std::string(eval::adjective_names()[a]) +
                           " must be 0 or 1");
      row.labels[a] = cells[a + 1] == "1";
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<eval::AdjectiveLabelSet> load_labels(const DatasetManifest &m) {
  auto rows = parse_labels_csv(read_file(m.resolve(m.labels_file)),
                               m.labels_file);
  std::map<std::string, eval::AdjectiveLabelSet> by_id;
  for (auto &r : rows)
    by_id.emplace(r.object_id, r);
  std::vector<eval::AdjectiveLabelSet> out;
  for (const auto &o : m.objects) {
    auto it = by_id.find(o.id);
    if (it == by_id.end())
      throw InvalidInput(m.labels_file + ": no labels for object '" + o.id +
                         "'");
    out.push_back(it->second);
  }
  return out;
}

} // namespace hapnet::io
