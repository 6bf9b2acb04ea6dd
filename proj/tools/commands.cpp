// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <hapnet/errors.hpp>
#include <hapnet/eval/report.hpp>
#include <hapnet/io/checkpoint.hpp>
#include <hapnet/io/dataset.hpp>
#include <hapnet/io/files.hpp>
#include <hapnet/io/manifest.hpp>
#include <hapnet/io/synth.hpp>
#include <hapnet/pipeline.hpp>

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace hapnet::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path resolve(const Options &o, const std::string &p) {
  fs::path path(p);
  return path.is_absolute() ? path : fs::path(o.root) / path;
}

void require(const std::string &value, const char *flag) {
  if (value.empty())
    throw InvalidSpec(std::string("missing required flag ") + flag);
}

std::vector<std::string> adjectives(const Options &o) {
  std::vector<std::string> out;
  if (o.adjective == "all") {
    for (auto a : eval::adjective_names())
      out.emplace_back(a);
    return out;
  }
  std::stringstream in(o.adjective);
  std::string item;
  while (std::getline(in, item, ',')) {
    eval::require_adjective(item);
    out.push_back(item);
  }
  if (out.empty())
    throw InvalidInput("no adjectives selected");
  return out;
}

std::vector<std::uint64_t> split_seeds(const Options &o) {
  if (o.splits != 1 && o.splits != 3)
    throw InvalidSpec("--splits must be 1 or 3");
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < o.splits; ++i)
    seeds.push_back(o.seed + static_cast<std::uint64_t>(i));
  return seeds;
}

std::string stem(const std::string &adjective, std::uint64_t seed) {
  return adjective + ".s" + std::to_string(seed);
}

model::TrainSchedule schedule(const Options &o) {
  if (o.epochs < 0 || o.batch < 1)
    throw InvalidSpec("--epochs must be >= 0 and --batch >= 1");
  model::TrainSchedule s;
  s.epochs = static_cast<std::size_t>(o.epochs);
  s.finetune_epochs = static_cast<std::size_t>(
      o.finetune_epochs < 0 ? o.epochs : o.finetune_epochs);
  s.batch_size = static_cast<std::size_t>(o.batch);
  s.lr = o.lr;
  s.momentum = o.momentum;
  s.seed = o.seed;
  s.freeze_features = o.freeze;
  s.reinit_classifier = !o.keep_classifier;
  s.validate();
  return s;
}

io::DatasetManifest manifest(const Options &o) {
  require(o.manifest, "--manifest");
  return io::load_manifest(resolve(o, o.manifest));
}

std::vector<haptic::PreparedTrial> prepared(const Options &o,
                                            const io::DatasetManifest &m) {
  if (!o.prepared.empty()) {
    const auto path = resolve(o, o.prepared);
    return pipeline::decode_prepared(io::read_file(path), path.string());
  }
  return pipeline::prepare_all(io::load_trials(m));
}

/// The checkpoint file itself, or every *.hnck in a directory, sorted.
std::vector<fs::path> checkpoint_files(const Options &o) {
  require(o.checkpoint, "--checkpoint");
  const auto path = resolve(o, o.checkpoint);
  if (!fs::is_directory(path))
    return {path};
  std::vector<fs::path> out;
  for (const auto &e : fs::directory_iterator(path))
    if (e.is_regular_file() && e.path().extension() == ".hnck")
      out.push_back(e.path());
  std::sort(out.begin(), out.end());
  if (out.empty())
    throw IoError("no .hnck checkpoints in " + path.string());
  return out;
}

void write_text(const fs::path &path, const std::string &text) {
  io::write_file(path, text);
}

json read_json(const fs::path &path) {
  try {
    return json::parse(io::read_file(path));
  } catch (const json::exception &e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

std::vector<model::FeatureVector> read_features(const fs::path &path) {
  return pipeline::decode_features(io::read_file(path), path.string());
}

/// Features for one (adjective, seed) in the requested modality.
std::vector<model::FeatureVector>
load_modality(const fs::path &dir, const std::string &name,
              pipeline::Modality modality) {
  std::vector<model::FeatureVector> haptic, visual;
  if (modality != pipeline::Modality::visual)
    haptic = read_features(dir / (name + ".haptic.hnts"));
  if (modality != pipeline::Modality::haptic)
    visual = read_features(dir / "visual.hnts");
  return pipeline::modality_features(modality, haptic, visual);
}

/// Runs @p body for every (adjective, seed), skipping adjectives whose split
/// is infeasible when all were requested.
template <class Body> void for_each_task(const Options &o, Body body) {
  const auto adjs = adjectives(o);
  const auto seeds = split_seeds(o);
  const auto m = manifest(o);
  const auto labels = io::load_labels(m);
  for (const auto &adj : adjs) {
    std::vector<pipeline::AdjectiveTask> tasks;
    try {
      for (auto seed : seeds)
        tasks.push_back(pipeline::make_task(labels, adj, seed));
    } catch (const InfeasibleSplit &e) {
      if (o.adjective != "all")
        throw;
      std::printf("skipped %s: infeasible-split: %s\n", adj.c_str(), e.what());
      continue;
    }
    for (std::size_t i = 0; i < seeds.size(); ++i)
      body(m, tasks[i], seeds[i]);
  }
}

void save_trained(const fs::path &path, const io::Checkpoint &ckpt,
                  const std::string &what) {
  io::save_checkpoint(path, ckpt);
  std::printf("%s: %s loss %.6g -> %s\n", what.c_str(),
              ckpt.meta.final_phase == nn::LossKind::hinge ? "hinge" : "logistic", ckpt.meta.final_loss,
              path.string().c_str());
  std::fflush(stdout);
  if (ckpt.meta.diverged)
    throw nn::TrainingDiverged(what + ": " + ckpt.meta.diagnostic);
}

} // namespace

void run_synth(const Options &o) {
  require(o.out, "--out");
  auto cfg = io::synth_preset(o.preset, o.objects, o.seed);
  cfg.trials = o.trials;
  if (o.noise >= 0.0)
    cfg.noise = o.noise;
  const auto ds = io::synth_generate(cfg);
  const auto dir = resolve(o, o.out);
  const auto m = io::write_dataset(ds, dir, o.preset);
  std::printf("wrote %zu objects, %zu trials, %zu views to %s\n",
              ds.objects.size(), ds.trials.size(), ds.views.size(),
              (dir / "manifest.json").string().c_str());
}

void run_preprocess(const Options &o) {
  require(o.manifest, "--manifest");
  require(o.out, "--out");
  const auto findings = io::validate_manifest_file(resolve(o, o.manifest));
  if (!findings.empty()) {
    for (const auto &f : findings)
      std::printf("finding: %s\n", f.to_string().c_str());
    throw InvalidInput("manifest has " + std::to_string(findings.size()) +
                       " finding(s)");
  }
  const auto m = manifest(o);
  const auto trials = pipeline::prepare_all(io::load_trials(m));
  std::size_t constant = 0;
  for (const auto &t : trials)
    for (const auto &finger : t.fingers)
      for (const auto &ep : finger)
        constant += ep.constant_channels;
  const auto out = resolve(o, o.out);
  io::write_file(out, pipeline::encode_prepared(trials));
  std::printf("prepared %zu trials (%zu constant channels) -> %s\n",
              trials.size(), constant, out.string().c_str());
}

void run_train(const Options &o, bool lstm) {
  require(o.out, "--out");
  if (o.pca_scope != "train" && o.pca_scope != "all")
    throw InvalidSpec("--pca-scope must be train or all");
  const auto sched = schedule(o);
  const auto kind =
      lstm ? pipeline::HapticModel::lstm : pipeline::HapticModel::cnn;
  std::optional<std::vector<haptic::PreparedTrial>> trials;
  for_each_task(o, [&](const io::DatasetManifest &m,
                       const pipeline::AdjectiveTask &task,
                       std::uint64_t seed) {
    if (!trials)
      trials = prepared(o, m);
    auto s = sched;
    s.seed = seed;
    auto ckpt = pipeline::train_haptic(*trials, task, kind, s,
                                       o.pca_scope == "all");
    ckpt.meta.extra["manifest"] = o.manifest;
    save_trained(resolve(o, o.out) / (stem(task.adjective, seed) + ".hnck"),
                 ckpt, stem(task.adjective, seed));
  });
}

void run_extract(const Options &o) {
  require(o.out, "--out");
  const auto m = manifest(o);
  const auto out = resolve(o, o.out);
  const auto combine = pipeline::parse_combine(o.combine);
  const auto files = checkpoint_files(o);
  const auto trials = prepared(o, m);
  for (const auto &path : files) {
    const auto ckpt = io::load_checkpoint(path);
    const auto tap =
        o.tap_layer.empty() ? ckpt.model.graph().tap_layer : o.tap_layer;
    const auto feats = pipeline::haptic_features(ckpt, trials, tap, combine);
    const auto name = path.stem().string();
    io::write_file(out / (name + ".haptic.hnts"),
                   pipeline::encode_features(feats));
    // As given on the command line, so outputs do not depend on --root.
    const auto given = fs::is_directory(resolve(o, o.checkpoint))
                           ? fs::path(o.checkpoint) / path.filename()
                           : fs::path(o.checkpoint);
    const json side = {{"checkpoint", given.generic_string()},
                       {"tap", tap},
                       {"combine", pipeline::to_string(combine)}};
    write_text(out / (name + ".haptic.json"), side.dump(2) + "\n");
    std::printf("%s: %zu haptic features of length %zu\n", name.c_str(),
                feats.size(), feats.empty() ? 0 : feats[0].values.size());
  }
  const auto vcombine = pipeline::parse_combine(o.visual_combine);
  const auto vis = pipeline::visual_features(io::load_views(m), vcombine);
  io::write_file(out / "visual.hnts", pipeline::encode_features(vis));
  write_text(out / "visual.json",
             json{{"combine", pipeline::to_string(vcombine)}}.dump(2) + "\n");
  std::printf("visual: %zu features of length %zu\n", vis.size(),
              vis.empty() ? 0 : vis[0].values.size());
}

void run_fuse(const Options &o) {
  require(o.features, "--features");
  require(o.out, "--out");
  const auto modality = pipeline::parse_modality(o.modality);
  const auto sched = schedule(o);
  const auto dir = resolve(o, o.features);
  for_each_task(o, [&](const io::DatasetManifest &,
                       const pipeline::AdjectiveTask &task,
                       std::uint64_t seed) {
    const auto name = stem(task.adjective, seed);
    json provenance = {{"modality", pipeline::to_string(modality)},
                       {"features_dir", o.features},
                       {"manifest", o.manifest}};
    if (modality != pipeline::Modality::visual) {
      const auto side = read_json(dir / (name + ".haptic.json"));
      // The feature extractor must not have seen this split's test objects.
      const auto source =
          io::load_checkpoint(resolve(o, side.at("checkpoint").get<std::string>()));
      const auto split = pipeline::checkpoint_split(source);
      if (split.train != task.split.train || split.test != task.split.test)
        throw LeakageDetected(name + ": haptic features come from a different "
                                     "split than the fusion task");
      provenance["haptic"] = side;
    }
    if (modality != pipeline::Modality::haptic)
      provenance["visual"] = read_json(dir / "visual.json");
    const auto feats = load_modality(dir, name, modality);
    auto s = sched;
    s.seed = seed;
    const auto ckpt =
        pipeline::train_feature_classifier(feats, task, s, provenance);
    save_trained(resolve(o, o.out) / (name + ".hnck"), ckpt, name);
  });
}

namespace {

struct EvalRun {
  std::map<std::uint64_t, eval::SeedRun> runs;
  std::string config;
};

std::string schedule_text(const model::TrainSchedule &s) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%zu/%zu/%zu/%.17g/%.17g/%d/%d", s.epochs,
                s.finetune_epochs, s.batch_size, s.lr, s.momentum,
                s.freeze_features ? 1 : 0, s.reinit_classifier ? 1 : 0);
  return buf;
}

} // namespace

void run_eval(const Options &o) {
  const auto files = checkpoint_files(o);
  const auto m = manifest(o);
  const auto table = io::load_labels(m);
  std::set<std::string> wanted;
  if (o.adjective != "all")
    for (const auto &a : adjectives(o))
      wanted.insert(a);

  std::optional<std::vector<haptic::PreparedTrial>> trials;
  EvalRun acc;
  for (const auto &path : files) {
    const auto ckpt = io::load_checkpoint(path);
    const auto split = pipeline::checkpoint_split(ckpt);
    if (!wanted.empty() && !wanted.count(split.adjective))
      continue;
    const auto a = eval::require_adjective(split.adjective);
    std::map<std::string, int> labels;
    for (const auto &row : table)
      labels[row.object_id] = row.labels[a] ? 1 : -1;
    const std::set<std::string> test(split.test.begin(), split.test.end());
    const auto &x = ckpt.meta.extra;
    std::vector<eval::ScoredItem> items;
    std::string kind;
    if (x.value("input", "") == "instances") {
      if (!trials)
        trials = prepared(o, m);
      const auto inst = pipeline::instances_of(
          *trials, pipeline::checkpoint_pca(ckpt), test);
      items = pipeline::score_instances(ckpt.model, inst);
      kind = ckpt.model.graph().name;
    } else {
      const auto modality =
          pipeline::parse_modality(x.value("modality", std::string()));
      const auto dir = resolve(
          o, o.features.empty() ? x.value("features_dir", std::string())
                                : o.features);
      const auto feats = load_modality(
          dir, stem(split.adjective, split.seed), modality);
      items = pipeline::score_features(ckpt.model, feats, test);
      kind = pipeline::to_string(modality);
    }
    const double auc = eval::evaluate(items, split, labels,
                                      pipeline::trained_objects(ckpt));
    auto &run = acc.runs[split.seed];
    run.seed = split.seed;
    if (run.auc.count(split.adjective))
      throw InvalidInput("two checkpoints for " + split.adjective + " seed " +
                         std::to_string(split.seed));
    run.auc[split.adjective] = auc;
    acc.config += split.adjective + ":" + std::to_string(split.seed) + ":" +
                  kind + ":" + schedule_text(ckpt.meta.schedule) + ";";
  }
  if (acc.runs.empty())
    throw InvalidInput("no checkpoints matched the selected adjectives");
  std::vector<eval::SeedRun> runs;
  for (auto &[seed, run] : acc.runs)
    runs.push_back(std::move(run));
  const auto report = eval::aggregate(runs, acc.config);
  std::fputs(report.to_table().c_str(), stdout);
  if (!o.out.empty()) {
    const auto out = resolve(o, o.out);
    io::write_file(out, report.to_text());
    io::write_file(fs::path(out).replace_extension(".csv"), report.to_csv());
  }
}

void run_report(const Options &o) {
  if (o.inputs.empty())
    throw InvalidSpec("report needs at least one report file");
  std::map<std::uint64_t, eval::SeedRun> merged;
  std::string config = "report";
  for (const auto &input : o.inputs) {
    const auto text = io::read_file(resolve(o, input));
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
      if (line.rfind("fingerprint=", 0) == 0)
        config += ";" + line.substr(12);
    for (const auto &run : eval::parse_report(text)) {
      auto &dst = merged[run.seed];
      dst.seed = run.seed;
      for (const auto &[adj, auc] : run.auc) {
        auto [it, fresh] = dst.auc.emplace(adj, auc);
        if (!fresh && it->second != auc)
          throw InvalidInput("conflicting AUC for " + adj + " seed " +
                             std::to_string(run.seed) + " in " + input);
      }
    }
  }
  std::vector<eval::SeedRun> runs;
  for (auto &[seed, run] : merged)
    runs.push_back(std::move(run));
  const auto report = eval::aggregate(runs, config);
  std::fputs(report.to_table().c_str(), stdout);
  if (!o.out.empty()) {
    const auto out = resolve(o, o.out);
    io::write_file(out, report.to_text());
    io::write_file(fs::path(out).replace_extension(".csv"), report.to_csv());
  }
}

void run_dump_activations(const Options &o) {
  require(o.out, "--out");
  const auto files = checkpoint_files(o);
  if (files.size() != 1)
    throw InvalidSpec("dump-activations takes a single checkpoint file");
  const auto ckpt = io::load_checkpoint(files[0]);
  const auto split = pipeline::checkpoint_split(ckpt);
  const auto m = manifest(o);
  const auto trials = prepared(o, m);
  const std::string object = o.object.empty() ? split.test.at(0) : o.object;
  const auto &graph = ckpt.model.graph();
  const auto tap = o.tap_layer.empty() ? graph.tap_layer : o.tap_layer;
  const auto layer = graph.layer_index(tap);
  if (o.finger < 0 || o.offset < 0)
    throw InvalidInput("--finger and --offset must be non-negative");

  auto it = std::find_if(trials.begin(), trials.end(), [&](const auto &t) {
    return t.object_id == object && t.trial_index == o.trial;
  });
  if (it == trials.end())
    throw InvalidInput("no trial " + std::to_string(o.trial) + " for object '" +
                       object + "'");
  const auto inst = haptic::assemble_instance(
      *it, static_cast<std::size_t>(o.finger),
      static_cast<std::size_t>(o.offset), pipeline::checkpoint_pca(ckpt));
  auto acts = ckpt.model.activations(inst.values, tap);
  const auto shape = graph.output_shapes().at(layer);
  const std::size_t rows = shape.size() == 2 ? shape[0] : 1;
  const std::size_t cols = acts.size() / rows;
  char title[256];
  std::snprintf(title, sizeof title, "%s %s %s t%d f%d o%d", tap.c_str(),
                split.adjective.c_str(), object.c_str(), o.trial, o.finger,
                o.offset);
  const auto out = resolve(o, o.out);
  io::write_file(out, io::format_grid(nn::Tensor({rows, cols}, std::move(acts)),
                                      title));
  std::printf("%s: %zu x %zu activations -> %s\n", title, rows, cols,
              out.string().c_str());
}

} // namespace hapnet::cli
