// SPDX-License-Identifier: Apache-2.0
#include <hapnet/errors.hpp>
#include <hapnet/eval/metrics.hpp>
#include <hapnet/io/checkpoint.hpp>
#include <hapnet/io/dataset.hpp>
#include <hapnet/io/files.hpp>
#include <hapnet/io/manifest.hpp>
#include <hapnet/io/synth.hpp>
#include <hapnet/pipeline.hpp>

#include "support/fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

using namespace hapnet;
using namespace hapnet::io;

namespace {

double as_float(double v) { return static_cast<double>(static_cast<float>(v)); }

/// Fresh scratch directory under the build tree.
fs::path scratch(const std::string &name) {
  auto dir = fs::temp_directory_path() / ("hapnet_io_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

haptic::EpRecording small_recording() {
  auto t = hapnet::testing::random_trial(3, 12);
  return t.fingers[0].at(haptic::Ep::hold);
}

const SynthDataset &small_dataset() {
  static const SynthDataset ds = [] {
    auto cfg = synth_preset("separable", 6, 11);
    cfg.trials = 2;
    return synth_generate(cfg);
  }();
  return ds;
}

/// Ten trials per object, as trial combination expects.
const SynthDataset &full_trials_dataset() {
  static const SynthDataset ds = synth_generate(synth_preset("separable", 6, 12));
  return ds;
}

} // namespace

TEST(TrialText, RoundTripKeepsFloatPrecision) {
  const auto rec = small_recording();
  const auto back = parse_trial_text(format_trial_text(rec));
  ASSERT_EQ(back.channels.size(), rec.channels.size());
  for (const auto &[name, values] : rec.channels) {
    const auto &got = back.channels.at(name);
    ASSERT_EQ(got.size(), values.size()) << name;
    for (std::size_t i = 0; i < values.size(); ++i)
      EXPECT_EQ(got[i], as_float(values[i])) << name << "[" << i << "]";
  }
}

TEST(TrialText, RejectsGarbage) {
  EXPECT_THROW(parse_trial_text("hello\n"), UnsupportedFormat);
  auto text = format_trial_text(small_recording());
  text.replace(text.rfind('\n', text.size() - 2) + 1, 1, "x");
  EXPECT_THROW(parse_trial_text(text), InvalidInput);
}

TEST(TrialText, SidecarRoundTrip) {
  TrialFileMeta m{"obj07", 4, 1, haptic::Ep::fast_slide, 2200.0, 100.0};
  EXPECT_EQ(parse_trial_meta(format_trial_meta(m)), m);
  EXPECT_THROW(parse_trial_meta("{not json"), InvalidInput);

  const auto dir = scratch("sidecar");
  const auto path = dir / "a" / "t4_f1_fast_slide.txt";
  write_trial_file(path, small_recording(), m);
  EXPECT_TRUE(fs::exists(meta_path(path)));
  auto [rec, meta] = read_trial_file(path);
  EXPECT_EQ(meta, m);
  EXPECT_EQ(rec.channels.size(), small_recording().channels.size());
  fs::remove_all(dir);
}

TEST(VisualFile, RoundTripTruncationAndVersion) {
  const auto &ds = small_dataset();
  std::vector<visual::VisualFeatureMap> views(ds.views.begin(),
                                              ds.views.begin() + 8);
  const auto bytes = encode_visual_features(views);
  const auto back = decode_visual_features(bytes, views[0].object_id);
  ASSERT_EQ(back.size(), 8u);
  for (std::size_t v = 0; v < 8; ++v) {
    EXPECT_EQ(back[v].view_index, v);
    EXPECT_EQ(back[v].object_id, views[0].object_id);
    ASSERT_EQ(back[v].grid.shape(), views[v].grid.shape());
    for (std::size_t i = 0; i < views[v].grid.size(); ++i)
      EXPECT_EQ(back[v].grid[i], as_float(views[v].grid[i]));
  }
  EXPECT_THROW(decode_visual_features(bytes.substr(0, bytes.size() - 3), "x"),
               UnsupportedFormat);
  auto bad = bytes;
  bad[4] = 9;
  EXPECT_THROW(decode_visual_features(bad, "x"), UnsupportedFormat);
  EXPECT_THROW(decode_visual_features("JUNKJUNK", "x"), UnsupportedFormat);
}

TEST(TensorFile, RoundTrip) {
  NamedTensors t;
  t.emplace_back("a", nn::Tensor({2, 3}, std::vector<double>{1, 2, 3, 4, 5, 6}));
  t.emplace_back("b/c", nn::Tensor::from({0.25}));
  EXPECT_EQ(decode_tensors(encode_tensors(t)), t);
  const auto bytes = encode_tensors(t);
  for (std::size_t cut : {std::size_t{3}, std::size_t{10}, bytes.size() - 1})
    EXPECT_THROW(decode_tensors(bytes.substr(0, cut)), UnsupportedFormat);
}

class CheckpointFile : public ::testing::Test {
protected:
  static void SetUpTestSuite() {
    model::TrainSchedule s;
    s.epochs = 3;
    s.finetune_epochs = 2;
    s.batch_size = 8;
    s.seed = 5;
    std::vector<nn::Tensor> inputs;
    std::vector<int> labels;
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n;
    for (int i = 0; i < 16; ++i) {
      nn::Tensor x({32, 150});
      for (auto &v : x.values())
        v = n(rng) + (i % 2 ? 0.5 : -0.5);
      inputs.push_back(std::move(x));
      labels.push_back(i % 2 ? 1 : -1);
    }
    auto r = model::train(
        model::Network::initialized(model::build_haptic_cnn(), s.seed), inputs,
        labels, s);
    ckpt_ = new Checkpoint(make_checkpoint(r, s, {{"adjective", "soft"}}));
    inputs_ = new std::vector<nn::Tensor>(std::move(inputs));
  }
  static void TearDownTestSuite() {
    delete ckpt_;
    delete inputs_;
  }
  static Checkpoint *ckpt_;
  static std::vector<nn::Tensor> *inputs_;
};
Checkpoint *CheckpointFile::ckpt_ = nullptr;
std::vector<nn::Tensor> *CheckpointFile::inputs_ = nullptr;

TEST_F(CheckpointFile, RoundTripIsBitExact) {
  const auto bytes = encode_checkpoint(*ckpt_);
  const auto back = decode_checkpoint(bytes);
  EXPECT_EQ(back.meta, ckpt_->meta);
  EXPECT_EQ(back.model.graph(), ckpt_->model.graph());
  EXPECT_EQ(back.model.params(), ckpt_->model.params());
  EXPECT_EQ(encode_checkpoint(back), bytes);
  for (const auto &x : *inputs_)
    EXPECT_NEAR(back.model.score(x), ckpt_->model.score(x), 1e-5);
}

TEST_F(CheckpointFile, SaveLoad) {
  const auto dir = scratch("ckpt");
  save_checkpoint(dir / "m.hnck", *ckpt_);
  const auto back = load_checkpoint(dir / "m.hnck");
  EXPECT_EQ(back.model.params(), ckpt_->model.params());
  EXPECT_THROW(load_checkpoint(dir / "missing.hnck"), IoError);
  fs::remove_all(dir);
}

TEST_F(CheckpointFile, RejectsTruncatedVersionAndMagic) {
  const auto bytes = encode_checkpoint(*ckpt_);
  for (std::size_t cut : {std::size_t{0}, std::size_t{6}, std::size_t{40},
                          bytes.size() / 2, bytes.size() - 1})
    EXPECT_THROW(decode_checkpoint(bytes.substr(0, cut)), UnsupportedFormat)
        << "cut at " << cut;
  auto v0 = bytes;
  v0[4] = 0;
  EXPECT_THROW(decode_checkpoint(v0), UnsupportedFormat);
  auto magic = bytes;
  magic[0] = 'X';
  EXPECT_THROW(decode_checkpoint(magic), UnsupportedFormat);
  EXPECT_THROW(decode_checkpoint(bytes + "tail"), UnsupportedFormat);
}

TEST(Labels, CsvRoundTripAndErrors) {
  const auto &rows = small_dataset().labels;
  const auto back = parse_labels_csv(format_labels_csv(rows));
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].object_id, rows[i].object_id);
    EXPECT_EQ(back[i].labels, rows[i].labels);
  }
  EXPECT_THROW(parse_labels_csv("object_id,soft\nobj,1\n"), InvalidInput);
  auto text = format_labels_csv(rows);
  text[text.size() - 2] = '7';
  EXPECT_THROW(parse_labels_csv(text), InvalidInput);
}

class DiskDataset : public ::testing::Test {
protected:
  static void SetUpTestSuite() {
    dir_ = new fs::path(scratch("dataset"));
    write_dataset(small_dataset(), *dir_, "small");
  }
  static void TearDownTestSuite() {
    fs::remove_all(*dir_);
    delete dir_;
  }
  /// Copy of the written dataset that a test may damage.
  static fs::path copy(const std::string &name) {
    auto target = scratch(name);
    fs::copy(*dir_, target, fs::copy_options::recursive |
                                fs::copy_options::overwrite_existing);
    return target;
  }
  static fs::path *dir_;
};
fs::path *DiskDataset::dir_ = nullptr;

TEST_F(DiskDataset, IntactManifestHasNoFindings) {
  const auto findings = validate_manifest_file(*dir_ / "manifest.json");
  for (const auto &f : findings)
    ADD_FAILURE() << f.to_string();
  const auto m = load_manifest(*dir_ / "manifest.json");
  EXPECT_EQ(m.objects.size(), 6u);
  EXPECT_EQ(m.objects[0].trials.size(), 2u * 2 * 4);
  EXPECT_EQ(parse_manifest(format_manifest(m), m.base_dir), m);
}

TEST_F(DiskDataset, LoadMatchesGenerated) {
  const auto m = load_manifest(*dir_ / "manifest.json");
  const auto trials = load_trials(m);
  const auto &ds = small_dataset();
  ASSERT_EQ(trials.size(), ds.trials.size());
  for (std::size_t i = 0; i < trials.size(); ++i) {
    EXPECT_EQ(trials[i].object_id, ds.trials[i].object_id);
    EXPECT_EQ(trials[i].trial_index, ds.trials[i].trial_index);
    const auto &a = trials[i].fingers[1].at(haptic::Ep::squeeze).channels;
    const auto &b = ds.trials[i].fingers[1].at(haptic::Ep::squeeze).channels;
    EXPECT_EQ(a.at("E5").size(), b.at("E5").size());
    EXPECT_EQ(a.at("E5")[3], as_float(b.at("E5")[3]));
  }
  EXPECT_EQ(load_views(m).size(), ds.views.size());
  EXPECT_EQ(load_labels(m).size(), ds.objects.size());
}

TEST_F(DiskDataset, MissingTrialIsReportedWithObjectAndCount) {
  auto m = load_manifest(*dir_ / "manifest.json");
  m.preprocessing.trials_per_object = 3;
  const auto findings = validate_manifest(m, false);
  bool found = false;
  for (const auto &f : findings)
    found |= f.message.find("obj00") != std::string::npos &&
             f.message.find("has 2 trials, expected 3") != std::string::npos;
  EXPECT_TRUE(found);
}

TEST_F(DiskDataset, WrongSampleRateIsReported) {
  const auto dir = copy("rate");
  auto m = load_manifest(dir / "manifest.json");
  const auto &entry = m.objects[1].trials[2];
  auto [rec, meta] = read_trial_file(m.resolve(entry.file));
  meta.pac_rate_hz = 1000.0; // ratio 10
  write_trial_file(m.resolve(entry.file), rec, meta);
  const auto findings = validate_manifest(m);
  ASSERT_EQ(findings.size(), 1u);
  EXPECT_EQ(findings[0].file, entry.file);
  EXPECT_EQ(findings[0].field, "rates_hz");
  EXPECT_NE(findings[0].message.find("ratio 10"), std::string::npos);
  fs::remove_all(dir);
}

TEST_F(DiskDataset, DamagedFilesBecomeFindings) {
  const auto dir = copy("damaged");
  auto m = load_manifest(dir / "manifest.json");
  const auto pac_file = m.objects[0].trials[0].file;
  auto [rec, meta] = read_trial_file(m.resolve(pac_file));
  rec.channels["P_AC"].clear();
  write_trial_file(m.resolve(pac_file), rec, meta);
  write_file(m.resolve(m.objects[2].trials[5].file), "#hapnet-trial 1\n#blo");
  fs::remove(m.resolve(m.objects[3].visual));

  const auto findings = validate_manifest(m);
  std::set<std::string> files;
  bool pac = false;
  for (const auto &f : findings) {
    files.insert(f.file);
    pac |= f.file == pac_file && f.field == "P_AC";
  }
  EXPECT_TRUE(pac);
  EXPECT_TRUE(files.count(m.objects[2].trials[5].file));
  EXPECT_TRUE(files.count(m.objects[3].visual));
  fs::remove_all(dir);
}

TEST_F(DiskDataset, MalformedManifestNeverThrows) {
  const auto dir = copy("malformed");
  for (const std::string text :
       {"", "{", "[]", "{\"objects\": 3}", "{\"objects\": [{\"id\": 5}]}",
        "{\"name\":\"x\",\"objects\":[{\"id\":\"a\",\"haptic\":[{\"trial\":"
        "\"zero\"}]}]}"}) {
    write_file(dir / "manifest.json", text);
    std::vector<Finding> findings;
    EXPECT_NO_THROW(findings = validate_manifest_file(dir / "manifest.json"))
        << text;
    EXPECT_FALSE(findings.empty()) << text;
  }
  EXPECT_FALSE(validate_manifest_file(dir / "nope.json").empty());
  fs::remove_all(dir);
}

TEST(Synth, FullSizeCounts) {
  const auto ds = synth_generate(synth_preset("default", 53, 0));
  EXPECT_EQ(ds.objects.size(), 53u);
  EXPECT_EQ(ds.trials.size(), 530u);
  EXPECT_EQ(ds.views.size(), 53u * 8);
  std::size_t recordings = 0;
  for (const auto &t : ds.trials)
    for (const auto &f : t.fingers) {
      recordings += f.size();
      for (const auto &[ep, rec] : f) {
        EXPECT_EQ(rec.channels.size(), 23u);
        const auto n = rec.channels.at("P_DC").size();
        EXPECT_GE(rec.channels.at("P_AC").size() / haptic::kDecimation, n);
      }
    }
  EXPECT_EQ(recordings, 53u * 10 * 2 * 4);
  for (std::size_t a = 0; a < eval::kAdjectives; ++a) {
    std::size_t pos = 0;
    for (const auto &row : ds.labels)
      pos += row.labels[a];
    EXPECT_GE(pos, 2u);
    EXPECT_LE(pos, 51u);
  }
}

TEST(Synth, SameSeedGivesIdenticalFiles) {
  const auto d1 = scratch("synth1"), d2 = scratch("synth2");
  auto cfg = synth_preset("two-cue", 4, 9);
  cfg.trials = 1;
  write_dataset(synth_generate(cfg), d1, "s");
  write_dataset(synth_generate(cfg), d2, "s");
  std::size_t compared = 0;
  for (const auto &e : fs::recursive_directory_iterator(d1)) {
    if (!e.is_regular_file())
      continue;
    const auto rel = fs::relative(e.path(), d1);
    EXPECT_EQ(read_file(e.path()), read_file(d2 / rel)) << rel;
    ++compared;
  }
  EXPECT_EQ(compared, 4u * 8 * 2 + 4 + 2);
  cfg.seed = 10;
  const auto other = synth_generate(cfg);
  EXPECT_NE(other.trials[0].fingers[0].at(haptic::Ep::hold).channels.at("T_AC"),
            synth_generate(synth_preset("two-cue", 4, 9))
                .trials[0]
                .fingers[0]
                .at(haptic::Ep::hold)
                .channels.at("T_AC"));
  fs::remove_all(d1);
  fs::remove_all(d2);
}

// A noise-free channel slot projects onto its sine template with the sign of
// the factor it carries, so a linear probe ranks the adjective perfectly.
TEST(Synth, NoiseFreeSlotIsLinearlyDecodable) {
  auto cfg = synth_preset("separable", 40, 4);
  cfg.noise = 0.0;
  cfg.trials = 1;
  const auto ds = synth_generate(cfg);
  // Hold EP, P_DC: slot 1 * 8 + 1 carries factor 1 with 2 + 1 cycles.
  const std::size_t slot = 9, cycles = 2 + slot % 4;
  ASSERT_EQ(slot_factor(cfg, slot), 1u);
  const std::size_t adj = 1; // primary factor 1 in this preset
  ASSERT_EQ(cfg.rules[adj].primary, 1u);
  std::vector<double> scores;
  std::vector<int> labels;
  for (std::size_t o = 0; o < ds.objects.size(); ++o) {
    const auto &s =
        ds.trials[o].fingers[0].at(haptic::Ep::hold).channels.at("P_DC");
    double mean = 0.0;
    for (double v : s)
      mean += v / static_cast<double>(s.size());
    double dot = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
      dot += (s[i] - mean) *
             std::sin(2.0 * std::numbers::pi * static_cast<double>(cycles * i) /
                      static_cast<double>(s.size()));
    scores.push_back(dot);
    labels.push_back(ds.labels[o].labels[adj] ? 1 : -1);
  }
  EXPECT_EQ(eval::roc_auc(scores, labels), 1.0);
}

TEST(Synth, RejectsBadConfig) {
  EXPECT_THROW(synth_preset("nope", 10, 0), InvalidSpec);
  auto cfg = synth_preset("default", 10, 0);
  cfg.objects = 3;
  EXPECT_THROW(synth_generate(cfg), InvalidSpec);
  cfg = synth_preset("default", 10, 0);
  cfg.noise = -1.0;
  EXPECT_THROW(synth_generate(cfg), InvalidSpec);
}

TEST(Pipeline, PreparedCacheRoundTrip) {
  const auto &ds = small_dataset();
  const auto prepared = pipeline::prepare_all(
      std::span(ds.trials).subspan(0, 3));
  const auto back =
      pipeline::decode_prepared(pipeline::encode_prepared(prepared), "cache");
  ASSERT_EQ(back.size(), prepared.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].object_id, prepared[i].object_id);
    EXPECT_EQ(back[i].trial_index, prepared[i].trial_index);
    for (std::size_t f = 0; f < 2; ++f)
      for (std::size_t e = 0; e < 4; ++e) {
        const auto &a = back[i].fingers[f][e], &b = prepared[i].fingers[f][e];
        EXPECT_EQ(a.constant_channels, b.constant_channels);
        for (std::size_t c = 0; c < 4; ++c) {
          ASSERT_EQ(a.scalars[c].size(), b.scalars[c].size());
          for (std::size_t k = 0; k < a.scalars[c].size(); ++k)
            EXPECT_EQ(a.scalars[c][k], as_float(b.scalars[c][k]));
        }
        EXPECT_EQ(a.electrodes[18].back(), as_float(b.electrodes[18].back()));
      }
  }
}

TEST(Pipeline, FeatureFileRoundTrip) {
  std::vector<model::FeatureVector> f{{"obj01", 3, 0, 2, -1, {1.0, 2.5}},
                                      {"obj02", -1, -1, -1, 4, {0.5}}};
  const auto back =
      pipeline::decode_features(pipeline::encode_features(f), "features");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].object_id, "obj01");
  EXPECT_EQ(back[0].trial_index, 3);
  EXPECT_EQ(back[0].offset, 2);
  EXPECT_EQ(back[1].view_index, 4);
  EXPECT_EQ(back[1].values, f[1].values);
}

TEST(Pipeline, HapticCheckpointCarriesSplitAndScoresHeldOut) {
  const auto &ds = full_trials_dataset();
  const auto prepared = pipeline::prepare_all(ds.trials);
  const auto task = pipeline::make_task(ds.labels, "absorbent", 0);
  model::TrainSchedule s;
  s.epochs = 2;
  s.finetune_epochs = 1;
  s.batch_size = 32;
  const auto ckpt =
      pipeline::train_haptic(prepared, task, pipeline::HapticModel::cnn, s);
  const auto split = pipeline::checkpoint_split(ckpt);
  EXPECT_EQ(split.train, task.split.train);
  EXPECT_EQ(split.test, task.split.test);

  // Round trip through the file format keeps the PCA model usable.
  const auto back = decode_checkpoint(encode_checkpoint(ckpt));
  const auto feats =
      pipeline::haptic_features(back, prepared, "conv3", pipeline::Combine::trials);
  EXPECT_EQ(feats.size(), ds.objects.size());
  EXPECT_EQ(feats[0].values.size(), 64u * 19 * 10);

  const std::set<std::string> test(split.test.begin(), split.test.end());
  const auto items = pipeline::score_instances(
      back.model, pipeline::instances_of(prepared, pipeline::checkpoint_pca(back),
                                         test));
  EXPECT_EQ(items.size(), test.size() * 10 * 2 * 5);
  EXPECT_NO_THROW(eval::evaluate(items, split, task.labels,
                                 pipeline::trained_objects(back)));
  const auto train_items = pipeline::score_instances(
      back.model,
      pipeline::instances_of(prepared, pipeline::checkpoint_pca(back),
                             {split.train[0]}));
  EXPECT_THROW(eval::evaluate(train_items, split, task.labels,
                              pipeline::trained_objects(back)),
               LeakageDetected);
}

TEST(Pipeline, FusedFeaturesTrainLinearClassifier) {
  const auto &ds = small_dataset();
  const auto task = pipeline::make_task(ds.labels, "hard", 1);
  const auto vis = pipeline::visual_features(ds.views, pipeline::Combine::views);
  ASSERT_EQ(vis.size(), ds.objects.size());
  EXPECT_EQ(vis[0].values.size(), 8u * 32);
  EXPECT_THROW(pipeline::visual_features(ds.views, pipeline::Combine::trials),
               InvalidSpec);
  model::TrainSchedule s;
  s.epochs = 5;
  const auto ckpt =
      pipeline::train_feature_classifier(vis, task, s, {{"modality", "visual"}});
  EXPECT_EQ(ckpt.meta.extra.at("modality"), "visual");
  EXPECT_EQ(ckpt.model.graph().name, "linear");
  const auto items = pipeline::score_features(
      ckpt.model, vis,
      std::set<std::string>(task.split.test.begin(), task.split.test.end()));
  EXPECT_EQ(items.size(), task.split.test.size());
}

TEST(Pipeline, ModalityBlocksAreUnitNormBeforeFusion) {
  std::vector<model::FeatureVector> h{{"a", -1, -1, -1, -1, {3.0, 4.0, 0.0}},
                                      {"b", -1, -1, -1, -1, {0.0, 0.0, 0.0}}};
  std::vector<model::FeatureVector> v{{"a", -1, -1, -1, -1, {0.0, 2.0}},
                                      {"b", -1, -1, -1, -1, {1.0, 1.0}}};
  using pipeline::Modality;
  const auto fused = pipeline::modality_features(Modality::fused, h, v);
  ASSERT_EQ(fused.size(), 2u);
  EXPECT_EQ(fused[0].values,
            (std::vector<double>{0.6, 0.8, 0.0, 0.0, 1.0}));
  EXPECT_EQ(fused[1].values[0], 0.0); // all-zero block stays zero
  EXPECT_NEAR(fused[1].values[3], std::sqrt(0.5), 1e-15);
  const auto haptic = pipeline::modality_features(Modality::haptic, h, v);
  EXPECT_EQ(haptic[0].values, (std::vector<double>{0.6, 0.8, 0.0}));
  EXPECT_EQ(h[0].values[0], 3.0); // inputs untouched
}
