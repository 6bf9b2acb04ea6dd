// SPDX-License-Identifier: Apache-2.0
#include <hapnet/errors.hpp>
#include <hapnet/eval/metrics.hpp>
#include <hapnet/haptic/instance.hpp>
#include <hapnet/io/synth.hpp>
#include <hapnet/model/fusion.hpp>
#include <hapnet/model/graph.hpp>
#include <hapnet/model/network.hpp>
#include <hapnet/model/train.hpp>
#include <hapnet/nn/layers.hpp>
#include <hapnet/nn/lstm.hpp>

#include "support/gradcheck.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace hapnet;
using namespace hapnet::model;
using hapnet::testing::random_tensor;
using hapnet::testing::relative_error;

namespace {

nn::Tensor random_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_tensor({32, 150}, rng);
}

nn::LayerParams layer(const Network &net, const std::string &name) {
  return {net.params().at(name + ".weight").value,
          net.params().at(name + ".bias").value};
}

/// 200 instances (20 trials x 10 augmentations) of the separable task.
struct SeparableSet {
  std::vector<nn::Tensor> inputs;
  std::vector<int> labels;
  std::vector<haptic::InstanceMatrix> instances;
};

SeparableSet separable_set() {
  auto cfg = io::synth_preset("separable", 10, 5);
  cfg.trials = 2;
  auto ds = io::synth_generate(cfg);
  std::vector<haptic::PreparedTrial> prepared;
  for (const auto &t : ds.trials)
    prepared.push_back(haptic::prepare_trial(t));
  auto pca = haptic::fit_pca_set(prepared, haptic::kPcaComponents);
  SeparableSet s;
  for (const auto &p : prepared)
    for (auto &inst : haptic::augment(p, pca)) {
      const std::size_t o = std::stoul(inst.object_id.substr(3));
      s.inputs.push_back(inst.values);
      s.labels.push_back(ds.labels[o].labels[0] ? 1 : -1);
      s.instances.push_back(std::move(inst));
    }
  return s;
}

class TrainedCnn : public ::testing::Test {
protected:
  static void SetUpTestSuite() {
    data_ = new SeparableSet(separable_set());
    TrainSchedule s;
    s.seed = 3;
    result_ = new TrainResult(train(Network::initialized(build_haptic_cnn(), 3),
                                    data_->inputs, data_->labels, s));
  }
  static void TearDownTestSuite() {
    delete result_;
    delete data_;
  }
  static SeparableSet *data_;
  static TrainResult *result_;
};
SeparableSet *TrainedCnn::data_ = nullptr;
TrainResult *TrainedCnn::result_ = nullptr;

} // namespace

TEST(HapticCnn, Structure) {
  auto g = build_haptic_cnn();
  EXPECT_EQ(g.input_shape, (nn::Shape{32, 150}));
  EXPECT_EQ(g.tap_layer, "conv3");
  std::size_t convs = 0;
  for (const auto &l : g.layers)
    if (l.kind == LayerKind::conv1d) {
      EXPECT_EQ(l.conv.groups, 32u) << l.name;
      EXPECT_TRUE(l.relu);
      ++convs;
    }
  EXPECT_EQ(convs, 3u);
  auto shapes = g.output_shapes();
  EXPECT_EQ(shapes[0], (nn::Shape{64, 75}));
  EXPECT_EQ(shapes[1], (nn::Shape{64, 38}));
  EXPECT_EQ(shapes[2], (nn::Shape{64, 19}));
  EXPECT_EQ(shapes.back(), (nn::Shape{1}));
}

TEST(HapticCnn, ParameterCountClosedForm) {
  auto g = build_haptic_cnn();
  std::size_t expected = 0, ungrouped = 0, grouped_weights = 0;
  std::size_t len = 150;
  for (const auto &l : g.layers) {
    if (l.kind != LayerKind::conv1d)
      continue;
    const auto &c = l.conv;
    grouped_weights += c.out_channels * (c.in_channels / c.groups) * c.kernel_len;
    ungrouped += c.out_channels * c.in_channels * c.kernel_len;
    expected += c.out_channels * (c.in_channels / c.groups) * c.kernel_len +
                c.out_channels;
    len = (len + 2 * c.pad - c.kernel_len) / c.stride + 1;
  }
  expected += 64 * len + 1;
  EXPECT_EQ(g.parameter_count(), expected);
  EXPECT_EQ(g.parameter_count(), 512u + 704u + 448u + 1217u);
  EXPECT_EQ(grouped_weights * 32, ungrouped);
}

TEST(HapticCnn, GroupIsolationProbe) {
  auto net = Network::initialized(build_haptic_cnn(), 9);
  auto base = random_instance(1);
  const auto ref = net.activations(base, "conv3");
  for (std::size_t c = 0; c < 32; ++c) {
    auto probe = base;
    for (std::size_t t = 0; t < 150; ++t)
      probe[c * 150 + t] += 1.5 + 0.01 * static_cast<double>(t);
    const auto act = net.activations(probe, "conv3");
    bool own_changed = false;
    for (std::size_t ch = 0; ch < 64; ++ch)
      for (std::size_t t = 0; t < 19; ++t) {
        const std::size_t i = ch * 19 + t;
        if (ch / 2 == c)
          own_changed |= act[i] != ref[i];
        else
          ASSERT_EQ(act[i], ref[i]) << "channel " << c << " leaked into " << ch;
      }
    EXPECT_TRUE(own_changed) << "probe on channel " << c << " had no effect";
  }
}

TEST(HapticCnn, ComposesModuleOps) {
  auto net = Network::initialized(build_haptic_cnn(), 4);
  auto x = random_instance(2);
  const auto &g = net.graph();
  auto h = x;
  for (std::size_t i = 0; i < 3; ++i)
    h = nn::relu(nn::conv1d_forward(h, g.layers[i].conv,
                                    layer(net, g.layers[i].name)));
  const double expected = nn::inner_product(h, layer(net, "fc"))[0];
  EXPECT_NEAR(net.score(x), expected, 1e-12);
}

TEST(HapticLstm, Structure) {
  auto g = build_haptic_lstm();
  EXPECT_EQ(g.layers[0].kind, LayerKind::lstm);
  EXPECT_EQ(g.layers[0].hidden, 10u);
  EXPECT_EQ(g.layers[1].outputs, 10u);
  EXPECT_TRUE(g.layers[1].relu);
  EXPECT_EQ(g.parameter_count(), 4u * 10 * (32 + 10 + 1) + 110 + 11);
}

TEST(HapticLstm, ZeroModelScoresZero) {
  Network net(build_haptic_lstm());
  for (std::uint64_t s = 0; s < 3; ++s)
    EXPECT_EQ(net.score(random_instance(s)), 0.0);
}

TEST(HapticLstm, ComposesModuleOps) {
  auto net = Network::initialized(build_haptic_lstm(), 6);
  auto x = random_instance(3);
  const auto &ps = net.params();
  nn::LstmParams lp{ps.at("lstm.input_weights").value,
                    ps.at("lstm.hidden_weights").value,
                    ps.at("lstm.bias").value, 10};
  auto h = nn::lstm_forward(x.transposed(), lp);
  h = nn::relu(nn::inner_product(h, layer(net, "fc1")));
  const double expected = nn::inner_product(h, layer(net, "fc2"))[0];
  EXPECT_NEAR(net.score(x), expected, 1e-12);
}

TEST(Network, BackwardMatchesFiniteDifferences) {
  for (auto graph : {build_haptic_cnn(), build_haptic_lstm()}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      auto net = Network::initialized(graph, seed);
      std::mt19937_64 rng(seed + 100);
      // Zero biases leave dead units exactly on the ReLU kink.
      for (auto &[name, p] : net.params())
        if (name.ends_with(".bias"))
          p.value = random_tensor(p.value.shape(), rng, 0.1);
      auto x = random_tensor({32, 150}, rng, 0.5);
      nn::GradientSet grads;
      net.backward(net.forward(x), 1.0, grads);
      ASSERT_EQ(grads.size(), net.params().size());
      for (auto &[name, p] : net.params()) {
        const auto &g = grads.at(name);
        // a spread of entries per tensor keeps the check quick
        const std::size_t step = std::max<std::size_t>(1, p.value.size() / 15);
        for (std::size_t i = 0; i < p.value.size(); i += step) {
          const double saved = p.value[i];
          p.value[i] = saved + hapnet::testing::kFdStep;
          const double up = net.score(x);
          p.value[i] = saved - hapnet::testing::kFdStep;
          const double down = net.score(x);
          p.value[i] = saved;
          const double numeric = (up - down) / (2 * hapnet::testing::kFdStep);
          EXPECT_LT(relative_error(g[i], numeric), hapnet::testing::kFdRelTol)
              << graph.name << " " << name << "[" << i << "] seed " << seed;
        }
      }
    }
  }
}

TEST(Network, RejectsBadInputsAndTaps) {
  auto net = Network::initialized(build_haptic_cnn(), 1);
  EXPECT_THROW(net.score(nn::Tensor({32, 149})), InvalidInput);
  EXPECT_THROW(net.activations(random_instance(0), "conv4"), InvalidSpec);
  std::vector<haptic::InstanceMatrix> one{{random_instance(0), "a", 0, 0, 0}};
  EXPECT_THROW(extract_activations(net, one, "pool5"), InvalidSpec);
}

TEST(Graph, JsonRoundTrip) {
  for (const auto &g : {build_haptic_cnn(), build_haptic_lstm(),
                        build_linear_classifier(17)}) {
    EXPECT_EQ(graph_from_json(graph_to_json(g)), g);
  }
  EXPECT_THROW(graph_from_json("{\"name\":1}"), InvalidSpec);
  EXPECT_THROW(graph_from_json("not json"), InvalidSpec);
}

TEST(Graph, RejectsIncompatibleLayers) {
  auto g = build_haptic_cnn();
  g.layers[1].conv.in_channels = 32;
  g.layers[1].conv.groups = 32;
  EXPECT_THROW(g.validate(), InvalidSpec);
  auto dup = build_haptic_cnn();
  dup.layers[1].name = "conv1";
  EXPECT_THROW(dup.validate(), InvalidSpec);
}

TEST(Train, DeterministicForFixedSeed) {
  auto data = separable_set();
  std::vector<nn::Tensor> x(data.inputs.begin(), data.inputs.begin() + 40);
  std::vector<int> y(data.labels.begin(), data.labels.begin() + 40);
  TrainSchedule s;
  s.epochs = 3;
  s.finetune_epochs = 3;
  s.batch_size = 16;
  s.seed = 11;
  auto a = train(Network::initialized(build_haptic_cnn(), 1), x, y, s);
  auto b = train(Network::initialized(build_haptic_cnn(), 1), x, y, s);
  EXPECT_EQ(a.model.params().size(), b.model.params().size());
  for (const auto &[name, p] : a.model.params()) {
    EXPECT_EQ(p.value, b.model.params().at(name).value) << name;
    EXPECT_EQ(p.velocity, b.model.params().at(name).velocity) << name;
  }
  EXPECT_EQ(a.curve, b.curve);
  EXPECT_EQ(a.curve.size(), 6u);
  s.seed = 12;
  auto c = train(Network::initialized(build_haptic_cnn(), 1), x, y, s);
  EXPECT_NE(a.curve, c.curve);
}

TEST(Train, FreezeKeepsFeatureWeights) {
  auto data = separable_set();
  std::vector<nn::Tensor> x(data.inputs.begin(), data.inputs.begin() + 20);
  std::vector<int> y(data.labels.begin(), data.labels.begin() + 20);
  TrainSchedule s;
  s.epochs = 0;
  s.finetune_epochs = 3;
  s.freeze_features = true;
  auto start = Network::initialized(build_haptic_cnn(), 2);
  start.quantize_to_float();
  auto r = train(start, x, y, s);
  for (const auto &name : {"conv1.weight", "conv2.bias", "conv3.weight"})
    EXPECT_EQ(r.model.params().at(name).value, start.params().at(name).value);
  EXPECT_NE(r.model.params().at("fc.weight").value,
            start.params().at("fc.weight").value);
  s.freeze_features = false;
  auto thawed = train(start, x, y, s);
  EXPECT_NE(thawed.model.params().at("conv1.weight").value,
            start.params().at("conv1.weight").value);
}

TEST(Train, ReinitializesClassifierOnlyForHingePhase) {
  auto data = separable_set();
  std::vector<nn::Tensor> x(data.inputs.begin(), data.inputs.begin() + 20);
  std::vector<int> y(data.labels.begin(), data.labels.begin() + 20);
  TrainSchedule s;
  s.epochs = 2;
  s.finetune_epochs = 1;
  s.freeze_features = true;
  auto reinit = train(Network::initialized(build_haptic_cnn(), 2), x, y, s);
  s.reinit_classifier = false;
  auto kept = train(Network::initialized(build_haptic_cnn(), 2), x, y, s);
  EXPECT_EQ(reinit.model.params().at("conv2.weight").value,
            kept.model.params().at("conv2.weight").value);
  EXPECT_NE(reinit.model.params().at("fc.weight").value,
            kept.model.params().at("fc.weight").value);
  EXPECT_EQ(reinit.curve.back().phase, nn::LossKind::hinge);
  EXPECT_EQ(reinit.final_phase, nn::LossKind::hinge);
}

TEST(Train, DivergenceKeepsLastFiniteState) {
  std::vector<nn::Tensor> x{random_instance(1), random_instance(2)};
  std::vector<int> y{1, -1};
  TrainSchedule s;
  s.epochs = 20;
  s.lr = 1e150;
  auto r = train(Network::initialized(build_haptic_cnn(), 0), x, y, s);
  EXPECT_TRUE(r.diverged);
  EXPECT_FALSE(r.diagnostic.empty());
  for (const auto &[name, p] : r.model.params())
    EXPECT_TRUE(p.value.all_finite()) << name;
}

TEST(Train, RejectsBadLabelsAndSchedules) {
  std::vector<nn::Tensor> x{random_instance(0)};
  std::vector<int> zero{0};
  auto net = Network::initialized(build_haptic_cnn(), 0);
  EXPECT_THROW(train(net, x, zero, {}), InvalidInput);
  TrainSchedule bad;
  bad.batch_size = 0;
  std::vector<int> one{1};
  EXPECT_THROW(train(net, x, one, bad), InvalidSpec);
  EXPECT_THROW(train(net, {}, {}, {}), InvalidInput);
}

TEST_F(TrainedCnn, FitsSeparableSet) {
  ASSERT_EQ(data_->inputs.size(), 200u);
  ASSERT_FALSE(result_->diverged) << result_->diagnostic;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data_->inputs.size(); ++i)
    correct += (result_->model.score(data_->inputs[i]) > 0) ==
               (data_->labels[i] > 0);
  EXPECT_GE(static_cast<double>(correct) / 200.0, 0.99);
}

TEST_F(TrainedCnn, LossCurveFiniteAndDecreasing) {
  const auto &c = result_->curve;
  ASSERT_EQ(c.size(), 400u);
  for (const auto &p : c)
    EXPECT_TRUE(std::isfinite(p.loss));
  EXPECT_LE(c.back().loss, c.front().loss);
  // each phase on its own as well
  EXPECT_LE(c[199].loss, c[0].loss);
}

TEST_F(TrainedCnn, FinalLossReproducibleFromWeights) {
  for (const auto &[name, p] : result_->model.params())
    for (double v : p.value.values())
      ASSERT_EQ(v, static_cast<double>(static_cast<float>(v))) << name;
  EXPECT_EQ(mean_loss(result_->model, result_->final_phase, data_->inputs,
                      data_->labels),
            result_->final_loss);
}

TEST_F(TrainedCnn, Conv3ActivationsMostlyZero) {
  auto feats = extract_activations(result_->model, data_->instances, "conv3");
  std::size_t zeros = 0, total = 0;
  for (const auto &f : feats) {
    ASSERT_EQ(f.values.size(), 64u * 19);
    for (double v : f.values) {
      ASSERT_GE(v, 0.0);
      zeros += v == 0.0;
      ++total;
    }
  }
  EXPECT_GT(static_cast<double>(zeros) / static_cast<double>(total), 0.5);
}

TEST_F(TrainedCnn, ExtractionIsPure) {
  std::vector<haptic::InstanceMatrix> twice{data_->instances[0],
                                            data_->instances[0]};
  auto f = extract_activations(result_->model, twice, "conv3");
  EXPECT_EQ(f[0], f[1]);
  EXPECT_EQ(f[0].object_id, data_->instances[0].object_id);
  EXPECT_EQ(f[0].finger, 0);
  auto again = extract_activations(result_->model, twice, "conv3");
  EXPECT_EQ(f, again);
}

namespace {

std::vector<FeatureVector> trial_parts(const std::string &object, std::size_t len) {
  std::vector<FeatureVector> parts;
  for (int t = 0; t < 10; ++t) {
    FeatureVector f;
    f.object_id = object;
    f.trial_index = t;
    for (std::size_t i = 0; i < len; ++i)
      f.values.push_back(t * 100.0 + static_cast<double>(i));
    parts.push_back(f);
  }
  return parts;
}

} // namespace

TEST(Combine, TrialsConcatenateInIndexOrder) {
  auto parts = trial_parts("a", 7);
  auto combined = combine_instances(parts, CombineMode::trials);
  ASSERT_EQ(combined.values.size(), 70u);
  for (int t = 0; t < 10; ++t)
    EXPECT_TRUE(std::equal(parts[t].values.begin(), parts[t].values.end(),
                           combined.values.begin() + 7 * t));
  std::mt19937_64 rng(3);
  std::shuffle(parts.begin(), parts.end(), rng);
  EXPECT_EQ(combine_instances(parts, CombineMode::trials), combined);
}

TEST(Combine, CountAndProvenanceChecks) {
  auto parts = trial_parts("a", 3);
  parts.pop_back();
  EXPECT_THROW(combine_instances(parts, CombineMode::trials), InvalidInput);
  auto mixed = trial_parts("a", 3);
  mixed[4].object_id = "b";
  EXPECT_THROW(combine_instances(mixed, CombineMode::trials), InvalidInput);
  auto dup = trial_parts("a", 3);
  dup[4].trial_index = 3;
  EXPECT_THROW(combine_instances(dup, CombineMode::trials), InvalidInput);
  std::vector<FeatureVector> views;
  for (int v = 0; v < 8; ++v)
    views.push_back({"a", -1, -1, -1, v, {double(v), 1.0}});
  EXPECT_EQ(combine_instances(views, CombineMode::views).values.size(), 16u);
  views.pop_back();
  EXPECT_THROW(combine_instances(views, CombineMode::views), InvalidInput);
}

TEST(Fusion, ConcatenatesPerObject) {
  std::vector<FeatureVector> haptic{{"a", 0, 0, 0, -1, {1, 2, 3}},
                                    {"b", 0, 0, 0, -1, {4, 5, 6}},
                                    {"a", 1, 0, 0, -1, {7, 8, 9}}};
  std::vector<FeatureVector> visual{{"b", -1, -1, -1, -1, {0.5, 0.6}},
                                    {"a", -1, -1, -1, -1, {0.1, 0.2}}};
  auto fused = fuse_features(haptic, visual);
  ASSERT_EQ(fused.size(), 3u);
  EXPECT_EQ(fused[2].values, (std::vector<double>{7, 8, 9, 0.1, 0.2}));
  EXPECT_EQ(fused[1].values.size(), 5u);
  visual.pop_back();
  EXPECT_THROW(fuse_features(haptic, visual), InvalidInput);
}

TEST(Fusion, TrainsLinearClassifierOnJointFeatures) {
  // label = sign(h + v): each half alone is only partly informative
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal;
  std::vector<FeatureVector> haptic, visual;
  ObjectLabels labels;
  for (int o = 0; o < 40; ++o) {
    const std::string id = "o" + std::to_string(o);
    const double h = normal(rng), v = normal(rng);
    haptic.push_back({id, 0, 0, 0, -1, {h, normal(rng)}});
    visual.push_back({id, -1, -1, -1, -1, {v}});
    labels[id] = h + v > 0 ? 1 : -1;
  }
  TrainSchedule s;
  s.epochs = 300;
  auto r = fuse_and_train(haptic, visual, labels, s);
  EXPECT_EQ(r.haptic_length, 2u);
  EXPECT_EQ(r.visual_length, 1u);
  EXPECT_EQ(r.training.model.graph().input_shape, nn::Shape{3});
  EXPECT_EQ(r.training.curve.size(), 300u);
  EXPECT_EQ(r.training.curve.front().phase, nn::LossKind::hinge);
  auto fused = fuse_features(haptic, visual);
  std::vector<double> scores;
  std::vector<int> ys;
  for (const auto &f : fused) {
    scores.push_back(score_feature(r.training.model, f));
    ys.push_back(labels.at(f.object_id));
  }
  EXPECT_GT(eval::roc_auc(scores, ys), 0.95);

  // affine in its input, and blind to a zeroed visual half
  const auto &m = r.training.model;
  const double b = m.params().at("fc.bias").value[0];
  FeatureVector x = fused[0], ax = fused[0];
  for (auto &v : ax.values)
    v *= 2.5;
  EXPECT_NEAR(score_feature(m, ax), 2.5 * score_feature(m, x) - 1.5 * b, 1e-12);
  FeatureVector z1 = fused[0], z2 = fused[0];
  z1.values[2] = 0.0;
  z2.values[2] = 0.0;
  z2.object_id = "other";
  const auto &w = m.params().at("fc.weight").value;
  EXPECT_EQ(score_feature(m, z1), score_feature(m, z2));
  EXPECT_NEAR(score_feature(m, z1),
              b + w[0] * z1.values[0] + w[1] * z1.values[1], 1e-12);
}
