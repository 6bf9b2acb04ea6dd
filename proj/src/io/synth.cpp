// SPDX-License-Identifier: Apache-2.0
#include <hapnet/errors.hpp>
#include <hapnet/haptic/instance.hpp>
#include <hapnet/io/synth.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace hapnet::io {

namespace {

constexpr std::size_t kMinSqueeze = 155;
constexpr std::size_t kMaxSqueeze = 260;
constexpr double kVibrationCycles = 3.0; // per decimation window

/// Independent stream per (purpose, indices) so generation order is irrelevant.
std::mt19937_64 stream(std::uint64_t seed, std::uint64_t purpose,
                       std::uint64_t a = 0, std::uint64_t b = 0,
                       std::uint64_t c = 0, std::uint64_t d = 0) {
  std::uint64_t h = seed;
  for (std::uint64_t v : {purpose, a, b, c, d}) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
    h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
    h ^= h >> 31;
  }
  return std::mt19937_64(h);
}

enum Purpose : std::uint64_t {
  kSigns = 1,
  kMagnitudes,
  kTrialJitter,
  kLengths,
  kSamples,
  kMixing,
  kViews,
};

struct ChannelStyle {
  double offset;
  double amplitude;
};

// Rough BioTac-like operating points; only their distinctness matters.
constexpr std::array<ChannelStyle, 4> kScalarStyle = {
    ChannelStyle{2000.0, 40.0}, ChannelStyle{1800.0, 120.0},
    ChannelStyle{0.0, 15.0}, ChannelStyle{2500.0, 30.0}};
constexpr ChannelStyle kElectrodeStyle{3000.0, 60.0};
constexpr double kVibrationAmplitude = 25.0;

/// cos(t) cos(2 pi k i / n) + sin(t) sin(2 pi k i / n), i in [0, n).
std::vector<double> phase_signal(double theta, std::size_t cycles,
                                 std::size_t n) {
  std::vector<double> s(n);
  const double c = std::cos(theta), d = std::sin(theta);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 2.0 * std::numbers::pi * static_cast<double>(cycles) *
                     static_cast<double>(i) / static_cast<double>(n);
    s[i] = c * std::cos(w) + d * std::sin(w);
  }
  return s;
}

double visibility_angle(double visibility, double z) {
  return std::numbers::pi / 3.0 * std::tanh(visibility * z);
}

} // namespace

void SynthConfig::validate() const {
  // Four objects is the least that can hold two of each class per adjective.
  if (objects < 4 || trials < 1)
    throw InvalidSpec("synth: need at least 4 objects and 1 trial");
  if (!(noise >= 0.0) || !std::isfinite(noise))
    throw InvalidSpec("synth: noise must be finite and non-negative");
  if (!(margin >= 0.0))
    throw InvalidSpec("synth: margin must be non-negative");
  if (factors == 0)
    throw InvalidSpec("synth: need at least one latent factor");
  if (informativeness.size() != factors)
    throw InvalidSpec("synth: informativeness has " +
                      std::to_string(informativeness.size()) + " rows for " +
                      std::to_string(factors) + " factors");
  for (const auto &r : rules)
    if (r.primary >= factors || r.secondary >= factors)
      throw InvalidSpec("synth: label rule refers to a missing factor");
  if (base_length < haptic::kInstanceLength + haptic::kOffsets)
    throw InvalidSpec("synth: base length must be at least " +
                      std::to_string(haptic::kInstanceLength +
                                     haptic::kOffsets));
  if (grid_height == 0 || grid_width == 0 || grid_channels == 0)
    throw InvalidSpec("synth: feature grid dimensions must be positive");
}

SynthConfig synth_preset(std::string_view name, std::size_t objects,
                         std::uint64_t seed) {
  SynthConfig c;
  c.preset = std::string(name);
  c.objects = objects;
  c.seed = seed;
  c.factors = 8;
  if (name == "default") {
    c.noise = 0.3;
    c.informativeness = {{1.0, 0.2}, {1.0, 0.5}, {0.8, 0.8}, {0.5, 1.0},
                         {0.2, 1.0}, {1.0, 0.0}, {0.0, 1.0}, {0.6, 0.6}};
    for (std::size_t a = 0; a < eval::kAdjectives; ++a)
      c.rules[a] = {a % 8, (a + 3) % 8, 0.5};
  } else if (name == "separable") {
    c.noise = 0.1;
    c.margin = 0.5;
    c.informativeness.assign(8, {1.0, 1.0});
    for (std::size_t a = 0; a < eval::kAdjectives; ++a)
      c.rules[a] = {a % 8, a % 8, 0.0};
  } else if (name == "two-cue") {
    // even factors are felt, odd factors are seen; labels need one of each
    c.noise = 0.3;
    for (std::size_t f = 0; f < 8; ++f)
      c.informativeness.push_back(f % 2 == 0 ? std::array{1.0, 0.0}
                                             : std::array{0.0, 1.0});
    for (std::size_t a = 0; a < eval::kAdjectives; ++a)
      c.rules[a] = {2 * (a % 4), 2 * (a % 4) + 1, 1.0};
  } else {
    throw InvalidSpec("synth: unknown preset '" + std::string(name) + "'");
  }
  return c;
}

std::size_t slot_factor(const SynthConfig &config, std::size_t slot) {
  return slot % config.factors;
}

SynthDataset synth_generate(const SynthConfig &config) {
  config.validate();
  SynthDataset ds;
  ds.config = config;
  const std::size_t n_obj = config.objects, n_fac = config.factors;
  std::normal_distribution<double> normal;

  for (std::size_t o = 0; o < n_obj; ++o) {
    char id[32];
    std::snprintf(id, sizeof id, "obj%02zu", o);
    ds.objects.push_back({id, "synthetic object " + std::to_string(o)});
  }

  // Balanced signs per factor keep every adjective's classes populated.
  ds.factors.assign(n_obj, std::vector<double>(n_fac));
  for (std::size_t f = 0; f < n_fac; ++f) {
    std::vector<std::size_t> perm(n_obj);
    for (std::size_t o = 0; o < n_obj; ++o)
      perm[o] = o;
    auto srng = stream(config.seed, kSigns, f);
    std::shuffle(perm.begin(), perm.end(), srng);
    auto mrng = stream(config.seed, kMagnitudes, f);
    for (std::size_t r = 0; r < n_obj; ++r) {
      const double mag = std::abs(normal(mrng)) + config.margin;
      ds.factors[perm[r]][f] = r < (n_obj + 1) / 2 ? mag : -mag;
    }
  }

  for (std::size_t o = 0; o < n_obj; ++o) {
    eval::AdjectiveLabelSet row{ds.objects[o].id, {}};
    const auto &z = ds.factors[o];
    for (std::size_t a = 0; a < eval::kAdjectives; ++a) {
      const auto &r = config.rules[a];
      row.labels[a] = z[r.primary] + r.secondary_weight * z[r.secondary] > 0.0;
    }
    ds.labels.push_back(row);
  }

  // Electrode mixing matrix shared by every recording.
  std::array<std::array<double, 4>, haptic::kElectrodes> mix{};
  {
    auto rng = stream(config.seed, kMixing);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto &row : mix)
      for (auto &v : row)
        v = u(rng);
  }

  for (std::size_t o = 0; o < n_obj; ++o) {
    for (std::size_t t = 0; t < config.trials; ++t) {
      haptic::HapticTrial trial;
      trial.object_id = ds.objects[o].id;
      trial.trial_index = static_cast<int>(t);
      std::vector<double> z = ds.factors[o];
      auto jrng = stream(config.seed, kTrialJitter, o, t);
      for (auto &v : z)
        v += 0.5 * config.noise * normal(jrng);

      for (std::size_t fi = 0; fi < haptic::kFingers; ++fi) {
        for (auto ep : haptic::kAllEps) {
          const auto e = static_cast<std::size_t>(ep);
          std::size_t n = config.base_length;
          if (ep == haptic::Ep::squeeze) {
            auto lrng = stream(config.seed, kLengths, o, t);
            n = kMinSqueeze + lrng() % (kMaxSqueeze - kMinSqueeze + 1);
          }
          auto nrng = stream(config.seed, kSamples, o, t, fi, e);
          auto slot_signal = [&](std::size_t slot) {
            const std::size_t f = slot_factor(config, slot);
            const double theta =
                visibility_angle(config.informativeness[f][0], z[f]);
            return phase_signal(theta, 2 + slot % 4 + fi, n);
          };
          haptic::EpRecording rec;
          for (std::size_t c = 1; c < 4; ++c) {
            auto s = slot_signal(e * 8 + c);
            const auto st = kScalarStyle[c];
            for (auto &v : s)
              v = st.offset + st.amplitude * (v + config.noise * normal(nrng));
            rec.channels[haptic::channel_names()[c]] = std::move(s);
          }
          {
            // P_AC: the slow signal held over each window, plus a vibration
            // that averages out within every window.
            const auto slow = slot_signal(e * 8);
            const std::size_t m = haptic::kDecimation * n + (t + e) % 2;
            const auto st = kScalarStyle[0];
            std::vector<double> s(m);
            for (std::size_t i = 0; i < m; ++i) {
              const double vib =
                  std::sin(2.0 * std::numbers::pi * kVibrationCycles *
                           static_cast<double>(i % haptic::kDecimation) /
                           static_cast<double>(haptic::kDecimation));
              s[i] = st.offset +
                     st.amplitude * (slow[std::min(i / haptic::kDecimation,
                                                   n - 1)] +
                                     config.noise * normal(nrng)) +
                     kVibrationAmplitude * vib;
            }
            rec.channels["P_AC"] = std::move(s);
          }
          std::array<std::vector<double>, 4> latent;
          for (std::size_t j = 0; j < 4; ++j)
            latent[j] = slot_signal(e * 8 + 4 + j);
          for (std::size_t el = 0; el < haptic::kElectrodes; ++el) {
            std::vector<double> s(n);
            for (std::size_t i = 0; i < n; ++i) {
              double v = 0.0;
              for (std::size_t j = 0; j < 4; ++j)
                v += mix[el][j] * latent[j][i];
              s[i] = kElectrodeStyle.offset +
                     kElectrodeStyle.amplitude * (v + config.noise * normal(nrng));
            }
            rec.channels[haptic::electrode_name(el)] = std::move(s);
          }
          trial.fingers[fi][ep] = std::move(rec);
        }
      }
      ds.trials.push_back(std::move(trial));
    }
  }

  const std::size_t H = config.grid_height, W = config.grid_width,
                    C = config.grid_channels;
  for (std::size_t o = 0; o < n_obj; ++o) {
    for (std::size_t v = 0; v < visual::kViews; ++v) {
      auto rng = stream(config.seed, kViews, o, v);
      std::vector<double> z = ds.factors[o];
      for (auto &x : z)
        x += config.noise * normal(rng);
      const double gain = 0.8 + 0.05 * static_cast<double>(v);
      nn::Tensor grid({H, W, C});
      for (std::size_t h = 0; h < H; ++h)
        for (std::size_t w = 0; w < W; ++w)
          for (std::size_t c = 0; c < C; ++c) {
            const std::size_t f = c % n_fac;
            const double pattern =
                1.0 + 0.25 * std::cos(static_cast<double>(h + 2 * w + c));
            const double act =
                gain * (1.0 + 0.6 * std::tanh(config.informativeness[f][1] *
                                              z[f]) *
                                  pattern) +
                0.1 * config.noise * normal(rng);
            grid[(h * W + w) * C + c] = std::max(0.0, act);
          }
      ds.views.push_back({ds.objects[o].id, v, std::move(grid)});
    }
  }
  return ds;
}

} // namespace hapnet::io
