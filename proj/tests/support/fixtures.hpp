// SPDX-License-Identifier: Apache-2.0
/**
 * @file   fixtures.hpp
 * @brief  Small hand-built raw trials for haptic pipeline tests.
 */
#pragma once

#include <hapnet/haptic/trial.hpp>

#include <cmath>
#include <random>

namespace hapnet::testing {

/// A complete trial whose channels are random walks (never constant).
inline haptic::HapticTrial random_trial(std::uint64_t seed,
                                        std::size_t base_len = 170,
                                        std::string object = "obj",
                                        int trial_index = 0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> step(0.0, 1.0);
  haptic::HapticTrial t;
  t.object_id = std::move(object);
  t.trial_index = trial_index;
  for (std::size_t f = 0; f < haptic::kFingers; ++f)
    for (haptic::Ep ep : haptic::kAllEps) {
      haptic::EpRecording rec;
      for (const auto &name : haptic::channel_names()) {
        const std::size_t n =
            name == "P_AC" ? base_len * haptic::kDecimation : base_len;
        std::vector<double> s(n);
        double level = 100.0 * step(rng);
        for (auto &v : s) {
          level += step(rng);
          v = level;
        }
        rec.channels[name] = std::move(s);
      }
      t.fingers[f][ep] = std::move(rec);
    }
  return t;
}

} // namespace hapnet::testing
