// SPDX-License-Identifier: Apache-2.0
/**
 * @file   trial.hpp
 * @brief  Raw BioTac recordings: one trial of one object, both fingers, all
 *         four exploratory procedures.
 */
#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hapnet::haptic {

/// Exploratory procedures in their canonical channel-block order.
enum class Ep { squeeze = 0, hold = 1, slow_slide = 2, fast_slide = 3 };

inline constexpr std::array<Ep, 4> kAllEps = {Ep::squeeze, Ep::hold,
                                              Ep::slow_slide, Ep::fast_slide};
inline constexpr std::size_t kFingers = 2;
inline constexpr std::size_t kElectrodes = 19;
inline constexpr double kPacRateHz = 2200.0;
inline constexpr double kBaseRateHz = 100.0;
inline constexpr std::size_t kDecimation = 22;

std::string_view ep_name(Ep ep);
std::optional<Ep> parse_ep(std::string_view name);

/// P_AC, P_DC, T_AC, T_DC, E1 ... E19.
const std::vector<std::string> &channel_names();
/// Channels sampled at 100 Hz (everything except P_AC).
const std::vector<std::string> &base_rate_channels();
std::string electrode_name(std::size_t index); // 0-based -> "E1".."E19"

/// All channels of one (finger, EP) recording, keyed by channel name.
struct EpRecording {
  std::map<std::string, std::vector<double>> channels;
};

struct HapticTrial {
  std::string object_id;
  int trial_index = 0;
  std::array<std::map<Ep, EpRecording>, kFingers> fingers;
};

/**
 * Missing EPs/channels and length-invariant violations for one finger, as
 * human-readable strings. Empty when the recording is complete.
 */
std::vector<std::string> recording_gaps(const HapticTrial &trial,
                                        std::size_t finger);

} // namespace hapnet::haptic
