// SPDX-License-Identifier: Apache-2.0
#include <hapnet/haptic/trial.hpp>

#include <cstdlib>

namespace hapnet::haptic {

std::string_view ep_name(Ep ep) {
  switch (ep) {
  case Ep::squeeze:
    return "squeeze";
  case Ep::hold:
    return "hold";
  case Ep::slow_slide:
    return "slow_slide";
  case Ep::fast_slide:
    return "fast_slide";
  }
  return "unknown";
}

std::optional<Ep> parse_ep(std::string_view name) {
  for (Ep ep : kAllEps)
    if (ep_name(ep) == name)
      return ep;
  return std::nullopt;
}

std::string electrode_name(std::size_t index) {
  return "E" + std::to_string(index + 1);
}

const std::vector<std::string> &base_rate_channels() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n{"P_DC", "T_AC", "T_DC"};
    for (std::size_t e = 0; e < kElectrodes; ++e)
      n.push_back(electrode_name(e));
    return n;
  }();
  return names;
}

const std::vector<std::string> &channel_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n{"P_AC"};
    for (const auto &c : base_rate_channels())
      n.push_back(c);
    return n;
  }();
  return names;
}

std::vector<std::string> recording_gaps(const HapticTrial &trial,
                                        std::size_t finger) {
  std::vector<std::string> gaps;
  const std::string where = "object " + trial.object_id + " trial " +
                            std::to_string(trial.trial_index) + " finger " +
                            std::to_string(finger);
  if (finger >= kFingers) {
    gaps.push_back(where + ": no such finger");
    return gaps;
  }
  const auto &eps = trial.fingers[finger];
  for (Ep ep : kAllEps) {
    const std::string at = where + " " + std::string(ep_name(ep));
    auto it = eps.find(ep);
    if (it == eps.end()) {
      gaps.push_back(at + ": missing EP");
      continue;
    }
    const auto &ch = it->second.channels;
    std::size_t base_len = 0;
    bool have_base = false;
    for (const auto &name : channel_names()) {
      auto c = ch.find(name);
      if (c == ch.end()) {
        gaps.push_back(at + ": missing channel " + name);
        continue;
      }
      if (c->second.empty()) {
        gaps.push_back(at + ": empty channel " + name);
        continue;
      }
      if (name == "P_AC")
        continue;
      if (!have_base) {
        base_len = c->second.size();
        have_base = true;
      } else if (c->second.size() != base_len) {
        gaps.push_back(at + ": channel " + name + " has " +
                       std::to_string(c->second.size()) +
                       " samples, expected " + std::to_string(base_len));
      }
    }
    auto pac = ch.find("P_AC");
    if (have_base && pac != ch.end() && !pac->second.empty()) {
      const long expect = static_cast<long>(kDecimation * base_len);
      const long got = static_cast<long>(pac->second.size());
      if (std::labs(got - expect) > 1)
        gaps.push_back(at + ": P_AC has " + std::to_string(got) +
                       " samples, expected " + std::to_string(expect) +
                       " (22x the 100 Hz length, +/-1)");
    }
  }
  return gaps;
}

} // namespace hapnet::haptic
