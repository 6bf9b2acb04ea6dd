// SPDX-License-Identifier: Apache-2.0
#include <hapnet/errors.hpp>
#include <hapnet/haptic/instance.hpp>
#include <hapnet/haptic/signal.hpp>

namespace hapnet::haptic {

namespace {

std::vector<double> normalized(const EpRecording &rec, const std::string &name,
                               std::size_t &constant) {
  auto z = zscore_normalize(rec.channels.at(name));
  constant += z.constant ? 1 : 0;
  return std::move(z.values);
}

} // namespace

PreparedEp prepare_ep(const EpRecording &recording) {
  PreparedEp ep;
  ep.scalars[0] = decimate_pac(
      normalized(recording, "P_AC", ep.constant_channels), kDecimation);
  ep.scalars[1] = normalized(recording, "P_DC", ep.constant_channels);
  ep.scalars[2] = normalized(recording, "T_AC", ep.constant_channels);
  ep.scalars[3] = normalized(recording, "T_DC", ep.constant_channels);
  for (std::size_t e = 0; e < kElectrodes; ++e)
    ep.electrodes[e] =
        normalized(recording, electrode_name(e), ep.constant_channels);
  return ep;
}

PreparedFinger prepare_finger(const HapticTrial &trial, std::size_t finger) {
  auto gaps = recording_gaps(trial, finger);
  if (!gaps.empty()) {
    std::string msg = "incomplete recording:";
    for (const auto &g : gaps)
      msg += "\n  " + g;
    throw InvalidInput(msg);
  }
  PreparedFinger out;
  for (Ep ep : kAllEps)
    out[static_cast<std::size_t>(ep)] =
        prepare_ep(trial.fingers[finger].at(ep));
  return out;
}

PreparedTrial prepare_trial(const HapticTrial &trial) {
  PreparedTrial out;
  out.object_id = trial.object_id;
  out.trial_index = trial.trial_index;
  for (std::size_t f = 0; f < kFingers; ++f)
    out.fingers[f] = prepare_finger(trial, f);
  return out;
}

nn::Tensor electrode_samples(std::span<const PreparedTrial> trials, Ep ep) {
  const auto e = static_cast<std::size_t>(ep);
  std::size_t rows = 0;
  for (const auto &t : trials)
    for (const auto &f : t.fingers)
      rows += f[e].length();
  if (rows == 0)
    throw InvalidInput("electrode_samples: no data for EP " +
                       std::string(ep_name(ep)));
  nn::Tensor out({rows, kElectrodes});
  std::size_t r = 0;
  for (const auto &t : trials)
    for (const auto &f : t.fingers) {
      const auto &rec = f[e];
      for (std::size_t i = 0; i < rec.length(); ++i, ++r)
        for (std::size_t c = 0; c < kElectrodes; ++c)
          out.at(r, c) = rec.electrodes[c][i];
    }
  return out;
}

PcaSet fit_pca_set(std::span<const PreparedTrial> trials, std::size_t k) {
  PcaSet set;
  for (Ep ep : kAllEps)
    set[static_cast<std::size_t>(ep)] =
        pca_fit(electrode_samples(trials, ep), k);
  return set;
}

InstanceMatrix assemble_instance(const PreparedTrial &trial,
                                 std::size_t finger, std::size_t offset,
                                 const PcaSet &pca) {
  if (finger >= kFingers)
    throw InvalidInput("assemble_instance: finger " + std::to_string(finger) +
                       " out of range");
  InstanceMatrix inst;
  inst.values = nn::Tensor({kInstanceChannels, kInstanceLength});
  inst.object_id = trial.object_id;
  inst.trial_index = trial.trial_index;
  inst.finger = finger;
  inst.offset = offset;

  auto put_row = [&](std::size_t row, const std::vector<double> &series) {
    auto r = resample_fixed(series, kInstanceLength, offset);
    std::copy(r.begin(), r.end(),
              inst.values.values().begin() +
                  static_cast<std::ptrdiff_t>(row * kInstanceLength));
  };

  for (Ep ep : kAllEps) {
    const auto e = static_cast<std::size_t>(ep);
    const PreparedEp &rec = trial.fingers[finger][e];
    const PcaModel &model = pca[e];
    if (model.dims() != kElectrodes || model.rank() != kPcaComponents)
      throw InvalidInput("assemble_instance: PCA for " +
                         std::string(ep_name(ep)) + " is not fitted");
    const std::size_t base = e * kChannelsPerEp;
    for (std::size_t s = 0; s < 4; ++s)
      put_row(base + s, rec.scalars[s]);

    const std::size_t n = rec.length();
    std::array<std::vector<double>, kPcaComponents> pcs;
    for (auto &p : pcs)
      p.resize(n);
    std::array<double, kElectrodes> column{};
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < kElectrodes; ++c)
        column[c] = rec.electrodes[c][i];
      auto coeffs = model.project(column);
      for (std::size_t j = 0; j < kPcaComponents; ++j)
        pcs[j][i] = coeffs[j];
    }
    for (std::size_t j = 0; j < kPcaComponents; ++j)
      put_row(base + 4 + j, pcs[j]);
  }
  return inst;
}

InstanceMatrix assemble_instance(const HapticTrial &trial, std::size_t finger,
                                 std::size_t offset, const PcaSet &pca) {
  PreparedTrial prepared;
  prepared.object_id = trial.object_id;
  prepared.trial_index = trial.trial_index;
  prepared.fingers[finger < kFingers ? finger : 0] =
      prepare_finger(trial, finger);
  return assemble_instance(prepared, finger, offset, pca);
}

std::vector<InstanceMatrix> augment(const PreparedTrial &trial,
                                    const PcaSet &pca) {
  std::vector<InstanceMatrix> out;
  out.reserve(kFingers * kOffsets);
  for (std::size_t f = 0; f < kFingers; ++f)
    for (std::size_t o = 0; o < kOffsets; ++o)
      out.push_back(assemble_instance(trial, f, o, pca));
  return out;
}

std::vector<InstanceMatrix> augment(const HapticTrial &trial,
                                    const PcaSet &pca) {
  return augment(prepare_trial(trial), pca);
}

} // namespace hapnet::haptic
