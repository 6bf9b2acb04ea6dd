// SPDX-License-Identifier: Apache-2.0
/**
 * @file   instance.hpp
 * @brief  Assembly of the 32 x 150 network input from a raw trial.
 *
 * Per channel the pipeline is: z-score, decimate (P_AC only), project the
 * 19 electrodes onto the EP's principal components at every time step, then
 * subsample to 150 steps from the requested offset. Rows are stacked per EP
 * (squeeze, hold, slow slide, fast slide) as P_AC, P_DC, T_AC, T_DC,
 * E-pc1 ... E-pc4.
 */
#pragma once

#include <hapnet/haptic/pca.hpp>
#include <hapnet/haptic/trial.hpp>
#include <hapnet/nn/tensor.hpp>

#include <array>
#include <span>
#include <vector>

namespace hapnet::haptic {

inline constexpr std::size_t kInstanceLength = 150;
inline constexpr std::size_t kPcaComponents = 4;
inline constexpr std::size_t kChannelsPerEp = 4 + kPcaComponents;
inline constexpr std::size_t kInstanceChannels = kChannelsPerEp * 4;
inline constexpr std::size_t kOffsets = 5;

/// One (finger, EP) recording after z-scoring and P_AC decimation.
struct PreparedEp {
  std::array<std::vector<double>, 4> scalars; ///< P_AC, P_DC, T_AC, T_DC
  std::array<std::vector<double>, kElectrodes> electrodes;
  std::size_t constant_channels = 0;

  std::size_t length() const { return scalars[1].size(); }
};

using PreparedFinger = std::array<PreparedEp, 4>;

struct PreparedTrial {
  std::string object_id;
  int trial_index = 0;
  std::array<PreparedFinger, kFingers> fingers;
};

/// One PCA model per EP.
using PcaSet = std::array<PcaModel, 4>;

struct InstanceMatrix {
  nn::Tensor values; ///< [32, 150]
  std::string object_id;
  int trial_index = 0;
  std::size_t finger = 0;
  std::size_t offset = 0;
};

PreparedEp prepare_ep(const EpRecording &recording);
/// Throws InvalidInput listing every gap when the finger is incomplete.
PreparedFinger prepare_finger(const HapticTrial &trial, std::size_t finger);
PreparedTrial prepare_trial(const HapticTrial &trial);

/// Electrode vectors of every time step, [N, 19], for PCA fitting.
nn::Tensor electrode_samples(std::span<const PreparedTrial> trials, Ep ep);

/// Fits one PCA per EP over all fingers and time steps of @p trials.
PcaSet fit_pca_set(std::span<const PreparedTrial> trials,
                   std::size_t k = kPcaComponents);

InstanceMatrix assemble_instance(const PreparedTrial &trial,
                                 std::size_t finger, std::size_t offset,
                                 const PcaSet &pca);
InstanceMatrix assemble_instance(const HapticTrial &trial, std::size_t finger,
                                 std::size_t offset, const PcaSet &pca);

/// Both fingers times offsets 0..4: ten instances ordered finger-major.
std::vector<InstanceMatrix> augment(const PreparedTrial &trial,
                                    const PcaSet &pca);
std::vector<InstanceMatrix> augment(const HapticTrial &trial,
                                    const PcaSet &pca);

} // namespace hapnet::haptic
