// SPDX-License-Identifier: Apache-2.0
/**
 * @file   electrodes.hpp
 * @brief  Electrode matrices driven by a known low-dimensional latent.
 */
#pragma once

#include <hapnet/nn/tensor.hpp>

#include <random>
#include <vector>

namespace hapnet::testing {

/// [N, 19] electrodes = 4-dim latent through a fixed mixing plus noise.
inline nn::Tensor latent_electrodes(std::size_t n, double noise,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> mix(19 * 4);
  for (auto &v : mix)
    v = g(rng);
  nn::Tensor m({n, 19});
  for (std::size_t i = 0; i < n; ++i) {
    double z[4];
    for (auto &v : z)
      v = g(rng);
    for (std::size_t e = 0; e < 19; ++e) {
      double s = 0.0;
      for (std::size_t k = 0; k < 4; ++k)
        s += mix[e * 4 + k] * z[k];
      m.at(i, e) = s + noise * g(rng);
    }
  }
  return m;
}

} // namespace hapnet::testing
