// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <hapnet/nn/tensor.hpp>

#include <cstdint>

namespace hapnet::nn {

/// Uniform draw on [-sqrt(3/fan_in), +sqrt(3/fan_in)], reproducible per seed.
Tensor xavier_init(const Shape &shape, std::size_t fan_in, std::uint64_t seed);

} // namespace hapnet::nn
