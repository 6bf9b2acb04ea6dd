// SPDX-License-Identifier: Apache-2.0
#include <hapnet/errors.hpp>
#include <hapnet/nn/init.hpp>

#include <cmath>
#include <random>

namespace hapnet::nn {

Tensor xavier_init(const Shape &shape, std::size_t fan_in, std::uint64_t seed) {
  if (fan_in == 0)
    throw InvalidSpec("xavier_init: fan_in must be >= 1");
  if (shape.empty())
    throw InvalidSpec("xavier_init: empty shape");
  Tensor out(shape);
  const double bound = std::sqrt(3.0 / static_cast<double>(fan_in));
  std::mt19937_64 rng(seed);
  // 53-bit mantissa draw in [0, 1); avoids library-specific distributions.
  for (auto &v : out.values()) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    v = (2.0 * u - 1.0) * bound;
  }
  return out;
}

} // namespace hapnet::nn
