// SPDX-License-Identifier: Apache-2.0
#include <hapnet/errors.hpp>
#include <hapnet/haptic/signal.hpp>

#include <cmath>
#include <string>

namespace hapnet::haptic {

ZScored zscore_normalize(std::span<const double> series) {
  if (series.empty())
    throw InvalidInput("zscore_normalize: empty series");
  const double n = static_cast<double>(series.size());
  double mean = 0.0;
  for (double v : series)
    mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : series)
    var += (v - mean) * (v - mean);
  var /= n;
  ZScored out{std::vector<double>(series.size(), 0.0), false};
  const double sigma = std::sqrt(var);
  if (!(sigma > 0.0)) {
    out.constant = true;
    return out;
  }
  for (std::size_t i = 0; i < series.size(); ++i)
    out.values[i] = (series[i] - mean) / sigma;
  return out;
}

std::vector<double> decimate_pac(std::span<const double> series,
                                 std::size_t factor) {
  if (factor == 0)
    throw InvalidSpec("decimate_pac: factor must be positive");
  if (series.size() < factor)
    throw InvalidInput("decimate_pac: " + std::to_string(series.size()) +
                       " samples is shorter than one window of " +
                       std::to_string(factor));
  const std::size_t windows = series.size() / factor;
  std::vector<double> out(windows);
  for (std::size_t w = 0; w < windows; ++w) {
    double s = 0.0;
    for (std::size_t i = 0; i < factor; ++i)
      s += series[w * factor + i];
    out[w] = s / static_cast<double>(factor);
  }
  return out;
}

std::size_t resample_index(std::size_t j, std::size_t len, std::size_t length,
                           std::size_t offset) {
  if (length <= 1)
    return offset;
  const std::size_t span = len - 1 - offset;
  const std::size_t den = length - 1;
  // round-half-up of j * span / den in exact integer arithmetic
  return offset + (2 * j * span + den) / (2 * den);
}

std::vector<double> resample_fixed(std::span<const double> series,
                                   std::size_t length, std::size_t offset) {
  if (length == 0)
    throw InvalidSpec("resample_fixed: target length must be positive");
  if (series.size() < length + offset)
    throw InvalidInput("resample_fixed: series of " +
                       std::to_string(series.size()) +
                       " samples is too short for length " +
                       std::to_string(length) + " at offset " +
                       std::to_string(offset));
  std::vector<double> out(length);
  for (std::size_t j = 0; j < length; ++j)
    out[j] = series[resample_index(j, series.size(), length, offset)];
  return out;
}

} // namespace hapnet::haptic
