// SPDX-License-Identifier: Apache-2.0
/**
 * @file   gradcheck.hpp
 * @brief  Central finite-difference oracle for analytic gradients.
 */
#pragma once

#include <hapnet/nn/tensor.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace hapnet::testing {

inline constexpr double kFdStep = 1e-5;
inline constexpr double kFdRelTol = 1e-4;

/// |a - n| / max(|a|, |n|, floor); the floor keeps exact zeros comparable.
inline double relative_error(double analytic, double numeric,
                             double floor = 1e-4) {
  const double denom =
      std::max({std::fabs(analytic), std::fabs(numeric), floor});
  return std::fabs(analytic - numeric) / denom;
}

/**
 * Perturbs each entry of @p x by +/-h, evaluates @p loss (which must read
 * @p x through its captured reference) and returns the worst relative error
 * against @p analytic.
 */
template <class Loss>
double max_gradient_error(nn::Tensor &x, const nn::Tensor &analytic,
                          Loss &&loss, double h = kFdStep) {
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double up = loss();
    x[i] = saved - h;
    const double down = loss();
    x[i] = saved;
    const double numeric = (up - down) / (2.0 * h);
    worst = std::max(worst, relative_error(analytic[i], numeric));
  }
  return worst;
}

inline nn::Tensor random_tensor(const nn::Shape &shape, std::mt19937_64 &rng,
                                double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  nn::Tensor t(shape);
  for (auto &v : t.values())
    v = dist(rng);
  return t;
}

/// sum_i w_i * y_i, the scalar used to turn a tensor output into a loss.
inline double dot(const nn::Tensor &a, const nn::Tensor &b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i] * b[i];
  return s;
}

} // namespace hapnet::testing
