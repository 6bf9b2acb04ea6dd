// SPDX-License-Identifier: Apache-2.0
#include <hapnet/errors.hpp>
#include <hapnet/nn/loss.hpp>

#include <cmath>
#include <string>

namespace hapnet::nn {

namespace {
void check_label(int label) {
  if (label != 1 && label != -1)
    throw InvalidInput("loss: label must be -1 or +1, got " +
                       std::to_string(label));
}
} // namespace

double sigmoid(double x) {
  if (x >= 0.0)
    return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

LossValue logistic_loss(double score, int label) {
  check_label(label);
  const double margin = label * score;
  // log(1 + e^{-m}) = max(-m, 0) + log1p(e^{-|m|})
  const double loss =
      (margin > 0.0 ? 0.0 : -margin) + std::log1p(std::exp(-std::fabs(margin)));
  return {loss, -label * sigmoid(-margin)};
}

LossValue hinge_loss(double score, int label) {
  check_label(label);
  const double margin = label * score;
  if (margin < 1.0)
    return {1.0 - margin, static_cast<double>(-label)};
  return {0.0, 0.0};
}

LossValue evaluate_loss(LossKind kind, double score, int label) {
  return kind == LossKind::logistic ? logistic_loss(score, label)
                                    : hinge_loss(score, label);
}

const char *to_string(LossKind kind) {
  return kind == LossKind::logistic ? "logistic" : "hinge";
}

} // namespace hapnet::nn
