// SPDX-License-Identifier: Apache-2.0
/**
 * @file   loss.hpp
 * @brief  Binary classification losses on a scalar score and a +/-1 label.
 */
#pragma once

namespace hapnet::nn {

struct LossValue {
  double loss;
  double grad; ///< d loss / d score
};

/// log(1 + exp(-y s)), stable for large |s|.
LossValue logistic_loss(double score, int label);
/// max(0, 1 - y s); gradient at the kink is 0.
LossValue hinge_loss(double score, int label);

enum class LossKind { logistic, hinge };

LossValue evaluate_loss(LossKind kind, double score, int label);
const char *to_string(LossKind kind);

/// Logistic sigmoid without overflow for large |x|.
double sigmoid(double x);

} // namespace hapnet::nn
