// SPDX-License-Identifier: Apache-2.0
#include <hapnet/errors.hpp>
#include <hapnet/nn/layers.hpp>

#include <cmath>

namespace hapnet::nn {

Tensor relu(const Tensor &input) {
  Tensor out = input;
  for (auto &v : out.values())
    v = v > 0.0 ? v : 0.0;
  return out;
}

Tensor relu_backward(const Tensor &input, const Tensor &grad_out) {
  if (input.shape() != grad_out.shape())
    throw InvalidSpec("relu_backward: shape mismatch " +
                      shape_string(input.shape()) + " vs " +
                      shape_string(grad_out.shape()));
  Tensor out = grad_out;
  for (std::size_t i = 0; i < out.size(); ++i)
    if (!(input[i] > 0.0))
      out[i] = 0.0;
  return out;
}

namespace {
void check_ip(const Tensor &input, const LayerParams &params) {
  if (params.weights.rank() != 2)
    throw InvalidSpec("inner_product: weights must be rank 2, got " +
                      shape_string(params.weights.shape()));
  if (params.weights.dim(1) != input.size())
    throw InvalidSpec("inner_product: weight shape " +
                      shape_string(params.weights.shape()) +
                      " incompatible with input of " +
                      std::to_string(input.size()) + " values");
  if (params.bias.shape() != Shape{params.weights.dim(0)})
    throw InvalidSpec("inner_product: bias shape " +
                      shape_string(params.bias.shape()));
}
} // namespace

Tensor inner_product(const Tensor &input, const LayerParams &params) {
  check_ip(input, params);
  const std::size_t M = params.weights.dim(0), D = params.weights.dim(1);
  Tensor out({M});
  const double *w = params.weights.values().data();
  const double *x = input.values().data();
  for (std::size_t m = 0; m < M; ++m) {
    double acc = params.bias[m];
    const double *row = w + m * D;
    for (std::size_t d = 0; d < D; ++d)
      acc += row[d] * x[d];
    out[m] = acc;
  }
  return out;
}

InnerProductGradients inner_product_backward(const Tensor &input,
                                             const LayerParams &params,
                                             const Tensor &grad_out) {
  check_ip(input, params);
  const std::size_t M = params.weights.dim(0), D = params.weights.dim(1);
  if (grad_out.size() != M)
    throw InvalidSpec("inner_product_backward: grad_out has " +
                      std::to_string(grad_out.size()) + " values, expected " +
                      std::to_string(M));
  InnerProductGradients g{Tensor(input.shape()), Tensor({M, D}), Tensor({M})};
  const double *w = params.weights.values().data();
  const double *x = input.values().data();
  double *gx = g.input.values().data();
  double *gw = g.weights.values().data();
  for (std::size_t m = 0; m < M; ++m) {
    const double gm = grad_out[m];
    g.bias[m] = gm;
    const double *row = w + m * D;
    double *grow = gw + m * D;
    for (std::size_t d = 0; d < D; ++d) {
      grow[d] = gm * x[d];
      gx[d] += gm * row[d];
    }
  }
  return g;
}

Tensor avg_pool(const Tensor &featmap) {
  if (featmap.rank() < 1 || featmap.empty())
    throw InvalidInput("avg_pool: empty feature map");
  const std::size_t C = featmap.shape().back();
  const std::size_t positions = featmap.size() / C;
  Tensor out({C});
  for (std::size_t p = 0; p < positions; ++p)
    for (std::size_t c = 0; c < C; ++c)
      out[c] += featmap[p * C + c];
  for (auto &v : out.values())
    v /= static_cast<double>(positions);
  return out;
}

Normalized l2_normalize(const Tensor &v) {
  double sq = 0.0;
  for (double x : v.values())
    sq += x * x;
  Normalized r{v, false};
  if (sq == 0.0) {
    r.value.fill(0.0);
    r.degenerate = true;
    return r;
  }
  const double norm = std::sqrt(sq);
  for (auto &x : r.value.values())
    x /= norm;
  return r;
}

} // namespace hapnet::nn
