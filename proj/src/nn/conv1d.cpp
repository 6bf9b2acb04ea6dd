// SPDX-License-Identifier: Apache-2.0
#include <hapnet/errors.hpp>
#include <hapnet/nn/conv1d.hpp>

#include <vector>

namespace hapnet::nn {

void ConvSpec::validate() const {
  if (groups == 0)
    throw InvalidSpec("conv1d: groups must be positive");
  if (in_channels == 0 || out_channels == 0)
    throw InvalidSpec("conv1d: channel counts must be positive");
  if (in_channels % groups != 0 || out_channels % groups != 0)
    throw InvalidSpec("conv1d: channels (" + std::to_string(in_channels) +
                      " in, " + std::to_string(out_channels) +
                      " out) not divisible by groups " +
                      std::to_string(groups));
  if (kernel_len == 0 || stride == 0)
    throw InvalidSpec("conv1d: kernel_len and stride must be >= 1");
}

std::size_t ConvSpec::output_length(std::size_t input_len) const {
  const std::size_t padded = input_len + 2 * pad;
  if (padded < kernel_len)
    throw InvalidInput("conv1d: padded length " + std::to_string(padded) +
                       " shorter than kernel " + std::to_string(kernel_len));
  return (padded - kernel_len) / stride + 1;
}

Shape ConvSpec::weight_shape() const {
  return {out_channels, in_channels / groups, kernel_len};
}

std::size_t ConvSpec::weight_count() const {
  return out_channels * (in_channels / groups) * kernel_len;
}

namespace {

void check_params(const ConvSpec &spec, const LayerParams &params) {
  if (params.weights.shape() != spec.weight_shape())
    throw InvalidSpec("conv1d: weight shape " +
                      shape_string(params.weights.shape()) + ", expected " +
                      shape_string(spec.weight_shape()));
  if (params.bias.shape() != Shape{spec.out_channels})
    throw InvalidSpec("conv1d: bias shape " +
                      shape_string(params.bias.shape()) + ", expected [" +
                      std::to_string(spec.out_channels) + "]");
}

void check_input(const Tensor &input, const ConvSpec &spec) {
  if (input.rank() != 2 || input.dim(0) != spec.in_channels)
    throw InvalidSpec("conv1d: input shape " + shape_string(input.shape()) +
                      " does not match " + std::to_string(spec.in_channels) +
                      " input channels");
}

/// Output positions t whose tap k lands inside [0, len): t in [lo, hi).
struct TapRange {
  std::size_t lo, hi;
};

TapRange valid_outputs(std::size_t k, std::size_t pad, std::size_t stride,
                       std::size_t len, std::size_t t_out) {
  // Need 0 <= t*stride + k - pad < len.
  std::size_t lo = 0;
  if (k < pad)
    lo = (pad - k + stride - 1) / stride;
  std::size_t hi = 0;
  if (len + pad > k)
    hi = (len + pad - k - 1) / stride + 1;
  if (hi > t_out)
    hi = t_out;
  if (lo > hi)
    lo = hi;
  return {lo, hi};
}

} // namespace

Tensor conv1d_forward(const Tensor &input, const ConvSpec &spec,
                      const LayerParams &params) {
  spec.validate();
  check_input(input, spec);
  check_params(spec, params);

  const std::size_t len = input.dim(1);
  const std::size_t t_out = spec.output_length(len);
  const std::size_t cin_g = spec.in_channels / spec.groups;
  const std::size_t cout_g = spec.out_channels / spec.groups;
  const std::size_t K = spec.kernel_len;

  Tensor out({spec.out_channels, t_out});
  const double *x = input.values().data();
  const double *w = params.weights.values().data();
  double *y = out.values().data();

  // Per output element the accumulation order is: bias, then input channel
  // ascending, then tap ascending.
  for (std::size_t o = 0; o < spec.out_channels; ++o) {
    const std::size_t g = o / cout_g;
    double *yo = y + o * t_out;
    for (std::size_t t = 0; t < t_out; ++t)
      yo[t] = params.bias[o];
    for (std::size_t ci = 0; ci < cin_g; ++ci) {
      const double *xc = x + (g * cin_g + ci) * len;
      const double *wk = w + (o * cin_g + ci) * K;
      for (std::size_t k = 0; k < K; ++k) {
        const auto [lo, hi] = valid_outputs(k, spec.pad, spec.stride, len, t_out);
        const double wv = wk[k];
        for (std::size_t t = lo; t < hi; ++t)
          yo[t] += wv * xc[t * spec.stride + k - spec.pad];
      }
    }
  }
  return out;
}

ConvGradients conv1d_backward(const Tensor &input, const ConvSpec &spec,
                              const LayerParams &params,
                              const Tensor &grad_out) {
  spec.validate();
  check_input(input, spec);
  check_params(spec, params);

  const std::size_t len = input.dim(1);
  const std::size_t t_out = spec.output_length(len);
  if (grad_out.shape() != Shape{spec.out_channels, t_out})
    throw InvalidSpec("conv1d_backward: grad_out shape " +
                      shape_string(grad_out.shape()) + ", expected " +
                      shape_string({spec.out_channels, t_out}));

  const std::size_t cin_g = spec.in_channels / spec.groups;
  const std::size_t cout_g = spec.out_channels / spec.groups;
  const std::size_t K = spec.kernel_len;

  ConvGradients grads{Tensor(input.shape()), Tensor(spec.weight_shape()),
                      Tensor({spec.out_channels})};
  const double *x = input.values().data();
  const double *w = params.weights.values().data();
  const double *gy = grad_out.values().data();
  double *gx = grads.input.values().data();
  double *gw = grads.weights.values().data();

  for (std::size_t o = 0; o < spec.out_channels; ++o) {
    const std::size_t g = o / cout_g;
    const double *go = gy + o * t_out;
    double sum = 0.0;
    for (std::size_t t = 0; t < t_out; ++t)
      sum += go[t];
    grads.bias[o] = sum;
    for (std::size_t ci = 0; ci < cin_g; ++ci) {
      const std::size_t c = g * cin_g + ci;
      const double *xc = x + c * len;
      double *gxc = gx + c * len;
      for (std::size_t k = 0; k < K; ++k) {
        const auto [lo, hi] = valid_outputs(k, spec.pad, spec.stride, len, t_out);
        const std::size_t widx = (o * cin_g + ci) * K + k;
        const double wv = w[widx];
        double acc = 0.0;
        for (std::size_t t = lo; t < hi; ++t) {
          const std::size_t src = t * spec.stride + k - spec.pad;
          acc += go[t] * xc[src];
          gxc[src] += wv * go[t];
        }
        gw[widx] = acc;
      }
    }
  }
  return grads;
}

} // namespace hapnet::nn
