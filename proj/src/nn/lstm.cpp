// SPDX-License-Identifier: Apache-2.0
#include <hapnet/errors.hpp>
#include <hapnet/nn/loss.hpp>
#include <hapnet/nn/lstm.hpp>

#include <cmath>

namespace hapnet::nn {

LstmParams LstmParams::zeros(std::size_t input_size, std::size_t hidden_size) {
  return {Tensor({4 * hidden_size, input_size}),
          Tensor({4 * hidden_size, hidden_size}), Tensor({4 * hidden_size}),
          hidden_size};
}

void LstmParams::validate(std::size_t input_size) const {
  const std::size_t H = hidden_size;
  if (H == 0)
    throw InvalidSpec("lstm: hidden_size must be positive");
  if (input_weights.shape() != Shape{4 * H, input_size})
    throw InvalidSpec("lstm: input weights " +
                      shape_string(input_weights.shape()) + ", expected " +
                      shape_string({4 * H, input_size}));
  if (hidden_weights.shape() != Shape{4 * H, H})
    throw InvalidSpec("lstm: hidden weights " +
                      shape_string(hidden_weights.shape()) + ", expected " +
                      shape_string({4 * H, H}));
  if (bias.shape() != Shape{4 * H})
    throw InvalidSpec("lstm: bias " + shape_string(bias.shape()));
}

Tensor LstmTrace::final_hidden() const {
  std::vector<double> h(hiddens.end() - static_cast<std::ptrdiff_t>(hidden),
                        hiddens.end());
  return Tensor::from(std::move(h));
}

LstmTrace lstm_forward_trace(const Tensor &sequence, const LstmParams &params) {
  if (sequence.rank() != 2 || sequence.empty())
    throw InvalidInput("lstm: expected a non-empty [T, D] sequence, got " +
                       shape_string(sequence.shape()));
  const std::size_t T = sequence.dim(0), D = sequence.dim(1);
  params.validate(D);
  const std::size_t H = params.hidden_size;

  LstmTrace tr;
  tr.steps = T;
  tr.hidden = H;
  tr.gates.assign(T * 4 * H, 0.0);
  tr.cells.assign((T + 1) * H, 0.0);
  tr.hiddens.assign((T + 1) * H, 0.0);

  const double *wx = params.input_weights.values().data();
  const double *wh = params.hidden_weights.values().data();
  const double *x = sequence.values().data();
  std::vector<double> pre(4 * H);

  for (std::size_t t = 0; t < T; ++t) {
    const double *xt = x + t * D;
    const double *hprev = tr.hiddens.data() + t * H;
    const double *cprev = tr.cells.data() + t * H;
    for (std::size_t r = 0; r < 4 * H; ++r) {
      double acc = params.bias[r];
      const double *rx = wx + r * D;
      for (std::size_t d = 0; d < D; ++d)
        acc += rx[d] * xt[d];
      const double *rh = wh + r * H;
      for (std::size_t j = 0; j < H; ++j)
        acc += rh[j] * hprev[j];
      pre[r] = acc;
    }
    double *gate = tr.gates.data() + t * 4 * H;
    double *c = tr.cells.data() + (t + 1) * H;
    double *h = tr.hiddens.data() + (t + 1) * H;
    for (std::size_t j = 0; j < H; ++j) {
      const double i = sigmoid(pre[j]);
      const double f = sigmoid(pre[H + j]);
      const double o = sigmoid(pre[2 * H + j]);
      const double g = std::tanh(pre[3 * H + j]);
      gate[j] = i;
      gate[H + j] = f;
      gate[2 * H + j] = o;
      gate[3 * H + j] = g;
      c[j] = f * cprev[j] + i * g;
      h[j] = o * std::tanh(c[j]);
    }
  }
  return tr;
}

Tensor lstm_forward(const Tensor &sequence, const LstmParams &params) {
  return lstm_forward_trace(sequence, params).final_hidden();
}

LstmGradients lstm_backward(const Tensor &sequence, const LstmParams &params,
                            const LstmTrace &trace, const Tensor &grad_hidden) {
  const std::size_t T = sequence.dim(0), D = sequence.dim(1);
  const std::size_t H = params.hidden_size;
  params.validate(D);
  if (trace.steps != T || trace.hidden != H)
    throw InvalidSpec("lstm_backward: trace does not match sequence");
  if (grad_hidden.size() != H)
    throw InvalidSpec("lstm_backward: grad_hidden has " +
                      std::to_string(grad_hidden.size()) +
                      " values, expected " + std::to_string(H));

  LstmGradients g{Tensor(sequence.shape()), Tensor({4 * H, D}),
                  Tensor({4 * H, H}), Tensor({4 * H})};
  const double *wx = params.input_weights.values().data();
  const double *wh = params.hidden_weights.values().data();
  const double *x = sequence.values().data();
  double *gwx = g.input_weights.values().data();
  double *gwh = g.hidden_weights.values().data();
  double *gx = g.input.values().data();

  std::vector<double> dh(grad_hidden.values().begin(),
                         grad_hidden.values().end());
  std::vector<double> dc(H, 0.0), da(4 * H), dh_prev(H);

  for (std::size_t t = T; t-- > 0;) {
    const double *gate = trace.gates.data() + t * 4 * H;
    const double *c = trace.cells.data() + (t + 1) * H;
    const double *cprev = trace.cells.data() + t * H;
    const double *hprev = trace.hiddens.data() + t * H;
    const double *xt = x + t * D;

    for (std::size_t j = 0; j < H; ++j) {
      const double i = gate[j], f = gate[H + j], o = gate[2 * H + j],
                   gg = gate[3 * H + j];
      const double tc = std::tanh(c[j]);
      dc[j] += dh[j] * o * (1.0 - tc * tc);
      da[j] = dc[j] * gg * i * (1.0 - i);
      da[H + j] = dc[j] * cprev[j] * f * (1.0 - f);
      da[2 * H + j] = dh[j] * tc * o * (1.0 - o);
      da[3 * H + j] = dc[j] * i * (1.0 - gg * gg);
      dc[j] *= f;
    }

    std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
    double *gxt = gx + t * D;
    for (std::size_t r = 0; r < 4 * H; ++r) {
      const double a = da[r];
      g.bias[r] += a;
      const double *rx = wx + r * D;
      double *grx = gwx + r * D;
      for (std::size_t d = 0; d < D; ++d) {
        grx[d] += a * xt[d];
        gxt[d] += a * rx[d];
      }
      const double *rh = wh + r * H;
      double *grh = gwh + r * H;
      for (std::size_t j = 0; j < H; ++j) {
        grh[j] += a * hprev[j];
        dh_prev[j] += a * rh[j];
      }
    }
    dh.swap(dh_prev);
  }
  return g;
}

} // namespace hapnet::nn
