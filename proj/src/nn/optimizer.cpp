// SPDX-License-Identifier: Apache-2.0
#include <hapnet/nn/optimizer.hpp>

namespace hapnet::nn {

void sgd_momentum_step(ParameterSet &params, const GradientSet &grads,
                       double lr, double momentum) {
  for (const auto &[name, g] : grads) {
    auto it = params.find(name);
    if (it == params.end())
      throw InvalidSpec("sgd: gradient for unknown parameter '" + name + "'");
    if (it->second.value.shape() != g.shape())
      throw InvalidSpec("sgd: gradient shape " + shape_string(g.shape()) +
                        " does not match parameter '" + name + "' " +
                        shape_string(it->second.value.shape()));
    if (!g.all_finite())
      throw TrainingDiverged("non-finite gradient for parameter '" + name +
                             "'");
  }
  for (const auto &[name, g] : grads) {
    Parameter &p = params.at(name);
    if (p.velocity.shape() != p.value.shape())
      p.velocity = Tensor(p.value.shape());
    auto w = p.value.values();
    auto v = p.velocity.values();
    auto gv = g.values();
    for (std::size_t i = 0; i < w.size(); ++i) {
      v[i] = momentum * v[i] - lr * gv[i];
      w[i] += v[i];
    }
  }
}

} // namespace hapnet::nn
