// SPDX-License-Identifier: Apache-2.0
#include <hapnet/errors.hpp>
#include <hapnet/model/train.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace hapnet::model {

void TrainSchedule::validate() const {
  if (epochs + finetune_epochs == 0)
    throw InvalidSpec("schedule: no epochs to run");
  if (batch_size == 0)
    throw InvalidSpec("schedule: batch size must be positive");
  if (!(lr > 0.0) || !std::isfinite(lr))
    throw InvalidSpec("schedule: learning rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0))
    throw InvalidSpec("schedule: momentum must lie in [0, 1)");
}

TrainSchedule TrainSchedule::hinge_only() const {
  TrainSchedule s = *this;
  s.finetune_epochs = epochs;
  s.epochs = 0;
  s.reinit_classifier = false;
  return s;
}

double mean_loss(const Network &model, nn::LossKind kind,
                 std::span<const nn::Tensor> inputs,
                 std::span<const int> labels) {
  double total = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i)
    total += nn::evaluate_loss(kind, model.score(inputs[i]), labels[i]).loss;
  return total / static_cast<double>(inputs.size());
}

namespace {

/// Finite and still finite once rounded to the 32-bit storage format.
bool params_finite(const nn::ParameterSet &ps) {
  auto storable = [](const nn::Tensor &t) {
    for (double v : t.values())
      if (!std::isfinite(static_cast<float>(v)))
        return false;
    return true;
  };
  for (const auto &[name, p] : ps)
    if (!storable(p.value) || !storable(p.velocity))
      return false;
  return true;
}

/// Runs one phase; returns false (with the model rolled back) on divergence.
bool run_phase(Network &model, nn::LossKind kind, std::size_t epochs,
               std::span<const nn::Tensor> inputs, std::span<const int> labels,
               const TrainSchedule &s, const std::vector<std::string> &trainable,
               std::mt19937_64 &rng, TrainResult &out) {
  const std::size_t n = inputs.size();
  const std::size_t batch = std::min(s.batch_size, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 1; epoch <= epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(n, start + batch);
      const double scale = 1.0 / static_cast<double>(stop - start);
      nn::GradientSet grads;
      for (std::size_t b = start; b < stop; ++b) {
        const std::size_t i = order[b];
        auto trace = model.forward(inputs[i]);
        auto lv = nn::evaluate_loss(kind, trace.score(), labels[i]);
        if (!std::isfinite(lv.loss)) {
          out.diverged = true;
          out.diagnostic = std::string("non-finite ") + nn::to_string(kind) +
                           " loss in epoch " + std::to_string(epoch);
          return false;
        }
        epoch_loss += lv.loss;
        model.backward(trace, lv.grad * scale, grads, trainable);
      }
      const nn::ParameterSet before = model.params();
      try {
        nn::sgd_momentum_step(model.params(), grads, s.lr, s.momentum);
      } catch (const nn::TrainingDiverged &e) {
        out.diverged = true;
        out.diagnostic = std::string(e.what()) + " in epoch " +
                         std::to_string(epoch);
        return false;
      }
      if (!params_finite(model.params())) {
        model.params() = before;
        out.diverged = true;
        out.diagnostic =
            "parameters overflowed in epoch " + std::to_string(epoch);
        return false;
      }
    }
    out.curve.push_back({kind, epoch, epoch_loss / static_cast<double>(n)});
  }
  return true;
}

} // namespace

TrainResult train(Network model, std::span<const nn::Tensor> inputs,
                  std::span<const int> labels, const TrainSchedule &schedule) {
  schedule.validate();
  if (inputs.empty())
    throw InvalidInput("train: no instances");
  if (inputs.size() != labels.size())
    throw InvalidInput("train: " + std::to_string(inputs.size()) +
                       " instances but " + std::to_string(labels.size()) +
                       " labels");
  for (int y : labels)
    if (y != 1 && y != -1)
      throw InvalidInput("train: labels must be -1 or +1, got " +
                         std::to_string(y));

  TrainResult out{std::move(model), {}, nn::LossKind::logistic, 0.0, false, {}};
  Network &net = out.model;
  std::mt19937_64 rng(schedule.seed ^ 0x5851f42d4c957f2dULL);

  bool ok = run_phase(net, nn::LossKind::logistic, schedule.epochs, inputs,
                      labels, schedule, {}, rng, out);
  if (ok && schedule.finetune_epochs > 0) {
    const std::string classifier = net.graph().classifier().name;
    if (schedule.reinit_classifier)
      net.initialize_layer(classifier, schedule.seed + 1);
    out.final_phase = nn::LossKind::hinge;
    std::vector<std::string> trainable;
    if (schedule.freeze_features)
      trainable.push_back(classifier);
    run_phase(net, nn::LossKind::hinge, schedule.finetune_epochs, inputs,
              labels, schedule, trainable, rng, out);
  }

  net.quantize_to_float();
  out.final_loss = mean_loss(net, out.final_phase, inputs, labels);
  return out;
}

} // namespace hapnet::model
