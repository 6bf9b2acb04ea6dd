// SPDX-License-Identifier: Apache-2.0
#include "binary.hpp"

#include <hapnet/errors.hpp>
#include <hapnet/io/checkpoint.hpp>
#include <hapnet/io/files.hpp>

namespace hapnet::io {

namespace {

constexpr std::string_view kMagic = "HNCK";
constexpr std::uint32_t kVersion = 1;

nlohmann::json schedule_json(const model::TrainSchedule &s) {
  return {{"epochs", s.epochs},
          {"finetune_epochs", s.finetune_epochs},
          {"batch_size", s.batch_size},
          {"lr", s.lr},
          {"momentum", s.momentum},
          {"seed", s.seed},
          {"freeze_features", s.freeze_features},
          {"reinit_classifier", s.reinit_classifier}};
}

model::TrainSchedule schedule_from(const nlohmann::json &j) {
  model::TrainSchedule s;
  s.epochs = j.at("epochs").get<std::size_t>();
  s.finetune_epochs = j.at("finetune_epochs").get<std::size_t>();
  s.batch_size = j.at("batch_size").get<std::size_t>();
  s.lr = j.at("lr").get<double>();
  s.momentum = j.at("momentum").get<double>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.freeze_features = j.at("freeze_features").get<bool>();
  s.reinit_classifier = j.at("reinit_classifier").get<bool>();
  return s;
}

nn::LossKind loss_kind(const std::string &s) {
  if (s == "logistic")
    return nn::LossKind::logistic;
  if (s == "hinge")
    return nn::LossKind::hinge;
  throw InvalidInput("unknown loss '" + s + "'");
}

} // namespace

Checkpoint make_checkpoint(const model::TrainResult &result,
                           const model::TrainSchedule &schedule,
                           nlohmann::json extra) {
  CheckpointMeta m;
  m.schedule = schedule;
  m.final_phase = result.final_phase;
  m.final_loss = result.final_loss;
  m.curve = result.curve;
  m.diverged = result.diverged;
  m.diagnostic = result.diagnostic;
  m.extra = std::move(extra);
  return {result.model, std::move(m)};
}

std::string encode_checkpoint(const Checkpoint &ckpt) {
  nlohmann::json header;
  header["graph"] = nlohmann::json::parse(model::graph_to_json(ckpt.model.graph()));
  const auto &m = ckpt.meta;
  nlohmann::json curve = nlohmann::json::array();
  for (const auto &p : m.curve)
    curve.push_back({nn::to_string(p.phase), p.epoch, p.loss});
  header["meta"] = {{"schedule", schedule_json(m.schedule)},
                    {"final_phase", nn::to_string(m.final_phase)},
                    {"final_loss", m.final_loss},
                    {"curve", curve},
                    {"diverged", m.diverged},
                    {"diagnostic", m.diagnostic},
                    {"extra", m.extra}};

  detail::ByteWriter w;
  w.raw(kMagic);
  w.u32(kVersion);
  w.str(header.dump());
  const auto &params = ckpt.model.params();
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (const auto &[name, p] : params) {
    w.str(name);
    w.u32(static_cast<std::uint32_t>(p.value.rank()));
    for (auto d : p.value.shape())
      w.u32(static_cast<std::uint32_t>(d));
    for (double v : p.value.values())
      w.f32(v);
    for (double v : p.velocity.values())
      w.f32(v);
  }
  return w.bytes();
}

Checkpoint decode_checkpoint(std::string_view bytes, const std::string &where) {
  detail::ByteReader r(bytes, where);
  if (r.raw(4) != kMagic)
    throw UnsupportedFormat(where + ": not a checkpoint (bad magic)");
  const auto version = r.u32();
  if (version != kVersion)
    throw UnsupportedFormat(where + ": unsupported checkpoint version " +
                            std::to_string(version));
  const auto header_text = r.str(std::size_t{1} << 28);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_text);
  } catch (const nlohmann::json::exception &e) {
    throw UnsupportedFormat(where + ": corrupt header: " + e.what());
  }

  const std::size_t count = r.u32();
  nn::ParameterSet params;
  for (std::size_t i = 0; i < count; ++i) {
    auto name = r.str();
    const std::size_t rank = r.u32();
    if (rank == 0 || rank > 8)
      throw UnsupportedFormat(where + ": parameter '" + name + "' has rank " +
                              std::to_string(rank));
    nn::Shape shape;
    std::size_t n = 1;
    for (std::size_t d = 0; d < rank; ++d) {
      shape.push_back(r.u32());
      n *= shape.back();
      r.need(n);
    }
    r.need(n * 8);
    nn::Parameter p{nn::Tensor(shape), nn::Tensor(shape)};
    for (auto &v : p.value.values())
      v = r.f32();
    for (auto &v : p.velocity.values())
      v = r.f32();
    params.emplace(std::move(name), std::move(p));
  }
  r.expect_end();

  try {
    model::Network net(model::graph_from_json(header.at("graph").dump()));
    net.set_params(std::move(params));
    const auto &m = header.at("meta");
    CheckpointMeta meta;
    meta.schedule = schedule_from(m.at("schedule"));
    meta.final_phase = loss_kind(m.at("final_phase").get<std::string>());
    meta.final_loss = m.at("final_loss").get<double>();
    for (const auto &p : m.at("curve"))
      meta.curve.push_back({loss_kind(p.at(0).get<std::string>()),
                            p.at(1).get<std::size_t>(), p.at(2).get<double>()});
    meta.diverged = m.at("diverged").get<bool>();
    meta.diagnostic = m.at("diagnostic").get<std::string>();
    meta.extra = m.at("extra");
    return {std::move(net), std::move(meta)};
  } catch (const nlohmann::json::exception &e) {
    throw UnsupportedFormat(where + ": incomplete header: " + e.what());
  } catch (const InvalidSpec &e) {
    throw UnsupportedFormat(where + ": " + e.what());
  }
}

void save_checkpoint(const std::filesystem::path &path, const Checkpoint &ckpt) {
  write_file(path, encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path &path) {
  return decode_checkpoint(read_file(path), path.string());
}

nlohmann::json pca_to_json(const haptic::PcaSet &pca) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto &m : pca)
    out.push_back({{"shape", m.components.shape()},
                   {"mean", m.mean},
                   {"components", m.components.vector()},
                   {"explained_ratio", m.explained_ratio}});
  return out;
}

haptic::PcaSet pca_from_json(const nlohmann::json &j) {
  try {
    if (!j.is_array() || j.size() != 4)
      throw InvalidInput("PCA set must hold one model per EP");
    haptic::PcaSet out;
    for (std::size_t e = 0; e < 4; ++e) {
      const auto &m = j.at(e);
      out[e].mean = m.at("mean").get<std::vector<double>>();
      out[e].components = nn::Tensor(m.at("shape").get<nn::Shape>(),
                                     m.at("components").get<std::vector<double>>());
      out[e].explained_ratio = m.at("explained_ratio").get<std::vector<double>>();
    }
    return out;
  } catch (const nlohmann::json::exception &e) {
    throw InvalidInput(std::string("PCA description: ") + e.what());
  }
}

} // namespace hapnet::io
