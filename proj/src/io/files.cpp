// SPDX-License-Identifier: Apache-2.0
#include "binary.hpp"

#include <hapnet/errors.hpp>
#include <hapnet/io/files.hpp>

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace hapnet::io {

namespace {

constexpr std::string_view kTrialHeader = "#hapnet-trial 1";
constexpr std::string_view kVisualMagic = "HNVF";
constexpr std::string_view kTensorMagic = "HNTS";
constexpr std::uint32_t kVersion = 1;

/// Shortest text that reads back to the same 32-bit float.
void append_number(std::string &out, double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, static_cast<float>(v));
  out.append(buf, r.ptr);
}

double parse_number(std::string_view tok, const std::string &where,
                    std::size_t line) {
  // Files hold float32 text; parsing as float reproduces the stored value.
  float v = 0.0f;
  while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t'))
    tok.remove_prefix(1);
  while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t' ||
                          tok.back() == '\r'))
    tok.remove_suffix(1);
  auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || r.ec != std::errc() || r.ptr != tok.data() + tok.size() ||
      !std::isfinite(v))
    throw InvalidInput(where + " line " + std::to_string(line) +
                       ": bad number '" + std::string(tok) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto p = s.find(sep, start);
    out.push_back(s.substr(start, p - start));
    if (p == std::string_view::npos)
      break;
    start = p + 1;
  }
  return out;
}

} // namespace

std::string read_file(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad())
    throw IoError("cannot read '" + path.string() + "'");
  return ss.str();
}

void write_file(const fs::path &path, std::string_view bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec)
      throw IoError("cannot create '" + path.parent_path().string() +
                    "': " + ec.message());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw IoError("cannot write '" + tmp.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
      throw IoError("short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec)
    throw IoError("cannot rename to '" + path.string() + "': " + ec.message());
}

std::string format_trial_text(const haptic::EpRecording &rec) {
  const auto &base = haptic::base_rate_channels();
  for (const auto &name : haptic::channel_names())
    if (!rec.channels.count(name))
      throw InvalidInput("trial: missing channel " + name);
  const std::size_t n = rec.channels.at(base[0]).size();
  for (const auto &name : base)
    if (rec.channels.at(name).size() != n)
      throw InvalidInput("trial: channel " + name + " has " +
                         std::to_string(rec.channels.at(name).size()) +
                         " samples, expected " + std::to_string(n));
  std::string out(kTrialHeader);
  out += "\n#block P_AC\n";
  for (double v : rec.channels.at("P_AC")) {
    append_number(out, v);
    out += '\n';
  }
  out += "#block ";
  for (std::size_t c = 0; c < base.size(); ++c)
    out += (c ? "," : "") + base[c];
  out += '\n';
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < base.size(); ++c) {
      if (c)
        out += ',';
      append_number(out, rec.channels.at(base[c])[i]);
    }
    out += '\n';
  }
  return out;
}

haptic::EpRecording parse_trial_text(std::string_view text,
                                     const std::string &where) {
  haptic::EpRecording rec;
  std::vector<std::string> columns;
  std::size_t line_no = 0;
  bool header = false;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.remove_suffix(1);
    if (line.empty())
      continue;
    if (!header) {
      if (line != kTrialHeader)
        throw UnsupportedFormat(where + ": expected '" +
                                std::string(kTrialHeader) + "' header");
      header = true;
      continue;
    }
    if (line.rfind("#block ", 0) == 0) {
      columns.clear();
      for (auto name : split(line.substr(7), ',')) {
        std::string n(name);
        if (rec.channels.count(n))
          throw InvalidInput(where + " line " + std::to_string(line_no) +
                             ": channel " + n + " repeated");
        rec.channels[n];
        columns.push_back(std::move(n));
      }
      continue;
    }
    if (line.front() == '#')
      continue;
    if (columns.empty())
      throw InvalidInput(where + " line " + std::to_string(line_no) +
                         ": values before any #block line");
    auto toks = split(line, ',');
    if (toks.size() != columns.size())
      throw InvalidInput(where + " line " + std::to_string(line_no) + ": " +
                         std::to_string(toks.size()) + " values for " +
                         std::to_string(columns.size()) + " columns");
    for (std::size_t c = 0; c < toks.size(); ++c)
      rec.channels[columns[c]].push_back(parse_number(toks[c], where, line_no));
  }
  if (!header)
    throw UnsupportedFormat(where + ": empty file");
  return rec;
}

std::string format_trial_meta(const TrialFileMeta &m) {
  nlohmann::ordered_json j;
  j["format"] = "hapnet-trial-meta";
  j["version"] = kVersion;
  j["object"] = m.object_id;
  j["trial"] = m.trial_index;
  j["finger"] = m.finger;
  j["ep"] = std::string(haptic::ep_name(m.ep));
  j["rates_hz"] = {{"P_AC", m.pac_rate_hz}, {"base", m.base_rate_hz}};
  return j.dump(2) + "\n";
}

TrialFileMeta parse_trial_meta(std::string_view text, const std::string &where) {
  try {
    auto j = nlohmann::json::parse(text);
    if (j.at("format") != "hapnet-trial-meta")
      throw UnsupportedFormat(where + ": not a trial sidecar");
    if (j.at("version") != kVersion)
      throw UnsupportedFormat(where + ": unsupported version " +
                              j.at("version").dump());
    TrialFileMeta m;
    m.object_id = j.at("object").get<std::string>();
    m.trial_index = j.at("trial").get<int>();
    m.finger = j.at("finger").get<std::size_t>();
    auto ep = haptic::parse_ep(j.at("ep").get<std::string>());
    if (!ep)
      throw InvalidInput(where + ": unknown EP " + j.at("ep").dump());
    m.ep = *ep;
    m.pac_rate_hz = j.at("rates_hz").at("P_AC").get<double>();
    m.base_rate_hz = j.at("rates_hz").at("base").get<double>();
    return m;
  } catch (const nlohmann::json::exception &e) {
    throw InvalidInput(where + ": " + e.what());
  }
}

fs::path meta_path(const fs::path &trial_path) {
  fs::path p = trial_path;
  p += ".meta.json";
  return p;
}

void write_trial_file(const fs::path &path, const haptic::EpRecording &rec,
                      const TrialFileMeta &meta) {
  write_file(path, format_trial_text(rec));
  write_file(meta_path(path), format_trial_meta(meta));
}

std::pair<haptic::EpRecording, TrialFileMeta>
read_trial_file(const fs::path &path) {
  auto rec = parse_trial_text(read_file(path), path.string());
  auto meta =
      parse_trial_meta(read_file(meta_path(path)), meta_path(path).string());
  return {std::move(rec), std::move(meta)};
}

std::string
encode_visual_features(std::span<const visual::VisualFeatureMap> views) {
  if (views.empty())
    throw InvalidInput("visual features: no views");
  const auto shape = views[0].grid.shape();
  if (shape.size() != 3)
    throw InvalidInput("visual features: grids must be [H, W, C]");
  detail::ByteWriter w;
  w.raw(kVisualMagic);
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(views.size()));
  for (auto d : shape)
    w.u32(static_cast<std::uint32_t>(d));
  for (std::size_t v = 0; v < views.size(); ++v) {
    if (views[v].view_index != v)
      throw InvalidInput("visual features: view " + std::to_string(v) +
                         " out of order");
    if (views[v].grid.shape() != shape)
      throw InvalidInput("visual features: grid shapes differ");
    for (double x : views[v].grid.values())
      w.f32(x);
  }
  return w.bytes();
}

std::vector<visual::VisualFeatureMap>
decode_visual_features(std::string_view bytes, const std::string &object_id,
                       const std::string &where) {
  detail::ByteReader r(bytes, where);
  if (r.raw(4) != kVisualMagic)
    throw UnsupportedFormat(where + ": bad magic");
  const auto version = r.u32();
  if (version != kVersion)
    throw UnsupportedFormat(where + ": unsupported version " +
                            std::to_string(version));
  const std::size_t views = r.u32(), H = r.u32(), W = r.u32(), C = r.u32();
  if (views == 0 || H == 0 || W == 0 || C == 0)
    throw UnsupportedFormat(where + ": zero dimension in header");
  const std::size_t per_view = H * W * C;
  r.need(views * per_view * 4);
  std::vector<visual::VisualFeatureMap> out;
  for (std::size_t v = 0; v < views; ++v) {
    nn::Tensor grid({H, W, C});
    for (auto &x : grid.values())
      x = r.f32();
    out.push_back({object_id, v, std::move(grid)});
  }
  r.expect_end();
  return out;
}

std::string encode_tensors(const NamedTensors &tensors) {
  detail::ByteWriter w;
  w.raw(kTensorMagic);
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(tensors.size()));
  for (const auto &[name, t] : tensors) {
    w.str(name);
    w.u32(static_cast<std::uint32_t>(t.rank()));
    for (auto d : t.shape())
      w.u32(static_cast<std::uint32_t>(d));
    for (double v : t.values())
      w.f32(v);
  }
  return w.bytes();
}

NamedTensors decode_tensors(std::string_view bytes, const std::string &where) {
  detail::ByteReader r(bytes, where);
  if (r.raw(4) != kTensorMagic)
    throw UnsupportedFormat(where + ": bad magic");
  const auto version = r.u32();
  if (version != kVersion)
    throw UnsupportedFormat(where + ": unsupported version " +
                            std::to_string(version));
  const std::size_t count = r.u32();
  NamedTensors out;
  for (std::size_t i = 0; i < count; ++i) {
    auto name = r.str();
    const std::size_t rank = r.u32();
    if (rank == 0 || rank > 8)
      throw UnsupportedFormat(where + ": tensor '" + name + "' has rank " +
                              std::to_string(rank));
    nn::Shape shape;
    std::size_t n = 1;
    for (std::size_t d = 0; d < rank; ++d) {
      shape.push_back(r.u32());
      if (shape.back() == 0)
        throw UnsupportedFormat(where + ": tensor '" + name +
                                "' has a zero dimension");
      n *= shape.back();
      r.need(n); // keeps n * 4 from overflowing on garbage dims
    }
    r.need(n * 4);
    nn::Tensor t(shape);
    for (auto &v : t.values())
      v = r.f32();
    out.emplace_back(std::move(name), std::move(t));
  }
  r.expect_end();
  return out;
}

std::string format_grid(const nn::Tensor &m, std::string_view title) {
  if (m.rank() != 2)
    throw InvalidInput("grid: expected a matrix, got " +
                       nn::shape_string(m.shape()));
  std::string out = "# " + std::string(title) + "\n# " +
                    std::to_string(m.dim(0)) + " " + std::to_string(m.dim(1)) +
                    "\n";
  for (std::size_t r = 0; r < m.dim(0); ++r) {
    for (std::size_t c = 0; c < m.dim(1); ++c) {
      if (c)
        out += ' ';
      append_number(out, m.at(r, c));
    }
    out += '\n';
  }
  return out;
}

} // namespace hapnet::io
