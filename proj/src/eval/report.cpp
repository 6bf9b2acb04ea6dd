// SPDX-License-Identifier: Apache-2.0
#include <hapnet/errors.hpp>
#include <hapnet/eval/labels.hpp>
#include <hapnet/eval/report.hpp>

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace hapnet::eval {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

double parse_double(std::string_view s, std::string_view key) {
  try {
    std::size_t used = 0;
    double v = std::stod(std::string(s), &used);
    if (used == s.size())
      return v;
  } catch (const std::exception &) {
  }
  throw InvalidInput("report: bad number for '" + std::string(key) + "'");
}

} // namespace

std::string fingerprint(std::string_view config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

EvalReport aggregate(std::span<const SeedRun> runs, std::string_view config) {
  if (runs.empty())
    throw InvalidInput("aggregate: no runs");
  std::vector<std::string> names;
  for (const auto &[adj, auc] : runs[0].auc)
    names.push_back(adj);
  for (const auto &n : names)
    require_adjective(n);
  std::sort(names.begin(), names.end(), [](const auto &a, const auto &b) {
    return *adjective_index(a) < *adjective_index(b);
  });

  EvalReport r;
  r.fingerprint = fingerprint(config);
  for (const auto &run : runs) {
    r.seeds.push_back(run.seed);
    for (const auto &[adj, auc] : run.auc)
      if (!runs[0].auc.count(adj))
        throw InvalidInput("aggregate: adjective '" + adj +
                           "' missing from seed " +
                           std::to_string(runs[0].seed));
  }
  double total = 0.0;
  for (const auto &name : names) {
    AdjectiveSummary s{name, {}, 0.0};
    double sum = 0.0;
    for (const auto &run : runs) {
      auto it = run.auc.find(name);
      if (it == run.auc.end())
        throw InvalidInput("aggregate: adjective '" + name +
                           "' missing from seed " + std::to_string(run.seed));
      if (!(it->second >= 0.0 && it->second <= 1.0))
        throw InvalidInput("aggregate: AUC for '" + name +
                           "' outside [0, 1]");
      s.per_seed.push_back(it->second);
      sum += it->second;
    }
    s.mean = sum / static_cast<double>(runs.size());
    total += s.mean;
    r.adjectives.push_back(std::move(s));
  }
  r.mean_auc = total / static_cast<double>(names.size());
  return r;
}

std::string EvalReport::to_text() const {
  std::ostringstream o;
  o << "format=hapnet-report\nversion=1\n";
  o << "fingerprint=" << fingerprint << "\n";
  o << "seeds=";
  for (std::size_t i = 0; i < seeds.size(); ++i)
    o << (i ? "," : "") << seeds[i];
  o << "\n";
  for (const auto &a : adjectives) {
    for (std::size_t i = 0; i < a.per_seed.size(); ++i)
      o << "auc." << a.adjective << ".seed" << seeds[i] << "="
        << num(a.per_seed[i]) << "\n";
    o << "auc." << a.adjective << ".mean=" << num(a.mean) << "\n";
  }
  o << "mean_auc=" << num(mean_auc) << "\n";
  return o.str();
}

std::string EvalReport::to_csv() const {
  std::ostringstream o;
  o << "adjective,mean_auc";
  for (auto s : seeds)
    o << ",seed_" << s;
  o << "\n";
  for (const auto &a : adjectives) {
    o << a.adjective << "," << num(a.mean);
    for (double v : a.per_seed)
      o << "," << num(v);
    o << "\n";
  }
  return o.str();
}

std::string EvalReport::to_table() const {
  std::ostringstream o;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-14s %8s", "adjective", "auc");
  o << buf;
  if (seeds.size() > 1)
    for (auto s : seeds) {
      std::snprintf(buf, sizeof buf, " %8s",
                    ("s" + std::to_string(s)).c_str());
      o << buf;
    }
  o << "\n";
  for (const auto &a : adjectives) {
    std::snprintf(buf, sizeof buf, "%-14s %8s", a.adjective.c_str(),
                  fixed(a.mean).c_str());
    o << buf;
    if (seeds.size() > 1)
      for (double v : a.per_seed) {
        std::snprintf(buf, sizeof buf, " %8s", fixed(v).c_str());
        o << buf;
      }
    o << "\n";
  }
  std::snprintf(buf, sizeof buf, "%-14s %8s\n", "mean", fixed(mean_auc).c_str());
  o << buf;
  return o.str();
}

std::vector<SeedRun> parse_report(std::string_view text) {
  std::vector<SeedRun> runs;
  bool header = false;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidInput("report line " + std::to_string(lineno) +
                         ": expected key=value");
    const std::string key = line.substr(0, eq), value = line.substr(eq + 1);
    if (key == "format") {
      if (value != "hapnet-report")
        throw UnsupportedFormat("report: unknown format '" + value + "'");
      header = true;
    } else if (key == "version") {
      if (value != "1")
        throw UnsupportedFormat("report: unsupported version " + value);
    } else if (key == "seeds") {
      std::istringstream ss(value);
      std::string tok;
      while (std::getline(ss, tok, ','))
        runs.push_back({static_cast<std::uint64_t>(
                            parse_double(tok, "seeds")),
                        {}});
    } else if (key.rfind("auc.", 0) == 0) {
      const auto dot = key.rfind('.');
      const std::string adj = key.substr(4, dot - 4);
      const std::string which = key.substr(dot + 1);
      if (which == "mean")
        continue;
      if (which.rfind("seed", 0) != 0)
        throw InvalidInput("report: bad key '" + key + "'");
      const std::string seed = which.substr(4);
      auto it = std::find_if(runs.begin(), runs.end(), [&](const SeedRun &r) {
        return std::to_string(r.seed) == seed;
      });
      if (it == runs.end())
        throw InvalidInput("report: key '" + key + "' names an unlisted seed");
      it->auc[adj] = parse_double(value, key);
    }
  }
  if (!header)
    throw UnsupportedFormat("report: missing format header");
  return runs;
}

} // namespace hapnet::eval
