// Copyright 2026 The EdgeNet Lab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "edgenet/datagen.hpp"

#include "edgenet/checkpoint.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace edgenet {

void SynthConfig::validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument("synth config: " + m); };
  if (dims.n < 1 || dims.k < 1 || dims.dx < 1 || dims.dy < 1) fail("dimensions must be positive");
  if (dims.k > dims.n) fail("K must not exceed N");
  if (!(bid_log_sigma >= 0.0) || !std::isfinite(bid_log_mean)) fail("bad bid distribution");
  if (!(pctr_alpha > 0 && pctr_beta > 0 && pcvr_alpha > 0 && pcvr_beta > 0))
    fail("Beta parameters must be positive");
  if (!(cpc_min >= 0.0 && cpc_max >= cpc_min)) fail("bad CPC range");
  if (!(correlation >= 0.0 && correlation <= 1.0)) fail("correlation must lie in [0,1]");
  if (count < 0) fail("instance count must be >= 0");
}

namespace {

double beta_draw(std::mt19937_64& rng, double a, double b) {
  const double x = std::gamma_distribution<double>(a, 1.0)(rng);
  const double y = std::gamma_distribution<double>(b, 1.0)(rng);
  return x / (x + y);
}

double beta_sd(double a, double b) {
  return std::sqrt(a * b / ((a + b) * (a + b) * (a + b + 1.0)));
}

}  // namespace

AuctionLog generate(const SynthConfig& cfg) {
  cfg.validate();
  AuctionLog log;
  log.dims = cfg.dims;
  log.slot_discounts = default_slot_discounts(cfg.dims.k);
  log.instances.reserve(static_cast<std::size_t>(cfg.count));
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  std::lognormal_distribution<double> bid_dist(cfg.bid_log_mean, cfg.bid_log_sigma);
  std::uniform_real_distribution<double> cpc_dist(cfg.cpc_min, cfg.cpc_max);
  const double ctr_mean = cfg.pctr_alpha / (cfg.pctr_alpha + cfg.pctr_beta);
  const double cvr_mean = cfg.pcvr_alpha / (cfg.pcvr_alpha + cfg.pcvr_beta);
  const double ctr_sd = beta_sd(cfg.pctr_alpha, cfg.pctr_beta);
  const double cvr_sd = beta_sd(cfg.pcvr_alpha, cfg.pcvr_beta);
  const double noise = std::sqrt(1.0 - cfg.correlation * cfg.correlation);

  for (int l = 0; l < cfg.count; ++l) {
    AuctionInstance inst;
    inst.slot_count = cfg.dims.k;
    inst.slot_discounts = log.slot_discounts;
    inst.user.features.resize(static_cast<std::size_t>(cfg.dims.dy));
    for (double& y : inst.user.features) y = unit(rng);
    for (int i = 0; i < cfg.dims.n; ++i) {
      AdCandidate ad;
      ad.bid = bid_dist(rng);
      ad.pctr = beta_draw(rng, cfg.pctr_alpha, cfg.pctr_beta);
      ad.pcvr = beta_draw(rng, cfg.pcvr_alpha, cfg.pcvr_beta);
      ad.cpc_value = cpc_dist(rng);
      const double zc = (ad.pctr - ctr_mean) / ctr_sd;
      const double zv = (ad.pcvr - cvr_mean) / cvr_sd;
      ad.features.resize(static_cast<std::size_t>(cfg.dims.dx));
      for (int d = 0; d < cfg.dims.dx; ++d)
        ad.features[d] = cfg.correlation * (d % 2 == 0 ? zc : zv) + noise * unit(rng);
      inst.candidates.push_back(std::move(ad));
    }
    log.instances.push_back(std::move(inst));
  }
  return log;
}

std::string serialize_log(const AuctionLog& log) {
  std::string out;
  {
    std::ostringstream hs;
    hs << "edgenet-log " << log.schema_version << " n " << log.dims.n << " k " << log.dims.k
       << " dx " << log.dims.dx << " dy " << log.dims.dy << " count " << log.instances.size()
       << " gamma";
    for (double g : log.slot_discounts) hs << ' ' << format_double(g);
    hs << '\n';
    out = hs.str();
  }
  for (const auto& inst : log.instances) {
    bool first = true;
    auto put = [&](double v) {
      if (!first) out += ' ';
      out += format_double(v);
      first = false;
    };
    for (double y : inst.user.features) put(y);
    for (const auto& c : inst.candidates) {
      out += " |";
      put(c.bid);
      put(c.pctr);
      put(c.pcvr);
      put(c.cpc_value);
      for (double x : c.features) put(x);
    }
    out += '\n';
  }
  return out;
}

namespace {

// Whitespace-separated tokens with '|' group separators ignored.
std::vector<std::string_view> tokens_of(std::string_view line) {
  std::vector<std::string_view> toks;
  std::size_t p = 0;
  while (p < line.size()) {
    while (p < line.size() && (line[p] == ' ' || line[p] == '\t' || line[p] == '\r')) ++p;
    std::size_t q = p;
    while (q < line.size() && line[q] != ' ' && line[q] != '\t' && line[q] != '\r') ++q;
    if (q > p && !(q - p == 1 && line[p] == '|')) toks.push_back(line.substr(p, q - p));
    p = q;
  }
  return toks;
}

double to_double(std::string_view tok, int line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw LogParseError("malformed number '" + std::string(tok) + "'", line);
  return v;
}

int to_int(std::string_view tok, int line) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw LogParseError("malformed integer '" + std::string(tok) + "'", line);
  return v;
}

}  // namespace

AuctionLog parse_log(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int lineno = 1;
  if (!std::getline(is, line)) throw LogParseError("missing header", lineno);
  const auto head = tokens_of(line);
  if (head.size() < 2 || head[0] != "edgenet-log") throw LogParseError("not an auction log", lineno);
  AuctionLog log;
  log.schema_version = to_int(head[1], lineno);
  if (log.schema_version != kLogSchemaVersion)
    throw LogParseError("schema version " + std::to_string(log.schema_version) +
                            " is not supported (expected " +
                            std::to_string(kLogSchemaVersion) + ")",
                        lineno);
  int count = -1;
  std::size_t t = 2;
  for (; t + 1 < head.size() && head[t] != "gamma"; t += 2) {
    const int v = to_int(head[t + 1], lineno);
    if (head[t] == "n") log.dims.n = v;
    else if (head[t] == "k") log.dims.k = v;
    else if (head[t] == "dx") log.dims.dx = v;
    else if (head[t] == "dy") log.dims.dy = v;
    else if (head[t] == "count") count = v;
    else throw LogParseError("unknown header field '" + std::string(head[t]) + "'", lineno);
  }
  if (t >= head.size() || head[t] != "gamma") throw LogParseError("header lacks gamma", lineno);
  for (++t; t < head.size(); ++t) log.slot_discounts.push_back(to_double(head[t], lineno));
  if (count < 0) throw LogParseError("header lacks count", lineno);
  if (static_cast<int>(log.slot_discounts.size()) != log.dims.k)
    throw LogParseError("gamma has " + std::to_string(log.slot_discounts.size()) +
                            " entries, expected " + std::to_string(log.dims.k),
                        lineno);

  const Dims d = log.dims;
  const std::size_t expected =
      static_cast<std::size_t>(d.dy) + static_cast<std::size_t>(d.n) * (4 + d.dx);
  while (std::getline(is, line)) {
    ++lineno;
    const auto toks = tokens_of(line);
    if (toks.empty()) continue;
    if (toks.size() != expected)
      throw LogParseError("expected " + std::to_string(expected) + " fields, got " +
                              std::to_string(toks.size()),
                          lineno);
    AuctionInstance inst;
    inst.slot_count = d.k;
    inst.slot_discounts = log.slot_discounts;
    std::size_t p = 0;
    for (int y = 0; y < d.dy; ++y) inst.user.features.push_back(to_double(toks[p++], lineno));
    for (int i = 0; i < d.n; ++i) {
      AdCandidate c;
      c.bid = to_double(toks[p++], lineno);
      c.pctr = to_double(toks[p++], lineno);
      c.pcvr = to_double(toks[p++], lineno);
      c.cpc_value = to_double(toks[p++], lineno);
      for (int x = 0; x < d.dx; ++x) c.features.push_back(to_double(toks[p++], lineno));
      inst.candidates.push_back(std::move(c));
    }
    try {
      validate(inst, &log.dims);
    } catch (const InvalidInstance& e) {
      throw LogParseError(e.what(), lineno);
    }
    log.instances.push_back(std::move(inst));
  }
  if (static_cast<int>(log.instances.size()) != count)
    throw LogParseError("log truncated: header promises " + std::to_string(count) +
                            " records, found " + std::to_string(log.instances.size()),
                        lineno);
  return log;
}

void write_log(const AuctionLog& log, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << serialize_log(log);
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

AuctionLog read_log(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  try {
    return parse_log(ss.str());
  } catch (const LogParseError& e) {
    throw LogParseError(e.detail(), e.line(), path.string());
  }
}

}  // namespace edgenet
