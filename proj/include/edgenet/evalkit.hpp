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

// Platform metrics and mechanism comparison tables.
//
//   CTR = clicks / impressions
//   RPM = revenue / impressions * 1000     (revenue = clicks * price per click)
//   CVR = orders / impressions
//
// with K impressions per auction. By default clicks and orders are
// expectations (pctr * gamma_j and pctr * pcvr * gamma_j per displayed ad);
// the sampled mode draws them instead.

#pragma once

#include "edgenet/auction.hpp"
#include "edgenet/regret.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace edgenet {

struct RawMetrics {
  double ctr = 0.0;
  double rpm = 0.0;
  double cvr = 0.0;
  double clicks = 0.0;
  double orders = 0.0;
  double revenue = 0.0;
  long long impressions = 0;
};

// Throws std::invalid_argument on an empty log. `seed` only matters when
// `sampled` is set.
RawMetrics simulate_metrics(const Mechanism& mech, std::span<const AuctionInstance> log,
                            std::uint64_t seed = 0, bool sampled = false);

class NormalizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Builds the mechanism to evaluate for one seed. Deterministic baselines can
// ignore the seed; learned mechanisms are trained or loaded per seed.
struct MechanismFactory {
  std::string name;
  std::function<std::shared_ptr<Mechanism>(std::uint64_t seed)> make;
};

struct CompareOptions {
  std::vector<std::uint64_t> seeds{1};
  std::string reference;        // mechanism name; empty means the first one
  bool sampled = false;
  bool with_regret = true;
  PerturbationScheme scheme;
  int regret_instances = 0;     // audit only the first n instances; 0 = all
};

struct Stat {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single seed
};

Stat summarize(std::span<const double> xs);

struct MetricRow {
  std::string mechanism;
  Stat ctr, rpm, cvr;         // normalized by the reference, per seed
  Stat raw_ctr, raw_rpm, raw_cvr;
  Stat ic_r;                  // percent
  bool has_ic_r = false;
};

struct MetricTable {
  std::string reference;
  int seeds = 0;
  std::vector<MetricRow> rows;

  const MetricRow& row(const std::string& mechanism) const;
};

MetricTable compare(const std::vector<MechanismFactory>& mechanisms,
                    std::span<const AuctionInstance> log, const CompareOptions& opts);

// Aligned plain-text table, one row per mechanism.
std::string format_table(const MetricTable& t);
// Tab-separated rows with a header line.
std::string table_to_tsv(const MetricTable& t);
// Bar chart with one panel per metric (normalized CTR/RPM/CVR, IC-R).
std::string table_to_svg(const MetricTable& t);

}  // namespace edgenet
