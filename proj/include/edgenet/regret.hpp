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

// Empirical ex-post regret.
//
// The logged bid of each advertiser is taken as its true value per click.
// A misreport changes only that advertiser's bid; everyone else's bid stays
// fixed. Utility is click_utility(): expected clicks times (value - price).

#pragma once

#include "edgenet/auction.hpp"

#include <span>
#include <string>
#include <vector>

namespace edgenet {

struct PerturbationScheme {
  double delta = 0.05;  // relative step
  int half_width = 10;  // grid {(1 + k*delta) * b : k = -m..m, k != 0}

  void validate() const;
  // Misreported bids for a true bid, in increasing k order; points that are
  // not strictly positive are dropped.
  std::vector<double> misreports(double bid) const;
};

struct AdvertiserRegret {
  double regret = 0.0;            // max(0, best gain)
  double truthful_utility = 0.0;
  double best_bid = 0.0;          // misreport achieving the gain (truthful bid if none)
};

// Regret of advertiser i; `truthful` may be passed to skip re-running it.
AdvertiserRegret expost_regret_detail(const Mechanism& mech, const AuctionInstance& inst, int i,
                                      const PerturbationScheme& scheme,
                                      const MechanismOutcome* truthful = nullptr);

double expost_regret(const Mechanism& mech, const AuctionInstance& inst, int i,
                     const PerturbationScheme& scheme);

struct RegretReport {
  std::vector<double> per_advertiser;    // mean regret by candidate position
  std::vector<double> truthful_utility;  // mean truthful utility by position
  std::vector<int> counts;               // instances contributing to each position
  double mean_regret = 0.0;              // mean over every (instance, advertiser)
  double ic_r = 0.0;                     // percent
  int ic_r_samples = 0;                  // pairs with positive truthful utility
};

// Throws std::invalid_argument on an empty dataset.
RegretReport empirical_regret(const Mechanism& mech, std::span<const AuctionInstance> data,
                              const PerturbationScheme& scheme);

// Single-slot reference auctions. They fill only the top slot: the highest
// bid wins (library tie-break) and pays either the runner-up bid or its own.
class SecondPriceOracle final : public Mechanism {
 public:
  std::string name() const override { return "second-price"; }
  MechanismOutcome run(const AuctionInstance& inst) const override;
};

class FirstPriceOracle final : public Mechanism {
 public:
  std::string name() const override { return "first-price"; }
  MechanismOutcome run(const AuctionInstance& inst) const override;
};

}  // namespace edgenet
