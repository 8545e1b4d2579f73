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

#include "edgenet/regret.hpp"

#include <algorithm>
#include <stdexcept>

namespace edgenet {

void PerturbationScheme::validate() const {
  if (!(delta > 0.0)) throw std::invalid_argument("perturbation step must be positive");
  if (half_width < 1) throw std::invalid_argument("perturbation half-width must be >= 1");
}

std::vector<double> PerturbationScheme::misreports(double bid) const {
  std::vector<double> out;
  for (int k = -half_width; k <= half_width; ++k) {
    if (k == 0) continue;
    const double b = (1.0 + k * delta) * bid;
    if (b > 0.0) out.push_back(b);
  }
  return out;
}

AdvertiserRegret expost_regret_detail(const Mechanism& mech, const AuctionInstance& inst, int i,
                                      const PerturbationScheme& scheme,
                                      const MechanismOutcome* truthful) {
  scheme.validate();
  const double value = inst.candidates.at(static_cast<std::size_t>(i)).bid;
  MechanismOutcome own;
  if (truthful == nullptr) {
    own = mech.run(inst);
    truthful = &own;
  }
  AdvertiserRegret r;
  r.truthful_utility = click_utility(inst, *truthful, i, value);
  r.best_bid = value;
  double best_gain = 0.0;
  for (double b : scheme.misreports(value)) {
    const AuctionInstance lie = inst.with_bid(i, b);
    const double gain = click_utility(lie, mech.run(lie), i, value) - r.truthful_utility;
    if (gain > best_gain) {
      best_gain = gain;
      r.best_bid = b;
    }
  }
  r.regret = best_gain;
  return r;
}

double expost_regret(const Mechanism& mech, const AuctionInstance& inst, int i,
                     const PerturbationScheme& scheme) {
  return expost_regret_detail(mech, inst, i, scheme).regret;
}

RegretReport empirical_regret(const Mechanism& mech, std::span<const AuctionInstance> data,
                              const PerturbationScheme& scheme) {
  if (data.empty()) throw std::invalid_argument("empirical regret needs at least one instance");
  scheme.validate();
  RegretReport rep;
  double total_regret = 0.0;
  long pairs = 0;
  double ratio_sum = 0.0;
  for (const auto& inst : data) {
    const int n = inst.n();
    if (static_cast<int>(rep.per_advertiser.size()) < n) {
      rep.per_advertiser.resize(static_cast<std::size_t>(n), 0.0);
      rep.truthful_utility.resize(static_cast<std::size_t>(n), 0.0);
      rep.counts.resize(static_cast<std::size_t>(n), 0);
    }
    const MechanismOutcome truthful = mech.run(inst);
    for (int i = 0; i < n; ++i) {
      const AdvertiserRegret r = expost_regret_detail(mech, inst, i, scheme, &truthful);
      rep.per_advertiser[i] += r.regret;
      rep.truthful_utility[i] += r.truthful_utility;
      rep.counts[i] += 1;
      total_regret += r.regret;
      ++pairs;
      if (r.truthful_utility > 0.0) {
        ratio_sum += r.regret / r.truthful_utility;
        ++rep.ic_r_samples;
      }
    }
  }
  for (std::size_t i = 0; i < rep.per_advertiser.size(); ++i) {
    if (rep.counts[i] == 0) continue;
    rep.per_advertiser[i] /= rep.counts[i];
    rep.truthful_utility[i] /= rep.counts[i];
  }
  rep.mean_regret = total_regret / static_cast<double>(pairs);
  rep.ic_r = rep.ic_r_samples > 0 ? 100.0 * ratio_sum / rep.ic_r_samples : 0.0;
  return rep;
}

namespace {

MechanismOutcome top_slot_auction(const AuctionInstance& inst, bool second_price) {
  const std::vector<double> bids = inst.bids();
  const std::vector<int> order = rank_order(bids, bids);
  std::vector<int> assignment(static_cast<std::size_t>(inst.k()), -1);
  assignment[0] = order[0];
  MechanismOutcome out = outcome_from_assignment(inst.n(), assignment);
  const double runner_up = order.size() > 1 ? bids[order[1]] : 0.0;
  out.payments[order[0]] = second_price ? runner_up : bids[order[0]];
  return out;
}

}  // namespace

MechanismOutcome SecondPriceOracle::run(const AuctionInstance& inst) const {
  return top_slot_auction(inst, true);
}

MechanismOutcome FirstPriceOracle::run(const AuctionInstance& inst) const {
  return top_slot_auction(inst, false);
}

}  // namespace edgenet
