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

#pragma once

#include "edgenet/auction.hpp"
#include "edgenet/numgrad.hpp"

namespace edgenet {

// Preference weights over the per-ad platform metrics.
struct ObjectiveWeights {
  double revenue = 1.0;
  double ctr = 0.0;
  double cvr = 0.0;

  void validate() const;
  bool operator==(const ObjectiveWeights&) const = default;
};

// Weighted per-ad platform value F_all (N x 1) of a soft allocation.
//   clicks_i  = pctr_i * sum_j R(i, j) * gamma_j
//   revenue_i = price_i * clicks_i          (price is per click)
//   ctr_i     = clicks_i
//   cvr_i     = clicks_i * pcvr_i
// `allocation` is N x K, `price` is N x 1.
ng::Var per_ad_metrics(ng::Tape& tape, const AuctionInstance& inst, ng::Var allocation,
                       ng::Var price, const ObjectiveWeights& w);

// Column helpers shared by the training code.
Matrix bid_column(const AuctionInstance& inst);
Matrix pctr_column(const AuctionInstance& inst);
Matrix pcvr_column(const AuctionInstance& inst);
Matrix discount_column(const AuctionInstance& inst);

}  // namespace edgenet
