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

#include "edgenet/objective.hpp"

#include <stdexcept>

namespace edgenet {

using namespace edgenet::ng;

void ObjectiveWeights::validate() const {
  if (revenue < 0 || ctr < 0 || cvr < 0)
    throw std::invalid_argument("objective weights must be non-negative");
  if (!(revenue > 0 || ctr > 0 || cvr > 0))
    throw std::invalid_argument("at least one objective weight must be positive");
}

Matrix bid_column(const AuctionInstance& inst) {
  Matrix m(inst.n(), 1);
  for (int i = 0; i < inst.n(); ++i) m(i, 0) = inst.candidates[i].bid;
  return m;
}

Matrix pctr_column(const AuctionInstance& inst) {
  Matrix m(inst.n(), 1);
  for (int i = 0; i < inst.n(); ++i) m(i, 0) = inst.candidates[i].pctr;
  return m;
}

Matrix pcvr_column(const AuctionInstance& inst) {
  Matrix m(inst.n(), 1);
  for (int i = 0; i < inst.n(); ++i) m(i, 0) = inst.candidates[i].pcvr;
  return m;
}

Matrix discount_column(const AuctionInstance& inst) {
  Matrix m(inst.k(), 1);
  for (int j = 0; j < inst.k(); ++j) m(j, 0) = inst.slot_discounts[j];
  return m;
}

Var per_ad_metrics(Tape& tape, const AuctionInstance& inst, Var allocation, Var price,
                   const ObjectiveWeights& w) {
  Var clicks = mul(matmul(allocation, tape.constant(discount_column(inst))),
                   tape.constant(pctr_column(inst)));
  Var total = scale(mul(clicks, price), w.revenue);
  if (w.ctr != 0.0) total = add(total, scale(clicks, w.ctr));
  if (w.cvr != 0.0) total = add(total, scale(mul(clicks, tape.constant(pcvr_column(inst))), w.cvr));
  return total;
}

}  // namespace edgenet
