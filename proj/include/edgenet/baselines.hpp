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

// GSP-family reference mechanisms.
//
// All three rank eligible ads by a score that is strictly increasing in the
// ad's own bid and charge the winner of each slot the smallest per-click bid
// that keeps its score at or above the next-ranked score.

#pragma once

#include "edgenet/auction.hpp"
#include "edgenet/numgrad.hpp"
#include "edgenet/objective.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace edgenet {

struct GspConfig {
  double sigma = 1.0;  // squashing exponent on pctr
  void validate() const;
};

struct UgspConfig {
  double lambda1 = 1.0;
  double lambda2 = 0.0;
  double lambda3 = 0.0;
  void validate() const;
};

// Score bid * pctr^sigma. Ads with pctr^sigma == 0 cannot win.
MechanismOutcome gsp_run(const AuctionInstance& inst, const GspConfig& cfg);

// Score lambda1*b*pctr + o_i with o_i = lambda2*pctr + lambda3*pcvr. Ads with
// lambda1*pctr == 0 cannot win. Payments are clamped to [0, bid].
MechanismOutcome ugsp_run(const AuctionInstance& inst, const UgspConfig& cfg);

// ---- DNA-lite ---------------------------------------------------------------

struct DnaLiteParams {
  int dx = 8;
  int hidden = 16;
  double temperature = 0.1;  // soft ranking during training
  ng::Tensor w1, b1, w2, b2;
  ng::Tensor log_bid_slope;

  DnaLiteParams() = default;
  DnaLiteParams(int dx, int hidden, double temperature, std::uint64_t seed);
  std::vector<ng::Tensor*> tensors();
  double bid_slope() const;
};

// Learned score g(features, pctr, pcvr, cpc) + exp(w_b) * bid for every ad.
std::vector<double> dnalite_scores(const AuctionInstance& inst, DnaLiteParams& params);

MechanismOutcome dnalite_run(const AuctionInstance& inst, DnaLiteParams& params);

struct DnaLiteTrainConfig {
  int steps = 300;
  int batch_size = 32;
  double learning_rate = 3e-3;
  int hidden = 16;
  double temperature = 0.1;
  std::uint64_t seed = 0;
};

// Soft-ranking objective: per slot, softmax(score / tau) over ads not yet
// ranked, weighted by per_ad_metrics with hard next-score payments. Higher is
// better. Averaged over instances.
double dnalite_objective(std::span<const AuctionInstance> data, DnaLiteParams& params,
                         const ObjectiveWeights& w);

// Soft allocation (N x K) of one instance at the params' temperature.
Matrix dnalite_soft_allocation(const AuctionInstance& inst, DnaLiteParams& params);

struct DnaLiteTrainResult {
  DnaLiteParams params;
  double initial_objective = 0.0;
  double final_objective = 0.0;
};

// Throws std::runtime_error when the loss turns non-finite.
DnaLiteTrainResult dnalite_train(std::span<const AuctionInstance> data,
                                 const ObjectiveWeights& w, const DnaLiteTrainConfig& cfg);

// Smallest own bid in [0, bid] whose score still reaches `target`, found by
// bisection on a score that is increasing in the bid. Returns 0 when even a
// zero bid reaches it.
double retention_price(const std::function<double(double)>& score_of_bid, double bid,
                       double target);

class GspMechanism final : public Mechanism {
 public:
  explicit GspMechanism(GspConfig cfg) : cfg_(cfg) { cfg_.validate(); }
  std::string name() const override;
  MechanismOutcome run(const AuctionInstance& inst) const override { return gsp_run(inst, cfg_); }

 private:
  GspConfig cfg_;
};

class UgspMechanism final : public Mechanism {
 public:
  explicit UgspMechanism(UgspConfig cfg) : cfg_(cfg) { cfg_.validate(); }
  std::string name() const override { return "uGSP"; }
  MechanismOutcome run(const AuctionInstance& inst) const override { return ugsp_run(inst, cfg_); }

 private:
  UgspConfig cfg_;
};

class DnaLiteMechanism final : public Mechanism {
 public:
  explicit DnaLiteMechanism(std::shared_ptr<DnaLiteParams> params)
      : params_(std::move(params)) {}
  std::string name() const override { return "DNA-lite"; }
  MechanismOutcome run(const AuctionInstance& inst) const override {
    return dnalite_run(inst, *params_);
  }

 private:
  std::shared_ptr<DnaLiteParams> params_;
};

}  // namespace edgenet
