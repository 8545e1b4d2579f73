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

// Autoregressive slot decoder and the full EdgeNet mechanism.
//
// Decoding runs one GRU step per slot. The hidden state starts at the
// encoder's context vector and the first input is a learned start token;
// afterwards the input is the encoder embedding of the ad just selected.
// For slot j with state c_j the attention logit of ad i is
//
//     mu(i, j) = v . tanh(W1 h_i + W2 c_j) + exp(w3) * b_i
//
// and two heads map each (ad, slot) pair to an allocation score F^R and a
// payment score F^P:
//
//     F^R(i, j) = u_R . tanh(A_R z_ij + a_R) + exp(theta) * mu(i, j)
//     F^P(i, j) = u_P . tanh(A_P [z_ij, g(i, j), s(i, j)] + a_P) + c_P
//
// where z_ij = tanh(W1 h_i + W2 c_j), s(i, j) flags ads selected at an
// earlier slot and g(i, j) is the margin of F^R(i, j) over the best
// unselected competitor, divided by dF^R/db and by b_i (the share of its bid
// the ad could drop and still lead column j; 1 when nobody else is left;
// selected ads get the margin they would have had). R(., j) is the softmax of F^R over unselected ads and
// the selected ad is drawn from it, so the slot won by ad i never worsens
// when b_i rises. Payment fractions are
// sigmoid(mean_j F^P(i, j)) and winners pay fraction * bid.

#pragma once

#include "edgenet/auction.hpp"
#include "edgenet/encoder.hpp"
#include "edgenet/numgrad.hpp"

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace edgenet {

struct DecoderConfig {
  int da = 32;  // attention width
  int dm = 32;  // output-head hidden width
  bool operator==(const DecoderConfig&) const = default;
};

struct EdgeNetConfig {
  EncoderConfig encoder;
  DecoderConfig decoder;
  bool operator==(const EdgeNetConfig&) const = default;
};

struct DecoderParams {
  // GRU, gate order (reset, update, candidate) along columns.
  ng::Tensor gru_wx, gru_wh, gru_bx, gru_bh;
  ng::Tensor start;
  ng::Tensor att_v, att_w1, att_w2, att_w3;
  ng::Tensor alloc_w, alloc_b, alloc_u, alloc_log_scale;
  ng::Tensor pay_w, pay_b, pay_u, pay_c;

  DecoderParams() = default;
  DecoderParams(const EncoderConfig& enc, const DecoderConfig& cfg, std::mt19937_64& rng);
  void visit(const std::string& prefix, const TensorVisitor& fn);
  // exp(w3), the logit slope in the ad's own bid.
  double bid_slope() const;
};

struct EdgeNetParams {
  EdgeNetConfig cfg;
  EncoderParams encoder;
  DecoderParams decoder;

  EdgeNetParams() = default;
  EdgeNetParams(const EdgeNetConfig& cfg, std::uint64_t seed);
  void visit(const TensorVisitor& fn);
  std::vector<ng::NamedTensor> named_tensors();
  std::vector<ng::Tensor*> tensors();
};

// One slot of decoding, exposed for tests: mu for every ad given state c_j.
ng::Var attention_logits(ng::Tape& tape, ng::Var ads_h, ng::Var state, ng::Var bids,
                         DecoderParams& params);

// Column-softmax allocation over F^R (masked entries are -inf and get exactly
// 0) and sigmoid of the row-mean of F^P.
struct HeadOutputs {
  ng::Var allocation;        // N x K
  ng::Var payment_fraction;  // N x 1
};
HeadOutputs output_heads(ng::Var alloc_scores, ng::Var pay_scores);

struct DecodeVars {
  ng::Var mu;                // N x K, -inf where the ad was selected earlier
  ng::Var alloc_scores;      // F^R, N x K, -inf where masked
  ng::Var pay_scores;        // F^P, N x K
  HeadOutputs heads;
  std::vector<ng::Var> states;  // c_1..c_K, each 1 x dc
  std::vector<int> selected;    // K distinct ads
};

// Preconditions: N >= K. Throws InvalidInstance otherwise.
DecodeVars decode(ng::Tape& tape, const EncodedVars& ctx, std::span<const double> bids,
                  int slots, DecoderParams& params, SelectMode mode, std::uint64_t seed);

// Plain-value snapshot of a decode.
struct DecodeTrace {
  Matrix mu;
  Matrix allocation;
  Matrix payment_fraction;
  Matrix states;  // K x dc
  std::vector<int> selected;
  std::vector<std::vector<bool>> masks;  // masks[j][i]: ad i unavailable at slot j
};

struct EdgeNetForward {
  EncodedContext encoded;
  DecodeTrace trace;
  MechanismOutcome outcome;
};

// Encoder -> decoder -> heads -> feasible assignment. The outcome's
// allocation is the 0/1 matrix of the assignment; winners pay
// payment_fraction * bid and losers pay 0.
EdgeNetForward run_edgenet(const AuctionInstance& inst, EdgeNetParams& params,
                           SelectMode mode = SelectMode::kArgmax, std::uint64_t seed = 0);

class EdgeNetMechanism final : public Mechanism {
 public:
  explicit EdgeNetMechanism(std::shared_ptr<EdgeNetParams> params,
                            SelectMode mode = SelectMode::kArgmax, std::uint64_t seed = 0,
                            std::string label = "EdgeNet");
  std::string name() const override { return label_; }
  MechanismOutcome run(const AuctionInstance& inst) const override;
  EdgeNetParams& params() const { return *params_; }

 private:
  std::shared_ptr<EdgeNetParams> params_;
  SelectMode mode_;
  std::uint64_t seed_;
  std::string label_;
};

}  // namespace edgenet
