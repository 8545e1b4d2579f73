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

// Bid-free auction context encoder.
//
// Ads and the user are embedded into one token set (user first), passed
// through a pre-norm transformer without positional encodings, and mean-pooled
// into a context vector. Bids never enter, so every output here is invariant
// to bid changes and equivariant to candidate permutations.

#pragma once

#include "edgenet/auction.hpp"
#include "edgenet/numgrad.hpp"

#include <functional>
#include <random>
#include <string>
#include <vector>

namespace edgenet {

struct EncoderConfig {
  int dx = 8;
  int dy = 8;
  int de = 16;   // embedding width
  int dh = 32;   // transformer width
  int dc = 32;   // context width
  int layers = 1;
  int heads = 2;
  int ff = 64;   // feed-forward width

  void validate() const;
  bool operator==(const EncoderConfig&) const = default;
};

struct TransformerLayerParams {
  ng::Tensor ln1_gain, ln1_bias;
  ng::Tensor wq, wk, wv, wo, bo;
  ng::Tensor ln2_gain, ln2_bias;
  ng::Tensor ff1_w, ff1_b, ff2_w, ff2_b;
};

using TensorVisitor = std::function<void(const std::string& name, ng::Tensor& t)>;

struct EncoderParams {
  EncoderConfig cfg;
  ng::Tensor ad_w, ad_b;
  ng::Tensor user_w, user_b, user_type;
  ng::Tensor in_w, in_b;
  std::vector<TransformerLayerParams> layers;
  ng::Tensor final_gain, final_bias;
  ng::Tensor pool_w, pool_b;

  EncoderParams() = default;
  EncoderParams(const EncoderConfig& cfg, std::mt19937_64& rng);
  // Every tensor in a fixed order under a stable dotted name.
  void visit(const std::string& prefix, const TensorVisitor& fn);
};

// Intermediate per-token states: ads (N x de) and user (1 x de).
struct EmbeddedVars {
  ng::Var ads;
  ng::Var user;
};

struct EncodedVars {
  ng::Var ads;      // h_1..h_N, N x dh
  ng::Var user;     // h_y, 1 x dh
  ng::Var context;  // c, 1 x dc
};

struct EncodedContext {
  Matrix ads;
  Matrix user;
  Matrix context;
};

// Feature matrices (N x dx and 1 x dy). Throws InvalidInstance on mismatch.
Matrix ad_feature_matrix(const AuctionInstance& inst, int dx);
Matrix user_feature_row(const AuctionInstance& inst, int dy);

EmbeddedVars embed(ng::Tape& tape, const AuctionInstance& inst, EncoderParams& params);
EncodedVars encode(ng::Tape& tape, const EmbeddedVars& states, EncoderParams& params);

// Inference-only convenience: embed + encode on a throwaway tape.
EncodedContext encode_instance(const AuctionInstance& inst, EncoderParams& params);

// Xavier-uniform fill used by the parameter constructors.
ng::Tensor xavier(int rows, int cols, std::mt19937_64& rng);

}  // namespace edgenet
