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

#include "edgenet/encoder.hpp"

#include <cmath>
#include <stdexcept>

namespace edgenet {

using namespace edgenet::ng;

void EncoderConfig::validate() const {
  if (dx <= 0 || dy <= 0 || de <= 0 || dh <= 0 || dc <= 0 || layers < 0 || heads <= 0 ||
      ff <= 0)
    throw std::invalid_argument("encoder dimensions must be positive");
  if (dh % heads != 0) throw std::invalid_argument("head count must divide d_h");
}

Tensor xavier(int rows, int cols, std::mt19937_64& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> u(-a, a);
  Tensor t(rows, cols);
  for (Eigen::Index k = 0; k < t.value.size(); ++k) t.value.data()[k] = u(rng);
  return t;
}

namespace {

Tensor ones(int cols) { return Tensor(Matrix::Ones(1, cols)); }
Tensor zeros(int rows, int cols) { return Tensor(rows, cols); }

}  // namespace

EncoderParams::EncoderParams(const EncoderConfig& c, std::mt19937_64& rng) : cfg(c) {
  cfg.validate();
  ad_w = xavier(cfg.dx, cfg.de, rng);
  ad_b = zeros(1, cfg.de);
  user_w = xavier(cfg.dy, cfg.de, rng);
  user_b = zeros(1, cfg.de);
  user_type = xavier(1, cfg.de, rng);
  in_w = xavier(cfg.de, cfg.dh, rng);
  in_b = zeros(1, cfg.dh);
  for (int l = 0; l < cfg.layers; ++l) {
    TransformerLayerParams p;
    p.ln1_gain = ones(cfg.dh);
    p.ln1_bias = zeros(1, cfg.dh);
    p.wq = xavier(cfg.dh, cfg.dh, rng);
    p.wk = xavier(cfg.dh, cfg.dh, rng);
    p.wv = xavier(cfg.dh, cfg.dh, rng);
    p.wo = xavier(cfg.dh, cfg.dh, rng);
    p.bo = zeros(1, cfg.dh);
    p.ln2_gain = ones(cfg.dh);
    p.ln2_bias = zeros(1, cfg.dh);
    p.ff1_w = xavier(cfg.dh, cfg.ff, rng);
    p.ff1_b = zeros(1, cfg.ff);
    p.ff2_w = xavier(cfg.ff, cfg.dh, rng);
    p.ff2_b = zeros(1, cfg.dh);
    layers.push_back(std::move(p));
  }
  final_gain = ones(cfg.dh);
  final_bias = zeros(1, cfg.dh);
  pool_w = xavier(cfg.dh, cfg.dc, rng);
  pool_b = zeros(1, cfg.dc);
}

void EncoderParams::visit(const std::string& prefix, const TensorVisitor& fn) {
  fn(prefix + "ad_w", ad_w);
  fn(prefix + "ad_b", ad_b);
  fn(prefix + "user_w", user_w);
  fn(prefix + "user_b", user_b);
  fn(prefix + "user_type", user_type);
  fn(prefix + "in_w", in_w);
  fn(prefix + "in_b", in_b);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto& p = layers[l];
    const std::string lp = prefix + "layer" + std::to_string(l) + ".";
    fn(lp + "ln1_gain", p.ln1_gain);
    fn(lp + "ln1_bias", p.ln1_bias);
    fn(lp + "wq", p.wq);
    fn(lp + "wk", p.wk);
    fn(lp + "wv", p.wv);
    fn(lp + "wo", p.wo);
    fn(lp + "bo", p.bo);
    fn(lp + "ln2_gain", p.ln2_gain);
    fn(lp + "ln2_bias", p.ln2_bias);
    fn(lp + "ff1_w", p.ff1_w);
    fn(lp + "ff1_b", p.ff1_b);
    fn(lp + "ff2_w", p.ff2_w);
    fn(lp + "ff2_b", p.ff2_b);
  }
  fn(prefix + "final_gain", final_gain);
  fn(prefix + "final_bias", final_bias);
  fn(prefix + "pool_w", pool_w);
  fn(prefix + "pool_b", pool_b);
}

Matrix ad_feature_matrix(const AuctionInstance& inst, int dx) {
  Matrix x(inst.n(), dx);
  for (int i = 0; i < inst.n(); ++i) {
    const auto& f = inst.candidates[i].features;
    if (static_cast<int>(f.size()) != dx)
      throw InvalidInstance("candidate " + std::to_string(i) + " has " +
                            std::to_string(f.size()) + " features, encoder expects " +
                            std::to_string(dx));
    for (int d = 0; d < dx; ++d) x(i, d) = f[d];
  }
  return x;
}

Matrix user_feature_row(const AuctionInstance& inst, int dy) {
  const auto& f = inst.user.features;
  if (static_cast<int>(f.size()) != dy)
    throw InvalidInstance("user has " + std::to_string(f.size()) +
                          " features, encoder expects " + std::to_string(dy));
  Matrix y(1, dy);
  for (int d = 0; d < dy; ++d) y(0, d) = f[d];
  return y;
}

EmbeddedVars embed(Tape& tape, const AuctionInstance& inst, EncoderParams& p) {
  if (inst.n() < 1) throw InvalidInstance("auction has no candidates");
  Var x = tape.constant(ad_feature_matrix(inst, p.cfg.dx));
  Var y = tape.constant(user_feature_row(inst, p.cfg.dy));
  Var ads = add_row(matmul(x, tape.param(p.ad_w)), tape.param(p.ad_b));
  Var user = add(add(matmul(y, tape.param(p.user_w)), tape.param(p.user_b)),
                 tape.param(p.user_type));
  return {ads, user};
}

namespace {

Var self_attention(Tape& tape, Var x, TransformerLayerParams& p, int heads) {
  const Eigen::Index dh = x.cols();
  const Eigen::Index dk = dh / heads;
  Var q = matmul(x, tape.param(p.wq));
  Var k = matmul(x, tape.param(p.wk));
  Var v = matmul(x, tape.param(p.wv));
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dk));
  std::vector<Var> outs;
  outs.reserve(static_cast<std::size_t>(heads));
  for (int h = 0; h < heads; ++h) {
    Var qh = slice_cols(q, h * dk, dk);
    Var kh = slice_cols(k, h * dk, dk);
    Var vh = slice_cols(v, h * dk, dk);
    Var scores = scale(matmul(qh, transpose(kh)), inv_sqrt);
    outs.push_back(matmul(softmax(scores, Axis::kCols), vh));
  }
  Var joined = heads == 1 ? outs[0] : concat_cols(outs);
  return add_row(matmul(joined, tape.param(p.wo)), tape.param(p.bo));
}

}  // namespace

EncodedVars encode(Tape& tape, const EmbeddedVars& e, EncoderParams& p) {
  const Var tokens_in[] = {e.user, e.ads};
  Var x = add_row(matmul(concat_rows(tokens_in), tape.param(p.in_w)), tape.param(p.in_b));
  for (auto& layer : p.layers) {
    Var a = layer_norm(x, tape.param(layer.ln1_gain), tape.param(layer.ln1_bias));
    x = add(x, self_attention(tape, a, layer, p.cfg.heads));
    Var f = layer_norm(x, tape.param(layer.ln2_gain), tape.param(layer.ln2_bias));
    f = relu(add_row(matmul(f, tape.param(layer.ff1_w)), tape.param(layer.ff1_b)));
    f = add_row(matmul(f, tape.param(layer.ff2_w)), tape.param(layer.ff2_b));
    x = add(x, f);
  }
  x = layer_norm(x, tape.param(p.final_gain), tape.param(p.final_bias));
  const Eigen::Index n = x.rows() - 1;
  EncodedVars out;
  out.user = slice_rows(x, 0, 1);
  out.ads = slice_rows(x, 1, n);
  out.context = tanh(add(matmul(mean_rows(x), tape.param(p.pool_w)), tape.param(p.pool_b)));
  return out;
}

EncodedContext encode_instance(const AuctionInstance& inst, EncoderParams& params) {
  Tape tape(false);
  EncodedVars v = encode(tape, embed(tape, inst, params), params);
  return {v.ads.value(), v.user.value(), v.context.value()};
}

}  // namespace edgenet
