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

#include "edgenet/decoder.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace edgenet {

using namespace edgenet::ng;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Var gru_step(Tape& tape, Var input, Var hidden, DecoderParams& p) {
  const Eigen::Index dc = hidden.cols();
  Var gx = add(matmul(input, tape.param(p.gru_wx)), tape.param(p.gru_bx));
  Var gh = add(matmul(hidden, tape.param(p.gru_wh)), tape.param(p.gru_bh));
  Var r = sigmoid(add(slice_cols(gx, 0, dc), slice_cols(gh, 0, dc)));
  Var z = sigmoid(add(slice_cols(gx, dc, dc), slice_cols(gh, dc, dc)));
  Var n = tanh(add(slice_cols(gx, 2 * dc, dc), mul(r, slice_cols(gh, 2 * dc, dc))));
  return add(n, mul(z, sub(hidden, n)));
}

}  // namespace

DecoderParams::DecoderParams(const EncoderConfig& enc, const DecoderConfig& cfg,
                             std::mt19937_64& rng) {
  if (cfg.da <= 0 || cfg.dm <= 0) throw std::invalid_argument("decoder widths must be positive");
  gru_wx = xavier(enc.dh, 3 * enc.dc, rng);
  gru_wh = xavier(enc.dc, 3 * enc.dc, rng);
  gru_bx = Tensor(1, 3 * enc.dc);
  gru_bh = Tensor(1, 3 * enc.dc);
  start = xavier(1, enc.dh, rng);
  att_v = xavier(cfg.da, 1, rng);
  att_w1 = xavier(enc.dh, cfg.da, rng);
  att_w2 = xavier(enc.dc, cfg.da, rng);
  att_w3 = Tensor(1, 1);
  alloc_w = xavier(cfg.da, cfg.dm, rng);
  alloc_b = Tensor(1, cfg.dm);
  alloc_u = xavier(cfg.dm, 1, rng);
  alloc_log_scale = Tensor(1, 1);
  pay_w = xavier(cfg.da + 2, cfg.dm, rng);
  pay_b = Tensor(1, cfg.dm);
  pay_u = xavier(cfg.dm, 1, rng);
  pay_c = Tensor(1, 1);
}

void DecoderParams::visit(const std::string& prefix, const TensorVisitor& fn) {
  fn(prefix + "gru_wx", gru_wx);
  fn(prefix + "gru_wh", gru_wh);
  fn(prefix + "gru_bx", gru_bx);
  fn(prefix + "gru_bh", gru_bh);
  fn(prefix + "start", start);
  fn(prefix + "att_v", att_v);
  fn(prefix + "att_w1", att_w1);
  fn(prefix + "att_w2", att_w2);
  fn(prefix + "att_w3", att_w3);
  fn(prefix + "alloc_w", alloc_w);
  fn(prefix + "alloc_b", alloc_b);
  fn(prefix + "alloc_u", alloc_u);
  fn(prefix + "alloc_log_scale", alloc_log_scale);
  fn(prefix + "pay_w", pay_w);
  fn(prefix + "pay_b", pay_b);
  fn(prefix + "pay_u", pay_u);
  fn(prefix + "pay_c", pay_c);
}

double DecoderParams::bid_slope() const { return std::exp(att_w3.value(0, 0)); }

EdgeNetParams::EdgeNetParams(const EdgeNetConfig& c, std::uint64_t seed) : cfg(c) {
  std::mt19937_64 rng(seed);
  encoder = EncoderParams(cfg.encoder, rng);
  decoder = DecoderParams(cfg.encoder, cfg.decoder, rng);
}

void EdgeNetParams::visit(const TensorVisitor& fn) {
  encoder.visit("encoder.", fn);
  decoder.visit("decoder.", fn);
}

std::vector<NamedTensor> EdgeNetParams::named_tensors() {
  std::vector<NamedTensor> out;
  visit([&out](const std::string& name, Tensor& t) { out.push_back({name, &t}); });
  return out;
}

std::vector<Tensor*> EdgeNetParams::tensors() {
  std::vector<Tensor*> out;
  visit([&out](const std::string&, Tensor& t) { out.push_back(&t); });
  return out;
}

Var attention_logits(Tape& tape, Var ads_h, Var state, Var bids, DecoderParams& p) {
  Var z = tanh(add_row(matmul(ads_h, tape.param(p.att_w1)),
                       matmul(state, tape.param(p.att_w2))));
  Var slope = exp(tape.param(p.att_w3));
  return add(matmul(z, tape.param(p.att_v)), scale_by(bids, slope));
}

HeadOutputs output_heads(Var alloc_scores, Var pay_scores) {
  const double k = static_cast<double>(pay_scores.cols());
  return {softmax(alloc_scores, Axis::kRows), sigmoid(scale(sum_cols(pay_scores), 1.0 / k))};
}

DecodeVars decode(Tape& tape, const EncodedVars& ctx, std::span<const double> bids_in,
                  int slots, DecoderParams& p, SelectMode mode, std::uint64_t seed) {
  const int n = static_cast<int>(ctx.ads.rows());
  if (static_cast<int>(bids_in.size()) != n)
    throw InvalidInstance("bid vector length does not match the encoded ads");
  if (slots < 1 || slots > n)
    throw InvalidInstance("decode needs 1 <= K <= N, got K=" + std::to_string(slots) +
                          " N=" + std::to_string(n));

  Matrix bid_col(n, 1);
  for (int i = 0; i < n; ++i) bid_col(i, 0) = bids_in[i];
  Var bids = tape.constant(bid_col);
  Var slope = exp(tape.param(p.att_w3));
  Var bid_term = scale_by(bids, slope);
  Var alloc_slope = exp(tape.param(p.alloc_log_scale));
  // d F^R / d b_i, shared by every ad.
  Var score_slope = mul(alloc_slope, slope);
  Var inv_score_slope = exp(neg(add(tape.param(p.alloc_log_scale), tape.param(p.att_w3))));
  Matrix inv_bid_col(n, 1);
  for (int i = 0; i < n; ++i) {
    if (!(bids_in[i] > 0.0)) throw InvalidInstance("decode needs positive bids");
    inv_bid_col(i, 0) = 1.0 / bids_in[i];
  }
  Var inv_bids = tape.constant(inv_bid_col);
  // W1 h_i does not depend on the slot; compute it once.
  Var ads_proj = matmul(ctx.ads, tape.param(p.att_w1));

  DecodeVars out;
  std::vector<bool> taken(static_cast<std::size_t>(n), false);
  std::unique_ptr<bool[]> allowed(new bool[static_cast<std::size_t>(n)]);
  std::vector<Var> mu_cols, fr_cols, fp_cols;
  SlotSampler sampler(seed);

  Var state = ctx.context;
  Var input = tape.param(p.start);
  std::vector<double> probs(static_cast<std::size_t>(n));
  std::vector<Eigen::Index> comp_idx(static_cast<std::size_t>(n));
  for (int j = 0; j < slots; ++j) {
    state = gru_step(tape, input, state, p);
    out.states.push_back(state);
    Var z = tanh(add_row(ads_proj, matmul(state, tape.param(p.att_w2))));
    Var base = matmul(z, tape.param(p.att_v));
    Var mu = add(base, bid_term);

    Var fr = add(matmul(tanh(add_row(matmul(z, tape.param(p.alloc_w)), tape.param(p.alloc_b))),
                        tape.param(p.alloc_u)),
                 scale_by(mu, alloc_slope));

    // Margin of each ad over its strongest unselected competitor, converted to
    // bid units and divided by the ad's bid: the fraction of the bid it could
    // shed and still top this column. With no competitor left the whole bid
    // can go. Ads selected earlier get the margin they would have had, plus a
    // flag.
    const Matrix fv = fr.value();
    Matrix flag = Matrix::Zero(n, 1);
    for (int i = 0; i < n; ++i) {
      if (taken[i]) flag(i, 0) = 1.0;
      int best = -1;
      for (int k = 0; k < n; ++k) {
        if (k == i || taken[k]) continue;
        if (best < 0 || fv(k, 0) > fv(best, 0)) best = k;
      }
      comp_idx[i] = best >= 0 ? best : n + i;
    }
    const Var stacked[] = {fr, sub(fr, scale_by(bids, score_slope))};
    Var comp = gather_rows(concat_rows(stacked), comp_idx);
    Var margin = mul(scale_by(sub(fr, comp), inv_score_slope), inv_bids);

    const Var pay_in[] = {z, margin, tape.constant(flag)};
    Var fp = add_row(matmul(tanh(add_row(matmul(concat_cols(pay_in), tape.param(p.pay_w)),
                                         tape.param(p.pay_b))),
                            tape.param(p.pay_u)),
                     tape.param(p.pay_c));

    Matrix mask = Matrix::Zero(n, 1);
    for (int i = 0; i < n; ++i)
      if (taken[i]) mask(i, 0) = kNegInf;
    Var mask_v = tape.constant(mask);
    Var fr_masked = add(fr, mask_v);
    mu_cols.push_back(add(mu, mask_v));
    fr_cols.push_back(fr_masked);
    fp_cols.push_back(fp);

    Var column = softmax(fr_masked, Axis::kRows);
    for (int i = 0; i < n; ++i) {
      probs[i] = column.value()(i, 0);
      allowed[i] = !taken[i];
    }
    const int pick = sampler.pick(probs, std::span<const bool>(allowed.get(), n), bids_in, mode);
    out.selected.push_back(pick);
    taken[pick] = true;
    input = slice_rows(ctx.ads, pick, 1);
  }
  out.mu = slots == 1 ? mu_cols[0] : concat_cols(mu_cols);
  out.alloc_scores = slots == 1 ? fr_cols[0] : concat_cols(fr_cols);
  out.pay_scores = slots == 1 ? fp_cols[0] : concat_cols(fp_cols);
  out.heads = output_heads(out.alloc_scores, out.pay_scores);
  return out;
}

EdgeNetForward run_edgenet(const AuctionInstance& inst, EdgeNetParams& params, SelectMode mode,
                           std::uint64_t seed) {
  validate(inst);
  Tape tape(false);
  EncodedVars enc = encode(tape, embed(tape, inst, params.encoder), params.encoder);
  const std::vector<double> bids = inst.bids();
  DecodeVars dv = decode(tape, enc, bids, inst.k(), params.decoder, mode, seed);

  EdgeNetForward fwd;
  fwd.encoded = {enc.ads.value(), enc.user.value(), enc.context.value()};
  DecodeTrace& tr = fwd.trace;
  tr.mu = dv.mu.value();
  tr.allocation = dv.heads.allocation.value();
  tr.payment_fraction = dv.heads.payment_fraction.value();
  tr.states.resize(inst.k(), params.cfg.encoder.dc);
  for (int j = 0; j < inst.k(); ++j) tr.states.row(j) = dv.states[j].value().row(0);
  tr.selected = dv.selected;
  std::vector<bool> taken(static_cast<std::size_t>(inst.n()), false);
  for (int j = 0; j < inst.k(); ++j) {
    tr.masks.push_back(taken);
    taken[dv.selected[j]] = true;
  }

  std::vector<int> assignment = feasible_assignment(tr.allocation, mode, seed, bids);
  if (assignment != tr.selected)
    throw std::logic_error("internal error: assignment disagrees with decoder selection");
  fwd.outcome = outcome_from_assignment(inst.n(), std::move(assignment));
  for (int w : fwd.outcome.assignment)
    fwd.outcome.payments[w] = tr.payment_fraction(w, 0) * bids[w];
  return fwd;
}

EdgeNetMechanism::EdgeNetMechanism(std::shared_ptr<EdgeNetParams> params, SelectMode mode,
                                   std::uint64_t seed, std::string label)
    : params_(std::move(params)), mode_(mode), seed_(seed), label_(std::move(label)) {
  if (!params_) throw std::invalid_argument("EdgeNetMechanism needs parameters");
}

MechanismOutcome EdgeNetMechanism::run(const AuctionInstance& inst) const {
  return run_edgenet(inst, *params_, mode_, seed_).outcome;
}

}  // namespace edgenet
