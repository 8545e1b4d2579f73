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

#include "edgenet/baselines.hpp"

#include "edgenet/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace edgenet {

using namespace edgenet::ng;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Ranks eligible ads and fills the top K slots. `price(i, next)` returns the
// per-click payment of winner i given the next-ranked ad (nullopt if none).
template <typename PriceFn>
MechanismOutcome ranked_outcome(const AuctionInstance& inst, const std::vector<double>& scores,
                                const std::vector<bool>& eligible, PriceFn price) {
  const std::vector<double> bids = inst.bids();
  std::vector<int> order;
  for (int i : rank_order(scores, bids))
    if (eligible[i]) order.push_back(i);
  std::vector<int> assignment(static_cast<std::size_t>(inst.k()), -1);
  for (int j = 0; j < inst.k() && j < static_cast<int>(order.size()); ++j) assignment[j] = order[j];
  MechanismOutcome out = outcome_from_assignment(inst.n(), assignment);
  for (int j = 0; j < inst.k() && j < static_cast<int>(order.size()); ++j) {
    const int i = order[j];
    std::optional<int> next;
    if (j + 1 < static_cast<int>(order.size())) next = order[j + 1];
    out.payments[i] = std::clamp(price(i, next), 0.0, bids[i]);
  }
  return out;
}

}  // namespace

void GspConfig::validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("GSP squashing exponent must be >= 0");
}

void UgspConfig::validate() const {
  if (!(lambda1 > 0.0)) throw std::invalid_argument("uGSP lambda1 must be > 0");
  if (lambda2 < 0.0 || lambda3 < 0.0)
    throw std::invalid_argument("uGSP lambda2 and lambda3 must be >= 0");
}

std::string GspMechanism::name() const {
  std::ostringstream os;
  os << "GSP(sigma=" << cfg_.sigma << ")";
  return os.str();
}

MechanismOutcome gsp_run(const AuctionInstance& inst, const GspConfig& cfg) {
  cfg.validate();
  const int n = inst.n();
  std::vector<double> weight(static_cast<std::size_t>(n)), scores(static_cast<std::size_t>(n));
  std::vector<bool> eligible(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& c = inst.candidates[i];
    weight[i] = std::pow(c.pctr, cfg.sigma);
    scores[i] = c.bid * weight[i];
    eligible[i] = weight[i] > 0.0;
  }
  return ranked_outcome(inst, scores, eligible, [&](int i, std::optional<int> next) {
    return next ? scores[*next] / weight[i] : 0.0;
  });
}

MechanismOutcome ugsp_run(const AuctionInstance& inst, const UgspConfig& cfg) {
  cfg.validate();
  const int n = inst.n();
  std::vector<double> other(static_cast<std::size_t>(n)), scores(static_cast<std::size_t>(n));
  std::vector<bool> eligible(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& c = inst.candidates[i];
    other[i] = cfg.lambda2 * c.pctr + cfg.lambda3 * c.pcvr;
    scores[i] = cfg.lambda1 * c.bid * c.pctr + other[i];
    eligible[i] = cfg.lambda1 * c.pctr > 0.0;
  }
  return ranked_outcome(inst, scores, eligible, [&](int i, std::optional<int> next) {
    const double next_score = next ? scores[*next] : 0.0;
    return (next_score - other[i]) / (cfg.lambda1 * inst.candidates[i].pctr);
  });
}

double retention_price(const std::function<double(double)>& score_of_bid, double bid,
                       double target) {
  if (score_of_bid(0.0) >= target) return 0.0;
  double lo = 0.0, hi = bid;
  if (score_of_bid(hi) < target) return bid;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, bid); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (score_of_bid(mid) >= target)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

// ---- DNA-lite ---------------------------------------------------------------

DnaLiteParams::DnaLiteParams(int dx_, int hidden_, double temperature_, std::uint64_t seed)
    : dx(dx_), hidden(hidden_), temperature(temperature_) {
  if (dx <= 0 || hidden <= 0) throw std::invalid_argument("DNA-lite widths must be positive");
  if (!(temperature > 0.0)) throw std::invalid_argument("DNA-lite temperature must be > 0");
  std::mt19937_64 rng(seed);
  w1 = xavier(dx + 3, hidden, rng);
  b1 = Tensor(1, hidden);
  w2 = xavier(hidden, 1, rng);
  b2 = Tensor(1, 1);
  log_bid_slope = Tensor(1, 1);
}

std::vector<Tensor*> DnaLiteParams::tensors() { return {&w1, &b1, &w2, &b2, &log_bid_slope}; }

double DnaLiteParams::bid_slope() const { return std::exp(log_bid_slope.value(0, 0)); }

namespace {

Matrix dna_inputs(const AuctionInstance& inst, int dx) {
  Matrix x(inst.n(), dx + 3);
  x.leftCols(dx) = ad_feature_matrix(inst, dx);
  for (int i = 0; i < inst.n(); ++i) {
    const auto& c = inst.candidates[i];
    x(i, dx) = c.pctr;
    x(i, dx + 1) = c.pcvr;
    x(i, dx + 2) = c.cpc_value;
  }
  return x;
}

// Bid-free part g (N x 1).
Var dna_feature_score(Tape& tape, const AuctionInstance& inst, DnaLiteParams& p) {
  Var x = tape.constant(dna_inputs(inst, p.dx));
  Var h = tanh(add_row(matmul(x, tape.param(p.w1)), tape.param(p.b1)));
  return add_row(matmul(h, tape.param(p.w2)), tape.param(p.b2));
}

struct DnaForward {
  Var allocation;  // soft, N x K
  Var value;       // 1 x 1, sum of per-ad metrics
};

DnaForward dna_soft_forward(Tape& tape, const AuctionInstance& inst, DnaLiteParams& p,
                            const ObjectiveWeights& w) {
  const int n = inst.n();
  Var g = dna_feature_score(tape, inst, p);
  Var log_slope = tape.param(p.log_bid_slope);
  Var s = add(g, scale_by(tape.constant(bid_column(inst)), exp(log_slope)));

  const Matrix sv = s.value();
  const Matrix gv = g.value();
  const std::vector<double> bids = inst.bids();
  std::vector<double> scores(sv.data(), sv.data() + n);
  const std::vector<int> order = rank_order(scores, bids);

  std::vector<Var> cols;
  Matrix mask = Matrix::Zero(n, 1);
  for (int j = 0; j < inst.k(); ++j) {
    Var logits = scale(add(s, tape.constant(mask)), 1.0 / p.temperature);
    cols.push_back(softmax(logits, Axis::kRows));
    mask(order[j], 0) = kNegInf;
  }
  Var alloc = cols.size() == 1 ? cols[0] : concat_cols(cols);

  // Next-score payment (s_next - g_i) / slope, clamped to [0, b_i].
  std::vector<Eigen::Index> next_idx(static_cast<std::size_t>(n));
  Matrix keep = Matrix::Zero(n, 1), floor_add = Matrix::Zero(n, 1);
  const double slope = p.bid_slope();
  for (int r = 0; r < n; ++r) {
    const int i = order[r];
    if (r + 1 >= n) {
      next_idx[i] = i;
      continue;
    }
    next_idx[i] = order[r + 1];
    const double raw = (sv(order[r + 1], 0) - gv(i, 0)) / slope;
    if (raw >= bids[i])
      floor_add(i, 0) = bids[i];
    else if (raw > 0.0)
      keep(i, 0) = 1.0;
  }
  Var raw = scale_by(sub(gather_rows(s, next_idx), g), exp(neg(log_slope)));
  Var price = add(mul(raw, tape.constant(keep)), tape.constant(floor_add));
  Var value = sum(per_ad_metrics(tape, inst, alloc, price, w));
  return {alloc, value};
}

}  // namespace

std::vector<double> dnalite_scores(const AuctionInstance& inst, DnaLiteParams& params) {
  Tape tape(false);
  const Matrix g = dna_feature_score(tape, inst, params).value();
  const double slope = params.bid_slope();
  std::vector<double> s(static_cast<std::size_t>(inst.n()));
  for (int i = 0; i < inst.n(); ++i) s[i] = g(i, 0) + slope * inst.candidates[i].bid;
  return s;
}

MechanismOutcome dnalite_run(const AuctionInstance& inst, DnaLiteParams& params) {
  const std::vector<double> scores = dnalite_scores(inst, params);
  const double slope = params.bid_slope();
  std::vector<double> feature_part(scores.size());
  for (int i = 0; i < inst.n(); ++i) feature_part[i] = scores[i] - slope * inst.candidates[i].bid;
  const std::vector<bool> eligible(scores.size(), true);
  return ranked_outcome(inst, scores, eligible, [&](int i, std::optional<int> next) {
    if (!next) return 0.0;
    const double target = scores[*next];
    const double g = feature_part[i];
    const double bid = inst.candidates[i].bid;
    double p = retention_price([&](double b) { return g + slope * b; }, bid, target);
    if (!std::isfinite(p)) p = std::clamp((target - g) / slope, 0.0, bid);
    return p;
  });
}

Matrix dnalite_soft_allocation(const AuctionInstance& inst, DnaLiteParams& params) {
  Tape tape(false);
  return dna_soft_forward(tape, inst, params, ObjectiveWeights{}).allocation.value();
}

double dnalite_objective(std::span<const AuctionInstance> data, DnaLiteParams& params,
                         const ObjectiveWeights& w) {
  if (data.empty()) throw std::invalid_argument("DNA-lite objective over empty data");
  double total = 0.0;
  for (const auto& inst : data) {
    Tape tape(false);
    total += dna_soft_forward(tape, inst, params, w).value.scalar();
  }
  return total / static_cast<double>(data.size());
}

DnaLiteTrainResult dnalite_train(std::span<const AuctionInstance> data, const ObjectiveWeights& w,
                                 const DnaLiteTrainConfig& cfg) {
  if (data.empty()) throw std::invalid_argument("DNA-lite training needs a non-empty dataset");
  w.validate();
  const int dx = static_cast<int>(data[0].candidates.at(0).features.size());
  DnaLiteTrainResult res{DnaLiteParams(dx, cfg.hidden, cfg.temperature, cfg.seed), 0.0, 0.0};
  DnaLiteParams& p = res.params;
  res.initial_objective = dnalite_objective(data, p, w);
  Adam opt(AdamConfig{cfg.learning_rate});
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_int_distribution<std::size_t> pick(0, data.size() - 1);
  const auto params = p.tensors();
  for (int step = 0; step < cfg.steps; ++step) {
    Tape tape;
    std::vector<Var> values;
    for (int b = 0; b < cfg.batch_size; ++b)
      values.push_back(dna_soft_forward(tape, data[pick(rng)], p, w).value);
    Var loss = neg(scale(sum(concat_rows(values)), 1.0 / static_cast<double>(values.size())));
    if (!std::isfinite(loss.scalar()))
      throw std::runtime_error("DNA-lite training diverged at step " + std::to_string(step));
    tape.backward(loss);
    opt.step(params);
  }
  res.final_objective = dnalite_objective(data, p, w);
  return res;
}

}  // namespace edgenet
