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

#include "edgenet/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numeric>
#include <random>

namespace edgenet {

using namespace edgenet::ng;

void LagrangianState::validate() const {
  if (!(penalty > 0.0)) throw std::invalid_argument("penalty weight must be positive");
  for (double m : multipliers)
    if (!(m >= 0.0)) throw std::invalid_argument("multipliers must be non-negative");
}

void LagrangianState::update(std::span<const double> regret, double growth, double cap) {
  if (regret.size() != multipliers.size())
    throw std::invalid_argument("regret vector does not match the multipliers");
  for (std::size_t i = 0; i < regret.size(); ++i)
    multipliers[i] = std::max(0.0, multipliers[i] + penalty * regret[i]);
  penalty = std::min(growth * penalty, cap);
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument("train config: " + m); };
  if (batch_size < 1) fail("batch size must be positive");
  if (steps < 0) fail("steps must be >= 0");
  if (!(learning_rate > 0.0)) fail("learning rate must be positive");
  scheme.validate();
  if (misreports < 1) fail("misreports per advertiser must be positive");
  if (!(temperature > 0.0)) fail("temperature must be positive");
  if (checkpoint_every < 0) fail("checkpoint cadence must be >= 0");
  if (multiplier_period < 1) fail("multiplier period must be positive");
  if (!(penalty_growth >= 1.0)) fail("penalty growth must be >= 1");
  if (!(penalty_cap > 0.0)) fail("penalty cap must be positive");
  if (!(initial_penalty > 0.0)) fail("initial penalty must be positive");
  if (!(initial_multiplier >= 0.0)) fail("initial multiplier must be >= 0");
}

namespace {

std::mt19937_64 step_rng(std::uint64_t seed, std::uint64_t step, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

// Forward pass of one instance with the truthful decode and, optionally, the
// smoothed regret of every advertiser. Everything lives on `tape`.
struct InstanceTerms {
  Var platform;                 // sum_i F_all, 1 x 1
  std::vector<Var> regret;      // per advertiser, 1 x 1
  std::vector<double> truthful_utility;
  std::vector<int> selected;
  Matrix payment_fraction;
};

InstanceTerms instance_terms(Tape& tape, const AuctionInstance& inst, EdgeNetParams& params,
                             const ObjectiveWeights& weights, const PerturbationScheme& scheme,
                             const SoftRegretOptions& opts, std::mt19937_64& rng,
                             bool with_regret) {
  const int n = inst.n();
  const int k = inst.k();
  EncodedVars enc = encode(tape, embed(tape, inst, params.encoder), params.encoder);
  const std::vector<double> bids = inst.bids();
  DecodeVars dv = decode(tape, enc, bids, k, params.decoder, SelectMode::kArgmax, 0);

  const Matrix bid_col = bid_column(inst);
  Var value = tape.constant(bid_col);
  Var price = mul(dv.heads.payment_fraction, value);
  InstanceTerms out;
  out.platform = sum(per_ad_metrics(tape, inst, dv.heads.allocation, price, weights));
  out.selected = dv.selected;
  out.payment_fraction = dv.heads.payment_fraction.value();
  if (!with_regret) return out;

  Var gamma = tape.constant(discount_column(inst));
  Var clicks = mul(matmul(dv.heads.allocation, gamma), tape.constant(pctr_column(inst)));
  Var truthful = mul(clicks, sub(value, price));
  out.truthful_utility.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.truthful_utility[i] = truthful.value()(i, 0);

  const double inv_t = 1.0 / opts.temperature;
  std::vector<double> lie_bids = bids;
  for (int i = 0; i < n; ++i) {
    std::vector<double> grid = scheme.misreports(bids[i]);
    if (!opts.full_grid && static_cast<int>(grid.size()) > opts.misreports) {
      for (int s = 0; s < opts.misreports; ++s) {
        std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(s),
                                                        grid.size() - 1);
        std::swap(grid[s], grid[pick(rng)]);
      }
      grid.resize(static_cast<std::size_t>(opts.misreports));
    }
    Var own = element(truthful, i, 0);
    std::vector<Var> parts;
    parts.push_back(tape.constant(0.0));
    for (double b : grid) {
      lie_bids[i] = b;
      DecodeVars lie = decode(tape, enc, lie_bids, k, params.decoder, SelectMode::kArgmax, 0);
      Var row_clicks =
          scale(matmul(slice_rows(lie.heads.allocation, i, 1), gamma), inst.candidates[i].pctr);
      Var pay = scale(element(lie.heads.payment_fraction, i, 0), b);
      Var u = mul(row_clicks, add_scalar(neg(pay), bids[i]));
      parts.push_back(scale(sub(u, own), inv_t));
    }
    lie_bids[i] = bids[i];
    out.regret.push_back(scale(logsumexp(concat_rows(parts)), opts.temperature));
  }
  return out;
}

double winner_fraction_mean(const InstanceTerms& t, double& count) {
  double s = 0.0;
  for (int w : t.selected) {
    s += t.payment_fraction(w, 0);
    count += 1.0;
  }
  return s;
}

// Mean of regret / truthful utility over hard winners, in percent.
void accumulate_icr(const InstanceTerms& t, std::span<const double> regret, double& sum,
                    double& count) {
  for (int w : t.selected) {
    const double u = t.truthful_utility[w];
    if (u > 0.0) {
      sum += regret[w] / u;
      count += 1.0;
    }
  }
}

}  // namespace

SoftRegretEstimate soft_regret(EdgeNetParams& params, std::span<const AuctionInstance> batch,
                               const PerturbationScheme& scheme, const SoftRegretOptions& opts) {
  if (batch.empty()) throw std::invalid_argument("soft regret needs a non-empty batch");
  if (!(opts.temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
  scheme.validate();
  SoftRegretEstimate est;
  std::mt19937_64 rng(opts.seed);
  const ObjectiveWeights weights;
  for (const auto& inst : batch) {
    validate(inst);
    Tape tape(false);
    InstanceTerms t = instance_terms(tape, inst, params, weights, scheme, opts, rng, true);
    std::vector<double> r;
    for (const Var& v : t.regret) r.push_back(v.scalar());
    if (est.per_position.size() < r.size()) est.per_position.resize(r.size(), 0.0);
    for (std::size_t i = 0; i < r.size(); ++i) est.per_position[i] += r[i];
    est.per_instance.push_back(std::move(r));
    est.truthful_utility.push_back(std::move(t.truthful_utility));
  }
  for (double& v : est.per_position) v /= static_cast<double>(batch.size());
  return est;
}

LagrangianValue evaluate_lagrangian(EdgeNetParams& params,
                                    std::span<const AuctionInstance> batch,
                                    const ObjectiveWeights& weights,
                                    const LagrangianState& state, const TrainConfig& cfg,
                                    std::uint64_t seed) {
  if (batch.empty()) throw std::invalid_argument("Lagrangian needs a non-empty batch");
  cfg.validate();
  weights.validate();
  const SoftRegretOptions opts{cfg.temperature, cfg.misreports, false, seed};
  std::mt19937_64 rng(seed);
  LagrangianValue val;
  double icr_sum = 0.0, icr_count = 0.0;
  for (const auto& inst : batch) {
    Tape tape(false);
    InstanceTerms t =
        instance_terms(tape, inst, params, weights, cfg.scheme, opts, rng, cfg.regret_penalty);
    val.platform += t.platform.scalar();
    std::vector<double> r;
    for (const Var& v : t.regret) r.push_back(v.scalar());
    if (val.regret.size() < r.size()) val.regret.resize(r.size(), 0.0);
    for (std::size_t i = 0; i < r.size(); ++i) val.regret[i] += r[i];
    if (cfg.regret_penalty) accumulate_icr(t, r, icr_sum, icr_count);
  }
  const double b = static_cast<double>(batch.size());
  val.platform /= b;
  for (double& r : val.regret) r /= b;
  val.loss = -val.platform;
  for (std::size_t i = 0; i < val.regret.size(); ++i) {
    const double rho_i = i < state.multipliers.size() ? state.multipliers[i] : 0.0;
    val.loss += rho_i * val.regret[i] + 0.5 * state.penalty * val.regret[i] * val.regret[i];
  }
  val.batch_icr = icr_count > 0 ? 100.0 * icr_sum / icr_count : 0.0;
  return val;
}

std::string train_log_header() {
  return "step\tloss\tplatform\tregret\tbatch_icr\tmultiplier_mean\tmultiplier_max\tpenalty\t"
         "winner_fraction";
}

std::string train_log_row(const TrainRecord& r) {
  char buf[320];
  std::snprintf(buf, sizeof buf, "%d\t%.9g\t%.9g\t%.9g\t%.6g\t%.9g\t%.9g\t%.9g\t%.6g", r.step,
                r.loss, r.platform, r.regret, r.batch_icr, r.multiplier_mean, r.multiplier_max,
                r.penalty, r.mean_winner_fraction);
  return buf;
}

Trainer::Trainer(EdgeNetParams params, ObjectiveWeights weights, TrainConfig cfg)
    : params_(std::move(params)),
      weights_(weights),
      cfg_(cfg),
      adam_(AdamConfig{cfg.learning_rate}) {
  cfg_.validate();
  weights_.validate();
  state_.penalty = cfg_.initial_penalty;
}

TrainRecord Trainer::train_step(std::span<const AuctionInstance> data) {
  std::mt19937_64 rng = step_rng(cfg_.seed, static_cast<std::uint64_t>(step_), 0);
  std::uniform_int_distribution<std::size_t> pick(0, data.size() - 1);
  const SoftRegretOptions opts{cfg_.temperature, cfg_.misreports, false, 0};
  const bool with_regret = cfg_.regret_penalty;

  std::vector<std::unique_ptr<Tape>> tapes;
  std::vector<InstanceTerms> terms;
  tapes.reserve(static_cast<std::size_t>(cfg_.batch_size));
  terms.reserve(static_cast<std::size_t>(cfg_.batch_size));
  for (int l = 0; l < cfg_.batch_size; ++l) {
    const AuctionInstance& inst = data[pick(rng)];
    tapes.push_back(std::make_unique<Tape>());
    terms.push_back(
        instance_terms(*tapes.back(), inst, params_, weights_, cfg_.scheme, opts, rng, with_regret));
  }

  const int n = static_cast<int>(data.front().n());
  if (state_.multipliers.empty()) state_.multipliers.assign(static_cast<std::size_t>(n), cfg_.initial_multiplier);
  if (window_sum_.empty()) window_sum_.assign(static_cast<std::size_t>(n), 0.0);
  const double b = static_cast<double>(cfg_.batch_size);

  TrainRecord rec;
  rec.step = step_ + 1;
  std::vector<double> regret(static_cast<std::size_t>(n), 0.0);
  double icr_sum = 0.0, icr_count = 0.0, frac_sum = 0.0, frac_count = 0.0;
  for (const InstanceTerms& t : terms) {
    rec.platform += t.platform.scalar() / b;
    frac_sum += winner_fraction_mean(t, frac_count);
    if (!with_regret) continue;
    std::vector<double> r;
    for (int i = 0; i < n; ++i) {
      r.push_back(t.regret[i].scalar());
      regret[i] += r.back() / b;
    }
    accumulate_icr(t, r, icr_sum, icr_count);
  }
  rec.loss = -rec.platform;
  std::vector<double> coef(static_cast<std::size_t>(n), 0.0);
  if (with_regret) {
    for (int i = 0; i < n; ++i) {
      rec.loss += state_.multipliers[i] * regret[i] + 0.5 * state_.penalty * regret[i] * regret[i];
      coef[i] = (state_.multipliers[i] + state_.penalty * regret[i]) / b;
      rec.regret += regret[i];
    }
  }
  rec.batch_icr = icr_count > 0 ? 100.0 * icr_sum / icr_count : 0.0;
  rec.mean_winner_fraction = frac_count > 0 ? frac_sum / frac_count : 0.0;
  if (!std::isfinite(rec.loss)) return rec;

  for (std::size_t l = 0; l < terms.size(); ++l) {
    Var loss = scale(terms[l].platform, -1.0 / b);
    if (with_regret)
      for (int i = 0; i < n; ++i) loss = add(loss, scale(terms[l].regret[i], coef[i]));
    tapes[l]->backward(loss);
  }
  std::vector<Tensor*> ts = params_.tensors();
  adam_.step(ts);
  ++step_;

  if (with_regret) {
    for (int i = 0; i < n; ++i) window_sum_[i] += regret[i];
    ++window_count_;
    if (step_ % cfg_.multiplier_period == 0) {
      std::vector<double> mean(window_sum_);
      for (double& m : mean) m /= window_count_;
      state_.update(mean, cfg_.penalty_growth, cfg_.penalty_cap);
      std::fill(window_sum_.begin(), window_sum_.end(), 0.0);
      window_count_ = 0;
    }
  }
  rec.multiplier_mean =
      std::accumulate(state_.multipliers.begin(), state_.multipliers.end(), 0.0) / n;
  rec.multiplier_max = *std::max_element(state_.multipliers.begin(), state_.multipliers.end());
  rec.penalty = state_.penalty;
  return rec;
}

Checkpoint Trainer::snapshot() {
  Checkpoint ck;
  store_params(ck, params_);
  ck.set_meta("train.step", std::to_string(step_));
  ck.set_meta("train.seed", std::to_string(cfg_.seed));
  ck.set_meta("train.penalty", format_double(state_.penalty));
  ck.set_meta("train.window_count", std::to_string(window_count_));
  ck.set_meta("train.adam_steps", std::to_string(adam_.steps_taken()));
  if (!state_.multipliers.empty()) {
    ck.put("train.multipliers",
           Eigen::Map<const Matrix>(state_.multipliers.data(), 1,
                                    static_cast<Eigen::Index>(state_.multipliers.size())));
    ck.put("train.window_sum",
           Eigen::Map<const Matrix>(window_sum_.data(), 1,
                                    static_cast<Eigen::Index>(window_sum_.size())));
  }
  const auto named = params_.named_tensors();
  const auto& m = adam_.first_moments();
  const auto& v = adam_.second_moments();
  if (m.size() == named.size()) {
    for (std::size_t t = 0; t < named.size(); ++t) {
      ck.put("adam.m." + named[t].name, m[t]);
      ck.put("adam.v." + named[t].name, v[t]);
    }
  }
  return ck;
}

void Trainer::resume(const Checkpoint& ck) {
  EdgeNetParams loaded = load_params(ck);
  if (!(loaded.cfg == params_.cfg))
    throw FormatError("checkpoint model shape differs from the trainer's model");
  params_ = std::move(loaded);
  auto need = [&ck](const std::string& key) {
    auto v = ck.get_meta(key);
    if (!v) throw FormatError("checkpoint lacks training state '" + key + "'");
    return *v;
  };
  step_ = std::stoi(need("train.step"));
  state_.penalty = std::stod(need("train.penalty"));
  window_count_ = std::stoi(need("train.window_count"));
  const long long adam_steps = std::stoll(need("train.adam_steps"));
  if (const Matrix* mult = ck.find("train.multipliers")) {
    state_.multipliers.assign(mult->data(), mult->data() + mult->size());
    const Matrix* win = ck.find("train.window_sum");
    if (win == nullptr) throw FormatError("checkpoint lacks train.window_sum");
    window_sum_.assign(win->data(), win->data() + win->size());
  }
  std::vector<Matrix> m, v;
  if (adam_steps > 0) {
    for (const auto& nt : params_.named_tensors()) {
      const Matrix* a = ck.find("adam.m." + nt.name);
      const Matrix* b = ck.find("adam.v." + nt.name);
      if (a == nullptr || b == nullptr)
        throw FormatError("checkpoint lacks optimizer moments for " + nt.name);
      m.push_back(*a);
      v.push_back(*b);
    }
  }
  adam_.restore(adam_steps, std::move(m), std::move(v));
  state_.validate();
}

TrainResult Trainer::run(std::span<const AuctionInstance> data, const TrainOutputs& out,
                         const std::function<void(const TrainRecord&)>& on_step) {
  if (data.empty()) throw std::invalid_argument("training needs a non-empty dataset");
  for (const auto& inst : data) validate(inst);
  const int n = data.front().n();
  for (const auto& inst : data)
    if (inst.n() != n || inst.k() != data.front().k())
      throw InvalidInstance("training data must share N and K");

  std::ofstream log;
  if (!out.log.empty()) {
    if (out.log.has_parent_path()) std::filesystem::create_directories(out.log.parent_path());
    const bool fresh = step_ == 0;
    log.open(out.log, fresh ? std::ios::trunc : std::ios::app);
    if (!log) throw std::runtime_error("cannot open training log " + out.log.string());
    if (fresh) log << train_log_header() << '\n';
  }
  auto save = [&] {
    if (!out.checkpoint.empty()) write_checkpoint(snapshot(), out.checkpoint);
  };

  TrainResult res;
  while (step_ < cfg_.steps) {
    TrainRecord rec = train_step(data);
    if (!std::isfinite(rec.loss)) {
      save();
      throw TrainingAborted("non-finite loss at step " + std::to_string(rec.step) +
                                "; last good parameters kept",
                            rec.step);
    }
    res.history.push_back(rec);
    if (log) log << train_log_row(rec) << '\n' << std::flush;
    if (on_step) on_step(rec);
    if (cfg_.checkpoint_every > 0 && step_ % cfg_.checkpoint_every == 0) save();
  }
  save();
  res.params = params_;
  res.state = state_;
  res.steps_done = step_;
  return res;
}

TrainResult train(std::span<const AuctionInstance> data, const ObjectiveWeights& weights,
                  const TrainConfig& cfg, const EdgeNetConfig& model, const TrainOutputs& out) {
  Trainer t(EdgeNetParams(model, cfg.seed), weights, cfg);
  return t.run(data, out);
}

}  // namespace edgenet
