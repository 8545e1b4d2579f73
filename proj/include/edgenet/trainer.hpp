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

// Augmented-Lagrangian training of EdgeNet.
//
// For a minibatch the loss is
//
//     L = -mean_l sum_i F_all(l, i) + sum_i rho_i * rgt_i + rho/2 * sum_i rgt_i^2
//
// where F_all comes from per_ad_metrics() on the soft allocation and rgt_i is
// the batch mean of the smoothed regret of candidate position i. Every
// `multiplier_period` steps rho_i += rho * (mean rgt_i over the period) and
// rho grows by `penalty_growth` up to `penalty_cap`.
//
// Minibatches and misreports are drawn from a generator seeded by (seed, step),
// so a run resumed from a checkpoint continues exactly as if uninterrupted.

#pragma once

#include "edgenet/checkpoint.hpp"
#include "edgenet/decoder.hpp"
#include "edgenet/objective.hpp"
#include "edgenet/regret.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace edgenet {

struct LagrangianState {
  std::vector<double> multipliers;  // rho_i, one per candidate position
  double penalty = 1.0;             // rho

  void validate() const;
  // rho_i += rho * regret_i, clamped at 0; then rho = min(growth * rho, cap).
  void update(std::span<const double> regret, double growth, double cap);
};

struct TrainConfig {
  int batch_size = 32;
  int steps = 500;
  double learning_rate = 3e-3;
  PerturbationScheme scheme;   // misreport grid
  int misreports = 2;          // grid points sampled per (instance, advertiser)
  double temperature = 1e-3;   // smooth-max temperature, utility units
  std::uint64_t seed = 1;
  int checkpoint_every = 100;  // 0 disables periodic checkpoints
  int multiplier_period = 100;
  double penalty_growth = 1.5;
  double penalty_cap = 1e4;
  double initial_penalty = 1.0;
  double initial_multiplier = 3.0;
  bool regret_penalty = true;  // false trains on the platform objective alone

  void validate() const;
};

// Smoothed per-position regret of a batch, computed from the soft allocation.
// With `full_grid` every grid point is tried instead of a random sample.
struct SoftRegretOptions {
  double temperature = 1e-3;
  int misreports = 2;
  bool full_grid = false;
  std::uint64_t seed = 0;
};
struct SoftRegretEstimate {
  std::vector<double> per_position;                 // batch mean, length N
  std::vector<std::vector<double>> per_instance;    // [l][i]
  std::vector<std::vector<double>> truthful_utility;
};
SoftRegretEstimate soft_regret(EdgeNetParams& params, std::span<const AuctionInstance> batch,
                               const PerturbationScheme& scheme, const SoftRegretOptions& opts);

// Lagrangian value and its parts on a fixed batch, without gradients.
struct LagrangianValue {
  double loss = 0.0;
  double platform = 0.0;            // mean_l sum_i F_all
  std::vector<double> regret;       // per position
  double batch_icr = 0.0;           // percent, smoothed regret / truthful utility
};
LagrangianValue evaluate_lagrangian(EdgeNetParams& params,
                                    std::span<const AuctionInstance> batch,
                                    const ObjectiveWeights& weights,
                                    const LagrangianState& state, const TrainConfig& cfg,
                                    std::uint64_t seed);

struct TrainRecord {
  int step = 0;
  double loss = 0.0;
  double platform = 0.0;
  double regret = 0.0;       // sum over positions
  double batch_icr = 0.0;
  double multiplier_mean = 0.0;
  double multiplier_max = 0.0;
  double penalty = 0.0;
  double mean_winner_fraction = 0.0;  // mean payment fraction of hard winners
};

// Header and row formatting of the append-only training log.
std::string train_log_header();
std::string train_log_row(const TrainRecord& r);

class TrainingAborted : public std::runtime_error {
 public:
  TrainingAborted(const std::string& msg, int step) : std::runtime_error(msg), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

struct TrainOutputs {
  std::filesystem::path checkpoint;  // empty: keep everything in memory
  std::filesystem::path log;         // empty: no log file
};

struct TrainResult {
  EdgeNetParams params;
  LagrangianState state;
  std::vector<TrainRecord> history;
  int steps_done = 0;
};

class Trainer {
 public:
  Trainer(EdgeNetParams params, ObjectiveWeights weights, TrainConfig cfg);

  // Restores parameters, optimizer moments, multipliers and the step counter.
  void resume(const Checkpoint& ckpt);

  // Runs until cfg.steps total steps have been taken. A non-finite loss writes
  // the current (last good) parameters to the checkpoint path and throws
  // TrainingAborted. `on_step` sees every record as it is produced.
  TrainResult run(std::span<const AuctionInstance> data, const TrainOutputs& out = {},
                  const std::function<void(const TrainRecord&)>& on_step = {});

  Checkpoint snapshot();
  int step() const { return step_; }
  const LagrangianState& state() const { return state_; }
  EdgeNetParams& params() { return params_; }

 private:
  TrainRecord train_step(std::span<const AuctionInstance> data);

  EdgeNetParams params_;
  ObjectiveWeights weights_;
  TrainConfig cfg_;
  LagrangianState state_;
  ng::Adam adam_;
  int step_ = 0;
  std::vector<double> window_sum_;
  int window_count_ = 0;
};

// Convenience wrapper: fresh trainer, full run.
TrainResult train(std::span<const AuctionInstance> data, const ObjectiveWeights& weights,
                  const TrainConfig& cfg, const EdgeNetConfig& model = {},
                  const TrainOutputs& out = {});

}  // namespace edgenet
