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

// Multi-slot ad auction domain model shared by every mechanism.
//
// Conventions used throughout the library:
//  * slots and candidates are 0-based;
//  * bids and payments are money per click; a winner of slot j expects
//    pctr * gamma[j] clicks per impression;
//  * ties are broken by higher bid first, then lower candidate index.

#pragma once

#include "edgenet/numgrad.hpp"

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace edgenet {

using ng::Matrix;

class InvalidInstance : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct AdCandidate {
  double bid = 1.0;        // money per click, > 0
  double pctr = 0.0;       // [0, 1]
  double pcvr = 0.0;       // [0, 1]
  double cpc_value = 0.0;  // money per conversion, >= 0
  std::vector<double> features;

  bool operator==(const AdCandidate&) const = default;
};

struct UserContext {
  std::vector<double> features;
  bool operator==(const UserContext&) const = default;
};

struct Dims {
  int n = 10;
  int k = 3;
  int dx = 8;
  int dy = 8;
  bool operator==(const Dims&) const = default;
};

// Position discounts gamma_1 = 1 > gamma_2 > ... The K = 3 default is
// (1.0, 0.7, 0.5); other K decay geometrically from it.
std::vector<double> default_slot_discounts(int k);

struct AuctionInstance {
  UserContext user;
  std::vector<AdCandidate> candidates;
  int slot_count = 1;
  std::vector<double> slot_discounts{1.0};

  int n() const { return static_cast<int>(candidates.size()); }
  int k() const { return slot_count; }
  std::vector<double> bids() const;
  AuctionInstance with_bid(int i, double bid) const;

  bool operator==(const AuctionInstance&) const = default;
};

// Throws InvalidInstance naming the first broken invariant. Feature lengths
// are checked against `dims` when given.
void validate(const AuctionInstance& inst, const Dims* dims = nullptr);

struct MechanismOutcome {
  Matrix allocation;             // N x K, R(i, j) = P(slot j -> ad i)
  std::vector<int> assignment;   // K entries, winner index or -1 if empty
  std::vector<double> payments;  // N per-click prices

  // Slot won by ad i in `assignment`, or -1.
  int slot_of(int i) const;
};

// Builds a 0/1 allocation matrix and zero payments from an assignment.
MechanismOutcome outcome_from_assignment(int n, std::vector<int> assignment);

// Lists every violated MechanismOutcome invariant; empty when feasible.
std::vector<std::string> check_outcome(const AuctionInstance& inst,
                                       const MechanismOutcome& out,
                                       double tol = 1e-9);

class Mechanism {
 public:
  virtual ~Mechanism() = default;
  virtual std::string name() const = 0;
  virtual MechanismOutcome run(const AuctionInstance& inst) const = 0;
};

// pctr * pcvr * cpc_value * gamma[slot]. Throws std::out_of_range.
double valuation(const AdCandidate& ad, int slot, std::span<const double> slot_discounts);

// sum_j R(i, j) * v[j] - p_i.
double utility(std::span<const double> slot_values, const MechanismOutcome& out, int i);

// Expected clicks of ad i per impression: sum_j R(i, j) * pctr_i * gamma_j.
double expected_clicks(const AuctionInstance& inst, const MechanismOutcome& out, int i);

// Utility of ad i with the given true value per click when payments are per
// click: sum_j R(i, j) * pctr_i * gamma_j * (value - p_i).
double click_utility(const AuctionInstance& inst, const MechanismOutcome& out, int i,
                     double value_per_click);

// Candidate indices ordered by score descending with the library tie-break.
std::vector<int> rank_order(std::span<const double> scores, std::span<const double> bids);

enum class SelectMode { kArgmax, kSample };

// Draws categorical indices restricted to an allowed subset. Two samplers
// built from the same seed return identical draws for identical calls.
class SlotSampler {
 public:
  explicit SlotSampler(std::uint64_t seed) : rng_(seed) {}
  // Picks among allowed entries. Argmax mode breaks ties with `bids` (higher
  // first) then lower index. Sample mode renormalizes probs over the allowed
  // set; an all-zero allowed set falls back to argmax.
  int pick(std::span<const double> probs, std::span<const bool> allowed,
           std::span<const double> bids, SelectMode mode);

 private:
  std::mt19937_64 rng_;
};

// Slot-by-slot selection of K distinct winners from R (column j is slot j).
std::vector<int> feasible_assignment(const Matrix& allocation, SelectMode mode,
                                     std::uint64_t seed,
                                     std::span<const double> bids = {});

}  // namespace edgenet
