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

#include "edgenet/auction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace edgenet {

std::vector<double> default_slot_discounts(int k) {
  std::vector<double> g;
  const double base[] = {1.0, 0.7, 0.5};
  for (int j = 0; j < k; ++j) g.push_back(j < 3 ? base[j] : g.back() * (0.5 / 0.7));
  return g;
}

std::vector<double> AuctionInstance::bids() const {
  std::vector<double> b;
  b.reserve(candidates.size());
  for (const auto& c : candidates) b.push_back(c.bid);
  return b;
}

AuctionInstance AuctionInstance::with_bid(int i, double bid) const {
  AuctionInstance copy = *this;
  copy.candidates.at(static_cast<std::size_t>(i)).bid = bid;
  return copy;
}

void validate(const AuctionInstance& inst, const Dims* dims) {
  auto fail = [](const std::string& msg) { throw InvalidInstance(msg); };
  const int n = inst.n();
  const int k = inst.k();
  if (k < 1) fail("slot count must be positive");
  if (k > n) fail("slot count " + std::to_string(k) + " exceeds candidate count " +
                  std::to_string(n));
  if (static_cast<int>(inst.slot_discounts.size()) != k)
    fail("expected " + std::to_string(k) + " slot discounts");
  if (inst.slot_discounts[0] != 1.0) fail("first slot discount must be 1");
  for (int j = 1; j < k; ++j) {
    if (!(inst.slot_discounts[j] > 0.0 && inst.slot_discounts[j] < inst.slot_discounts[j - 1]))
      fail("slot discounts must be positive and strictly decreasing");
  }
  if (dims != nullptr && static_cast<int>(inst.user.features.size()) != dims->dy)
    fail("user feature length " + std::to_string(inst.user.features.size()) +
         " != d_y " + std::to_string(dims->dy));
  for (int i = 0; i < n; ++i) {
    const auto& c = inst.candidates[i];
    const std::string who = "candidate " + std::to_string(i) + ": ";
    if (!(c.bid > 0.0) || !std::isfinite(c.bid)) fail(who + "bid must be positive");
    if (!(c.pctr >= 0.0 && c.pctr <= 1.0)) fail(who + "pctr outside [0,1]");
    if (!(c.pcvr >= 0.0 && c.pcvr <= 1.0)) fail(who + "pcvr outside [0,1]");
    if (!(c.cpc_value >= 0.0)) fail(who + "cpc value negative");
    if (dims != nullptr && static_cast<int>(c.features.size()) != dims->dx)
      fail(who + "feature length " + std::to_string(c.features.size()) + " != d_x " +
           std::to_string(dims->dx));
    if (dims == nullptr && c.features.size() != inst.candidates[0].features.size())
      fail(who + "feature length differs from candidate 0");
  }
}

int MechanismOutcome::slot_of(int i) const {
  for (std::size_t j = 0; j < assignment.size(); ++j)
    if (assignment[j] == i) return static_cast<int>(j);
  return -1;
}

MechanismOutcome outcome_from_assignment(int n, std::vector<int> assignment) {
  MechanismOutcome out;
  const auto k = static_cast<Eigen::Index>(assignment.size());
  out.allocation = Matrix::Zero(n, k);
  for (Eigen::Index j = 0; j < k; ++j)
    if (assignment[j] >= 0) out.allocation(assignment[j], j) = 1.0;
  out.assignment = std::move(assignment);
  out.payments.assign(static_cast<std::size_t>(n), 0.0);
  return out;
}

std::vector<std::string> check_outcome(const AuctionInstance& inst,
                                       const MechanismOutcome& out, double tol) {
  std::vector<std::string> v;
  const int n = inst.n();
  const int k = inst.k();
  auto add = [&v](const std::string& s) { v.push_back(s); };
  if (out.allocation.rows() != n || out.allocation.cols() != k) {
    add("allocation shape mismatch");
    return v;
  }
  if (static_cast<int>(out.payments.size()) != n) add("payment vector length mismatch");
  if (static_cast<int>(out.assignment.size()) != k) add("assignment length mismatch");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) {
      const double r = out.allocation(i, j);
      if (!(r >= -tol && r <= 1.0 + tol))
        add("R(" + std::to_string(i) + "," + std::to_string(j) + ") outside [0,1]");
    }
  for (int j = 0; j < k; ++j)
    if (out.allocation.col(j).sum() > 1.0 + tol) add("column " + std::to_string(j) + " sum > 1");
  for (int i = 0; i < n; ++i)
    if (out.allocation.row(i).sum() > 1.0 + tol) add("row " + std::to_string(i) + " sum > 1");
  std::vector<int> seen;
  for (int w : out.assignment) {
    if (w < -1 || w >= n) add("assignment index out of range");
    if (w >= 0) {
      if (std::find(seen.begin(), seen.end(), w) != seen.end()) add("winner repeated");
      seen.push_back(w);
    }
  }
  for (int i = 0; i < n && i < static_cast<int>(out.payments.size()); ++i) {
    const double p = out.payments[i];
    const std::string who = "ad " + std::to_string(i) + ": ";
    if (!std::isfinite(p) || p < -tol) add(who + "negative or non-finite payment");
    if (p > inst.candidates[i].bid + tol) add(who + "payment exceeds bid");
    if (out.slot_of(i) < 0 && std::abs(p) > tol) add(who + "loser charged");
  }
  return v;
}

double valuation(const AdCandidate& ad, int slot, std::span<const double> slot_discounts) {
  if (slot < 0 || slot >= static_cast<int>(slot_discounts.size()))
    throw std::out_of_range("slot index " + std::to_string(slot) + " out of range");
  return ad.pctr * ad.pcvr * ad.cpc_value * slot_discounts[slot];
}

double utility(std::span<const double> slot_values, const MechanismOutcome& out, int i) {
  double u = 0.0;
  for (std::size_t j = 0; j < slot_values.size(); ++j)
    u += out.allocation(i, static_cast<Eigen::Index>(j)) * slot_values[j];
  return u - out.payments.at(static_cast<std::size_t>(i));
}

double expected_clicks(const AuctionInstance& inst, const MechanismOutcome& out, int i) {
  double c = 0.0;
  for (int j = 0; j < inst.k(); ++j) c += out.allocation(i, j) * inst.slot_discounts[j];
  return c * inst.candidates.at(static_cast<std::size_t>(i)).pctr;
}

double click_utility(const AuctionInstance& inst, const MechanismOutcome& out, int i,
                     double value_per_click) {
  const double clicks = expected_clicks(inst, out, i);
  return clicks * (value_per_click - out.payments.at(static_cast<std::size_t>(i)));
}

std::vector<int> rank_order(std::span<const double> scores, std::span<const double> bids) {
  std::vector<int> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    if (!bids.empty() && bids[a] != bids[b]) return bids[a] > bids[b];
    return a < b;
  });
  return idx;
}

int SlotSampler::pick(std::span<const double> probs, std::span<const bool> allowed,
                      std::span<const double> bids, SelectMode mode) {
  const int n = static_cast<int>(probs.size());
  int best = -1;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!allowed[i]) continue;
    total += probs[i];
    if (best < 0 || probs[i] > probs[best]) {
      best = i;
    } else if (probs[i] == probs[best] && !bids.empty() && bids[i] > bids[best]) {
      best = i;
    }
  }
  if (best < 0) throw std::logic_error("slot selection: every candidate is masked");
  if (mode == SelectMode::kArgmax) return best;
  // Always consume one draw per call so replay stays aligned.
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
  if (!(total > 0.0)) return best;
  double acc = 0.0;
  int last = best;
  for (int i = 0; i < n; ++i) {
    if (!allowed[i] || probs[i] <= 0.0) continue;
    acc += probs[i] / total;
    last = i;
    if (u < acc) return i;
  }
  return last;
}

std::vector<int> feasible_assignment(const Matrix& allocation, SelectMode mode,
                                     std::uint64_t seed, std::span<const double> bids) {
  const int n = static_cast<int>(allocation.rows());
  const int k = static_cast<int>(allocation.cols());
  if (k > n) throw std::logic_error("feasible_assignment: more slots than candidates");
  std::unique_ptr<bool[]> allowed(new bool[static_cast<std::size_t>(n)]);
  std::fill(allowed.get(), allowed.get() + n, true);
  SlotSampler sampler(seed);
  std::vector<int> winners;
  std::vector<double> col(static_cast<std::size_t>(n));
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < n; ++i) col[i] = allocation(i, j);
    const int w = sampler.pick(col, std::span<const bool>(allowed.get(), n), bids, mode);
    winners.push_back(w);
    allowed[w] = false;
  }
  return winners;
}

}  // namespace edgenet
