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

// Shared fixtures for the unit and acceptance tests: random instances,
// hand-built instances, a finite-difference gradient oracle and a brute-force
// retention-price search.

#pragma once

#include "edgenet/auction.hpp"
#include "edgenet/numgrad.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace edgenet::testing {

// Instance with the given bids and pctrs, uniform pcvr/cpc and random
// features of length dx / dy.
inline AuctionInstance make_instance(const std::vector<double>& bids,
                                     const std::vector<double>& pctrs, int k, int dx = 8,
                                     int dy = 8, std::uint64_t seed = 7) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  AuctionInstance inst;
  inst.slot_count = k;
  inst.slot_discounts = default_slot_discounts(k);
  for (int d = 0; d < dy; ++d) inst.user.features.push_back(z(rng));
  for (std::size_t i = 0; i < bids.size(); ++i) {
    AdCandidate c;
    c.bid = bids[i];
    c.pctr = pctrs[i];
    c.pcvr = 0.1;
    c.cpc_value = 2.0;
    for (int d = 0; d < dx; ++d) c.features.push_back(z(rng));
    inst.candidates.push_back(c);
  }
  return inst;
}

inline AuctionInstance random_instance(std::mt19937_64& rng, int n, int k, int dx = 8,
                                       int dy = 8) {
  std::lognormal_distribution<double> bid(0.0, 0.5);
  std::uniform_real_distribution<double> u(0.01, 0.5);
  std::normal_distribution<double> z(0.0, 1.0);
  AuctionInstance inst;
  inst.slot_count = k;
  inst.slot_discounts = default_slot_discounts(k);
  for (int d = 0; d < dy; ++d) inst.user.features.push_back(z(rng));
  for (int i = 0; i < n; ++i) {
    AdCandidate c;
    c.bid = bid(rng);
    c.pctr = u(rng);
    c.pcvr = u(rng) * 0.3;
    c.cpc_value = 1.0 + 4.0 * u(rng);
    for (int d = 0; d < dx; ++d) c.features.push_back(z(rng));
    inst.candidates.push_back(c);
  }
  return inst;
}

struct GradCheck {
  double max_rel_error = 0.0;  // over entries failing the absolute floor
  int entries = 0;
  int failures = 0;
};

// Compares backward() against central differences for every entry of every
// tensor. An entry passes when |a - f| <= rel_tol * max(|a|, |f|) or
// |a - f| <= abs_floor.
inline GradCheck check_gradients(const std::function<ng::Var(ng::Tape&)>& loss,
                                 std::span<ng::Tensor* const> params, double step = 1e-4,
                                 double rel_tol = 1e-4, double abs_floor = 1e-6) {
  for (ng::Tensor* p : params) p->zero_grad();
  {
    ng::Tape tape;
    tape.backward(loss(tape));
  }
  auto eval = [&] {
    ng::Tape tape(false);
    return loss(tape).scalar();
  };
  GradCheck out;
  for (ng::Tensor* p : params) {
    for (Eigen::Index e = 0; e < p->size(); ++e) {
      double& w = p->value.data()[e];
      const double saved = w;
      w = saved + step;
      const double up = eval();
      w = saved - step;
      const double down = eval();
      w = saved;
      const double fd = (up - down) / (2.0 * step);
      const double an = p->grad.size() ? p->grad.data()[e] : 0.0;
      const double err = std::abs(an - fd);
      ++out.entries;
      if (err <= abs_floor) continue;
      const double rel = err / std::max(std::abs(an), std::abs(fd));
      out.max_rel_error = std::max(out.max_rel_error, rel);
      if (rel > rel_tol) ++out.failures;
    }
  }
  return out;
}

// A small random network over the primitive set: 1-3 dense layers with a
// random activation each, optional concatenation and embedding lookup, and a
// random scalar head.
struct RandomNetwork {
  std::vector<ng::Tensor> weights;
  ng::Matrix input;
  std::vector<Eigen::Index> lookup;
  std::vector<int> acts;
  int head = 0;
  bool use_norm = false;

  std::vector<ng::Tensor*> tensors() {
    std::vector<ng::Tensor*> t;
    for (auto& w : weights) t.push_back(&w);
    return t;
  }

  explicit RandomNetwork(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> width(1, 8);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    auto rand_m = [&](int r, int c) {
      ng::Matrix m(r, c);
      for (Eigen::Index e = 0; e < m.size(); ++e) m.data()[e] = u(rng);
      return m;
    };
    const int rows = width(rng);
    int cols = width(rng);
    input = rand_m(rows, cols);
    const int vocab = 4;
    weights.emplace_back(rand_m(vocab, 3));  // embedding table
    for (int r = 0; r < rows; ++r) lookup.push_back(static_cast<Eigen::Index>(rng() % vocab));
    cols += 3;
    const int depth = 1 + static_cast<int>(rng() % 3);
    for (int l = 0; l < depth; ++l) {
      const int out = width(rng);
      weights.emplace_back(rand_m(cols, out));
      weights.emplace_back(rand_m(1, out));
      acts.push_back(static_cast<int>(rng() % 5));
      cols = out;
    }
    use_norm = cols > 1 && rng() % 2 == 0;
    weights.emplace_back(rand_m(1, cols));  // norm gain
    weights.emplace_back(rand_m(1, cols));  // norm bias
    head = static_cast<int>(rng() % 5);
  }

  ng::Var forward(ng::Tape& t) {
    ng::Var x = t.constant(input);
    ng::Var emb = ng::gather_rows(t.param(weights[0]), lookup);
    const ng::Var parts[] = {x, emb};
    x = ng::concat_cols(parts);
    std::size_t w = 1;
    for (int a : acts) {
      x = ng::add_row(ng::matmul(x, t.param(weights[w])), t.param(weights[w + 1]));
      w += 2;
      switch (a) {
        case 0: x = ng::tanh(x); break;
        case 1: x = ng::sigmoid(x); break;
        case 2: x = ng::softplus(x); break;
        case 3: x = ng::mul(x, ng::exp(ng::scale(x, 0.3))); break;
        default: x = ng::square(x); break;
      }
    }
    if (use_norm) x = ng::layer_norm(x, t.param(weights[w]), t.param(weights[w + 1]));
    else x = ng::mul_row(x, t.param(weights[w]));
    switch (head) {
      case 0: return ng::logsumexp(x);
      case 1: return ng::sum(ng::mul(ng::softmax(x, ng::Axis::kCols), x));
      case 2: return ng::sum(ng::mul(ng::softmax(x, ng::Axis::kRows), x));
      case 3: return ng::mean(ng::sum_cols(ng::square(x)));
      default: return ng::sum(ng::log(ng::add_scalar(ng::sigmoid(ng::mean_rows(x)), 0.5)));
    }
  }
};

// Smallest bid on a grid over [0, bid] that keeps ad i in its current slot
// or better. Returns -1 when the ad does not win.
inline double brute_force_retention(const Mechanism& mech, const AuctionInstance& inst, int i,
                                    double step) {
  const int slot = mech.run(inst).slot_of(i);
  if (slot < 0) return -1.0;
  const double bid = inst.candidates[i].bid;
  const int steps = static_cast<int>(std::ceil(bid / step));
  for (int s = 1; s <= steps; ++s) {
    const double b = std::min(bid, s * step);
    const int got = mech.run(inst.with_bid(i, b)).slot_of(i);
    if (got >= 0 && got <= slot) return b;
  }
  return bid;
}

}  // namespace edgenet::testing
