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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero
// if any fails. Pass criterion numbers as arguments to run a subset.
//
//   1 autodiff soundness          5 encoder equivariance
//   2 mechanism feasibility       6 decoder monotonicity
//   3 baseline oracle equivalence 7 training efficacy on the default benchmark
//   4 regret estimator calibration 8 determinism of every command

#include "edgenet/baselines.hpp"
#include "edgenet/datagen.hpp"
#include "edgenet/decoder.hpp"
#include "edgenet/encoder.hpp"
#include "edgenet/evalkit.hpp"
#include "edgenet/experiment.hpp"
#include "edgenet/regret.hpp"
#include "edgenet/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"

#ifndef EDGENET_CLI_PATH
#error "EDGENET_CLI_PATH must name the command-line binary"
#endif

namespace edgenet {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Pinned tolerances.
constexpr double kFdRelTol = 1e-4;        // criterion 1
constexpr double kFdAbsFloor = 1e-6;      // criterion 1, gradients below this are compared absolutely
constexpr double kFdStep = 1e-4;          // criterion 1
constexpr double kAutodiffBudget = 60.0;  // seconds, criterion 1
constexpr double kFeasTol = 1e-9;         // criterion 2
constexpr double kRetainStep = 1e-4;      // criterion 3
constexpr double kSameOutcomeTol = 1e-12; // criterion 3
constexpr double kCalibrationDelta = 0.05;  // criterion 4
constexpr double kPermTol = 1e-12;        // criterion 5, ad embeddings
constexpr double kContextTol = 1e-9;      // criterion 5
constexpr double kBumpTol = 1e-9;         // criterion 6
constexpr double kIcrCeiling = 10.0;      // percent, criterion 7
constexpr double kRpmSlack = 0.02;        // relative, criterion 7
constexpr double kBenchmarkBudget = 1800.0;  // seconds, criterion 7

struct Result {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<AuctionInstance> random_instances(std::mt19937_64& rng, int count, int max_n,
                                              int max_k) {
  std::vector<AuctionInstance> out;
  for (int t = 0; t < count; ++t) {
    const int n = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_n));
    const int k = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(std::min(n, max_k)));
    out.push_back(testing::random_instance(rng, n, k));
  }
  return out;
}

// ---- 1 -----------------------------------------------------------------------

Result autodiff_soundness() {
  const auto t0 = Clock::now();
  int failing_networks = 0, entries = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    testing::RandomNetwork net(seed);
    const auto ts = net.tensors();
    const auto r = testing::check_gradients([&](ng::Tape& t) { return net.forward(t); }, ts,
                                            kFdStep, kFdRelTol, kFdAbsFloor);
    entries += r.entries;
    worst = std::max(worst, r.max_rel_error);
    if (r.failures > 0) ++failing_networks;
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  Result res;
  res.pass = failing_networks == 0 && secs < kAutodiffBudget;
  res.detail = fmt("100 networks, %d gradient entries, %d networks over rel 1e-4, max rel %.2e, %.1fs",
                   entries, failing_networks, worst, secs);
  return res;
}

// ---- 2 -----------------------------------------------------------------------

Result mechanism_feasibility() {
  std::mt19937_64 rng(2002);
  const auto data = random_instances(rng, 1000, 10, 3);

  SynthConfig sc;
  sc.count = 400;
  sc.seed = 2003;
  const AuctionLog train_log = generate(sc);
  DnaLiteTrainConfig dc;
  dc.steps = 100;
  dc.seed = 1;
  auto dna = std::make_shared<DnaLiteParams>(
      dnalite_train(train_log.instances, {}, dc).params);
  TrainConfig tc;
  tc.steps = 40;
  tc.batch_size = 16;
  tc.checkpoint_every = 0;
  auto trained = std::make_shared<EdgeNetParams>(train(train_log.instances, {}, tc).params);
  auto untrained = std::make_shared<EdgeNetParams>(EdgeNetConfig{}, 7);

  std::vector<std::shared_ptr<Mechanism>> mechs = {
      std::make_shared<GspMechanism>(GspConfig{1.0}),
      std::make_shared<UgspMechanism>(UgspConfig{}),
      std::make_shared<DnaLiteMechanism>(dna),
      std::make_shared<EdgeNetMechanism>(untrained, SelectMode::kArgmax, 0, "EdgeNet untrained"),
      std::make_shared<EdgeNetMechanism>(trained, SelectMode::kArgmax, 0, "EdgeNet trained")};

  Result res;
  std::string per;
  for (const auto& m : mechs) {
    int violations = 0;
    std::string first;
    for (const auto& inst : data) {
      const auto v = check_outcome(inst, m->run(inst), kFeasTol);
      violations += static_cast<int>(v.size());
      if (!v.empty() && first.empty()) first = v.front();
    }
    per += fmt("%s%s %d", per.empty() ? "" : ", ", m->name().c_str(), violations);
    if (violations > 0) {
      res.pass = false;
      per += " (" + first + ")";
    }
  }
  res.detail = "1000 instances, violations: " + per;
  return res;
}

// ---- 3 -----------------------------------------------------------------------

Result baseline_oracles() {
  std::mt19937_64 rng(3003);
  const auto data = random_instances(rng, 200, 6, 3);
  int checked = 0, mismatches = 0, differing = 0;
  double worst = 0.0;
  const double sigmas[] = {0.5, 1.0, 1.5};
  for (std::size_t t = 0; t < data.size(); ++t) {
    const auto& inst = data[t];
    const GspMechanism gsp({sigmas[t % 3]});
    const UgspMechanism ugsp({1.0, 0.05, 0.1});
    for (const Mechanism* m : {static_cast<const Mechanism*>(&gsp),
                               static_cast<const Mechanism*>(&ugsp)}) {
      const auto out = m->run(inst);
      for (int i = 0; i < inst.n(); ++i) {
        const double brute = testing::brute_force_retention(*m, inst, i, kRetainStep);
        if (brute < 0) continue;
        ++checked;
        // The grid answer is the first grid bid that retains, so the exact
        // threshold lies in (brute - step, brute].
        const double gap = brute - out.payments[i];
        worst = std::max(worst, std::abs(gap));
        if (gap < -1e-12 || gap >= kRetainStep + 1e-12) ++mismatches;
      }
    }
    const auto g = gsp_run(inst, {1.0});
    const auto u = ugsp_run(inst, {1.0, 0.0, 0.0});
    bool same = g.assignment == u.assignment &&
                (g.allocation - u.allocation).cwiseAbs().maxCoeff() <= kSameOutcomeTol;
    for (int i = 0; i < inst.n(); ++i)
      same = same && std::abs(g.payments[i] - u.payments[i]) <= kSameOutcomeTol;
    if (!same) ++differing;
  }
  Result res;
  res.pass = mismatches == 0 && differing == 0;
  res.detail = fmt("200 instances, %d winner payments vs grid step 1e-4: %d off-grid (max |gap| %.2e); "
                   "uGSP(1,0,0) vs GSP(1): %d differing outcomes",
                   checked, mismatches, worst, differing);
  return res;
}

// ---- 4 -----------------------------------------------------------------------

Result regret_calibration() {
  std::mt19937_64 rng(4004);
  std::vector<AuctionInstance> data;
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + static_cast<int>(rng() % 5);
    data.push_back(testing::random_instance(rng, n, 1));
  }
  const RegretReport sp = empirical_regret(SecondPriceOracle{}, data, {});

  // Grid reaching from 0.05 b to 1.95 b in steps of delta b.
  const PerturbationScheme scheme{kCalibrationDelta, 19};
  const FirstPriceOracle fp;
  int pairs = 0, off = 0;
  double worst = 0.0;
  for (const auto& inst : data) {
    for (int i = 0; i < inst.n(); ++i) {
      const double est = expost_regret(fp, inst, i, scheme);
      // Brute force over (0, 2b] on a grid 100 times finer than delta.
      const double b = inst.candidates[i].bid;
      const double truthful = click_utility(inst, fp.run(inst), i, b);
      double best = truthful;
      const int points = 2000;
      for (int s = 1; s <= points; ++s) {
        const double lie = 2.0 * b * s / points;
        best = std::max(best, click_utility(inst, fp.run(inst.with_bid(i, lie)), i, b));
      }
      const double brute = best - truthful;
      // Per-click tolerance delta * b, in utility units for the single slot.
      const double tol = kCalibrationDelta * b * inst.candidates[i].pctr * inst.slot_discounts[0];
      const double gap = std::abs(est - brute);
      worst = std::max(worst, gap / (inst.candidates[i].pctr * b));
      ++pairs;
      if (gap > tol + 1e-12) ++off;
    }
  }
  Result res;
  res.pass = sp.ic_r == 0.0 && off == 0;
  res.detail = fmt("second-price IC-R %.2f%% over 200 instances; first-price: %d of %d advertisers "
                   "outside delta*b of brute force (max gap %.3f b per click)",
                   sp.ic_r, off, pairs, worst);
  return res;
}

// ---- 5 -----------------------------------------------------------------------

Result encoder_equivariance() {
  std::mt19937_64 rng(5005);
  int perm_fail = 0, bid_fail = 0;
  double worst_ads = 0.0, worst_ctx = 0.0;
  for (int t = 0; t < 500; ++t) {
    EncoderConfig cfg;
    cfg.layers = 1 + static_cast<int>(t % 2);
    std::mt19937_64 prng(50000 + static_cast<std::uint64_t>(t));
    EncoderParams p(cfg, prng);
    const int n = 1 + static_cast<int>(rng() % 10);
    const auto inst = testing::random_instance(rng, n, std::min(n, 3));
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    auto shuffled = inst;
    for (int i = 0; i < n; ++i) shuffled.candidates[i] = inst.candidates[perm[i]];
    const auto a = encode_instance(inst, p);
    const auto b = encode_instance(shuffled, p);
    double ads = 0.0;
    for (int i = 0; i < n; ++i)
      ads = std::max(ads, (b.ads.row(i) - a.ads.row(perm[i])).cwiseAbs().maxCoeff());
    const double ctx = std::max((a.context - b.context).cwiseAbs().maxCoeff(),
                                (a.user - b.user).cwiseAbs().maxCoeff());
    worst_ads = std::max(worst_ads, ads);
    worst_ctx = std::max(worst_ctx, ctx);
    if (ads > kPermTol || ctx > kContextTol) ++perm_fail;

    auto bumped = inst;
    std::lognormal_distribution<double> factor(0.0, 1.0);
    for (auto& c : bumped.candidates) c.bid *= factor(rng);
    const auto c = encode_instance(bumped, p);
    if (!(c.ads == a.ads && c.user == a.user && c.context == a.context)) ++bid_fail;
  }
  Result res;
  res.pass = perm_fail == 0 && bid_fail == 0;
  res.detail = fmt("500 instances: %d permutation failures (max ad gap %.1e, max context gap %.1e), "
                   "%d outputs changed by bids",
                   perm_fail, worst_ads, worst_ctx, bid_fail);
  return res;
}

// ---- 6 -----------------------------------------------------------------------

Result decoder_monotonicity() {
  std::mt19937_64 rng(6006);
  std::normal_distribution<double> z(0.0, 1.0);
  int bump_checks = 0, bump_fail = 0, grid_fail = 0;
  double worst = 0.0;
  for (int t = 0; t < 500; ++t) {
    EdgeNetParams p({}, 60000 + static_cast<std::uint64_t>(t));
    p.decoder.att_w3.value(0, 0) = 0.5 * z(rng);
    const int n = 2 + static_cast<int>(rng() % 9);
    const auto inst = testing::random_instance(rng, n, std::min(n, 3));
    const int i = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    const double delta = std::exp(z(rng) - 1.0);
    const auto a = run_edgenet(inst, p).trace;
    const auto b = run_edgenet(inst.with_bid(i, inst.candidates[i].bid + delta), p).trace;
    // Columns share their input until the two decodes pick different ads.
    for (int j = 0; j < inst.k(); ++j) {
      if (j > 0 && a.selected[j - 1] != b.selected[j - 1]) break;
      for (int r = 0; r < n; ++r) {
        if (a.masks[j][r]) continue;
        const double want = r == i ? p.decoder.bid_slope() * delta : 0.0;
        const double err = std::abs((b.mu(r, j) - a.mu(r, j)) - want);
        worst = std::max(worst, err);
        ++bump_checks;
        if (err > kBumpTol) ++bump_fail;
      }
    }
    auto rank = [](int slot) { return slot < 0 ? 1000 : slot; };
    int prev = 1001;
    for (int g = 0; g < 20; ++g) {
      const double bid = inst.candidates[i].bid * (0.1 + 0.15 * g);
      const int slot = rank(run_edgenet(inst.with_bid(i, bid), p).outcome.slot_of(i));
      if (slot > prev) {
        ++grid_fail;
        break;
      }
      prev = slot;
    }
  }
  Result res;
  res.pass = bump_fail == 0 && grid_fail == 0;
  res.detail = fmt("500 pairs: %d mu checks, %d off by more than 1e-9 (max %.1e); "
                   "%d bid grids with a worse slot",
                   bump_checks, bump_fail, worst, grid_fail);
  return res;
}

// ---- 7 -----------------------------------------------------------------------

Result training_efficacy() {
  const auto t0 = Clock::now();
  const ExperimentConfig cfg;  // the default benchmark
  SynthConfig test_cfg = cfg.synth;
  test_cfg.count = cfg.test_count;
  test_cfg.seed = cfg.test_seed;
  const AuctionLog train_log = generate(cfg.synth);
  const AuctionLog test_log = generate(test_cfg);
  const std::span<const AuctionInstance> test(test_log.instances);
  const auto audit = test.first(static_cast<std::size_t>(cfg.audit_instances));
  const std::span<const AuctionInstance> loss_batch =
      std::span<const AuctionInstance>(train_log.instances).first(256);

  const auto gsp = tuned_gsp(test, cfg.gsp_sigmas);
  const double gsp_rpm = simulate_metrics(*gsp, test).rpm;

  bool loss_ok = true, icr_ok = true;
  std::vector<double> rpms;
  std::string per;
  for (std::uint64_t seed : cfg.seeds) {
    TrainConfig tc = cfg.train;
    tc.seed = seed;
    tc.checkpoint_every = 0;
    LagrangianState fixed;
    fixed.multipliers.assign(static_cast<std::size_t>(cfg.synth.dims.n), tc.initial_multiplier);
    fixed.penalty = tc.initial_penalty;

    auto init = std::make_shared<EdgeNetParams>(cfg.model, seed);
    const double loss0 = evaluate_lagrangian(*init, loss_batch, cfg.weights, fixed, tc, 7).loss;
    const double icr0 = empirical_regret(EdgeNetMechanism(init), audit, cfg.regret).ic_r;

    const auto ts = Clock::now();
    auto trained =
        std::make_shared<EdgeNetParams>(train(train_log.instances, cfg.weights, tc, cfg.model).params);
    const double train_secs = std::chrono::duration<double>(Clock::now() - ts).count();
    const double loss1 = evaluate_lagrangian(*trained, loss_batch, cfg.weights, fixed, tc, 7).loss;
    const EdgeNetMechanism mech(trained);
    const double icr1 = empirical_regret(mech, audit, cfg.regret).ic_r;
    const double rpm = simulate_metrics(mech, test).rpm;
    rpms.push_back(rpm);
    loss_ok = loss_ok && loss1 < loss0;
    icr_ok = icr_ok && icr1 < icr0 && icr1 < kIcrCeiling;
    per += fmt("\n    seed %llu: loss %.4f -> %.4f, IC-R %.2f%% -> %.2f%%, RPM %.2f, train %.0fs",
               static_cast<unsigned long long>(seed), loss0, loss1, icr0, icr1, rpm, train_secs);
  }
  const double mean_rpm = std::accumulate(rpms.begin(), rpms.end(), 0.0) / rpms.size();
  const bool rpm_ok = mean_rpm >= (1.0 - kRpmSlack) * gsp_rpm;
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool time_ok = secs <= kBenchmarkBudget;
  Result res;
  res.pass = loss_ok && icr_ok && rpm_ok && time_ok;
  res.detail = fmt("(a) loss %s, (b) IC-R %s, (c) RPM %s: EdgeNet %.2f vs %s %.2f (floor %.2f), "
                   "runtime %.0fs %s",
                   loss_ok ? "ok" : "FAIL", icr_ok ? "ok" : "FAIL", rpm_ok ? "ok" : "FAIL",
                   mean_rpm, gsp->name().c_str(), gsp_rpm, (1.0 - kRpmSlack) * gsp_rpm, secs,
                   time_ok ? "ok" : "FAIL") +
               per;
  return res;
}

// ---- 8 -----------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = slurp(e.path());
  return files;
}

Result determinism() {
  const fs::path dir = fs::temp_directory_path() / "edgenet_acceptance_determinism";
  const std::string common =
      " --set synth.n=6 synth.k=2 synth.train_count=60 synth.test_count=30 model.de=8 model.dh=8"
      " model.dc=8 model.ff=16 model.da=8 model.dm=8 train.batch_size=8 train.steps=6"
      " train.checkpoint_every=3 dnalite.steps=5 regret.audit_instances=10 eval.seeds=[1,2]"
      " --train-log data/train.log --test-log data/test.log --checkpoint runs/edgenet.ckpt"
      " --history runs/history.tsv --report-dir reports";
  const std::vector<std::string> commands = {
      "gen", "train", "eval", "audit --mechanism edgenet", "audit --mechanism gsp",
      "audit --mechanism dnalite", "compare"};
  std::map<std::string, std::string> runs[2];
  for (int run = 0; run < 2; ++run) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    for (std::size_t c = 0; c < commands.size(); ++c) {
      const std::string cmd = "cd '" + dir.string() + "' && '" + EDGENET_CLI_PATH + "' " +
                              commands[c] + common + " > stdout-" + std::to_string(c) + ".txt 2>&1";
      if (std::system(cmd.c_str()) != 0) {
        Result res;
        res.pass = false;
        res.detail = "command failed: edgenet " + commands[c] + "\n" +
                     slurp(dir / ("stdout-" + std::to_string(c) + ".txt"));
        return res;
      }
    }
    runs[run] = snapshot(dir);
  }
  fs::remove_all(dir);
  std::vector<std::string> differing;
  for (const auto& [name, bytes] : runs[0]) {
    auto it = runs[1].find(name);
    if (it == runs[1].end() || it->second != bytes) differing.push_back(name);
  }
  if (runs[1].size() != runs[0].size()) differing.push_back("(file set)");
  Result res;
  res.pass = differing.empty();
  res.detail = fmt("%zu commands run twice, %zu files compared, %zu differ", commands.size(),
                   runs[0].size(), differing.size());
  for (const auto& d : differing) res.detail += " " + d;
  return res;
}

}  // namespace
}  // namespace edgenet

int main(int argc, char** argv) {
  using namespace edgenet;
  struct Criterion {
    int id;
    const char* name;
    std::function<Result()> run;
  };
  const std::vector<Criterion> all = {
      {1, "autodiff soundness", autodiff_soundness},
      {2, "mechanism feasibility", mechanism_feasibility},
      {3, "baseline oracle equivalence", baseline_oracles},
      {4, "regret estimator calibration", regret_calibration},
      {5, "encoder equivariance", encoder_equivariance},
      {6, "decoder monotonicity", decoder_monotonicity},
      {7, "training efficacy", training_efficacy},
      {8, "determinism", determinism},
  };
  std::set<int> wanted;
  for (int a = 1; a < argc; ++a) wanted.insert(std::atoi(argv[a]));
  int failed = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto t0 = Clock::now();
    Result r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    std::printf("[%s] %d %s (%.1fs): %s\n", r.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                r.detail.c_str());
    std::fflush(stdout);
    if (!r.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
