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

#include "edgenet/regret.hpp"

#include "edgenet/baselines.hpp"

#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

namespace edgenet {
namespace {

using testing::make_instance;

// Always shows ads 0..K-1 in order and charges nothing.
class FixedMechanism final : public Mechanism {
 public:
  std::string name() const override { return "fixed"; }
  MechanismOutcome run(const AuctionInstance& inst) const override {
    std::vector<int> a;
    for (int j = 0; j < inst.k(); ++j) a.push_back(j);
    return outcome_from_assignment(inst.n(), a);
  }
};

TEST(Scheme, GridPoints) {
  PerturbationScheme s{0.25, 2};
  EXPECT_EQ(s.misreports(4.0), (std::vector<double>{2.0, 3.0, 5.0, 6.0}));
  PerturbationScheme wide{0.5, 3};
  EXPECT_EQ(wide.misreports(2.0), (std::vector<double>{1.0, 3.0, 4.0, 5.0}));
  EXPECT_THROW((PerturbationScheme{0.0, 1}.validate()), std::invalid_argument);
  EXPECT_THROW((PerturbationScheme{0.1, 0}.validate()), std::invalid_argument);
}

TEST(ExpostRegret, BidIndependentMechanismHasNone) {
  std::mt19937_64 rng(1);
  FixedMechanism mech;
  for (int t = 0; t < 10; ++t) {
    const auto inst = testing::random_instance(rng, 5, 2);
    for (int i = 0; i < 5; ++i) EXPECT_EQ(expost_regret(mech, inst, i, {}), 0.0);
  }
}

TEST(ExpostRegret, SecondPriceIsTruthful) {
  const auto inst = make_instance({2.0, 1.0}, {1.0, 1.0}, 1);
  SecondPriceOracle mech;
  const PerturbationScheme fine{0.001, 999};
  EXPECT_EQ(expost_regret(mech, inst, 0, fine), 0.0);
  EXPECT_EQ(expost_regret(mech, inst, 1, fine), 0.0);
}

TEST(ExpostRegret, FirstPriceRewardsShading) {
  const auto inst = make_instance({2.0, 1.0}, {1.0, 1.0}, 1);
  FirstPriceOracle mech;
  const PerturbationScheme scheme{0.05, 10};
  const auto r = expost_regret_detail(mech, inst, 0, scheme);
  EXPECT_NEAR(r.regret, 1.0, scheme.delta * 2.0);
  EXPECT_DOUBLE_EQ(r.best_bid, 1.0);
  EXPECT_EQ(r.truthful_utility, 0.0);
  EXPECT_EQ(expost_regret(mech, inst, 1, scheme), 0.0);
}

TEST(EmpiricalRegret, SingleInstanceMatchesPerAdvertiser) {
  std::mt19937_64 rng(2);
  const auto inst = testing::random_instance(rng, 5, 3);
  const GspMechanism mech({1.0});
  const PerturbationScheme s;
  const std::vector<AuctionInstance> one{inst};
  const auto rep = empirical_regret(mech, one, s);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(rep.per_advertiser[i], expost_regret(mech, inst, i, s));
}

TEST(EmpiricalRegret, DuplicatedInstanceGivesSameReport) {
  std::mt19937_64 rng(3);
  const auto inst = testing::random_instance(rng, 6, 3);
  const GspMechanism mech({1.0});
  const std::vector<AuctionInstance> one{inst}, two{inst, inst};
  const auto a = empirical_regret(mech, one, {});
  const auto b = empirical_regret(mech, two, {});
  EXPECT_EQ(a.per_advertiser, b.per_advertiser);
  EXPECT_EQ(a.truthful_utility, b.truthful_utility);
  EXPECT_EQ(a.mean_regret, b.mean_regret);
  EXPECT_EQ(a.ic_r, b.ic_r);
}

TEST(EmpiricalRegret, SecondPriceScoresZeroIcr) {
  std::mt19937_64 rng(4);
  std::vector<AuctionInstance> data;
  for (int t = 0; t < 50; ++t) data.push_back(testing::random_instance(rng, 4, 1));
  const auto rep = empirical_regret(SecondPriceOracle{}, data, {});
  EXPECT_EQ(rep.ic_r, 0.0);
  EXPECT_EQ(rep.mean_regret, 0.0);
  EXPECT_EQ(rep.ic_r_samples, 50);
}

TEST(EmpiricalRegret, GspIsManipulable) {
  std::mt19937_64 rng(5);
  std::vector<AuctionInstance> data;
  for (int t = 0; t < 50; ++t) data.push_back(testing::random_instance(rng, 6, 3));
  const auto rep = empirical_regret(GspMechanism({1.0}), data, {0.05, 1});
  EXPECT_GT(rep.ic_r, 0.0);
  EXPECT_TRUE(std::isfinite(rep.ic_r));
}

TEST(EmpiricalRegret, SupersetGridNeverLowersRegret) {
  std::mt19937_64 rng(6);
  std::vector<AuctionInstance> data;
  for (int t = 0; t < 30; ++t) data.push_back(testing::random_instance(rng, 6, 3));
  const GspMechanism mech({1.0});
  const auto coarse = empirical_regret(mech, data, {0.1, 5});
  const auto fine = empirical_regret(mech, data, {0.05, 10});  // contains every coarse point
  EXPECT_GE(fine.mean_regret, coarse.mean_regret - 1e-12);
  for (std::size_t i = 0; i < coarse.per_advertiser.size(); ++i)
    EXPECT_GE(fine.per_advertiser[i], coarse.per_advertiser[i] - 1e-12);
}

TEST(EmpiricalRegret, RepeatableAndNonNegative) {
  std::mt19937_64 rng(7);
  std::vector<AuctionInstance> data;
  for (int t = 0; t < 20; ++t) data.push_back(testing::random_instance(rng, 5, 2));
  const UgspMechanism mech({1.0, 0.1, 0.1});
  const auto a = empirical_regret(mech, data, {});
  const auto b = empirical_regret(mech, data, {});
  EXPECT_EQ(a.per_advertiser, b.per_advertiser);
  EXPECT_EQ(a.ic_r, b.ic_r);
  for (double r : a.per_advertiser) EXPECT_GE(r, 0.0);
}

TEST(EmpiricalRegret, EmptyDatasetRejected) {
  EXPECT_THROW(empirical_regret(SecondPriceOracle{}, {}, {}), std::invalid_argument);
}

}  // namespace
}  // namespace edgenet
