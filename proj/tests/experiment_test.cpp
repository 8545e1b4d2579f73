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

#include "edgenet/experiment.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace edgenet {
namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("edgenet_experiment_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// A configuration small enough for every command to finish in well under a second.
std::vector<std::string> small_overrides(const fs::path& dir) {
  return {"paths.train_log=" + (dir / "data/train.log").string(),
          "paths.test_log=" + (dir / "data/test.log").string(),
          "paths.checkpoint=" + (dir / "runs/model.ckpt").string(),
          "paths.history=" + (dir / "runs/history.tsv").string(),
          "paths.report_dir=" + (dir / "reports").string(),
          "synth.n=5", "synth.k=2", "synth.dx=3", "synth.dy=3",
          "synth.train_count=24", "synth.test_count=12",
          "model.de=4", "model.dh=4", "model.dc=4", "model.heads=1", "model.ff=8",
          "model.da=4", "model.dm=4",
          "train.batch_size=4", "train.steps=3", "train.checkpoint_every=2",
          "dnalite.steps=3", "dnalite.hidden=4", "regret.audit_instances=4",
          "eval.seeds=[1,2]"};
}

TEST(Config, DefaultsRoundTrip) {
  const ExperimentConfig c;
  EXPECT_NO_THROW(c.validate());
  const ExperimentConfig back = config_from_json(config_to_json(c));
  EXPECT_EQ(config_to_json(back), config_to_json(c));
  EXPECT_EQ(c.synth.dims.n, 10);
  EXPECT_EQ(c.synth.dims.k, 3);
  EXPECT_EQ(c.synth.count, 20000);
  EXPECT_EQ(c.test_count, 4000);
}

TEST(Config, UnknownKeysAreRejected) {
  EXPECT_THROW(config_from_json(nlohmann::json{{"trian", {{"steps", 3}}}}), ConfigError);
  try {
    config_from_json(nlohmann::json{{"train", {{"stpes", 3}}}});
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("train.stpes"), std::string::npos) << e.what();
  }
}

TEST(Config, WrongTypesAreRejected) {
  EXPECT_THROW(config_from_json(nlohmann::json{{"train", {{"steps", "many"}}}}), ConfigError);
  EXPECT_THROW(config_from_json(nlohmann::json{{"train", 3}}), ConfigError);
  EXPECT_THROW(config_from_json(nlohmann::json::array()), ConfigError);
}

TEST(Config, OverridesParseJsonOrFallBackToString) {
  nlohmann::json j = nlohmann::json::object();
  apply_override(j, "train.steps=12");
  apply_override(j, "eval.reference=GSP");
  apply_override(j, "eval.seeds=[4,5]");
  apply_override(j, "a.b.c=true");
  EXPECT_EQ(j["train"]["steps"], 12);
  EXPECT_EQ(j["eval"]["reference"], "GSP");
  EXPECT_EQ(j["eval"]["seeds"], nlohmann::json::array({4, 5}));
  EXPECT_EQ(j["a"]["b"]["c"], true);
  EXPECT_THROW(apply_override(j, "novalue"), ConfigError);
  EXPECT_THROW(apply_override(j, "=3"), ConfigError);
  EXPECT_THROW(apply_override(j, "train..steps=3"), ConfigError);
}

TEST(Config, FileThenOverrides) {
  const fs::path dir = fresh_dir("config");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "c.json");
    f << R"({"train": {"steps": 7, "batch_size": 16}, "synth": {"n": 6}})";
  }
  const ExperimentConfig c = load_config(dir / "c.json", {"train.steps=9"});
  EXPECT_EQ(c.train.steps, 9);
  EXPECT_EQ(c.train.batch_size, 16);
  EXPECT_EQ(c.synth.dims.n, 6);
  EXPECT_EQ(c.synth.dims.k, 3);  // untouched keys keep their defaults
  EXPECT_THROW(load_config(dir / "missing.json", {}), ConfigError);
  {
    std::ofstream f(dir / "bad.json");
    f << "{not json";
  }
  EXPECT_THROW(load_config(dir / "bad.json", {}), ConfigError);
  EXPECT_THROW(load_config({}, {"synth.k=20"}), ConfigError);
  EXPECT_THROW(load_config({}, {"train.temperature=0"}), ConfigError);
  fs::remove_all(dir);
}

TEST(Config, ModelWidthsFollowData) {
  const ExperimentConfig c = load_config({}, {"synth.dx=5", "synth.dy=2"});
  EXPECT_EQ(c.model.encoder.dx, 5);
  EXPECT_EQ(c.model.encoder.dy, 2);
}

TEST(Config, ReportHeaderCarriesTheConfig) {
  const ExperimentConfig c;
  const std::string h = report_header("eval", c);
  EXPECT_EQ(h.rfind("# edgenet eval\n# config: {", 0), 0u);
  EXPECT_EQ(h.back(), '\n');
  EXPECT_NE(h.find("\"train_count\":20000"), std::string::npos);
}

TEST(Commands, GenCreatesDirectoriesAndCounts) {
  const fs::path dir = fresh_dir("gen");
  const ExperimentConfig c = load_config({}, small_overrides(dir));
  std::ostringstream out;
  cmd_gen(c, out);
  EXPECT_EQ(read_log(c.paths.train_log).instances.size(), 24u);
  EXPECT_EQ(read_log(c.paths.test_log).instances.size(), 12u);
  EXPECT_NE(out.str().find("wrote 24 training auctions"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Commands, TrainWithoutDataFails) {
  const fs::path dir = fresh_dir("nodata");
  const ExperimentConfig c = load_config({}, small_overrides(dir));
  std::ostringstream out;
  EXPECT_THROW(cmd_train(c, false, out), std::runtime_error);
}

TEST(Commands, UnknownAuditMechanism) {
  const fs::path dir = fresh_dir("audit_bad");
  const ExperimentConfig c = load_config({}, small_overrides(dir));
  std::ostringstream out;
  cmd_gen(c, out);
  EXPECT_THROW(cmd_audit(c, "vickrey", out), ConfigError);
  fs::remove_all(dir);
}

TEST(Commands, PipelineIsByteReproducible) {
  const std::vector<std::string> files = {"data/train.log", "data/test.log", "runs/model.ckpt",
                                          "runs/history.tsv", "reports/eval.txt",
                                          "reports/eval.tsv", "reports/eval.svg",
                                          "reports/audit-edgenet.tsv"};
  std::vector<std::string> first;
  for (int run = 0; run < 2; ++run) {
    const fs::path dir = fresh_dir("pipeline" + std::to_string(run));
    const ExperimentConfig c = load_config({}, small_overrides(dir));
    std::ostringstream out;
    cmd_gen(c, out);
    cmd_train(c, false, out);
    cmd_eval(c, out);
    cmd_audit(c, "edgenet", out);
    for (std::size_t f = 0; f < files.size(); ++f) {
      ASSERT_TRUE(fs::exists(dir / files[f])) << files[f];
      std::string bytes = slurp(dir / files[f]);
      // Reports embed the configuration, which names the run directory.
      for (auto pos = bytes.find(dir.string()); pos != std::string::npos;
           pos = bytes.find(dir.string()))
        bytes.replace(pos, dir.string().size(), "<dir>");
      if (run == 0) {
        first.push_back(std::move(bytes));
      } else {
        EXPECT_EQ(bytes, first[f]) << files[f];
      }
    }
    fs::remove_all(dir);
  }
}

TEST(Commands, ResumeContinuesTheHistory) {
  const fs::path dir = fresh_dir("resume");
  auto ov = small_overrides(dir);
  std::ostringstream out;
  cmd_gen(load_config({}, ov), out);
  cmd_train(load_config({}, ov), false, out);
  ov.push_back("train.steps=5");
  cmd_train(load_config({}, ov), true, out);
  EXPECT_NE(out.str().find("resuming from step 3"), std::string::npos) << out.str();
  const std::string history = slurp(dir / "runs/history.tsv");
  EXPECT_EQ(std::count(history.begin(), history.end(), '\n'), 6);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace edgenet
