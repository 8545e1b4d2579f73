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

// Experiment configuration and the commands behind the command-line tool.
//
// A configuration is a JSON object whose layout mirrors ExperimentConfig (see
// config_to_json() for every key and its default). Unknown keys are errors.
// Command functions print a short summary to `out` and write their files;
// failures surface as exceptions.

#pragma once

#include "edgenet/baselines.hpp"
#include "edgenet/datagen.hpp"
#include "edgenet/decoder.hpp"
#include "edgenet/evalkit.hpp"
#include "edgenet/objective.hpp"
#include "edgenet/regret.hpp"
#include "edgenet/trainer.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace edgenet {

// Invalid configuration (bad key, type or value): a usage error.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentPaths {
  std::string train_log = "data/train.log";
  std::string test_log = "data/test.log";
  std::string checkpoint = "runs/edgenet.ckpt";
  std::string history = "runs/train_history.tsv";
  std::string report_dir = "reports";
};

struct ExperimentConfig {
  ExperimentPaths paths;
  SynthConfig synth;  // synth.count and synth.seed describe the training log
  int test_count = 4000;
  std::uint64_t test_seed = 1000;
  EdgeNetConfig model;  // dx and dy always follow synth.dims
  TrainConfig train;
  ObjectiveWeights weights;
  std::vector<double> gsp_sigmas{0.5, 1.0, 1.5};  // GSP row uses the best RPM among these
  UgspConfig ugsp;
  DnaLiteTrainConfig dnalite;
  PerturbationScheme regret;
  int audit_instances = 1000;  // 0 audits the whole test log
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::string reference = "EdgeNet";
  bool sampled = false;
  bool svg = true;

  ExperimentConfig();
  void validate() const;
};

nlohmann::json config_to_json(const ExperimentConfig& cfg);
// Starts from defaults; keys present in `j` replace them.
ExperimentConfig config_from_json(const nlohmann::json& j);

// "a.b.c=value": value is parsed as JSON when possible, otherwise taken as a
// string. Intermediate objects are created as needed.
void apply_override(nlohmann::json& j, const std::string& assignment);

// Defaults, then the file (if any), then overrides in order.
ExperimentConfig load_config(const std::filesystem::path& file,
                             const std::vector<std::string>& overrides);

// Report header: command name and the effective configuration, '#'-prefixed.
std::string report_header(const std::string& command, const ExperimentConfig& cfg);

// GSP with sigma picked from `sigmas` by the highest RPM on `log`.
std::shared_ptr<GspMechanism> tuned_gsp(std::span<const AuctionInstance> log,
                                        std::span<const double> sigmas);

std::shared_ptr<Mechanism> load_edgenet(const std::filesystem::path& checkpoint);

void cmd_gen(const ExperimentConfig& cfg, std::ostream& out);
void cmd_train(const ExperimentConfig& cfg, bool resume, std::ostream& out);
void cmd_eval(const ExperimentConfig& cfg, std::ostream& out);
// mechanism: gsp | ugsp | dnalite | edgenet | second-price | first-price
void cmd_audit(const ExperimentConfig& cfg, const std::string& mechanism, std::ostream& out);
// Trains EdgeNet and DNA-lite once per seed and tabulates all four mechanisms.
void cmd_compare(const ExperimentConfig& cfg, std::ostream& out);

}  // namespace edgenet
