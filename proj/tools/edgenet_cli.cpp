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

// edgenet: generate auction logs, train EdgeNet, evaluate and audit mechanisms.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.

#include "edgenet/experiment.hpp"

#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

namespace {

struct FlagSpec {
  const char* flag;
  const char* key;
  const char* help;
};

// Shortcuts for the most used configuration keys. Anything else can be set
// with --set key.path=value.
constexpr FlagSpec kFlags[] = {
    {"--train-log", "paths.train_log", "training log path"},
    {"--test-log", "paths.test_log", "test log path"},
    {"--checkpoint", "paths.checkpoint", "EdgeNet checkpoint path"},
    {"--history", "paths.history", "training history path"},
    {"--report-dir", "paths.report_dir", "directory for reports"},
    {"--n", "synth.n", "candidate ads per auction"},
    {"--k", "synth.k", "ad slots per auction"},
    {"--train-count", "synth.train_count", "training auctions to generate"},
    {"--test-count", "synth.test_count", "test auctions to generate"},
    {"--data-seed", "synth.train_seed", "seed of the training log"},
    {"--test-seed", "synth.test_seed", "seed of the test log"},
    {"--correlation", "synth.correlation", "feature loading on pctr/pcvr, in [0,1]"},
    {"--steps", "train.steps", "total training steps"},
    {"--batch-size", "train.batch_size", "auctions per training step"},
    {"--lr", "train.learning_rate", "Adam learning rate"},
    {"--train-seed", "train.seed", "model initialization and sampling seed"},
    {"--misreports", "train.misreports", "misreports sampled per advertiser per step"},
    {"--multiplier", "train.initial_multiplier", "initial regret multiplier"},
    {"--penalty", "train.initial_penalty", "initial quadratic penalty weight"},
    {"--checkpoint-every", "train.checkpoint_every", "steps between checkpoints (0: end only)"},
    {"--weights", "weights", "JSON object {\"revenue\":..,\"ctr\":..,\"cvr\":..}"},
    {"--gsp-sigmas", "gsp.sigmas", "JSON list of GSP squashing exponents to tune over"},
    {"--delta", "regret.delta", "relative misreport step for audits"},
    {"--half-width", "regret.half_width", "misreport grid half-width for audits"},
    {"--audit-instances", "regret.audit_instances", "test auctions audited (0: all)"},
    {"--seeds", "eval.seeds", "JSON list of evaluation seeds"},
    {"--reference", "eval.reference", "mechanism used for normalization"},
    {"--sampled", "eval.sampled", "sample clicks instead of using expectations (true/false)"},
    {"--svg", "eval.svg", "also write an SVG bar chart (true/false)"},
};

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::map<std::string, std::string> values;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config,
                  "JSON configuration file (default: $EDGENET_CONFIG if set)");
  app->add_option("--set", c.sets, "override any key, e.g. --set train.steps=200")
      ->take_all();
  for (const auto& f : kFlags) app->add_option(f.flag, c.values[f.key], f.help + std::string(" [") + f.key + "]");
}

edgenet::ExperimentConfig resolve(CLI::App* app, const Common& c) {
  std::string file = c.config;
  if (file.empty())
    if (const char* env = std::getenv("EDGENET_CONFIG")) file = env;
  std::vector<std::string> overrides = c.sets;
  for (const auto& f : kFlags)
    if (app->count(f.flag) > 0) overrides.push_back(std::string(f.key) + "=" + c.values.at(f.key));
  return edgenet::load_config(file, overrides);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EdgeNet auction lab: synthetic logs, training, evaluation and regret audits"};
  app.require_subcommand(1);

  Common gen_c, train_c, eval_c, audit_c, compare_c;
  CLI::App* gen = app.add_subcommand("gen", "generate training and test auction logs");
  add_common(gen, gen_c);
  CLI::App* train = app.add_subcommand("train", "train EdgeNet on the training log");
  add_common(train, train_c);
  bool resume = false;
  train->add_flag("--resume", resume, "continue from the checkpoint if it exists");
  CLI::App* eval = app.add_subcommand("eval", "tabulate GSP, uGSP, DNA-lite and a trained EdgeNet");
  add_common(eval, eval_c);
  CLI::App* audit = app.add_subcommand("audit", "empirical regret and IC-R of one mechanism");
  add_common(audit, audit_c);
  std::string mechanism = "edgenet";
  audit->add_option("-m,--mechanism", mechanism,
                    "gsp | ugsp | dnalite | edgenet | second-price | first-price")
      ->capture_default_str();
  CLI::App* compare = app.add_subcommand("compare", "train per seed and tabulate all mechanisms");
  add_common(compare, compare_c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) edgenet::cmd_gen(resolve(gen, gen_c), std::cout);
    if (train->parsed()) edgenet::cmd_train(resolve(train, train_c), resume, std::cout);
    if (eval->parsed()) edgenet::cmd_eval(resolve(eval, eval_c), std::cout);
    if (audit->parsed()) edgenet::cmd_audit(resolve(audit, audit_c), mechanism, std::cout);
    if (compare->parsed()) edgenet::cmd_compare(resolve(compare, compare_c), std::cout);
  } catch (const edgenet::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
