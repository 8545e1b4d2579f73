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

#include "edgenet/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace edgenet {

namespace fs = std::filesystem;
using nlohmann::json;

ExperimentConfig::ExperimentConfig() {
  synth.count = 20000;
  synth.seed = 1;
}

void ExperimentConfig::validate() const {
  try {
    synth.validate();
    model.encoder.validate();
    train.validate();
    weights.validate();
    ugsp.validate();
    regret.validate();
    for (double s : gsp_sigmas) GspConfig{s}.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (model.encoder.dx != synth.dims.dx || model.encoder.dy != synth.dims.dy)
    throw ConfigError("model feature widths must match synth.dims");
  if (model.decoder.da < 1 || model.decoder.dm < 1) throw ConfigError("decoder widths must be positive");
  if (test_count < 0) throw ConfigError("test_count must be >= 0");
  if (gsp_sigmas.empty()) throw ConfigError("gsp.sigmas needs at least one value");
  if (dnalite.steps < 0 || dnalite.batch_size < 1 || !(dnalite.learning_rate > 0.0) ||
      dnalite.hidden < 1 || !(dnalite.temperature > 0.0))
    throw ConfigError("invalid dnalite settings");
  if (audit_instances < 0) throw ConfigError("regret.audit_instances must be >= 0");
  if (seeds.empty()) throw ConfigError("seeds must not be empty");
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["paths"] = {{"train_log", c.paths.train_log},
                {"test_log", c.paths.test_log},
                {"checkpoint", c.paths.checkpoint},
                {"history", c.paths.history},
                {"report_dir", c.paths.report_dir}};
  const SynthConfig& s = c.synth;
  j["synth"] = {{"n", s.dims.n},
                {"k", s.dims.k},
                {"dx", s.dims.dx},
                {"dy", s.dims.dy},
                {"bid_log_mean", s.bid_log_mean},
                {"bid_log_sigma", s.bid_log_sigma},
                {"pctr_alpha", s.pctr_alpha},
                {"pctr_beta", s.pctr_beta},
                {"pcvr_alpha", s.pcvr_alpha},
                {"pcvr_beta", s.pcvr_beta},
                {"cpc_min", s.cpc_min},
                {"cpc_max", s.cpc_max},
                {"correlation", s.correlation},
                {"train_count", s.count},
                {"train_seed", s.seed},
                {"test_count", c.test_count},
                {"test_seed", c.test_seed}};
  const EncoderConfig& e = c.model.encoder;
  j["model"] = {{"de", e.de},         {"dh", e.dh},       {"dc", e.dc},
                {"layers", e.layers}, {"heads", e.heads}, {"ff", e.ff},
                {"da", c.model.decoder.da}, {"dm", c.model.decoder.dm}};
  const TrainConfig& t = c.train;
  j["train"] = {{"batch_size", t.batch_size},
                {"steps", t.steps},
                {"learning_rate", t.learning_rate},
                {"misreports", t.misreports},
                {"temperature", t.temperature},
                {"seed", t.seed},
                {"checkpoint_every", t.checkpoint_every},
                {"multiplier_period", t.multiplier_period},
                {"penalty_growth", t.penalty_growth},
                {"penalty_cap", t.penalty_cap},
                {"initial_penalty", t.initial_penalty},
                {"initial_multiplier", t.initial_multiplier},
                {"regret_penalty", t.regret_penalty},
                {"misreport_delta", t.scheme.delta},
                {"misreport_half_width", t.scheme.half_width}};
  j["weights"] = {{"revenue", c.weights.revenue}, {"ctr", c.weights.ctr}, {"cvr", c.weights.cvr}};
  j["gsp"] = {{"sigmas", c.gsp_sigmas}};
  j["ugsp"] = {{"lambda1", c.ugsp.lambda1}, {"lambda2", c.ugsp.lambda2}, {"lambda3", c.ugsp.lambda3}};
  const DnaLiteTrainConfig& d = c.dnalite;
  j["dnalite"] = {{"steps", d.steps},   {"batch_size", d.batch_size},
                  {"learning_rate", d.learning_rate}, {"hidden", d.hidden},
                  {"temperature", d.temperature}};
  j["regret"] = {{"delta", c.regret.delta},
                 {"half_width", c.regret.half_width},
                 {"audit_instances", c.audit_instances}};
  j["eval"] = {{"seeds", c.seeds},
               {"reference", c.reference},
               {"sampled", c.sampled},
               {"svg", c.svg}};
  return j;
}

namespace {

// Reads keys of one JSON object and rejects any it did not ask for.
class Section {
 public:
  Section(const json& root, const std::string& name) : name_(name) {
    if (!root.is_object()) throw ConfigError("configuration must be a JSON object");
    auto it = root.find(name);
    if (it != root.end()) {
      if (!it->is_object()) throw ConfigError("'" + name + "' must be an object");
      obj_ = &*it;
    }
  }
  ~Section() noexcept(false) {
    if (obj_ == nullptr || std::uncaught_exceptions() > 0) return;
    for (const auto& [k, v] : obj_->items())
      if (!seen_.count(k)) throw ConfigError("unknown configuration key '" + name_ + "." + k + "'");
  }

  template <class T>
  void get(const std::string& key, T& dst) {
    seen_.insert(key);
    if (obj_ == nullptr) return;
    auto it = obj_->find(key);
    if (it == obj_->end()) return;
    try {
      dst = it->get<T>();
    } catch (const json::exception&) {
      throw ConfigError("configuration key '" + name_ + "." + key + "' has the wrong type: " +
                        it->dump());
    }
  }

 private:
  std::string name_;
  const json* obj_ = nullptr;
  std::set<std::string> seen_;
};

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  static const std::set<std::string> sections = {"paths", "synth", "model",  "train", "weights",
                                                 "gsp",   "ugsp",  "dnalite", "regret", "eval"};
  for (const auto& [k, v] : j.items())
    if (!sections.count(k)) throw ConfigError("unknown configuration section '" + k + "'");
  ExperimentConfig c;
  {
    Section s(j, "paths");
    s.get("train_log", c.paths.train_log);
    s.get("test_log", c.paths.test_log);
    s.get("checkpoint", c.paths.checkpoint);
    s.get("history", c.paths.history);
    s.get("report_dir", c.paths.report_dir);
  }
  {
    Section s(j, "synth");
    SynthConfig& y = c.synth;
    s.get("n", y.dims.n);
    s.get("k", y.dims.k);
    s.get("dx", y.dims.dx);
    s.get("dy", y.dims.dy);
    s.get("bid_log_mean", y.bid_log_mean);
    s.get("bid_log_sigma", y.bid_log_sigma);
    s.get("pctr_alpha", y.pctr_alpha);
    s.get("pctr_beta", y.pctr_beta);
    s.get("pcvr_alpha", y.pcvr_alpha);
    s.get("pcvr_beta", y.pcvr_beta);
    s.get("cpc_min", y.cpc_min);
    s.get("cpc_max", y.cpc_max);
    s.get("correlation", y.correlation);
    s.get("train_count", y.count);
    s.get("train_seed", y.seed);
    s.get("test_count", c.test_count);
    s.get("test_seed", c.test_seed);
  }
  {
    Section s(j, "model");
    EncoderConfig& e = c.model.encoder;
    s.get("de", e.de);
    s.get("dh", e.dh);
    s.get("dc", e.dc);
    s.get("layers", e.layers);
    s.get("heads", e.heads);
    s.get("ff", e.ff);
    s.get("da", c.model.decoder.da);
    s.get("dm", c.model.decoder.dm);
  }
  c.model.encoder.dx = c.synth.dims.dx;
  c.model.encoder.dy = c.synth.dims.dy;
  {
    Section s(j, "train");
    TrainConfig& t = c.train;
    s.get("batch_size", t.batch_size);
    s.get("steps", t.steps);
    s.get("learning_rate", t.learning_rate);
    s.get("misreports", t.misreports);
    s.get("temperature", t.temperature);
    s.get("seed", t.seed);
    s.get("checkpoint_every", t.checkpoint_every);
    s.get("multiplier_period", t.multiplier_period);
    s.get("penalty_growth", t.penalty_growth);
    s.get("penalty_cap", t.penalty_cap);
    s.get("initial_penalty", t.initial_penalty);
    s.get("initial_multiplier", t.initial_multiplier);
    s.get("regret_penalty", t.regret_penalty);
    s.get("misreport_delta", t.scheme.delta);
    s.get("misreport_half_width", t.scheme.half_width);
  }
  {
    Section s(j, "weights");
    s.get("revenue", c.weights.revenue);
    s.get("ctr", c.weights.ctr);
    s.get("cvr", c.weights.cvr);
  }
  {
    Section s(j, "gsp");
    s.get("sigmas", c.gsp_sigmas);
  }
  {
    Section s(j, "ugsp");
    s.get("lambda1", c.ugsp.lambda1);
    s.get("lambda2", c.ugsp.lambda2);
    s.get("lambda3", c.ugsp.lambda3);
  }
  {
    Section s(j, "dnalite");
    s.get("steps", c.dnalite.steps);
    s.get("batch_size", c.dnalite.batch_size);
    s.get("learning_rate", c.dnalite.learning_rate);
    s.get("hidden", c.dnalite.hidden);
    s.get("temperature", c.dnalite.temperature);
  }
  {
    Section s(j, "regret");
    s.get("delta", c.regret.delta);
    s.get("half_width", c.regret.half_width);
    s.get("audit_instances", c.audit_instances);
  }
  {
    Section s(j, "eval");
    s.get("seeds", c.seeds);
    s.get("reference", c.reference);
    s.get("sampled", c.sampled);
    s.get("svg", c.svg);
  }
  return c;
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + assignment + "' is not of the form key.path=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (key.empty()) throw ConfigError("override '" + assignment + "' has an empty key");
    if (!node->is_object()) *node = json::object();
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

ExperimentConfig load_config(const fs::path& file, const std::vector<std::string>& overrides) {
  json j = config_to_json(ExperimentConfig{});
  if (!file.empty()) {
    std::ifstream is(file);
    if (!is) throw ConfigError("cannot open configuration file " + file.string());
    json patch = json::parse(is, nullptr, false);
    if (patch.is_discarded()) throw ConfigError(file.string() + " is not valid JSON");
    if (!patch.is_object()) throw ConfigError(file.string() + " must hold a JSON object");
    // Sections merge key by key so a file may set only what it changes.
    for (const auto& [k, v] : patch.items()) {
      if (v.is_object() && j.contains(k) && j[k].is_object()) {
        for (const auto& [kk, vv] : v.items()) j[k][kk] = vv;
      } else {
        j[k] = v;
      }
    }
  }
  for (const auto& o : overrides) apply_override(j, o);
  ExperimentConfig cfg = config_from_json(j);
  cfg.validate();
  return cfg;
}

std::string report_header(const std::string& command, const ExperimentConfig& cfg) {
  return "# edgenet " + command + "\n# config: " + config_to_json(cfg).dump() + "\n";
}

std::shared_ptr<GspMechanism> tuned_gsp(std::span<const AuctionInstance> log,
                                        std::span<const double> sigmas) {
  if (sigmas.empty()) throw std::invalid_argument("GSP tuning needs at least one sigma");
  std::shared_ptr<GspMechanism> best;
  double best_rpm = 0.0;
  for (double s : sigmas) {
    auto m = std::make_shared<GspMechanism>(GspConfig{s});
    const double rpm = simulate_metrics(*m, log).rpm;
    if (!best || rpm > best_rpm) {
      best = m;
      best_rpm = rpm;
    }
  }
  return best;
}

std::shared_ptr<Mechanism> load_edgenet(const fs::path& checkpoint) {
  auto params = std::make_shared<EdgeNetParams>(load_params(read_checkpoint(checkpoint)));
  return std::make_shared<EdgeNetMechanism>(params);
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

AuctionLog load_nonempty(const std::string& path, const char* what) {
  AuctionLog log = read_log(path);
  if (log.instances.empty()) throw std::runtime_error(std::string(what) + " log " + path + " is empty");
  return log;
}

EdgeNetConfig model_for(const ExperimentConfig& cfg, const AuctionLog& log) {
  EdgeNetConfig m = cfg.model;
  m.encoder.dx = log.dims.dx;
  m.encoder.dy = log.dims.dy;
  return m;
}

MechanismFactory dnalite_factory(const ExperimentConfig& cfg, const AuctionLog& train) {
  return {"DNA-lite", [&cfg, &train](std::uint64_t seed) -> std::shared_ptr<Mechanism> {
            DnaLiteTrainConfig dc = cfg.dnalite;
            dc.seed = seed;
            auto res = dnalite_train(train.instances, cfg.weights, dc);
            return std::make_shared<DnaLiteMechanism>(
                std::make_shared<DnaLiteParams>(std::move(res.params)));
          }};
}

std::vector<MechanismFactory> baseline_factories(const ExperimentConfig& cfg,
                                                 const AuctionLog& train,
                                                 const AuctionLog& test) {
  std::shared_ptr<Mechanism> gsp = tuned_gsp(test.instances, cfg.gsp_sigmas);
  std::shared_ptr<Mechanism> ugsp = std::make_shared<UgspMechanism>(cfg.ugsp);
  std::vector<MechanismFactory> f;
  f.push_back({"GSP", [gsp](std::uint64_t) { return gsp; }});
  f.push_back({"uGSP", [ugsp](std::uint64_t) { return ugsp; }});
  f.push_back(dnalite_factory(cfg, train));
  return f;
}

void write_table_reports(const ExperimentConfig& cfg, const std::string& command,
                         const MetricTable& table, const std::string& gsp_name,
                         std::ostream& out) {
  const fs::path dir = cfg.paths.report_dir;
  const std::string header = report_header(command, cfg) + "# GSP row: " + gsp_name + "\n";
  const std::string text = format_table(table);
  write_text(dir / (command + ".txt"), header + text);
  write_text(dir / (command + ".tsv"), header + table_to_tsv(table));
  if (cfg.svg) write_text(dir / (command + ".svg"), table_to_svg(table));
  out << text;
  out << "reports written to " << (dir / (command + ".{txt,tsv" + (cfg.svg ? ",svg" : "") + "}")).string()
      << '\n';
}

fs::path seed_path(const std::string& base, std::uint64_t seed) {
  fs::path p(base);
  return p.parent_path() / (p.stem().string() + "-seed" + std::to_string(seed) + p.extension().string());
}

}  // namespace

void cmd_gen(const ExperimentConfig& cfg, std::ostream& out) {
  cfg.validate();
  SynthConfig train = cfg.synth;
  SynthConfig test = cfg.synth;
  test.count = cfg.test_count;
  test.seed = cfg.test_seed;
  const AuctionLog a = generate(train);
  write_log(a, cfg.paths.train_log);
  const AuctionLog b = generate(test);
  write_log(b, cfg.paths.test_log);
  out << "wrote " << a.instances.size() << " training auctions to " << cfg.paths.train_log << '\n'
      << "wrote " << b.instances.size() << " test auctions to " << cfg.paths.test_log << '\n';
}

void cmd_train(const ExperimentConfig& cfg, bool resume, std::ostream& out) {
  cfg.validate();
  const AuctionLog data = load_nonempty(cfg.paths.train_log, "training");
  Trainer trainer(EdgeNetParams(model_for(cfg, data), cfg.train.seed), cfg.weights, cfg.train);
  if (resume) {
    if (fs::exists(cfg.paths.checkpoint)) {
      trainer.resume(read_checkpoint(cfg.paths.checkpoint));
      out << "resuming from step " << trainer.step() << " of " << cfg.paths.checkpoint << '\n';
    } else {
      out << "no checkpoint at " << cfg.paths.checkpoint << ", starting fresh\n";
    }
  }
  const int first = trainer.step();
  TrainOutputs outs{cfg.paths.checkpoint, cfg.paths.history};
  TrainResult res = trainer.run(data.instances, outs, [&out](const TrainRecord& r) {
    if (r.step % 100 == 0) out << train_log_row(r) << '\n';
  });
  out << "trained steps " << first << ".." << res.steps_done << "; checkpoint "
      << cfg.paths.checkpoint << ", history " << cfg.paths.history << '\n';
}

void cmd_eval(const ExperimentConfig& cfg, std::ostream& out) {
  cfg.validate();
  const AuctionLog train = load_nonempty(cfg.paths.train_log, "training");
  const AuctionLog test = load_nonempty(cfg.paths.test_log, "test");
  std::vector<MechanismFactory> f = baseline_factories(cfg, train, test);
  const std::string gsp_name = tuned_gsp(test.instances, cfg.gsp_sigmas)->name();
  std::shared_ptr<Mechanism> edgenet = load_edgenet(cfg.paths.checkpoint);
  f.push_back({"EdgeNet", [edgenet](std::uint64_t) { return edgenet; }});
  CompareOptions opts;
  opts.seeds = cfg.seeds;
  opts.reference = cfg.reference;
  opts.sampled = cfg.sampled;
  opts.scheme = cfg.regret;
  opts.regret_instances = cfg.audit_instances;
  write_table_reports(cfg, "eval", compare(f, test.instances, opts), gsp_name, out);
}

void cmd_audit(const ExperimentConfig& cfg, const std::string& mechanism, std::ostream& out) {
  cfg.validate();
  const AuctionLog test = load_nonempty(cfg.paths.test_log, "test");
  std::shared_ptr<Mechanism> mech;
  if (mechanism == "gsp") {
    mech = tuned_gsp(test.instances, cfg.gsp_sigmas);
  } else if (mechanism == "ugsp") {
    mech = std::make_shared<UgspMechanism>(cfg.ugsp);
  } else if (mechanism == "dnalite") {
    const AuctionLog train = load_nonempty(cfg.paths.train_log, "training");
    mech = dnalite_factory(cfg, train).make(cfg.seeds.front());
  } else if (mechanism == "edgenet") {
    mech = load_edgenet(cfg.paths.checkpoint);
  } else if (mechanism == "second-price") {
    mech = std::make_shared<SecondPriceOracle>();
  } else if (mechanism == "first-price") {
    mech = std::make_shared<FirstPriceOracle>();
  } else {
    throw ConfigError("unknown mechanism '" + mechanism +
                      "' (expected gsp, ugsp, dnalite, edgenet, second-price or first-price)");
  }
  std::span<const AuctionInstance> audit = test.instances;
  if (cfg.audit_instances > 0 && static_cast<std::size_t>(cfg.audit_instances) < audit.size())
    audit = audit.first(static_cast<std::size_t>(cfg.audit_instances));
  const RegretReport rep = empirical_regret(*mech, audit, cfg.regret);

  char buf[256];
  std::ostringstream text, tsv;
  std::snprintf(buf, sizeof buf, "mechanism %s  instances %zu  IC-R %.4f%%  mean regret %.9g\n",
                mech->name().c_str(), audit.size(), rep.ic_r, rep.mean_regret);
  text << buf;
  text << "position  mean_regret  mean_truthful_utility\n";
  tsv << "position\tmean_regret\tmean_truthful_utility\tcount\n";
  for (std::size_t i = 0; i < rep.per_advertiser.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%8zu  %11.6g  %21.6g\n", i, rep.per_advertiser[i],
                  rep.truthful_utility[i]);
    text << buf;
    std::snprintf(buf, sizeof buf, "%zu\t%.9g\t%.9g\t%d\n", i, rep.per_advertiser[i],
                  rep.truthful_utility[i], rep.counts[i]);
    tsv << buf;
  }
  std::snprintf(buf, sizeof buf, "# ic_r_percent\t%.9g\n# mean_regret\t%.9g\n# ic_r_samples\t%d\n",
                rep.ic_r, rep.mean_regret, rep.ic_r_samples);
  const std::string header = report_header("audit " + mechanism, cfg);
  const fs::path dir = cfg.paths.report_dir;
  write_text(dir / ("audit-" + mechanism + ".txt"), header + text.str());
  write_text(dir / ("audit-" + mechanism + ".tsv"), header + buf + tsv.str());
  out << text.str();
}

void cmd_compare(const ExperimentConfig& cfg, std::ostream& out) {
  cfg.validate();
  const AuctionLog train = load_nonempty(cfg.paths.train_log, "training");
  const AuctionLog test = load_nonempty(cfg.paths.test_log, "test");
  std::vector<MechanismFactory> f = baseline_factories(cfg, train, test);
  const std::string gsp_name = tuned_gsp(test.instances, cfg.gsp_sigmas)->name();
  f.push_back({"EdgeNet", [&](std::uint64_t seed) -> std::shared_ptr<Mechanism> {
                 TrainConfig tc = cfg.train;
                 tc.seed = seed;
                 const TrainOutputs outs{seed_path(cfg.paths.checkpoint, seed),
                                         seed_path(cfg.paths.history, seed)};
                 TrainResult res =
                     edgenet::train(train.instances, cfg.weights, tc, model_for(cfg, train), outs);
                 out << "seed " << seed << ": trained " << res.steps_done << " steps, checkpoint "
                     << outs.checkpoint.string() << '\n';
                 return std::make_shared<EdgeNetMechanism>(
                     std::make_shared<EdgeNetParams>(std::move(res.params)));
               }});
  CompareOptions opts;
  opts.seeds = cfg.seeds;
  opts.reference = cfg.reference;
  opts.sampled = cfg.sampled;
  opts.scheme = cfg.regret;
  opts.regret_instances = cfg.audit_instances;
  write_table_reports(cfg, "compare", compare(f, test.instances, opts), gsp_name, out);
}

}  // namespace edgenet
