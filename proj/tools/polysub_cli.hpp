// Copyright 2026 The Polysub Authors.
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

#ifndef POLYSUB_TOOLS_POLYSUB_CLI_HPP_
#define POLYSUB_TOOLS_POLYSUB_CLI_HPP_

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "polysub/baselines.hpp"
#include "polysub/dataset.hpp"
#include "polysub/decision_attack.hpp"
#include "polysub/embeddings.hpp"
#include "polysub/harness.hpp"
#include "polysub/http_victim.hpp"
#include "polysub/score_attack.hpp"
#include "polysub/substitutes.hpp"
#include "polysub/synthetic.hpp"
#include "polysub/victims.hpp"

namespace polysub::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr const char* kUrlEnv = "POLYSUB_VICTIM_URL";

// Bad command line or configuration; exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class KeyType { kString, kInt, kNumber, kBool, kStringList, kIntList, kObject };

inline std::string_view type_name(KeyType t) {
  switch (t) {
    case KeyType::kString: return "string";
    case KeyType::kInt: return "int";
    case KeyType::kNumber: return "number";
    case KeyType::kBool: return "bool";
    case KeyType::kStringList: return "[string]";
    case KeyType::kIntList: return "[int]";
    case KeyType::kObject: return "{string: string}";
  }
  return "?";
}

struct KeySpec {
  std::string name;
  KeyType type;
  nlohmann::json fallback;  // null: no default
  std::string doc;
};

inline const std::vector<KeySpec>& schema() {
  using K = KeyType;
  using nlohmann::json;
  const AttackConfig a;
  static const std::vector<KeySpec> keys = {
      {"dataset", K::kString, nullptr, "TSV to attack (attack, campaign, retrain)"},
      {"train_set", K::kString, nullptr, "TSV for victim training (victim-train, retrain)"},
      {"pretrain_set", K::kString, nullptr, "TSV corpus for pretrain"},
      {"num_classes", K::kInt, 2, "number of labels"},
      {"pair_side", K::kString, "hypothesis", "hypothesis | premise | both"},
      {"pos_lexicon", K::kString, "", "word<TAB>tag file; built-in lexicon when empty"},
      {"embeddings", K::kString, nullptr, "word vectors, one `word v1 ... vd` per line"},
      {"provider", K::kString, "embedding", "embedding | synonym | sememe"},
      {"provider_k", K::kInt, 8, "embedding provider: neighbours per word"},
      {"provider_max_dist", K::kNumber, 0.5, "embedding provider: distance cut-off"},
      {"synonyms", K::kString, nullptr, "synonym dictionary (provider=synonym)"},
      {"sememes", K::kString, nullptr, "sememe dictionary (provider=sememe)"},
      {"victim", K::kString, "toy", "toy | http"},
      {"victim_weights", K::kString, nullptr, "toy victim weights JSON"},
      {"victim_url", K::kString, nullptr,
       std::string("remote victim base URL; falls back to $") + kUrlEnv},
      {"victim_mode", K::kString, "score", "toy victim mode: score | decision"},
      {"victim_timeout_ms", K::kInt, 10000, "remote victim timeout"},
      {"victim_epochs", K::kInt, 30, "toy victim training epochs"},
      {"victim_lr", K::kNumber, 0.5, "toy victim learning rate"},
      {"victim_batch_size", K::kInt, 16, "toy victim mini-batch size"},
      {"cache", K::kBool, true, "memoize victim answers (hits are free)"},
      {"delta", K::kNumber, a.delta, "maximum modification rate"},
      {"gamma", K::kNumber, a.gamma, "discount factor"},
      {"lr_p", K::kNumber, a.lr_p, "position policy learning rate"},
      {"lr_q", K::kNumber, a.lr_q, "substitute policy learning rate"},
      {"fail_reward", K::kNumber, a.fail_reward, "decision-mode failure reward"},
      {"max_queries", K::kInt, a.max_queries, "query budget of `attack`"},
      {"prob_floor", K::kNumber, a.prob_floor, "probability floor"},
      {"incremental_reward", K::kBool, a.incremental_reward,
       "score reward against the previous step instead of the original"},
      {"max_episodes", K::kInt, a.max_episodes, "cap on sampling rounds"},
      {"lr_theta", K::kNumber, a.lr_theta, "pretrain: MLP learning rate"},
      {"lr_qw", K::kNumber, a.lr_qw, "pretrain: global substitute table learning rate"},
      {"pretrain_epochs", K::kInt, a.pretrain_epochs, "pretrain: passes over the corpus"},
      {"attacker", K::kString, "rl-score", "attack: rl-score | rl-decision | random | greedy"},
      {"attackers", K::kStringList, json::array({"rl-score", "random", "greedy"}),
       "campaign, retrain: attackers to run"},
      {"init", K::kString, "uniform", "rl-decision start: uniform | snapshot path"},
      {"instance", K::kInt, 0, "attack: dataset line (0-based, blank lines skipped)"},
      {"text", K::kString, nullptr, "attack: sentence to attack instead of a dataset line"},
      {"label", K::kInt, nullptr, "attack: ground-truth label of `text`"},
      {"budgets", K::kIntList, json::array({50, 100, 200, 500, 1000}),
       "campaign: query budgets"},
      {"min_length", K::kInt, 10, "campaign: shortest attacked sentence"},
      {"max_length", K::kInt, 100, "campaign: longest attacked sentence"},
      {"max_instances", K::kInt, 0, "campaign: attacked-instance limit, 0 = all"},
      {"report", K::kString, nullptr, "export-adv: campaign report JSON"},
      {"export_attacker", K::kString, "rl-score", "export-adv: attacker name in the report"},
      {"export_budget", K::kInt, 0, "export-adv: budget, 0 = largest"},
      {"adversarial", K::kObject, nullptr, "retrain: defender name -> adversarial TSV"},
      {"fraction", K::kNumber, 0.5, "retrain: adversarial share of |train_set|"},
      {"out", K::kString, nullptr, "output file, prefix or directory (per subcommand)"},
  };
  return keys;
}

inline const KeySpec* find_key(const std::string& name) {
  for (const auto& k : schema()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

inline std::string schema_help() {
  std::ostringstream out;
  out << "config keys (JSON object; override with --set key=value):\n";
  for (const auto& k : schema()) {
    out << "  " << std::left << std::setw(20) << k.name << std::setw(17)
        << type_name(k.type) << k.doc;
    if (!k.fallback.is_null()) out << " [default " << k.fallback.dump() << "]";
    out << '\n';
  }
  return out.str();
}

inline bool type_ok(KeyType t, const nlohmann::json& v) {
  const auto all = [&](auto pred) {
    if (!v.is_array()) return false;
    for (const auto& e : v) {
      if (!pred(e)) return false;
    }
    return true;
  };
  switch (t) {
    case KeyType::kString: return v.is_string();
    case KeyType::kInt: return v.is_number_integer();
    case KeyType::kNumber: return v.is_number();
    case KeyType::kBool: return v.is_boolean();
    case KeyType::kStringList:
      return all([](const nlohmann::json& e) { return e.is_string(); });
    case KeyType::kIntList:
      return all([](const nlohmann::json& e) { return e.is_number_integer(); });
    case KeyType::kObject:
      if (!v.is_object()) return false;
      for (const auto& [key, e] : v.items()) {
        if (!e.is_string()) return false;
      }
      return true;
  }
  return false;
}

class Config {
 public:
  // Reads the optional JSON file, then applies `key=value` overrides. Values
  // are JSON, except that strings may be bare and lists may be
  // comma-separated.
  static Config load(const std::string& path, const std::vector<std::string>& sets) {
    Config c;
    if (!path.empty()) {
      std::ifstream in(path);
      if (!in) throw UsageError("cannot open config " + path);
      try {
        in >> c.values_;
      } catch (const nlohmann::json::exception& e) {
        throw UsageError("config " + path + " is not valid JSON: " + e.what());
      }
      if (!c.values_.is_object()) throw UsageError("config must be a JSON object");
    }
    for (const auto& [key, value] : c.values_.items()) c.check(key, value);
    for (const std::string& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw UsageError("--set expects key=value, got '" + s + "'");
      }
      const std::string key = s.substr(0, eq);
      const KeySpec* spec = find_key(key);
      if (!spec) throw UsageError("unknown config key '" + key + "'");
      c.values_[key] = parse_value(*spec, s.substr(eq + 1));
      c.check(key, c.values_[key]);
    }
    return c;
  }

  bool has(const std::string& key) const {
    return values_.contains(key) || !spec(key).fallback.is_null();
  }

  const nlohmann::json& get(const std::string& key) const {
    if (values_.contains(key)) return values_.at(key);
    const KeySpec& k = spec(key);
    if (k.fallback.is_null()) {
      throw UsageError("missing required config key '" + key + "'");
    }
    return k.fallback;
  }

  std::string str(const std::string& key) const { return get(key).get<std::string>(); }
  std::int64_t integer(const std::string& key) const {
    return get(key).get<std::int64_t>();
  }
  double number(const std::string& key) const { return get(key).get<double>(); }
  bool flag(const std::string& key) const { return get(key).get<bool>(); }
  std::vector<std::string> strings(const std::string& key) const {
    return get(key).get<std::vector<std::string>>();
  }
  std::vector<std::int64_t> integers(const std::string& key) const {
    return get(key).get<std::vector<std::int64_t>>();
  }

  // Non-negative integer that fits std::size_t.
  std::size_t count(const std::string& key) const {
    const std::int64_t v = integer(key);
    if (v < 0) throw UsageError("config key '" + key + "' must be >= 0");
    return static_cast<std::size_t>(v);
  }

 private:
  static const KeySpec& spec(const std::string& key) {
    const KeySpec* k = find_key(key);
    if (!k) throw std::logic_error("undeclared config key " + key);
    return *k;
  }

  static void check(const std::string& key, const nlohmann::json& value) {
    const KeySpec* k = find_key(key);
    if (!k) throw UsageError("unknown config key '" + key + "'");
    if (!type_ok(k->type, value)) {
      throw UsageError("config key '" + key + "' must be " +
                       std::string(type_name(k->type)));
    }
  }

  static nlohmann::json parse_value(const KeySpec& k, const std::string& raw) {
    if (k.type == KeyType::kString && (raw.empty() || raw.front() != '"')) {
      return raw;
    }
    const bool list = k.type == KeyType::kStringList || k.type == KeyType::kIntList;
    try {
      nlohmann::json v = nlohmann::json::parse(raw);
      if (list && !v.is_array()) v = nlohmann::json::array({v});
      return v;
    } catch (const nlohmann::json::exception&) {
    }
    if (list) {
      nlohmann::json items = nlohmann::json::array();
      for (std::string_view part : detail::split(raw, ',')) {
        part = detail::trim(part);
        if (k.type == KeyType::kStringList) {
          items.push_back(std::string(part));
          continue;
        }
        try {
          items.push_back(nlohmann::json::parse(part));
        } catch (const nlohmann::json::exception&) {
          throw UsageError("bad value for config key '" + k.name + "'");
        }
      }
      return items;
    }
    throw UsageError("bad value for config key '" + k.name + "'");
  }

  nlohmann::json values_ = nlohmann::json::object();
};

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::size_t workers = 1;
  bool log = false;
};

// Shared resources built lazily from the configuration.
class Context {
 public:
  Context(Config cfg, Common common, std::ostream& out, std::ostream& err)
      : cfg_(std::move(cfg)), common_(std::move(common)), out_(out), err_(err) {}

  const Config& cfg() const { return cfg_; }
  const Common& common() const { return common_; }
  std::ostream& out() { return out_; }
  std::ostream& err() { return err_; }
  std::uint64_t seed() const { return common_.seed.value_or(0); }

  const PosLexicon& lexicon() {
    if (!lexicon_) {
      const std::string path = cfg_.str("pos_lexicon");
      lexicon_ = path.empty() ? std::make_shared<PosLexicon>(PosLexicon::builtin())
                              : std::make_shared<PosLexicon>(PosLexicon::load(path));
    }
    return *lexicon_;
  }

  std::shared_ptr<const EmbeddingTable> embeddings() {
    if (!embeddings_) {
      embeddings_ = std::make_shared<EmbeddingTable>(
          EmbeddingTable::load(cfg_.str("embeddings")));
    }
    return embeddings_;
  }

  PairSide pair_side() const {
    const auto side = parse_pair_side(cfg_.str("pair_side"));
    if (!side) throw UsageError("config key 'pair_side' must be hypothesis, premise or both");
    return *side;
  }

  std::vector<LabeledExample> dataset(const std::string& key) {
    const int classes = static_cast<int>(cfg_.integer("num_classes"));
    if (classes < 2) throw UsageError("config key 'num_classes' must be >= 2");
    return load_dataset(cfg_.str(key), lexicon(), classes, pair_side());
  }

  std::shared_ptr<const CandidateProvider> provider() {
    const std::string kind = cfg_.str("provider");
    if (kind == "embedding") {
      const std::int64_t k = cfg_.integer("provider_k");
      if (k < 1) throw UsageError("config key 'provider_k' must be >= 1");
      return std::make_shared<EmbeddingProvider>(embeddings(), static_cast<std::size_t>(k),
                                                 cfg_.number("provider_max_dist"));
    }
    if (kind == "synonym") {
      return std::make_shared<SynonymProvider>(SynonymProvider::load(cfg_.str("synonyms")));
    }
    if (kind == "sememe") {
      return std::make_shared<SememeProvider>(SememeProvider::load(cfg_.str("sememes")));
    }
    throw UsageError("config key 'provider' must be embedding, synonym or sememe");
  }

  std::shared_ptr<const VictimModel> victim() {
    const std::string kind = cfg_.str("victim");
    if (kind == "toy") {
      const auto mode = parse_mode(cfg_.str("victim_mode"));
      if (!mode) throw UsageError("config key 'victim_mode' must be score or decision");
      return ToyVictim::load(cfg_.str("victim_weights"), embeddings(), *mode);
    }
    if (kind == "http") {
      std::string url;
      if (cfg_.has("victim_url")) {
        url = cfg_.str("victim_url");
      } else if (const char* env = std::getenv(kUrlEnv); env && *env) {
        url = env;
      } else {
        throw UsageError(std::string("missing required config key 'victim_url' (or $") +
                         kUrlEnv + ")");
      }
      const std::int64_t ms = cfg_.integer("victim_timeout_ms");
      if (ms < 1) throw UsageError("config key 'victim_timeout_ms' must be >= 1");
      return std::make_shared<HttpVictim>(url, std::chrono::milliseconds(ms));
    }
    throw UsageError("config key 'victim' must be toy or http");
  }

  ToyTrainOptions toy_training() const {
    ToyTrainOptions t;
    t.num_classes = static_cast<int>(cfg_.integer("num_classes"));
    t.epochs = static_cast<int>(cfg_.integer("victim_epochs"));
    t.lr = cfg_.number("victim_lr");
    t.batch_size = cfg_.count("victim_batch_size");
    t.seed = seed();
    if (t.num_classes < 2 || t.epochs < 0 || !(t.lr > 0.0) || t.batch_size == 0) {
      throw UsageError(
          "victim training needs num_classes >= 2, victim_epochs >= 0, victim_lr > 0 "
          "and victim_batch_size >= 1");
    }
    return t;
  }

  AttackConfig attack_config() const {
    AttackConfig a;
    a.delta = cfg_.number("delta");
    a.gamma = cfg_.number("gamma");
    a.lr_p = cfg_.number("lr_p");
    a.lr_q = cfg_.number("lr_q");
    a.fail_reward = cfg_.number("fail_reward");
    a.max_queries = cfg_.integer("max_queries");
    a.prob_floor = cfg_.number("prob_floor");
    a.incremental_reward = cfg_.flag("incremental_reward");
    a.max_episodes = cfg_.integer("max_episodes");
    a.lr_theta = cfg_.number("lr_theta");
    a.lr_qw = cfg_.number("lr_qw");
    a.pretrain_epochs = static_cast<int>(cfg_.integer("pretrain_epochs"));
    a.seed = seed();
    try {
      a.validate();
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    return a;
  }

  Attacker attacker(const std::string& name) {
    const auto kind = parse_attacker_kind(name);
    if (!kind) {
      throw UsageError("unknown attacker '" + name +
                       "' (rl-score, rl-decision, random, greedy)");
    }
    std::shared_ptr<const PretrainedPolicy> init;
    if (*kind == AttackerKind::kRlDecision && cfg_.str("init") != "uniform") {
      init = std::make_shared<PretrainedPolicy>(PretrainedPolicy::load(cfg_.str("init")));
    }
    return make_attacker(*kind, std::move(init));
  }

  std::vector<Attacker> attackers() {
    std::vector<Attacker> out;
    for (const std::string& name : cfg_.strings("attackers")) out.push_back(attacker(name));
    if (out.empty()) throw UsageError("config key 'attackers' must not be empty");
    return out;
  }

  CampaignOptions campaign_options() const {
    CampaignOptions o;
    o.budgets = cfg_.integers("budgets");
    o.attack = attack_config();
    o.min_length = cfg_.count("min_length");
    o.max_length = cfg_.count("max_length");
    o.max_instances = cfg_.count("max_instances");
    o.cache = cfg_.flag("cache");
    o.workers = common_.workers;
    o.log = common_.log ? &err_ : nullptr;
    try {
      o.validate();
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    return o;
  }

 private:
  Config cfg_;
  Common common_;
  std::ostream& out_;
  std::ostream& err_;
  std::shared_ptr<const PosLexicon> lexicon_;
  std::shared_ptr<const EmbeddingTable> embeddings_;
};

inline nlohmann::json result_json(const LabeledExample& ex, const AttackResult& r) {
  nlohmann::json subs = nlohmann::json::array();
  for (const auto& s : r.substitutions) {
    subs.push_back({{"position", s.position},
                    {"original", s.original},
                    {"substitute", s.substitute}});
  }
  return {{"label", ex.label},
          {"original", format_text(ex.text)},
          {"status", std::string(status_name(r.status))},
          {"queries_used", r.queries_used},
          {"episodes", r.episodes},
          {"substitutions", subs},
          {"modification_rate", r.modification_rate},
          {"adversarial", r.adversarial ? nlohmann::json(format_text(*r.adversarial))
                                        : nlohmann::json(nullptr)}};
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

inline int cmd_victim_train(Context& ctx) {
  const std::string out = ctx.cfg().str("out");
  const auto train = ctx.dataset("train_set");
  const auto victim = train_toy_victim(train, ctx.embeddings(), ctx.toy_training());
  victim->save(out);
  ctx.out() << "train_accuracy " << victim->accuracy(train) << '\n';
  if (ctx.cfg().has("dataset")) {
    ctx.out() << "dataset_accuracy " << victim->accuracy(ctx.dataset("dataset")) << '\n';
  }
  ctx.out() << "wrote " << out << '\n';
  return kExitOk;
}

inline int cmd_attack(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const AttackConfig attack = ctx.attack_config();
  const Attacker attacker = ctx.attacker(cfg.str("attacker"));
  LabeledExample ex;
  if (cfg.has("text")) {
    const std::int64_t label = cfg.integer("label");
    if (label < 0 || label >= cfg.integer("num_classes")) {
      throw UsageError("config key 'label' must be in [0, num_classes)");
    }
    ex = parse_example(std::to_string(label) + '\t' + cfg.str("text"), ctx.lexicon(),
                       ctx.pair_side());
  } else {
    const auto data = ctx.dataset("dataset");
    const std::size_t i = cfg.count("instance");
    if (i >= data.size()) {
      throw UsageError("config key 'instance' is past the end of the dataset (" +
                       std::to_string(data.size()) + " lines)");
    }
    ex = data[i];
  }
  const auto provider = ctx.provider();
  const auto model = ctx.victim();
  if (attacker.needs_scores() && model->mode() != VictimMode::kScore) {
    throw Error(ErrorCode::kModeMismatch, attacker.name + " needs a score victim");
  }
  VictimHandle victim(model, cfg.flag("cache"));
  const AttackResult r = attacker.run(victim, ex, provider->candidates(ex), attack);
  nlohmann::json j = result_json(ex, r);
  j["attacker"] = attacker.name;
  const std::string text = j.dump(2) + "\n";
  if (cfg.has("out")) write_text(cfg.str("out"), text);
  ctx.out() << text;
  return kExitOk;
}

inline int cmd_pretrain(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const std::string out = cfg.str("out");
  const AttackConfig attack = ctx.attack_config();
  const auto corpus = ctx.dataset("pretrain_set");
  const auto provider = ctx.provider();
  const auto model = ctx.victim();
  auto encoder = std::make_shared<StaticEmbeddingEncoder>(ctx.embeddings());
  PretrainedPolicy pp = make_pretrained_policy(
      encoder, build_vocabulary(corpus, *provider), attack.seed);
  const PretrainStats stats = pretrain(pp, corpus, model, *provider, attack);
  pp.save(out);
  ctx.out() << "instances " << stats.instances << "\nskipped_misclassified "
            << stats.skipped_misclassified << "\nsuccesses " << stats.successes
            << "\nepisodes " << stats.episodes << "\nqueries " << stats.queries
            << "\nvocabulary " << pp.vocab.size() << "\nwrote " << out << '\n';
  return kExitOk;
}

inline void print_summaries(std::ostream& out, const CampaignReport& rep) {
  out << "attacked " << rep.counts.attacked << " of " << rep.counts.total
      << " (too short " << rep.counts.skipped_too_short << ", too long "
      << rep.counts.skipped_too_long << ", misclassified "
      << rep.counts.skipped_misclassified << ")\n";
  for (const auto& s : rep.summaries) {
    out << s.attacker << " budget=" << s.budget << " success_rate=" << s.success_rate
        << " avg_queries=" << s.avg_queries << " avg_mod_rate=" << s.avg_mod_rate
        << '\n';
  }
}

inline int cmd_campaign(Context& ctx) {
  const std::string out = ctx.cfg().str("out");
  const CampaignOptions options = ctx.campaign_options();
  const auto attackers = ctx.attackers();
  const auto data = ctx.dataset("dataset");
  const auto provider = ctx.provider();
  const auto report = run_campaign(data, ctx.victim(), attackers, *provider, options);
  report.write_json(out + ".json");
  report.write_csv(out + ".csv");
  print_summaries(ctx.out(), report);
  ctx.out() << "wrote " << out << ".json " << out << ".csv\n";
  return kExitOk;
}

inline int cmd_export(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const std::string out = cfg.str("out");
  const auto report = CampaignReport::load(cfg.str("report"));
  std::optional<std::int64_t> budget;
  if (cfg.integer("export_budget") > 0) budget = cfg.integer("export_budget");
  const std::size_t n = export_adversarial(report, cfg.str("export_attacker"), out, budget);
  ctx.out() << "exported " << n << " to " << out << '\n';
  return kExitOk;
}

inline int cmd_retrain(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const std::string out = cfg.str("out");
  if (cfg.str("victim") != "toy") throw UsageError("retrain needs victim = toy");
  RetrainOptions r;
  r.fraction = cfg.number("fraction");
  if (!(r.fraction >= 0.0 && r.fraction <= 1.0)) {
    throw UsageError("config key 'fraction' must be in [0, 1]");
  }
  r.train = ctx.toy_training();
  r.seed = ctx.seed();
  const CampaignOptions options = ctx.campaign_options();
  const auto attackers = ctx.attackers();
  const nlohmann::json adv = cfg.get("adversarial");
  const auto train = ctx.dataset("train_set");
  const auto eval = ctx.dataset("dataset");
  std::vector<Defender> defenders;
  for (const auto& [name, path] : adv.items()) {
    defenders.push_back({name, load_dataset(path.get<std::string>(), ctx.lexicon(),
                                            r.train.num_classes, ctx.pair_side())});
  }
  const auto provider = ctx.provider();
  const auto rep = adversarial_retrain(train, defenders, ctx.embeddings(), eval,
                                       attackers, *provider, options, r);
  write_text(out + ".json", rep.to_json().dump(2) + "\n");
  rep.write_csv(out + ".csv");
  for (const auto& row : rep.rows) {
    ctx.out() << "defend=" << row.defender << " attack=" << row.attacker
              << " budget=" << row.budget << " before=" << row.success_before
              << " after=" << row.success_after << " decrement=" << row.decrement
              << '\n';
  }
  ctx.out() << "wrote " << out << ".json " << out << ".csv\n";
  return kExitOk;
}

inline int cmd_gen_corpus(Context& ctx) {
  const std::string out = ctx.cfg().str("out");
  SyntheticOptions o;
  o.seed = ctx.seed();
  const auto corpus = generate_synthetic_corpus(o);
  write_synthetic_corpus(corpus, out);
  ctx.out() << "wrote " << out << " (train " << corpus.train.size() << ", test "
            << corpus.test.size() << ", aux " << corpus.aux.size() << ")\n";
  return kExitOk;
}

// Entry point shared by the binary and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Black-box word-substitution attacks on text classifiers"};
  app.require_subcommand(1);
  Common common;
  struct Sub {
    const char* name;
    const char* help;
    bool needs_seed;
    int (*fn)(Context&);
  };
  const Sub subs[] = {
      {"victim-train", "train a toy victim and write its weights", false, cmd_victim_train},
      {"attack", "attack one sentence", true, cmd_attack},
      {"pretrain", "pre-train a transferable policy against a score victim", true,
       cmd_pretrain},
      {"campaign", "run attackers over a dataset and write JSON and CSV reports", true,
       cmd_campaign},
      {"export-adv", "write successful adversarial examples as a TSV dataset", false,
       cmd_export},
      {"retrain", "adversarial training of the toy victim and success-rate decrements",
       false, cmd_retrain},
      {"gen-corpus", "write a generated two-class corpus with its resources", false,
       cmd_gen_corpus},
  };
  std::vector<CLI::App*> apps;
  for (const Sub& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", common.config, "JSON config file");
    sub->add_option("--set", common.sets, "override one config key (key=value)");
    auto* seed = sub->add_option("--seed", common.seed, "random seed");
    if (s.needs_seed) seed->required();
    sub->add_option("--workers", common.workers, "concurrent attacks")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--log", common.log, "one stderr line per finished attack");
    apps.push_back(sub);
  }
  app.add_subcommand("schema", "print the config keys")->callback([&] {
    out << schema_help();
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  for (std::size_t i = 0; i < apps.size(); ++i) {
    if (!apps[i]->parsed()) continue;
    try {
      Context ctx(Config::load(common.config, common.sets), common, out, err);
      return subs[i].fn(ctx);
    } catch (const UsageError& e) {
      err << "usage error: " << e.what() << "\n\n" << schema_help();
      return kExitUsage;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitRuntime;
    }
  }
  return kExitOk;
}

}  // namespace polysub::cli

#endif  // POLYSUB_TOOLS_POLYSUB_CLI_HPP_
