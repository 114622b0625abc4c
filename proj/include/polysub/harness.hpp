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

#ifndef POLYSUB_HARNESS_HPP_
#define POLYSUB_HARNESS_HPP_

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iomanip>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "polysub/baselines.hpp"
#include "polysub/core.hpp"
#include "polysub/dataset.hpp"
#include "polysub/decision_attack.hpp"
#include "polysub/rng.hpp"
#include "polysub/score_attack.hpp"
#include "polysub/substitutes.hpp"
#include "polysub/victims.hpp"

namespace polysub {

// Seed of the attack on dataset instance `index`. Independent of the budget,
// so a larger budget replays the smaller budget's run before going further.
inline std::uint64_t instance_seed(std::uint64_t seed, std::size_t index) {
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + index + 1;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

enum class AttackerKind { kRlScore, kRlDecision, kRandom, kGreedy };

inline std::optional<AttackerKind> parse_attacker_kind(std::string_view name) {
  if (name == "rl-score") return AttackerKind::kRlScore;
  if (name == "rl-decision") return AttackerKind::kRlDecision;
  if (name == "random") return AttackerKind::kRandom;
  if (name == "greedy") return AttackerKind::kGreedy;
  return std::nullopt;
}

struct Attacker {
  std::string name;
  AttackerKind kind = AttackerKind::kRlScore;
  // Starting point of rl-decision; uniform when null.
  std::shared_ptr<const PretrainedPolicy> init;

  bool needs_scores() const {
    return kind == AttackerKind::kRlScore || kind == AttackerKind::kGreedy;
  }

  AttackResult run(VictimHandle& victim, const LabeledExample& ex,
                   const CandidateSet& cands, const AttackConfig& cfg) const {
    switch (kind) {
      case AttackerKind::kRlScore: return attack_score(victim, ex, cands, cfg);
      case AttackerKind::kRlDecision:
        return attack_decision(victim, ex, cands, cfg, init.get());
      case AttackerKind::kRandom: return attack_random(victim, ex, cands, cfg);
      case AttackerKind::kGreedy: return attack_greedy(victim, ex, cands, cfg);
    }
    throw Error(ErrorCode::kInvalidArgument, "unknown attacker kind");
  }
};

// Attacker with its report label: "rl-score", "rl-decision" or
// "rl-decision-transfer", and the baseline labels.
inline Attacker make_attacker(AttackerKind kind,
                              std::shared_ptr<const PretrainedPolicy> init = nullptr) {
  Attacker a;
  a.kind = kind;
  switch (kind) {
    case AttackerKind::kRlScore: a.name = "rl-score"; break;
    case AttackerKind::kRlDecision:
      a.name = init ? "rl-decision-transfer" : "rl-decision";
      a.init = std::move(init);
      break;
    case AttackerKind::kRandom: a.name = std::string(kRandomLabel); break;
    case AttackerKind::kGreedy: a.name = std::string(kGreedyLabel); break;
  }
  return a;
}

struct CampaignOptions {
  std::vector<std::int64_t> budgets{50, 100, 200, 500, 1000};
  // max_queries is replaced by each budget; seed is the campaign seed.
  AttackConfig attack;
  std::size_t min_length = 10;
  std::size_t max_length = 100;
  // Stop after this many attacked instances; 0 means no limit.
  std::size_t max_instances = 0;
  bool cache = true;
  std::size_t workers = 1;
  // One line per finished attack when set.
  std::ostream* log = nullptr;

  void validate() const {
    attack.validate();
    if (budgets.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "budgets must not be empty");
    }
    for (std::int64_t b : budgets) {
      if (b < 1) throw Error(ErrorCode::kInvalidArgument, "budgets must be >= 1");
    }
    if (!std::is_sorted(budgets.begin(), budgets.end()) ||
        std::adjacent_find(budgets.begin(), budgets.end()) != budgets.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "budgets must be strictly increasing");
    }
    if (min_length > max_length) {
      throw Error(ErrorCode::kInvalidArgument, "min_length > max_length");
    }
    if (workers < 1) throw Error(ErrorCode::kInvalidArgument, "workers must be >= 1");
  }
};

struct InstanceRecord {
  std::size_t index = 0;
  std::string attacker;
  std::int64_t budget = 0;
  int label = 0;
  AttackStatus status = AttackStatus::kBudgetExhausted;
  std::int64_t queries_used = 0;
  // Victim invocations seen by an instrumented wrapper during the attack.
  std::int64_t victim_calls = 0;
  std::int64_t episodes = 0;
  std::size_t substitutions = 0;
  double modification_rate = 0.0;
  // Dataset-line text of the adversarial example, for successes.
  std::optional<std::string> adversarial;
  // For successes: the victim, asked again outside the attack, disagrees
  // with the label, and every change is a legal candidate within the cap.
  bool verified = false;

  bool success() const { return status == AttackStatus::kSuccess; }
  bool compliant() const {
    return queries_used <= budget && victim_calls == queries_used &&
           (!success() || verified);
  }
  bool operator==(const InstanceRecord&) const = default;
};

struct BudgetSummary {
  std::string attacker;
  std::int64_t budget = 0;
  std::size_t n = 0;
  std::size_t successes = 0;
  std::size_t no_candidates = 0;
  double success_rate = 0.0;
  double avg_queries = 0.0;
  double avg_queries_success = 0.0;
  // Over successes.
  double avg_mod_rate = 0.0;
  bool operator==(const BudgetSummary&) const = default;
};

struct CampaignCounts {
  std::size_t total = 0;
  std::size_t skipped_too_short = 0;
  std::size_t skipped_too_long = 0;
  std::size_t skipped_misclassified = 0;
  std::size_t attacked = 0;
  bool operator==(const CampaignCounts&) const = default;
};

struct CampaignReport {
  nlohmann::json metadata;
  CampaignCounts counts;
  std::vector<std::size_t> attacked_indices;
  std::vector<BudgetSummary> summaries;
  // Ordered by attacker, then budget, then instance index.
  std::vector<InstanceRecord> records;

  const BudgetSummary& summary(const std::string& attacker,
                               std::int64_t budget) const {
    for (const auto& s : summaries) {
      if (s.attacker == attacker && s.budget == budget) return s;
    }
    throw Error(ErrorCode::kInvalidArgument,
                "no summary for " + attacker + " at budget " + std::to_string(budget));
  }

  nlohmann::json to_json() const;
  static CampaignReport from_json(const nlohmann::json& j);
  void write_json(const std::string& path) const;
  void write_csv(const std::string& path) const;
  static CampaignReport load(const std::string& path);
};

inline nlohmann::json config_to_json(const AttackConfig& c) {
  return {{"delta", c.delta},
          {"gamma", c.gamma},
          {"lr_p", c.lr_p},
          {"lr_q", c.lr_q},
          {"fail_reward", c.fail_reward},
          {"max_queries", c.max_queries},
          {"prob_floor", c.prob_floor},
          {"seed", c.seed},
          {"incremental_reward", c.incremental_reward},
          {"max_episodes", c.max_episodes},
          {"lr_theta", c.lr_theta},
          {"lr_qw", c.lr_qw},
          {"pretrain_epochs", c.pretrain_epochs}};
}

inline nlohmann::json CampaignReport::to_json() const {
  nlohmann::json j;
  j["metadata"] = metadata;
  j["counts"] = {{"total", counts.total},
                 {"skipped_too_short", counts.skipped_too_short},
                 {"skipped_too_long", counts.skipped_too_long},
                 {"skipped_misclassified", counts.skipped_misclassified},
                 {"attacked", counts.attacked}};
  j["attacked_indices"] = attacked_indices;
  j["summaries"] = nlohmann::json::array();
  for (const auto& s : summaries) {
    j["summaries"].push_back({{"attacker", s.attacker},
                              {"budget", s.budget},
                              {"n", s.n},
                              {"successes", s.successes},
                              {"no_candidates", s.no_candidates},
                              {"success_rate", s.success_rate},
                              {"avg_queries", s.avg_queries},
                              {"avg_queries_success", s.avg_queries_success},
                              {"avg_mod_rate", s.avg_mod_rate}});
  }
  j["records"] = nlohmann::json::array();
  for (const auto& r : records) {
    j["records"].push_back(
        {{"index", r.index},
         {"attacker", r.attacker},
         {"budget", r.budget},
         {"label", r.label},
         {"status", std::string(status_name(r.status))},
         {"queries_used", r.queries_used},
         {"victim_calls", r.victim_calls},
         {"episodes", r.episodes},
         {"substitutions", r.substitutions},
         {"modification_rate", r.modification_rate},
         {"adversarial", r.adversarial ? nlohmann::json(*r.adversarial)
                                       : nlohmann::json(nullptr)},
         {"verified", r.verified}});
  }
  return j;
}

inline CampaignReport CampaignReport::from_json(const nlohmann::json& j) {
  CampaignReport rep;
  try {
    rep.metadata = j.at("metadata");
    const auto& c = j.at("counts");
    rep.counts.total = c.at("total").get<std::size_t>();
    rep.counts.skipped_too_short = c.at("skipped_too_short").get<std::size_t>();
    rep.counts.skipped_too_long = c.at("skipped_too_long").get<std::size_t>();
    rep.counts.skipped_misclassified = c.at("skipped_misclassified").get<std::size_t>();
    rep.counts.attacked = c.at("attacked").get<std::size_t>();
    rep.attacked_indices = j.at("attacked_indices").get<std::vector<std::size_t>>();
    for (const auto& s : j.at("summaries")) {
      BudgetSummary b;
      b.attacker = s.at("attacker").get<std::string>();
      b.budget = s.at("budget").get<std::int64_t>();
      b.n = s.at("n").get<std::size_t>();
      b.successes = s.at("successes").get<std::size_t>();
      b.no_candidates = s.at("no_candidates").get<std::size_t>();
      b.success_rate = s.at("success_rate").get<double>();
      b.avg_queries = s.at("avg_queries").get<double>();
      b.avg_queries_success = s.at("avg_queries_success").get<double>();
      b.avg_mod_rate = s.at("avg_mod_rate").get<double>();
      rep.summaries.push_back(std::move(b));
    }
    for (const auto& r : j.at("records")) {
      InstanceRecord rec;
      rec.index = r.at("index").get<std::size_t>();
      rec.attacker = r.at("attacker").get<std::string>();
      rec.budget = r.at("budget").get<std::int64_t>();
      rec.label = r.at("label").get<int>();
      const auto status = r.at("status").get<std::string>();
      if (status == status_name(AttackStatus::kSuccess)) {
        rec.status = AttackStatus::kSuccess;
      } else if (status == status_name(AttackStatus::kNoCandidates)) {
        rec.status = AttackStatus::kNoCandidates;
      } else if (status == status_name(AttackStatus::kBudgetExhausted)) {
        rec.status = AttackStatus::kBudgetExhausted;
      } else {
        throw Error(ErrorCode::kParse, "unknown status '" + status + "'");
      }
      rec.queries_used = r.at("queries_used").get<std::int64_t>();
      rec.victim_calls = r.at("victim_calls").get<std::int64_t>();
      rec.episodes = r.at("episodes").get<std::int64_t>();
      rec.substitutions = r.at("substitutions").get<std::size_t>();
      rec.modification_rate = r.at("modification_rate").get<double>();
      if (!r.at("adversarial").is_null()) {
        rec.adversarial = r.at("adversarial").get<std::string>();
      }
      rec.verified = r.at("verified").get<bool>();
      rep.records.push_back(std::move(rec));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("campaign report: ") + e.what());
  }
  return rep;
}

inline void CampaignReport::write_json(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << to_json().dump(2) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

inline void CampaignReport::write_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << "attacker,budget,success_rate,avg_queries,avg_mod_rate,n\n";
  out << std::setprecision(10);
  for (const auto& s : summaries) {
    out << s.attacker << ',' << s.budget << ',' << s.success_rate << ','
        << s.avg_queries << ',' << s.avg_mod_rate << ',' << s.n << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

inline CampaignReport CampaignReport::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, path + ": " + e.what());
  }
  return from_json(j);
}

namespace detail {

// Re-checks a successful result against the unwrapped victim.
inline bool verify_success(const LabeledExample& ex, const CandidateSet& cands,
                           const AttackResult& r, const VictimModel& model,
                           double delta) {
  if (!r.adversarial || r.adversarial->size() != ex.text.size()) return false;
  std::size_t changed = 0;
  for (std::size_t i = 0; i < ex.text.size(); ++i) {
    const std::string& tok = r.adversarial->tokens[i];
    if (tok == ex.text.tokens[i]) continue;
    ++changed;
    const auto& legal = cands.at(i);
    if (std::find(legal.begin(), legal.end(), tok) == legal.end()) return false;
  }
  const std::size_t cap = episode_length(delta, ex.text.size(),
                                         cands.positions_with_candidates());
  if (changed != r.substitutions.size() || changed > cap) return false;
  const TokenSeq probe[] = {*r.adversarial};
  return model.predict_labels(probe)[0] != ex.label;
}

inline BudgetSummary summarize(const std::string& attacker, std::int64_t budget,
                               const std::vector<InstanceRecord>& records) {
  BudgetSummary s;
  s.attacker = attacker;
  s.budget = budget;
  double queries = 0.0, success_queries = 0.0, mod = 0.0;
  for (const auto& r : records) {
    if (r.attacker != attacker || r.budget != budget) continue;
    ++s.n;
    queries += static_cast<double>(r.queries_used);
    if (r.status == AttackStatus::kNoCandidates) ++s.no_candidates;
    if (r.success()) {
      ++s.successes;
      success_queries += static_cast<double>(r.queries_used);
      mod += r.modification_rate;
    }
  }
  if (s.n > 0) {
    s.success_rate = static_cast<double>(s.successes) / static_cast<double>(s.n);
    s.avg_queries = queries / static_cast<double>(s.n);
  }
  if (s.successes > 0) {
    s.avg_queries_success = success_queries / static_cast<double>(s.successes);
    s.avg_mod_rate = mod / static_cast<double>(s.successes);
  }
  return s;
}

// Runs job(i) for i in [0, n) on up to `workers` threads and rethrows the
// exception of the lowest failing index.
template <typename Job>
void parallel_for(std::size_t n, std::size_t workers, Job job) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  const auto work = [&] {
    for (std::size_t i = next++; i < n && !failed.load(); i = next++) {
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
        failed.store(true);
      }
    }
  };
  const std::size_t count = std::min(workers, std::max<std::size_t>(n, 1));
  if (count <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < count; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace detail

// Attacks every instance with length in [min_length, max_length] that the
// victim classifies correctly, once per attacker and budget, each run on a
// fresh victim handle. The length and misclassification checks are not
// counted as queries. The report depends only on the inputs and the seed,
// never on the worker count.
inline CampaignReport run_campaign(const std::vector<LabeledExample>& dataset,
                                   std::shared_ptr<const VictimModel> victim,
                                   const std::vector<Attacker>& attackers,
                                   const CandidateProvider& provider,
                                   const CampaignOptions& options) {
  options.validate();
  if (!victim) throw Error(ErrorCode::kInvalidArgument, "null victim model");
  for (const Attacker& a : attackers) {
    if (a.needs_scores() && victim->mode() != VictimMode::kScore) {
      throw Error(ErrorCode::kModeMismatch, a.name + " needs a score victim");
    }
    const auto same = std::count_if(attackers.begin(), attackers.end(),
                                    [&](const Attacker& b) { return b.name == a.name; });
    if (same > 1) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate attacker name " + a.name);
    }
  }

  CampaignReport report;
  std::vector<std::size_t> in_range;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (options.max_instances > 0 &&
        report.counts.attacked >= options.max_instances) {
      break;
    }
    ++report.counts.total;
    const std::size_t m = dataset[i].text.size();
    if (m < options.min_length) {
      ++report.counts.skipped_too_short;
      continue;
    }
    if (m > options.max_length) {
      ++report.counts.skipped_too_long;
      continue;
    }
    const TokenSeq probe[] = {dataset[i].text};
    if (victim->predict_labels(probe)[0] != dataset[i].label) {
      ++report.counts.skipped_misclassified;
      continue;
    }
    report.attacked_indices.push_back(i);
    ++report.counts.attacked;
  }

  const auto& indices = report.attacked_indices;
  std::vector<CandidateSet> cands;
  cands.reserve(indices.size());
  for (std::size_t i : indices) cands.push_back(provider.candidates(dataset[i]));

  const std::size_t per_attacker = options.budgets.size() * indices.size();
  report.records.resize(attackers.size() * per_attacker);
  std::mutex log_mutex;
  detail::parallel_for(report.records.size(), options.workers, [&](std::size_t job) {
    const Attacker& attacker = attackers[job / per_attacker];
    const std::size_t rest = job % per_attacker;
    const std::int64_t budget = options.budgets[rest / indices.size()];
    const std::size_t slot = rest % indices.size();
    const std::size_t index = indices[slot];
    const LabeledExample& ex = dataset[index];

    AttackConfig cfg = options.attack;
    cfg.max_queries = budget;
    cfg.seed = instance_seed(options.attack.seed, index);
    auto counting = std::make_shared<CountingVictim>(victim);
    VictimHandle handle(counting, options.cache);
    const AttackResult result = attacker.run(handle, ex, cands[slot], cfg);

    InstanceRecord& rec = report.records[job];
    rec.index = index;
    rec.attacker = attacker.name;
    rec.budget = budget;
    rec.label = ex.label;
    rec.status = result.status;
    rec.queries_used = result.queries_used;
    rec.victim_calls = counting->calls();
    rec.episodes = result.episodes;
    rec.substitutions = result.substitutions.size();
    rec.modification_rate = result.modification_rate;
    if (result.success()) {
      rec.adversarial = format_text(*result.adversarial);
      rec.verified = detail::verify_success(ex, cands[slot], result, *victim,
                                            options.attack.delta);
    }
    if (options.log) {
      std::lock_guard lock(log_mutex);
      *options.log << attacker.name << " budget=" << budget << " index=" << index
                   << " status=" << status_name(rec.status)
                   << " queries=" << rec.queries_used << '\n';
    }
  });

  for (const Attacker& a : attackers) {
    for (std::int64_t b : options.budgets) {
      report.summaries.push_back(detail::summarize(a.name, b, report.records));
    }
  }
  nlohmann::json names = nlohmann::json::array();
  for (const Attacker& a : attackers) names.push_back(a.name);
  report.metadata = {
      {"protocol",
       "instances outside the length range or misclassified by the victim are "
       "skipped and excluded from every denominator; each budget is an "
       "independent run with the same per-instance seed"},
      {"provider", provider.name()},
      {"attackers", names},
      {"budgets", options.budgets},
      {"min_length", options.min_length},
      {"max_length", options.max_length},
      {"max_instances", options.max_instances},
      {"cache", options.cache},
      {"attack", config_to_json(options.attack)}};
  return report;
}

// Successful adversarial examples of one attacker at one budget (default: the
// largest), labelled with the original ground truth.
inline std::vector<std::pair<int, std::string>> adversarial_lines(
    const CampaignReport& report, const std::string& attacker,
    std::optional<std::int64_t> budget = std::nullopt) {
  std::int64_t b = 0;
  bool known = false;
  for (const auto& s : report.summaries) {
    if (s.attacker != attacker) continue;
    known = true;
    b = std::max(b, s.budget);
  }
  if (!known) {
    throw Error(ErrorCode::kInvalidArgument, "no attacker named " + attacker);
  }
  if (budget) b = *budget;
  std::vector<std::pair<int, std::string>> out;
  for (const auto& r : report.records) {
    if (r.attacker == attacker && r.budget == b && r.success() && r.adversarial) {
      out.emplace_back(r.label, *r.adversarial);
    }
  }
  return out;
}

// Writes `label<TAB>text` for every success; returns the line count.
inline std::size_t export_adversarial(const CampaignReport& report,
                                      const std::string& attacker,
                                      const std::string& path,
                                      std::optional<std::int64_t> budget = std::nullopt) {
  const auto lines = adversarial_lines(report, attacker, budget);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  for (const auto& [label, text] : lines) out << label << '\t' << text << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
  return lines.size();
}

inline std::vector<LabeledExample> adversarial_examples(
    const CampaignReport& report, const std::string& attacker,
    const PosLexicon& lexicon, std::optional<std::int64_t> budget = std::nullopt) {
  std::vector<LabeledExample> out;
  for (const auto& [label, text] : adversarial_lines(report, attacker, budget)) {
    out.push_back(parse_example(std::to_string(label) + '\t' + text, lexicon));
  }
  return out;
}

struct RetrainOptions {
  double fraction = 0.5;
  ToyTrainOptions train;
  // Picks the adversarial subset when more are available than needed.
  std::uint64_t seed = 0;
};

struct RetrainedVictim {
  std::shared_ptr<ToyVictim> victim;
  std::size_t adversarial_used = 0;
};

// Trains a toy victim on train followed by floor(fraction * |train|)
// adversarial examples (all of them if fewer are available).
inline RetrainedVictim retrain_toy_victim(const std::vector<LabeledExample>& train,
                                          const std::vector<LabeledExample>& adversarial,
                                          std::shared_ptr<const EmbeddingTable> embeddings,
                                          const RetrainOptions& options) {
  if (!(options.fraction >= 0.0 && options.fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "fraction must be in [0, 1]");
  }
  if (train.empty()) throw Error(ErrorCode::kEmptyDataset, "no training examples");
  const auto want = static_cast<std::size_t>(
      options.fraction * static_cast<double>(train.size()) + 1e-9);
  std::vector<std::size_t> pick(adversarial.size());
  for (std::size_t i = 0; i < pick.size(); ++i) pick[i] = i;
  if (pick.size() > want) {
    Rng rng(options.seed);
    rng.shuffle(std::span<std::size_t>(pick));
    pick.resize(want);
    std::sort(pick.begin(), pick.end());
  }
  std::vector<LabeledExample> data = train;
  for (std::size_t i : pick) data.push_back(adversarial[i]);
  return {train_toy_victim(data, std::move(embeddings), options.train), pick.size()};
}

struct DecrementRow {
  std::string defender;
  std::string attacker;
  std::int64_t budget = 0;
  std::size_t adversarial_used = 0;
  double success_before = 0.0;
  double success_after = 0.0;
  double decrement = 0.0;
};

struct DefenceReport {
  CampaignReport before;
  std::vector<CampaignReport> after;  // one per defender
  std::vector<DecrementRow> rows;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["before"] = before.to_json();
    j["after"] = nlohmann::json::array();
    for (const auto& a : after) j["after"].push_back(a.to_json());
    j["decrements"] = nlohmann::json::array();
    for (const auto& r : rows) {
      j["decrements"].push_back({{"defender", r.defender},
                                 {"attacker", r.attacker},
                                 {"budget", r.budget},
                                 {"adversarial_used", r.adversarial_used},
                                 {"success_before", r.success_before},
                                 {"success_after", r.success_after},
                                 {"decrement", r.decrement}});
    }
    return j;
  }

  void write_csv(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
    out << "defender,attacker,budget,success_before,success_after,decrement\n";
    out << std::setprecision(10);
    for (const auto& r : rows) {
      out << r.defender << ',' << r.attacker << ',' << r.budget << ','
          << r.success_before << ',' << r.success_after << ',' << r.decrement
          << '\n';
    }
    if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
  }
};

struct Defender {
  std::string name;
  std::vector<LabeledExample> adversarial;
};

// Trains the toy victim on `train`, attacks `eval` with it, then for every
// defender retrains with that defender's adversarial examples and attacks
// again. decrement = success before - success after, per (defender,
// attacker, budget).
inline DefenceReport adversarial_retrain(const std::vector<LabeledExample>& train,
                                         const std::vector<Defender>& defenders,
                                         std::shared_ptr<const EmbeddingTable> embeddings,
                                         const std::vector<LabeledExample>& eval,
                                         const std::vector<Attacker>& attackers,
                                         const CandidateProvider& provider,
                                         const CampaignOptions& campaign,
                                         const RetrainOptions& options) {
  if (!(options.fraction >= 0.0 && options.fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "fraction must be in [0, 1]");
  }
  if (train.empty()) throw Error(ErrorCode::kEmptyDataset, "no training examples");
  DefenceReport out;
  const auto base = train_toy_victim(train, embeddings, options.train);
  out.before = run_campaign(eval, base, attackers, provider, campaign);
  for (const Defender& d : defenders) {
    const auto retrained = retrain_toy_victim(train, d.adversarial, embeddings, options);
    out.after.push_back(
        run_campaign(eval, retrained.victim, attackers, provider, campaign));
    for (const Attacker& a : attackers) {
      for (std::int64_t b : campaign.budgets) {
        DecrementRow row;
        row.defender = d.name;
        row.attacker = a.name;
        row.budget = b;
        row.adversarial_used = retrained.adversarial_used;
        row.success_before = out.before.summary(a.name, b).success_rate;
        row.success_after = out.after.back().summary(a.name, b).success_rate;
        row.decrement = row.success_before - row.success_after;
        out.rows.push_back(std::move(row));
      }
    }
  }
  return out;
}

}  // namespace polysub

#endif  // POLYSUB_HARNESS_HPP_
