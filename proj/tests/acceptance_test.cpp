// Copyright 2026 The Polysub Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance run: one PASS/FAIL line per criterion, with the measured values.
// The exit status is nonzero only if the run itself fails; a criterion that
// is not met is reported as FAIL and left visible.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "policy_oracles.hpp"
#include "polysub/harness.hpp"
#include "polysub/synthetic.hpp"
#include "polysub_cli.hpp"
#include "test_util.hpp"

namespace polysub {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

int passed = 0;
int failed = 0;

void verdict(const std::string& name, bool ok, const std::string& detail) {
  (ok ? passed : failed)++;
  std::cout << (ok ? "PASS" : "FAIL") << "  " << name << "  " << detail << std::endl;
}

void info(const std::string& line) { std::cout << "      " << line << std::endl; }

constexpr int kSeeds = 5;
const std::vector<std::int64_t> kBudgets = {50, 100, 200, 500, 1000};

// Generated corpus, toy victim and embedding-neighbour candidates.
struct Desk {
  SyntheticCorpus corpus;
  ToyTrainOptions training;
  std::shared_ptr<ToyVictim> victim;
  std::shared_ptr<EmbeddingProvider> provider;

  Desk() {
    corpus = generate_synthetic_corpus(SyntheticOptions{});
    training.epochs = 100;
    training.lr = 2.0;
    victim = train_toy_victim(corpus.train, corpus.embeddings, training);
    provider = std::make_shared<EmbeddingProvider>(
        corpus.embeddings, EmbeddingProvider::kDefaultK,
        EmbeddingProvider::kDefaultMaxDist);
  }
};

// Audits every campaign run through it: per-record compliance plus a total
// invocation count taken outside the harness.
struct Audit {
  std::size_t records = 0;
  std::size_t emitted = 0;
  std::size_t bad_records = 0;
  std::size_t bad_rate = 0;
  std::size_t bad_totals = 0;

  CampaignReport run(const std::vector<LabeledExample>& data,
                     std::shared_ptr<const VictimModel> victim,
                     const std::vector<Attacker>& attackers,
                     const CandidateProvider& provider,
                     const CampaignOptions& options) {
    auto counting = std::make_shared<CountingVictim>(victim);
    CampaignReport rep = run_campaign(data, counting, attackers, provider, options);
    // One uncounted screening call per in-range instance and one
    // re-verification call per success come on top of the attack queries.
    std::int64_t expected = static_cast<std::int64_t>(
        rep.counts.total - rep.counts.skipped_too_short - rep.counts.skipped_too_long);
    for (const auto& r : rep.records) {
      ++records;
      expected += r.queries_used;
      if (!r.compliant()) ++bad_records;
      if (!r.success()) continue;
      ++expected;
      ++emitted;
      const auto adv = parse_example("0\t" + *r.adversarial, PosLexicon::builtin());
      const double rate = modification_rate(data[r.index].text, adv.text);
      if (rate > 0.25 || std::abs(rate - r.modification_rate) > 1e-12) ++bad_rate;
    }
    if (counting->calls() != expected) ++bad_totals;
    return rep;
  }
};

void simplex_suite() {
  const auto t0 = Clock::now();
  Rng rng(1001);
  int updates = 0, invalid = 0;
  for (int inst = 0; inst < 100; ++inst) {
    auto r = testing::random_instance(rng);
    AttackPolicy policy = r.policy;
    for (int step = 0; step < 100; ++step, ++updates) {
      const auto plan = sample_episode(policy, 0.5, rng);
      const auto rem = remaining_sets(policy, plan);
      EpisodeTrace trace;
      const double scale = std::pow(10.0, rng.uniform(-2.0, 2.0));
      for (std::size_t t = 0; t < plan.size(); ++t) {
        trace.steps.push_back({plan[t], rem[t], scale * rng.uniform(-1.0, 1.0), {}});
      }
      policy = reinforce_update(policy, trace, returns(trace, 0.4), 0.2, 0.5, 1e-4);
      if (!testing::valid_policy(policy, 1e-4, 1e-9)) ++invalid;
    }
  }
  const double s = seconds_since(t0);
  verdict("probability simplex", invalid == 0 && updates == 10000 && s < 10.0,
          std::to_string(updates) + " updates, " + std::to_string(invalid) +
              " invalid distributions, " + fmt("%.2f s", s));
}

void sampling_oracle() {
  std::vector<std::vector<double>> weights = {
      {0.25, 0.25, 0.25, 0.25}, {0.5, 0.3, 0.15, 0.05}, {0.7, 0.1, 0.1, 0.1}};
  bool ok = true;
  std::string detail;
  std::uint64_t seed = 2001;
  for (const auto& w : weights) {
    AttackPolicy p = init_policy(CandidateSet{{{"a"}, {"b"}, {"c"}, {"d"}}});
    p.p = w;
    const auto fit = testing::plackett_luce_fit(p, 0.5, 100000, seed++);
    ok = ok && fit.dof == 11.0 && fit.p_value > 0.001;
    detail += fmt("p=%.3f ", fit.p_value);
  }
  verdict("sampling matches Plackett-Luce (ordered pairs, 100k draws)", ok, detail);
}

void gradient_checks() {
  Rng rng(3001);
  double worst_pq = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto inst = testing::random_instance(rng);
    std::vector<double> g(inst.trace.length());
    for (double& x : g) x = rng.uniform(-2.0, 2.0);
    worst_pq = std::max(worst_pq, testing::max_gradient_error(inst, g));
  }

  SyntheticOptions o;
  o.dim = 12;
  o.sentiment_groups = 10;
  o.neutral_groups = 10;
  o.fillers = 20;
  o.min_length = 4;
  o.max_length = 10;
  o.train_size = 100;
  o.test_size = 0;
  o.aux_size = 0;
  const auto corpus = generate_synthetic_corpus(o);
  EmbeddingProvider provider(corpus.embeddings, 8, 0.5);
  auto encoder = std::make_shared<StaticEmbeddingEncoder>(corpus.embeddings);
  const auto vocab = build_vocabulary(corpus.train, provider);
  double worst_theta = 0.0;
  int checked = 0;
  for (std::size_t i = 0; checked < 100 && i < corpus.train.size(); ++i) {
    const auto& ex = corpus.train[i];
    const auto cands = provider.candidates(ex);
    if (cands.positions_with_candidates() < 2) continue;
    PretrainedPolicy pp = make_pretrained_policy(encoder, vocab, 4000 + i);
    for (double& w : pp.mlp.w2) w = rng.normal();
    for (double& b : pp.mlp.b1) b = 0.1 * rng.normal();
    const AttackPolicy policy = transfer_policy(pp, ex.text, cands);
    const auto plan = sample_episode(policy, 0.5, rng);
    const auto rem = remaining_sets(policy, plan);
    EpisodeTrace trace;
    std::vector<double> g;
    for (std::size_t t = 0; t < plan.size(); ++t) {
      trace.steps.push_back({plan[t], rem[t], 0.0, {}});
      g.push_back(rng.uniform(-1.5, 1.5));
    }
    worst_theta = std::max(
        worst_theta, testing::max_keyword_gradient_error(pp, ex.text, cands, trace, g));
    ++checked;
  }
  verdict("gradient checks (p, q and MLP path vs central differences)",
          worst_pq <= 1e-4 && worst_theta <= 1e-4 && checked == 100,
          "max relative error p/q " + fmt("%.2e", worst_pq) + " over 100, MLP " +
              fmt("%.2e", worst_theta) + " over " + std::to_string(checked));
}

void returns_oracle() {
  Rng rng(5001);
  double worst = 0.0;
  for (double gamma : {0.0, 0.4, 1.0}) {
    for (int i = 0; i < 1000; ++i) {
      std::vector<double> r(1 + rng.below(12));
      for (double& x : r) x = rng.uniform(-3.0, 3.0);
      const auto got = returns(r, gamma);
      const auto want = testing::brute_force_returns(r, gamma);
      for (std::size_t t = 0; t < r.size(); ++t) {
        worst = std::max(worst, std::abs(got[t] - want[t]));
      }
    }
  }
  verdict("returns equal brute-force discounted sums", worst <= 1e-12,
          "3000 vectors, max abs error " + fmt("%.1e", worst));
}

void spot_values() {
  auto scorer = std::make_shared<testing::FunctionVictim>(2, [](const TokenSeq& s) {
    return s.tokens[0] == "x" ? std::vector<double>{0.9, 0.1}
                              : std::vector<double>{0.6, 0.4};
  });
  const TokenSeq orig = testing::seq_of({"x", "y"});
  const CandidateSet cands{{{"z"}, {}}};
  const AttackPolicy policy = init_policy(cands);
  const std::vector<Action> plan = {{0, 0}};
  VictimHandle h1(scorer);
  const auto score = episode_rewards(h1, orig, 0, 0.9, policy, plan, cands,
                                     RewardKind::kScoreDrop, AttackConfig{}.fail_reward);
  auto decider = std::make_shared<testing::ConstantVictim>(std::vector<double>{0.9, 0.1},
                                                           VictimMode::kDecision);
  VictimHandle h2(decider);
  const auto decision = episode_rewards(h2, orig, 0, 0.0, policy, plan, cands,
                                        RewardKind::kConstantFailure,
                                        AttackConfig{}.fail_reward);
  const double r = score.trace.steps.at(0).reward;
  const double d = decision.trace.steps.at(0).reward;
  verdict("reward spot values", std::abs(r - 0.3) <= 1e-12 && d == -1.0,
          "score drop (0.9, 0.6) -> " + fmt("%.15g", r) + ", decision failure -> " +
              fmt("%g", d));
}

double mean_rate(const std::vector<CampaignReport>& reps, const std::string& attacker,
                 std::int64_t budget) {
  double s = 0.0;
  for (const auto& r : reps) s += r.summary(attacker, budget).success_rate;
  return s / static_cast<double>(reps.size());
}

double mean_queries(const std::vector<CampaignReport>& reps, const std::string& attacker,
                    std::int64_t budget) {
  double s = 0.0;
  for (const auto& r : reps) s += r.summary(attacker, budget).avg_queries;
  return s / static_cast<double>(reps.size());
}

void efficiency(const Desk& desk, Audit& audit) {
  const auto t0 = Clock::now();
  const double acc = desk.victim->accuracy(desk.corpus.test);
  const std::vector<Attacker> attackers = {make_attacker(AttackerKind::kRlScore),
                                           make_attacker(AttackerKind::kRandom),
                                           make_attacker(AttackerKind::kGreedy)};
  std::vector<CampaignReport> reps, incremental;
  for (int s = 0; s < kSeeds; ++s) {
    CampaignOptions o;
    o.budgets = kBudgets;
    o.attack.seed = static_cast<std::uint64_t>(s);
    reps.push_back(audit.run(desk.corpus.test, desk.victim, attackers, *desk.provider, o));
    o.attack.incremental_reward = true;
    incremental.push_back(audit.run(desk.corpus.test, desk.victim,
                                    {make_attacker(AttackerKind::kRlScore)},
                                    *desk.provider, o));
  }
  const std::size_t attackable = reps[0].counts.attacked;
  const std::string rl = "rl-score", rnd = "random", greedy(kGreedyLabel);
  bool a = true;
  std::string curve;
  for (std::int64_t b : kBudgets) {
    const double x = mean_rate(reps, rl, b), y = mean_rate(reps, rnd, b);
    a = a && x >= y;
    curve += "b" + std::to_string(b) + " " + fmt("%.4f", x) + "/" + fmt("%.4f", y) + " ";
  }
  const double rl_q = mean_queries(reps, rl, 1000), gr_q = mean_queries(reps, greedy, 1000);
  const double rl_s = mean_rate(reps, rl, 1000), gr_s = mean_rate(reps, greedy, 1000);
  const bool b = rl_q <= gr_q && rl_s >= gr_s;
  const bool setup = attackable >= 500 && acc >= 0.85;
  const double elapsed = seconds_since(t0);
  verdict("desk-scale efficiency (score RL vs random and greedy)",
          setup && a && b && elapsed < 600.0,
          std::string("(a) ") + (a ? "met" : "not met") + ", (b) " + (b ? "met" : "not met") +
              ", " + std::to_string(attackable) + " attackable, victim accuracy " +
              fmt("%.3f", acc) + ", " + fmt("%.0f s", elapsed));
  info("success rl/random per budget: " + curve);
  info("budget 1000: rl success " + fmt("%.4f", rl_s) + " avg queries " +
       fmt("%.1f", rl_q) + "; greedy success " + fmt("%.4f", gr_s) + " avg queries " +
       fmt("%.1f", gr_q));
  std::string inc;
  for (std::int64_t bb : kBudgets) {
    inc += "b" + std::to_string(bb) + " " + fmt("%.4f", mean_rate(incremental, rl, bb)) + " ";
  }
  info("informational, incremental reward variant: " + inc + "avg queries at 1000 " +
       fmt("%.1f", mean_queries(incremental, rl, 1000)));
}

void decision_transfer(const Desk& desk, Audit& audit) {
  const auto t0 = Clock::now();
  const auto decision = desk.victim->with_mode(VictimMode::kDecision);
  auto encoder = std::make_shared<StaticEmbeddingEncoder>(desk.corpus.embeddings);
  const auto vocab = build_vocabulary(desk.corpus.aux, *desk.provider);
  std::vector<CampaignReport> reps;
  for (int s = 0; s < kSeeds; ++s) {
    // The virtual victim is a separate toy model fitted on the auxiliary split.
    ToyTrainOptions t = desk.training;
    t.seed = static_cast<std::uint64_t>(s);
    const auto virtual_victim = train_toy_victim(desk.corpus.aux, desk.corpus.embeddings, t);
    AttackConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(s);
    cfg.lr_theta = 0.05;  // desk-scale step for the MLP
    auto pp = std::make_shared<PretrainedPolicy>(
        make_pretrained_policy(encoder, vocab, cfg.seed));
    pretrain(*pp, desk.corpus.aux, virtual_victim, *desk.provider, cfg);
    CampaignOptions o;
    o.budgets = {50, 100, 200, 500};
    o.attack.seed = static_cast<std::uint64_t>(s);
    reps.push_back(audit.run(desk.corpus.test, decision,
                             {make_attacker(AttackerKind::kRlDecision),
                              make_attacker(AttackerKind::kRlDecision, pp)},
                             *desk.provider, o));
  }
  const double uni = mean_rate(reps, "rl-decision", 500);
  const double tr = mean_rate(reps, "rl-decision-transfer", 500);
  verdict("decision-mode transfer at budget 500", tr >= uni,
          "pretrained " + fmt("%.4f", tr) + " vs uniform " + fmt("%.4f", uni) + ", gap " +
              fmt("%+.4f", tr - uni) + ", " + fmt("%.0f s", seconds_since(t0)));
  std::string low;
  for (std::int64_t b : {50, 100, 200}) {
    low += "b" + std::to_string(b) + " " + fmt("%.4f", mean_rate(reps, "rl-decision-transfer", b)) +
           "/" + fmt("%.4f", mean_rate(reps, "rl-decision", b)) + " ";
  }
  info("pretrained/uniform success: " + low + "avg queries at 500 " +
       fmt("%.1f", mean_queries(reps, "rl-decision-transfer", 500)) + "/" +
       fmt("%.1f", mean_queries(reps, "rl-decision", 500)));
}

void adversarial_training(const Desk& desk, Audit& audit) {
  const auto t0 = Clock::now();
  const std::vector<Attacker> rl = {make_attacker(AttackerKind::kRlScore)};
  double total = 0.0;
  std::string per_seed;
  for (int s = 0; s < kSeeds; ++s) {
    CampaignOptions o;
    o.budgets = {1000};
    o.attack.seed = static_cast<std::uint64_t>(s);
    const auto gen = audit.run(desk.corpus.aux, desk.victim, rl, *desk.provider, o);
    const std::vector<Defender> defenders = {
        {"rl-score", adversarial_examples(gen, "rl-score", desk.corpus.lexicon)}};
    RetrainOptions r;
    r.fraction = 0.5;
    r.train = desk.training;
    r.seed = static_cast<std::uint64_t>(s);
    const auto rep = adversarial_retrain(desk.corpus.train, defenders,
                                         desk.corpus.embeddings, desk.corpus.test, rl,
                                         *desk.provider, o, r);
    for (const auto* c : {&rep.before, &rep.after[0]}) {
      for (const auto& rec : c->records) {
        ++audit.records;
        if (!rec.compliant()) ++audit.bad_records;
        if (rec.success()) ++audit.emitted;
        if (rec.success() && rec.modification_rate > 0.25) ++audit.bad_rate;
      }
    }
    total += rep.rows[0].decrement;
    per_seed += fmt("%.4f ", rep.rows[0].decrement);
  }
  const double mean = total / kSeeds;
  verdict("adversarial training lowers RL success (fraction 0.5)", mean > 0.0,
          "mean decrement " + fmt("%.4f", mean) + " (per seed " + per_seed + "), " +
              fmt("%.0f s", seconds_since(t0)));
}

void constraint_compliance(const Audit& audit) {
  const bool ok = audit.records > 0 && audit.emitted > 0 && audit.bad_records == 0 &&
                  audit.bad_rate == 0 && audit.bad_totals == 0;
  verdict("constraint compliance", ok,
          std::to_string(audit.emitted) + " adversarial examples in " +
              std::to_string(audit.records) + " attack records; " +
              std::to_string(audit.bad_records) + " non-compliant, " +
              std::to_string(audit.bad_rate) + " over the rate cap, " +
              std::to_string(audit.bad_totals) + " campaigns with mismatched call totals");
}

int cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv = {"polysub"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (code != 0) std::cerr << err.str();
  return code;
}

void determinism() {
  testing::TempDir dir;
  SyntheticOptions o;
  o.seed = 3;
  write_synthetic_corpus(generate_synthetic_corpus(o), dir.file("corpus"));
  nlohmann::json config = {{"embeddings", dir.file("corpus/embeddings.txt")},
                           {"pos_lexicon", dir.file("corpus/pos_lexicon.tsv")},
                           {"train_set", dir.file("corpus/train.tsv")},
                           {"dataset", dir.file("corpus/test.tsv")},
                           {"victim_weights", dir.file("victim.json")},
                           {"victim_epochs", 100},
                           {"victim_lr", 2.0},
                           {"attackers", {"rl-score", "random", "greedy"}},
                           {"budgets", {50, 200}},
                           {"max_instances", 60}};
  const std::string c = dir.write("c.json", config.dump());
  bool ok = cli({"victim-train", "--config", c, "--set", "out=" + dir.file("victim.json")}) == 0;
  for (const char* run : {"a", "b"}) {
    ok = ok && cli({"campaign", "--config", c, "--seed", "7", "--set",
                    "out=" + dir.file(run)}) == 0;
  }
  const auto same = [&](const std::string& ext) {
    const std::string a = testing::read_file(dir.file("a" + ext));
    return !a.empty() && a == testing::read_file(dir.file("b" + ext));
  };
  ok = ok && same(".json") && same(".csv");
  verdict("campaign determinism (two CLI runs, same config and seed)", ok,
          "report JSON and CSV byte-identical: " + std::string(ok ? "yes" : "no"));
}

}  // namespace
}  // namespace polysub

int main() {
  using namespace polysub;
  const auto t0 = Clock::now();
  try {
    simplex_suite();
    sampling_oracle();
    gradient_checks();
    returns_oracle();
    spot_values();
    const Desk desk;
    Audit audit;
    efficiency(desk, audit);
    decision_transfer(desk, audit);
    constraint_compliance(audit);
    adversarial_training(desk, audit);
    determinism();
  } catch (const std::exception& e) {
    std::cout << "ERROR  acceptance run aborted: " << e.what() << std::endl;
    return 2;
  }
  std::cout << passed << " passed, " << failed << " failed, "
            << fmt("%.0f s total", seconds_since(t0)) << std::endl;
  return 0;
}
