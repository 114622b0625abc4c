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

#ifndef POLYSUB_SCORE_ATTACK_HPP_
#define POLYSUB_SCORE_ATTACK_HPP_

#include <optional>
#include <span>
#include <vector>

#include "polysub/core.hpp"
#include "polysub/policy.hpp"
#include "polysub/substitutes.hpp"
#include "polysub/victims.hpp"

namespace polysub {

enum class RewardKind {
  kScoreDrop,         // r_t = P(y|x) - P(y|x_t)
  kScoreIncremental,  // r_t = P(y|x_{t-1}) - P(y|x_t)
  kConstantFailure,   // r_t = fail_reward (decision feedback)
};

struct EpisodeOutcome {
  bool success = false;
  // Steps actually executed. On success the last step is the one that
  // produced the adversarial example and its reward is left at zero.
  EpisodeTrace trace;
};

// Applies the plan cumulatively, querying the victim after every
// substitution. Stops at the first misclassified sentence. base_score is
// P(y_g | original) and is ignored for constant-failure rewards.
// BudgetExceeded propagates from the victim.
inline EpisodeOutcome episode_rewards(VictimHandle& victim,
                                      const TokenSeq& original, int y_g,
                                      double base_score,
                                      const AttackPolicy& policy,
                                      std::span<const Action> plan,
                                      const CandidateSet& cands,
                                      RewardKind kind, double fail_reward) {
  EpisodeOutcome out;
  const auto remaining = remaining_sets(policy, plan);
  TokenSeq current = original;
  double previous = base_score;
  const auto label = static_cast<std::size_t>(y_g);
  for (std::size_t t = 0; t < plan.size(); ++t) {
    const Action& a = plan[t];
    current.tokens[a.position] = cands.at(a.position)[a.candidate];
    EpisodeStep step;
    step.action = a;
    step.remaining = remaining[t];
    step.text = current;
    if (kind == RewardKind::kConstantFailure) {
      if (victim.query_decision(current) != y_g) {
        out.trace.steps.push_back(std::move(step));
        out.success = true;
        return out;
      }
      step.reward = fail_reward;
    } else {
      const std::vector<double> scores = victim.query_scores(current);
      if (argmax(scores) != y_g) {
        out.trace.steps.push_back(std::move(step));
        out.success = true;
        return out;
      }
      const double anchor =
          kind == RewardKind::kScoreDrop ? base_score : previous;
      step.reward = anchor - scores[label];
      previous = scores[label];
    }
    out.trace.steps.push_back(std::move(step));
  }
  return out;
}

namespace detail {

// Restricts the handle to cfg.max_queries further queries for the lifetime
// of the guard.
class BudgetScope {
 public:
  BudgetScope(VictimHandle& victim, std::int64_t max_queries)
      : victim_(victim), saved_(victim.budget()), start_(victim.queries()) {
    const std::int64_t limit =
        start_ > VictimHandle::kUnlimited - max_queries ? VictimHandle::kUnlimited
                                                        : start_ + max_queries;
    victim_.set_budget(std::min(saved_, limit));
  }
  ~BudgetScope() { victim_.set_budget(saved_); }
  BudgetScope(const BudgetScope&) = delete;
  BudgetScope& operator=(const BudgetScope&) = delete;

  std::int64_t used() const { return victim_.queries() - start_; }

 private:
  VictimHandle& victim_;
  std::int64_t saved_;
  std::int64_t start_;
};

inline void record_success(AttackResult& result, const TokenSeq& original,
                           const EpisodeTrace& trace,
                           const CandidateSet& cands) {
  result.status = AttackStatus::kSuccess;
  result.adversarial = trace.steps.back().text;
  result.substitutions.clear();
  for (const EpisodeStep& s : trace.steps) {
    const std::size_t pos = s.action.position;
    result.substitutions.push_back(
        {pos, original.tokens[pos], cands.at(pos)[s.action.candidate]});
  }
  result.adversarial->raw = detokenize(*result.adversarial);
  result.modification_rate = static_cast<double>(result.substitutions.size()) /
                             static_cast<double>(original.size());
}

inline void record_unmodified_success(AttackResult& result,
                                      const TokenSeq& original) {
  result.status = AttackStatus::kSuccess;
  result.adversarial = original;
  result.substitutions.clear();
  result.modification_rate = 0.0;
}

// Shared sample / reward / update loop of both RL attackers. `initial`
// yields the starting policy; it is only invoked once the victim has been
// confirmed to classify the example correctly.
template <typename InitialPolicy>
AttackResult run_policy_attack(VictimHandle& victim, const LabeledExample& ex,
                               const CandidateSet& cands,
                               const AttackConfig& cfg, RewardKind kind,
                               InitialPolicy&& initial) {
  cfg.validate();
  AttackResult result;
  if (cands.size() != ex.text.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "candidate set does not match sentence length");
  }
  if (cands.positions_with_candidates() == 0) {
    result.status = AttackStatus::kNoCandidates;
    return result;
  }
  BudgetScope scope(victim, cfg.max_queries);
  try {
    double base_score = 0.0;
    if (kind == RewardKind::kConstantFailure) {
      if (victim.query_decision(ex.text) != ex.label) {
        record_unmodified_success(result, ex.text);
        result.queries_used = scope.used();
        return result;
      }
    } else {
      const std::vector<double> scores = victim.query_scores(ex.text);
      if (argmax(scores) != ex.label) {
        record_unmodified_success(result, ex.text);
        result.queries_used = scope.used();
        return result;
      }
      base_score = scores[static_cast<std::size_t>(ex.label)];
    }

    AttackPolicy policy = initial();
    Rng rng(cfg.seed);
    for (std::int64_t episode = 1; episode <= cfg.max_episodes; ++episode) {
      result.episodes = episode;
      const std::vector<Action> plan = sample_episode(policy, cfg.delta, rng);
      EpisodeOutcome outcome =
          episode_rewards(victim, ex.text, ex.label, base_score, policy, plan,
                          cands, kind, cfg.fail_reward);
      if (outcome.success) {
        record_success(result, ex.text, outcome.trace, cands);
        result.queries_used = scope.used();
        return result;
      }
      const std::vector<double> g = returns(outcome.trace, cfg.gamma);
      policy = reinforce_update(policy, outcome.trace, g, cfg.lr_p, cfg.lr_q,
                                cfg.prob_floor);
    }
  } catch (const BudgetExceeded&) {
  }
  result.status = AttackStatus::kBudgetExhausted;
  result.queries_used = scope.used();
  return result;
}

}  // namespace detail

// Score-based attack: per-instance policy from uniform initialization,
// updated by REINFORCE with score-drop rewards until the victim flips or the
// budget runs out. Examples without any candidate yield kNoCandidates.
inline AttackResult attack_score(VictimHandle& victim, const LabeledExample& ex,
                                 const CandidateSet& cands,
                                 const AttackConfig& cfg) {
  const RewardKind kind = cfg.incremental_reward ? RewardKind::kScoreIncremental
                                                 : RewardKind::kScoreDrop;
  return detail::run_policy_attack(victim, ex, cands, cfg, kind,
                                   [&] { return init_policy(cands); });
}

}  // namespace polysub

#endif  // POLYSUB_SCORE_ATTACK_HPP_
