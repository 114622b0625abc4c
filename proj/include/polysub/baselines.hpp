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

#ifndef POLYSUB_BASELINES_HPP_
#define POLYSUB_BASELINES_HPP_

#include <algorithm>
#include <numeric>
#include <string_view>
#include <vector>

#include "polysub/core.hpp"
#include "polysub/policy.hpp"
#include "polysub/score_attack.hpp"
#include "polysub/substitutes.hpp"
#include "polysub/victims.hpp"

// Reference attackers for efficiency comparisons. Neither reproduces a
// published system: `random` is a pure sampling control and
// `greedy-saliency (simplified)` is a one-pass word-saliency heuristic.
namespace polysub {

inline constexpr std::string_view kRandomLabel = "random";
inline constexpr std::string_view kGreedyLabel = "greedy-saliency (simplified)";

namespace detail {

inline std::vector<std::size_t> active_positions(const CandidateSet& cands) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (cands.count(i) > 0) out.push_back(i);
  }
  return out;
}

inline EpisodeStep make_step(TokenSeq& current, const CandidateSet& cands,
                             Action a) {
  current.tokens[a.position] = cands.at(a.position)[a.candidate];
  EpisodeStep step;
  step.action = a;
  step.text = current;
  return step;
}

}  // namespace detail

// Uniform positions and uniform candidates, floor(delta * m) cumulative
// substitutions per round, a decision query after each. Works with either
// victim mode.
inline AttackResult attack_random(VictimHandle& victim, const LabeledExample& ex,
                                  const CandidateSet& cands,
                                  const AttackConfig& cfg) {
  cfg.validate();
  AttackResult result;
  if (cands.positions_with_candidates() == 0) {
    result.status = AttackStatus::kNoCandidates;
    return result;
  }
  detail::BudgetScope scope(victim, cfg.max_queries);
  try {
    if (victim.query_decision(ex.text) != ex.label) {
      detail::record_unmodified_success(result, ex.text);
      result.queries_used = scope.used();
      return result;
    }
    std::vector<std::size_t> pool = detail::active_positions(cands);
    const std::size_t t_len = episode_length(cfg.delta, ex.text.size(), pool.size());
    Rng rng(cfg.seed);
    for (std::int64_t episode = 1; episode <= cfg.max_episodes; ++episode) {
      result.episodes = episode;
      // Partial Fisher-Yates: the first t_len entries become the draw.
      for (std::size_t t = 0; t < t_len; ++t) {
        std::swap(pool[t], pool[t + rng.below(pool.size() - t)]);
      }
      TokenSeq current = ex.text;
      EpisodeTrace trace;
      for (std::size_t t = 0; t < t_len; ++t) {
        const std::size_t pos = pool[t];
        const Action a{pos, rng.below(cands.count(pos))};
        trace.steps.push_back(detail::make_step(current, cands, a));
        if (victim.query_decision(current) != ex.label) {
          detail::record_success(result, ex.text, trace, cands);
          result.queries_used = scope.used();
          return result;
        }
      }
    }
  } catch (const BudgetExceeded&) {
  }
  result.status = AttackStatus::kBudgetExhausted;
  result.queries_used = scope.used();
  return result;
}

// Phase 1 probes every candidate of every position on the original sentence
// (one query each) and records each position's largest drop of P(y|x) and
// the candidate achieving it. Phase 2 applies those best candidates in
// descending saliency order, querying after each, until the victim flips or
// floor(delta * m) substitutions have been made. Phase 1 always spends
// sum_i n_i probes, even when one of them already flips the victim.
inline AttackResult attack_greedy(VictimHandle& victim, const LabeledExample& ex,
                                  const CandidateSet& cands,
                                  const AttackConfig& cfg) {
  cfg.validate();
  if (victim.mode() != VictimMode::kScore) {
    throw Error(ErrorCode::kModeMismatch, "greedy baseline needs scores");
  }
  AttackResult result;
  if (cands.positions_with_candidates() == 0) {
    result.status = AttackStatus::kNoCandidates;
    return result;
  }
  const auto y = static_cast<std::size_t>(ex.label);
  detail::BudgetScope scope(victim, cfg.max_queries);
  try {
    const auto scores = victim.query_scores(ex.text);
    if (argmax(scores) != ex.label) {
      detail::record_unmodified_success(result, ex.text);
      result.queries_used = scope.used();
      return result;
    }
    const double base = scores[y];
    const std::vector<std::size_t> positions = detail::active_positions(cands);
    std::vector<double> saliency(ex.text.size(), 0.0);
    std::vector<std::size_t> best(ex.text.size(), 0);
    result.episodes = 1;
    for (std::size_t pos : positions) {
      double top = -HUGE_VAL;
      for (std::size_t k = 0; k < cands.count(pos); ++k) {
        TokenSeq probe = ex.text;
        probe.tokens[pos] = cands.at(pos)[k];
        const auto s = victim.query_scores(probe);
        if (base - s[y] > top) {
          top = base - s[y];
          best[pos] = k;
        }
      }
      saliency[pos] = top;
    }
    std::vector<std::size_t> order(positions);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return saliency[a] > saliency[b];
    });
    const std::size_t cap = episode_length(cfg.delta, ex.text.size(), order.size());
    TokenSeq current = ex.text;
    EpisodeTrace trace;
    for (std::size_t t = 0; t < cap; ++t) {
      trace.steps.push_back(
          detail::make_step(current, cands, {order[t], best[order[t]]}));
      if (victim.query_decision(current) != ex.label) {
        detail::record_success(result, ex.text, trace, cands);
        result.queries_used = scope.used();
        return result;
      }
    }
  } catch (const BudgetExceeded&) {
  }
  result.status = AttackStatus::kBudgetExhausted;
  result.queries_used = scope.used();
  return result;
}

}  // namespace polysub

#endif  // POLYSUB_BASELINES_HPP_
