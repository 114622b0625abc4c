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

#ifndef POLYSUB_POLICY_HPP_
#define POLYSUB_POLICY_HPP_

#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "polysub/core.hpp"
#include "polysub/rng.hpp"
#include "polysub/substitutes.hpp"

namespace polysub {

// Per-instance attack policy. p is the key-word distribution over positions;
// q[i] is the substitute distribution over position i's candidates. Masked
// positions (no candidates) carry p[i] == 0 and an empty q[i].
struct AttackPolicy {
  std::vector<double> p;
  std::vector<std::vector<double>> q;
  std::vector<bool> mask;

  std::size_t size() const { return p.size(); }
  std::size_t active() const {
    std::size_t n = 0;
    for (bool b : mask) n += b ? 1 : 0;
    return n;
  }
  bool operator==(const AttackPolicy&) const = default;
};

// One sampled action: a position and an index into its candidate list.
struct Action {
  std::size_t position = 0;
  std::size_t candidate = 0;
  bool operator==(const Action&) const = default;
};

struct EpisodeStep {
  Action action;
  // Positions still available when this step's position was drawn.
  std::vector<std::size_t> remaining;
  double reward = 0.0;
  TokenSeq text;  // sentence after this step's substitution
};

struct EpisodeTrace {
  std::vector<EpisodeStep> steps;

  std::size_t length() const { return steps.size(); }
  std::vector<double> rewards() const {
    std::vector<double> r;
    r.reserve(steps.size());
    for (const auto& s : steps) r.push_back(s.reward);
    return r;
  }
};

inline AttackPolicy init_policy(const CandidateSet& cands) {
  const std::size_t m = cands.size();
  AttackPolicy policy;
  policy.p.assign(m, 0.0);
  policy.q.resize(m);
  policy.mask.assign(m, false);
  const std::size_t active = cands.positions_with_candidates();
  if (active == 0) {
    throw Error(ErrorCode::kNoCandidates, "no position has candidates");
  }
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t n = cands.count(i);
    if (n == 0) continue;
    policy.mask[i] = true;
    policy.p[i] = 1.0 / static_cast<double>(active);
    policy.q[i].assign(n, 1.0 / static_cast<double>(n));
  }
  return policy;
}

inline AttackPolicy init_policy(const TokenSeq& seq, const CandidateSet& cands) {
  if (seq.size() != cands.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "candidate set does not match sentence length");
  }
  return init_policy(cands);
}

// Draws T = floor(delta * m) (clamped to [1, #active]) distinct positions in
// Plackett-Luce order, then one candidate per drawn position.
inline std::vector<Action> sample_episode(const AttackPolicy& policy,
                                          double delta, Rng& rng) {
  const std::size_t t_len =
      episode_length(delta, policy.size(), policy.active());
  std::vector<double> weights(policy.p);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!policy.mask[i]) weights[i] = 0.0;
  }
  std::vector<Action> plan;
  plan.reserve(t_len);
  for (std::size_t t = 0; t < t_len; ++t) {
    const std::size_t pos = rng.categorical(weights);
    weights[pos] = 0.0;
    plan.push_back({pos, 0});
  }
  for (Action& a : plan) a.candidate = rng.categorical(policy.q[a.position]);
  return plan;
}

// Remaining-position sets R_t implied by a plan.
inline std::vector<std::vector<std::size_t>> remaining_sets(
    const AttackPolicy& policy, std::span<const Action> plan) {
  std::vector<bool> live(policy.mask);
  std::vector<std::vector<std::size_t>> sets;
  sets.reserve(plan.size());
  for (const Action& a : plan) {
    std::vector<std::size_t> r;
    for (std::size_t i = 0; i < live.size(); ++i) {
      if (live[i]) r.push_back(i);
    }
    sets.push_back(std::move(r));
    live[a.position] = false;
  }
  return sets;
}

// Discounted suffix sums G_t = sum_{t' >= t} gamma^(t' - t) r_t'.
inline std::vector<double> returns(std::span<const double> rewards,
                                   double gamma) {
  std::vector<double> g(rewards.size());
  double acc = 0.0;
  for (std::size_t t = rewards.size(); t-- > 0;) {
    acc = rewards[t] + gamma * acc;
    g[t] = acc;
  }
  return g;
}

inline std::vector<double> returns(const EpisodeTrace& trace, double gamma) {
  const auto r = trace.rewards();
  return returns(r, gamma);
}

// Return-weighted gradient of sum_t log pi(a_t | s_t) with respect to the
// raw probability coordinates. For the key-word draw at step t,
//   d/dp_j log(p_a / Z_t) = [j == a] / p_a - [j in R_t] / Z_t,
// and for the substitute draw d/dq_k log q_k* = [k == k*] / q_k* - 1.
struct PolicyGradient {
  std::vector<double> p;
  std::map<std::size_t, std::vector<double>> q;  // touched positions only
};

inline PolicyGradient log_prob_gradient(const AttackPolicy& policy,
                                        const EpisodeTrace& trace,
                                        std::span<const double> weights) {
  if (weights.size() != trace.length()) {
    throw Error(ErrorCode::kLengthMismatch, "one return per step required");
  }
  PolicyGradient grad;
  grad.p.assign(policy.size(), 0.0);
  for (std::size_t t = 0; t < trace.length(); ++t) {
    const EpisodeStep& step = trace.steps[t];
    const double g = weights[t];
    const std::size_t a = step.action.position;
    double z = 0.0;
    for (std::size_t j : step.remaining) z += policy.p[j];
    grad.p[a] += g / policy.p[a];
    for (std::size_t j : step.remaining) grad.p[j] -= g / z;

    const auto& qa = policy.q[a];
    auto& gq = grad.q[a];
    if (gq.empty()) gq.assign(qa.size(), 0.0);
    const std::size_t k = step.action.candidate;
    gq[k] += g / qa[k];
    for (double& v : gq) v -= g;
  }
  return grad;
}

// log pi of the whole trace: sum over steps of log(p_a / Z_t) + log q_a[k].
// Coordinates need not be normalized.
inline double trace_log_prob(const AttackPolicy& policy,
                             const EpisodeTrace& trace) {
  double lp = 0.0;
  for (const EpisodeStep& step : trace.steps) {
    const std::size_t a = step.action.position;
    double z = 0.0;
    for (std::size_t j : step.remaining) z += policy.p[j];
    double zq = 0.0;
    for (double v : policy.q[a]) zq += v;
    lp += std::log(policy.p[a] / z) +
          std::log(policy.q[a][step.action.candidate] / zq);
  }
  return lp;
}

// Maps the active entries of v onto the simplex with every entry >= floor:
// excess mass above the floor is kept proportionally, so a vector that is
// already a floored distribution is left unchanged. Inactive entries are set
// to zero. If no mass remains above the floor the result is uniform.
inline void project_to_floored_simplex(std::span<double> v,
                                       const std::vector<bool>* mask,
                                       double floor) {
  std::size_t n = 0;
  double excess = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (mask && !(*mask)[i]) {
      v[i] = 0.0;
      continue;
    }
    ++n;
    excess += std::max(v[i] - floor, 0.0);
  }
  if (n == 0) return;
  const double spare = 1.0 - static_cast<double>(n) * floor;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (mask && !(*mask)[i]) continue;
    v[i] = excess > 0.0
               ? floor + spare * (std::max(v[i] - floor, 0.0) / excess)
               : 1.0 / static_cast<double>(n);
  }
}

// Raw gradient-ascent step, no projection.
inline void apply_gradient(AttackPolicy& policy, const PolicyGradient& grad,
                           double lr_p, double lr_q) {
  for (std::size_t j = 0; j < policy.size(); ++j) {
    if (policy.mask[j]) policy.p[j] += lr_p * grad.p[j];
  }
  for (const auto& [pos, gq] : grad.q) {
    auto& q = policy.q[pos];
    for (std::size_t k = 0; k < q.size(); ++k) q[k] += lr_q * gq[k];
  }
}

// One REINFORCE update from a failed episode: gradient ascent on
// sum_t G_t log pi_t, then projection of p and of every touched q_i.
inline AttackPolicy reinforce_update(const AttackPolicy& policy,
                                     const EpisodeTrace& trace,
                                     std::span<const double> g, double lr_p,
                                     double lr_q, double prob_floor) {
  AttackPolicy next(policy);
  bool any = false;
  for (double v : g) any = any || v != 0.0;
  if (!any) {
    if (g.size() != trace.length()) {
      throw Error(ErrorCode::kLengthMismatch, "one return per step required");
    }
    return next;
  }
  const PolicyGradient grad = log_prob_gradient(policy, trace, g);
  apply_gradient(next, grad, lr_p, lr_q);
  project_to_floored_simplex(next.p, &next.mask, prob_floor);
  for (const auto& entry : grad.q) {
    project_to_floored_simplex(next.q[entry.first], nullptr, prob_floor);
  }
  return next;
}

}  // namespace polysub

#endif  // POLYSUB_POLICY_HPP_
