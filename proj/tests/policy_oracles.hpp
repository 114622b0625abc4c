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

#ifndef POLYSUB_TESTS_POLICY_ORACLES_HPP_
#define POLYSUB_TESTS_POLICY_ORACLES_HPP_

// Test-only reference computations, written independently of the library's
// implementation paths: closed-form Plackett-Luce probabilities by explicit
// enumeration, brute-force discounted sums and finite differences.

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "polysub/decision_attack.hpp"
#include "polysub/policy.hpp"
#include "polysub/rng.hpp"

namespace polysub::testing {

// Probability of drawing the exact ordered sequence `order` without
// replacement from weights w (zero weights are never drawn).
inline double plackett_luce_probability(const std::vector<double>& w,
                                        const std::vector<std::size_t>& order) {
  double total = 0.0;
  for (double v : w) total += v;
  double prob = 1.0;
  for (std::size_t pos : order) {
    prob *= w[pos] / total;
    total -= w[pos];
  }
  return prob;
}

// Every ordered selection of `t` distinct indices with positive weight.
inline std::vector<std::vector<std::size_t>> ordered_selections(
    const std::vector<double>& w, std::size_t t) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur;
  std::vector<bool> used(w.size(), false);
  std::function<void()> rec = [&] {
    if (cur.size() == t) {
      out.push_back(cur);
      return;
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (used[i] || w[i] <= 0.0) continue;
      used[i] = true;
      cur.push_back(i);
      rec();
      cur.pop_back();
      used[i] = false;
    }
  };
  rec();
  return out;
}

struct ChiSquareResult {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 0.0;
};

// Goodness of fit of sample_episode's position order to the closed form.
inline ChiSquareResult plackett_luce_fit(const AttackPolicy& policy,
                                         double delta, int draws,
                                         std::uint64_t seed) {
  const std::size_t t =
      episode_length(delta, policy.size(), policy.active());
  const auto cells = ordered_selections(policy.p, t);
  std::map<std::vector<std::size_t>, int> counts;
  Rng rng(seed);
  for (int i = 0; i < draws; ++i) {
    std::vector<std::size_t> order;
    for (const Action& a : sample_episode(policy, delta, rng)) {
      order.push_back(a.position);
    }
    ++counts[order];
  }
  ChiSquareResult r;
  for (const auto& cell : cells) {
    const double expected = draws * plackett_luce_probability(policy.p, cell);
    const double observed = counts.count(cell) ? counts.at(cell) : 0;
    r.statistic += (observed - expected) * (observed - expected) / expected;
  }
  r.dof = static_cast<double>(cells.size() - 1);
  r.p_value = boost::math::cdf(
      boost::math::complement(boost::math::chi_squared(r.dof), r.statistic));
  return r;
}

inline std::vector<double> brute_force_returns(const std::vector<double>& r,
                                               double gamma) {
  std::vector<double> g(r.size(), 0.0);
  for (std::size_t t = 0; t < r.size(); ++t) {
    for (std::size_t u = t; u < r.size(); ++u) {
      g[t] += std::pow(gamma, static_cast<double>(u - t)) * r[u];
    }
  }
  return g;
}

// sum_t w_t [log(p_a / sum_{R_t} p) + log(q_a[k] / sum q_a)], evaluated from
// scratch so that finite differences see every coupling.
inline double weighted_log_prob(const AttackPolicy& policy,
                                const EpisodeTrace& trace,
                                const std::vector<double>& weights) {
  double total = 0.0;
  for (std::size_t t = 0; t < trace.length(); ++t) {
    const auto& s = trace.steps[t];
    double z = 0.0;
    for (std::size_t j : s.remaining) z += policy.p[j];
    double zq = 0.0;
    for (double v : policy.q[s.action.position]) zq += v;
    total += weights[t] * (std::log(policy.p[s.action.position] / z) +
                           std::log(policy.q[s.action.position][s.action.candidate] / zq));
  }
  return total;
}

inline double relative_error(double numeric, double analytic) {
  return std::abs(numeric - analytic) / std::max(std::abs(analytic), 1e-2);
}

// Random policy over m positions with random candidate counts (some masked)
// and a sampled trace whose remaining sets are filled in.
struct RandomInstance {
  CandidateSet cands;
  AttackPolicy policy;
  EpisodeTrace trace;
};

inline RandomInstance random_instance(Rng& rng, double delta = 0.5) {
  RandomInstance inst;
  const std::size_t m = 2 + rng.below(7);
  inst.cands.lists.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t n = (i > 0 && rng.below(4) == 0) ? 0 : 1 + rng.below(4);
    for (std::size_t k = 0; k < n; ++k) {
      inst.cands.lists[i].push_back("c" + std::to_string(k));
    }
  }
  inst.policy = init_policy(inst.cands);
  for (std::size_t i = 0; i < m; ++i) {
    if (!inst.policy.mask[i]) continue;
    inst.policy.p[i] = rng.uniform(0.05, 1.0);
    for (double& v : inst.policy.q[i]) v = rng.uniform(0.05, 1.0);
    project_to_floored_simplex(inst.policy.q[i], nullptr, 1e-4);
  }
  project_to_floored_simplex(inst.policy.p, &inst.policy.mask, 1e-4);
  const auto plan = sample_episode(inst.policy, delta, rng);
  const auto rem = remaining_sets(inst.policy, plan);
  for (std::size_t t = 0; t < plan.size(); ++t) {
    EpisodeStep s;
    s.action = plan[t];
    s.remaining = rem[t];
    inst.trace.steps.push_back(s);
  }
  return inst;
}

// Maximum relative error between the analytic log-pi gradient and central
// finite differences (perturb one coordinate, renormalize the vector).
inline double max_gradient_error(const RandomInstance& inst,
                                 const std::vector<double>& g) {
  const PolicyGradient grad = log_prob_gradient(inst.policy, inst.trace, g);
  const double h = 1e-6;
  const auto renormalized = [](std::vector<double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    for (double& x : v) x /= s;
    return v;
  };
  double worst = 0.0;
  for (std::size_t j = 0; j < inst.policy.size(); ++j) {
    if (!inst.policy.mask[j]) continue;
    AttackPolicy up(inst.policy), down(inst.policy);
    up.p[j] += h;
    down.p[j] -= h;
    up.p = renormalized(up.p);
    down.p = renormalized(down.p);
    const double fd = (weighted_log_prob(up, inst.trace, g) -
                       weighted_log_prob(down, inst.trace, g)) / (2 * h);
    worst = std::max(worst, relative_error(fd, grad.p[j]));
  }
  for (const auto& [pos, gq] : grad.q) {
    for (std::size_t k = 0; k < gq.size(); ++k) {
      AttackPolicy up(inst.policy), down(inst.policy);
      up.q[pos][k] += h;
      down.q[pos][k] -= h;
      up.q[pos] = renormalized(up.q[pos]);
      down.q[pos] = renormalized(down.q[pos]);
      const double fd = (weighted_log_prob(up, inst.trace, g) -
                         weighted_log_prob(down, inst.trace, g)) / (2 * h);
      worst = std::max(worst, relative_error(fd, gq[k]));
    }
  }
  return worst;
}

// Checks every p and q_i of a policy: sums to 1 within tol and active
// entries are >= floor (masked p entries exactly zero).
inline bool valid_policy(const AttackPolicy& policy, double floor,
                         double tol = 1e-9) {
  double sum = 0.0;
  for (std::size_t i = 0; i < policy.size(); ++i) {
    if (!policy.mask[i]) {
      if (policy.p[i] != 0.0) return false;
      continue;
    }
    if (policy.p[i] < floor - 1e-15) return false;
    sum += policy.p[i];
    double qs = 0.0;
    for (double v : policy.q[i]) {
      if (v < floor - 1e-15) return false;
      qs += v;
    }
    if (std::abs(qs - 1.0) > tol) return false;
  }
  return std::abs(sum - 1.0) <= tol;
}

// sum_t G_t log softmax_{R_t}[a_t], one step at a time through the public
// single-trace function.
inline double weighted_keyword_log_prob(const PretrainedPolicy& pp,
                                        const TokenSeq& seq,
                                        const CandidateSet& cands,
                                        const EpisodeTrace& trace,
                                        const std::vector<double>& g) {
  double total = 0.0;
  for (std::size_t t = 0; t < trace.length(); ++t) {
    EpisodeTrace one;
    one.steps.push_back(trace.steps[t]);
    total += g[t] * keyword_log_prob(pp, seq, cands, one);
  }
  return total;
}

// Maximum relative error of keyword_gradient against central differences
// over every MLP parameter.
inline double max_keyword_gradient_error(const PretrainedPolicy& pp,
                                         const TokenSeq& seq,
                                         const CandidateSet& cands,
                                         const EpisodeTrace& trace,
                                         const std::vector<double>& g) {
  const KeywordMlp grad = keyword_gradient(pp, seq, cands, trace, g);
  const double h = 1e-6;
  double worst = 0.0;
  for (std::size_t i = 0; i < pp.mlp.parameter_count(); ++i) {
    PretrainedPolicy up(pp), down(pp);
    up.mlp.parameter(i) += h;
    down.mlp.parameter(i) -= h;
    const double fd = (weighted_keyword_log_prob(up, seq, cands, trace, g) -
                       weighted_keyword_log_prob(down, seq, cands, trace, g)) /
                      (2 * h);
    worst = std::max(worst, relative_error(fd, grad.parameter(i)));
  }
  return worst;
}

}  // namespace polysub::testing

#endif  // POLYSUB_TESTS_POLICY_ORACLES_HPP_
