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

#include "polysub/policy.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "policy_oracles.hpp"
#include "test_util.hpp"

namespace polysub {
namespace {

CandidateSet cands_of(std::vector<std::size_t> counts) {
  CandidateSet c;
  for (std::size_t n : counts) {
    std::vector<std::string> list;
    for (std::size_t k = 0; k < n; ++k) list.push_back("w" + std::to_string(k));
    c.lists.push_back(list);
  }
  return c;
}

EpisodeTrace single_step(std::size_t pos, std::size_t cand,
                         std::vector<std::size_t> remaining) {
  EpisodeTrace trace;
  EpisodeStep s;
  s.action = {pos, cand};
  s.remaining = std::move(remaining);
  trace.steps.push_back(s);
  return trace;
}

TEST(InitPolicy, UniformOverCandidatePositions) {
  const AttackPolicy p = init_policy(cands_of({2, 2, 2, 2}));
  for (double v : p.p) EXPECT_DOUBLE_EQ(v, 0.25);

  const AttackPolicy masked = init_policy(cands_of({1, 3, 0, 2}));
  EXPECT_DOUBLE_EQ(masked.p[0], 1.0 / 3);
  EXPECT_DOUBLE_EQ(masked.p[1], 1.0 / 3);
  EXPECT_EQ(masked.p[2], 0.0);
  EXPECT_DOUBLE_EQ(masked.p[3], 1.0 / 3);
  EXPECT_FALSE(masked.mask[2]);
  EXPECT_EQ(masked.active(), 3u);
  ASSERT_EQ(masked.q[1].size(), 3u);
  for (double v : masked.q[1]) EXPECT_DOUBLE_EQ(v, 1.0 / 3);
}

TEST(InitPolicy, NoCandidatesThrows) {
  try {
    init_policy(cands_of({0, 0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoCandidates);
  }
}

TEST(InitPolicy, SequenceLengthMustMatch) {
  const TokenSeq seq = testing::seq_of({"a", "good", "movie"});
  EXPECT_THROW(init_policy(seq, cands_of({1, 1})), Error);
  EXPECT_NO_THROW(init_policy(seq, cands_of({0, 1, 1})));
}

TEST(SampleEpisode, LengthAndDistinctPositions) {
  Rng rng(3);
  const AttackPolicy p = init_policy(cands_of({1, 1, 1, 1, 1, 1, 1, 1}));
  for (int i = 0; i < 200; ++i) {
    const auto plan = sample_episode(p, 0.25, rng);
    ASSERT_EQ(plan.size(), 2u);
    EXPECT_NE(plan[0].position, plan[1].position);
  }
  // delta * m below one still yields one step; never more than #active.
  EXPECT_EQ(sample_episode(p, 0.01, rng).size(), 1u);
  const AttackPolicy sparse = init_policy(cands_of({1, 0, 0, 0, 0, 0, 0, 1}));
  for (int i = 0; i < 50; ++i) {
    const auto plan = sample_episode(sparse, 0.9, rng);
    ASSERT_EQ(plan.size(), 2u);
    for (const Action& a : plan) EXPECT_TRUE(sparse.mask[a.position]);
  }
}

TEST(SampleEpisode, CandidateDrawFollowsQ) {
  AttackPolicy p = init_policy(cands_of({3}));
  p.q[0] = {0.2, 0.0, 0.8};
  Rng rng(11);
  int counts[3] = {0, 0, 0};
  const int n = 20000;
  for (int i = 0; i < n; ++i) ++counts[sample_episode(p, 1.0, rng)[0].candidate];
  EXPECT_EQ(counts[1], 0);
  EXPECT_NEAR(counts[2] / double(n), 0.8, 0.015);
}

TEST(SampleEpisode, MatchesPlackettLuceUniform) {
  const AttackPolicy p = init_policy(cands_of({1, 1, 1, 1}));
  const auto r = testing::plackett_luce_fit(p, 0.5, 100000, 101);
  EXPECT_EQ(r.dof, 11.0);
  EXPECT_GT(r.p_value, 0.001) << "chi2=" << r.statistic;
}

TEST(SampleEpisode, MatchesPlackettLuceSkewed) {
  AttackPolicy p = init_policy(cands_of({1, 1, 1, 1}));
  p.p = {0.5, 0.3, 0.15, 0.05};
  const auto r = testing::plackett_luce_fit(p, 0.5, 100000, 202);
  EXPECT_GT(r.p_value, 0.001) << "chi2=" << r.statistic;
}

TEST(SampleEpisode, MatchesPlackettLuceMaskedFivePositions) {
  AttackPolicy p = init_policy(cands_of({1, 1, 0, 1, 1}));
  p.p = {0.1, 0.4, 0.0, 0.2, 0.3};
  const auto r = testing::plackett_luce_fit(p, 0.6, 100000, 303);
  EXPECT_EQ(r.dof, 23.0);  // 4 * 3 * 2 ordered triples, minus one
  EXPECT_GT(r.p_value, 0.001) << "chi2=" << r.statistic;
}

TEST(RemainingSets, ShrinkAlongThePlan) {
  const AttackPolicy p = init_policy(cands_of({1, 0, 1, 1}));
  const std::vector<Action> plan = {{2, 0}, {0, 0}};
  const auto sets = remaining_sets(p, plan);
  ASSERT_EQ(sets.size(), 2u);
  EXPECT_EQ(sets[0], (std::vector<std::size_t>{0, 2, 3}));
  EXPECT_EQ(sets[1], (std::vector<std::size_t>{0, 3}));
}

TEST(Returns, Examples) {
  const std::vector<double> r = {0.3, 0.5};
  const auto g = returns(r, 0.4);
  EXPECT_DOUBLE_EQ(g[0], 0.5);
  EXPECT_DOUBLE_EQ(g[1], 0.5);
  EXPECT_EQ(returns(r, 0.0), r);
  const std::vector<double> one = {0.7};
  EXPECT_EQ(returns(one, 0.4), one);
}

TEST(Returns, MatchesBruteForce) {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> r(1 + rng.below(25));
    for (double& v : r) v = rng.uniform(-1.0, 1.0);
    for (double gamma : {0.0, 0.4, 1.0}) {
      const auto got = returns(r, gamma);
      const auto want = testing::brute_force_returns(r, gamma);
      for (std::size_t t = 0; t < r.size(); ++t) {
        ASSERT_NEAR(got[t], want[t], 1e-12);
      }
    }
  }
}

TEST(ReinforceUpdate, PositionExample) {
  AttackPolicy p = init_policy(cands_of({2, 2}));
  const EpisodeTrace trace = single_step(0, 0, {0, 1});
  const std::vector<double> g = {1.0};
  const AttackPolicy next = reinforce_update(p, trace, g, 0.2, 0.0, 1e-4);
  EXPECT_NEAR(next.p[0], 0.7, 1e-12);
  EXPECT_NEAR(next.p[1], 0.3, 1e-12);
  EXPECT_EQ(next.q[1], p.q[1]);
}

TEST(ReinforceUpdate, CandidateExample) {
  AttackPolicy p = init_policy(cands_of({2, 2}));
  const EpisodeTrace trace = single_step(0, 0, {0, 1});
  const std::vector<double> g = {0.3};
  const AttackPolicy next = reinforce_update(p, trace, g, 0.0, 0.5, 1e-4);
  EXPECT_NEAR(next.q[0][0], 0.65, 1e-12);
  EXPECT_NEAR(next.q[0][1], 0.35, 1e-12);
  EXPECT_EQ(next.q[1], p.q[1]);
}

TEST(ReinforceUpdate, ZeroReturnIsNoOp) {
  Rng rng(9);
  const auto inst = testing::random_instance(rng);
  const std::vector<double> g(inst.trace.length(), 0.0);
  const AttackPolicy next =
      reinforce_update(inst.policy, inst.trace, g, 0.2, 0.5, 1e-4);
  EXPECT_EQ(next.p, inst.policy.p);
  EXPECT_EQ(next.q, inst.policy.q);
}

TEST(ReinforceUpdate, ReturnCountMustMatch) {
  const AttackPolicy p = init_policy(cands_of({2, 2}));
  const EpisodeTrace trace = single_step(0, 0, {0, 1});
  const std::vector<double> g = {1.0, 1.0};
  EXPECT_THROW(reinforce_update(p, trace, g, 0.2, 0.5, 1e-4), Error);
  const std::vector<double> zeros = {0.0, 0.0};
  EXPECT_THROW(reinforce_update(p, trace, zeros, 0.2, 0.5, 1e-4), Error);
}

TEST(ReinforceUpdate, ProjectionKeepsFloor) {
  AttackPolicy p = init_policy(cands_of({2, 2}));
  const EpisodeTrace trace = single_step(0, 0, {0, 1});
  const std::vector<double> g = {50.0};
  const AttackPolicy next = reinforce_update(p, trace, g, 0.2, 0.5, 1e-4);
  EXPECT_DOUBLE_EQ(next.p[1], 1e-4);
  EXPECT_DOUBLE_EQ(next.q[0][1], 1e-4);
  EXPECT_TRUE(testing::valid_policy(next, 1e-4));
}

TEST(Projection, LeavesValidDistributionUnchanged) {
  std::vector<double> v = {0.2, 0.3, 0.5};
  project_to_floored_simplex(v, nullptr, 1e-4);
  EXPECT_NEAR(v[0], 0.2, 1e-15);
  EXPECT_NEAR(v[1], 0.3, 1e-15);
  EXPECT_NEAR(v[2], 0.5, 1e-15);
  std::vector<double> all_low = {-1.0, -2.0};
  project_to_floored_simplex(all_low, nullptr, 1e-4);
  EXPECT_DOUBLE_EQ(all_low[0], 0.5);
}

TEST(Gradient, MatchesFiniteDifferences) {
  Rng rng(17);
  for (int i = 0; i < 100; ++i) {
    const auto inst = testing::random_instance(rng);
    std::vector<double> g(inst.trace.length());
    for (double& v : g) v = rng.uniform(-1.0, 1.0);
    EXPECT_LE(testing::max_gradient_error(inst, g), 1e-4) << "instance " << i;
  }
}

TEST(Gradient, TraceLogProbAgreesWithOracle) {
  Rng rng(23);
  for (int i = 0; i < 50; ++i) {
    const auto inst = testing::random_instance(rng);
    const std::vector<double> ones(inst.trace.length(), 1.0);
    EXPECT_NEAR(trace_log_prob(inst.policy, inst.trace),
                testing::weighted_log_prob(inst.policy, inst.trace, ones),
                1e-12);
  }
}

TEST(Invariants, SimplexHoldsAcrossManyUpdates) {
  Rng rng(29);
  for (int rep = 0; rep < 10; ++rep) {
    auto inst = testing::random_instance(rng);
    AttackPolicy policy = inst.policy;
    for (int step = 0; step < 1000; ++step) {
      const auto plan = sample_episode(policy, 0.5, rng);
      const auto rem = remaining_sets(policy, plan);
      EpisodeTrace trace;
      for (std::size_t t = 0; t < plan.size(); ++t) {
        trace.steps.push_back({plan[t], rem[t], rng.uniform(-1.0, 1.0), {}});
      }
      policy = reinforce_update(policy, trace, returns(trace, 0.4), 0.2, 0.5,
                                1e-4);
      ASSERT_TRUE(testing::valid_policy(policy, 1e-4)) << rep << "/" << step;
    }
  }
}

// Unprojected step on a positive return: pi of the taken sequence rises for
// single-step traces and for traces whose returns are all equal.
TEST(Invariants, PositiveReturnRaisesSequenceProbability) {
  Rng rng(31);
  for (int i = 0; i < 500; ++i) {
    auto inst = testing::random_instance(rng);
    if (i % 2 == 0) inst.trace.steps.resize(1);
    if (trace_log_prob(inst.policy, inst.trace) == 0.0) continue;  // pi == 1
    const double g0 = rng.uniform(0.01, 1.0);
    const std::vector<double> g(inst.trace.length(), g0);
    AttackPolicy next(inst.policy);
    apply_gradient(next, log_prob_gradient(inst.policy, inst.trace, g), 1e-3,
                   1e-3);
    EXPECT_GT(trace_log_prob(next, inst.trace),
              trace_log_prob(inst.policy, inst.trace))
        << "instance " << i;
  }
}

TEST(Invariants, UnequalReturnsRaiseWeightedObjective) {
  Rng rng(37);
  for (int i = 0; i < 500; ++i) {
    const auto inst = testing::random_instance(rng);
    if (trace_log_prob(inst.policy, inst.trace) == 0.0) continue;
    std::vector<double> g(inst.trace.length());
    for (double& v : g) v = rng.uniform(0.01, 1.0);
    AttackPolicy next(inst.policy);
    apply_gradient(next, log_prob_gradient(inst.policy, inst.trace, g), 1e-4,
                   1e-4);
    EXPECT_GT(testing::weighted_log_prob(next, inst.trace, g),
              testing::weighted_log_prob(inst.policy, inst.trace, g));
  }
}

TEST(Invariants, NegativeReturnLowersSequenceProbability) {
  Rng rng(41);
  for (int i = 0; i < 500; ++i) {
    const auto inst = testing::random_instance(rng);
    if (trace_log_prob(inst.policy, inst.trace) == 0.0) continue;
    const std::vector<double> g(inst.trace.length(), -1.0);
    AttackPolicy next(inst.policy);
    apply_gradient(next, log_prob_gradient(inst.policy, inst.trace, g), 1e-4,
                   1e-4);
    EXPECT_LT(trace_log_prob(next, inst.trace),
              trace_log_prob(inst.policy, inst.trace));
  }
}

TEST(Sampling, FixedSeedIsReproducible) {
  const AttackPolicy p = init_policy(cands_of({3, 1, 2, 4, 1}));
  Rng a(77), b(77);
  for (int i = 0; i < 100; ++i) {
    const auto pa = sample_episode(p, 0.6, a);
    const auto pb = sample_episode(p, 0.6, b);
    ASSERT_EQ(pa.size(), pb.size());
    for (std::size_t t = 0; t < pa.size(); ++t) {
      EXPECT_EQ(pa[t].position, pb[t].position);
      EXPECT_EQ(pa[t].candidate, pb[t].candidate);
    }
  }
}

}  // namespace
}  // namespace polysub
