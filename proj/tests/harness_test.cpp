// Copyright 2026 The crlsvi Authors.
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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "crlsvi/environments.hpp"
#include "crlsvi/harness.hpp"
#include "test_support.hpp"

namespace crlsvi {
namespace {

RunConfig chain_config(AgentKind agent, std::int64_t K, std::uint64_t seed) {
  RunConfig cfg;
  cfg.environment.kind = "chain";
  cfg.environment.horizon = 4;
  cfg.environment.num_states = 4;
  cfg.num_episodes = K;
  cfg.agent = agent;
  cfg.schedule = {0.05, 1e-3, 1e-3};
  cfg.seed = seed;
  return cfg;
}

TEST(Chain, OptimalValueAndDeterministicRows) {
  for (int H = 1; H <= 6; ++H) {
    for (int S = 1; S <= H; ++S) {
      const TabularMdp m = make_chain(H, S);
      EXPECT_NO_THROW(validate_mdp(m));
      EXPECT_NEAR(solve_optimal(m).values.V(0, 0), H - S + 1, 1e-12) << H << " " << S;
      for (double p : m.transitions) EXPECT_TRUE(p == 0.0 || p == 1.0);
    }
  }
  EXPECT_THROW(make_chain(3, 3, 0.5), std::invalid_argument);
  EXPECT_NO_THROW(validate_mdp(make_chain(4, 4, 0.2)));
}

TEST(RandomMdp, ValidAndSeeded) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const TabularMdp a = make_random_mdp(3, 4, 2, 0.7, seed, RewardKind::kBernoulli);
    EXPECT_NO_THROW(validate_mdp(a));
    const TabularMdp b = make_random_mdp(3, 4, 2, 0.7, seed, RewardKind::kBernoulli);
    EXPECT_EQ(a.transitions, b.transitions);
    EXPECT_EQ(a.rewards, b.rewards);
  }
  EXPECT_NE(make_random_mdp(3, 4, 2, 1.0, 1).transitions, make_random_mdp(3, 4, 2, 1.0, 2).transitions);
}

TEST(RandomMdp, LargeConcentrationGivesNearUniformRows) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const TabularMdp m = make_random_mdp(2, 4, 2, 100.0, seed);
    for (int h = 0; h < 2; ++h)
      for (int s = 0; s < 4; ++s)
        for (int a = 0; a < 2; ++a) {
          const auto p = m.transition(h, s, a);
          EXPECT_LT(*std::max_element(p.begin(), p.end()) - *std::min_element(p.begin(), p.end()), 0.2);
        }
  }
}

TEST(RunExperiment, SingleArmBanditHasZeroRegret) {
  RunConfig cfg;
  cfg.environment.kind = "random";
  cfg.environment.horizon = 1;
  cfg.environment.num_states = 3;
  cfg.environment.num_actions = 1;
  cfg.num_episodes = 200;
  cfg.agent = AgentKind::kGreedyNoiseless;
  const RunRecord r = run_experiment(cfg);
  EXPECT_EQ(r.episodes.back().cum_regret, 0.0);
}

TEST(RunExperiment, OracleOverrideHasZeroRegret) {
  RunConfig cfg;
  cfg.environment.kind = "random";
  cfg.environment.horizon = 3;
  cfg.environment.num_states = 3;
  cfg.environment.num_actions = 3;
  cfg.environment.reward_kind = RewardKind::kBernoulli;
  cfg.num_episodes = 300;
  const Policy star = solve_optimal(build_environment(cfg.environment)).policy;
  const RunRecord r = run_experiment(cfg, [&](std::int64_t, const Plan&) { return star; });
  EXPECT_EQ(r.episodes.back().cum_regret, 0.0);
}

TEST(RunExperiment, RegretNonnegativeAndCumulative) {
  for (AgentKind agent : {AgentKind::kCrlsvi, AgentKind::kRlsviUnclipped, AgentKind::kGreedyNoiseless}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      RunConfig cfg = chain_config(agent, 500, seed);
      cfg.environment.slip = 0.1;
      const RunRecord r = run_experiment(cfg);
      ASSERT_EQ(r.episodes.size(), 500u);
      double cum = 0.0;
      for (std::size_t i = 0; i < r.episodes.size(); ++i) {
        const auto& e = r.episodes[i];
        EXPECT_EQ(e.k, static_cast<std::int64_t>(i) + 1);
        EXPECT_GE(e.inst_regret, -1e-12);
        EXPECT_LE(e.inst_regret, r.v_star + 1e-12);
        cum += e.inst_regret;
        EXPECT_DOUBLE_EQ(e.cum_regret, cum);
      }
    }
  }
}

TEST(RunExperiment, Reproducible) {
  for (BackupForm form : {BackupForm::kModelBased, BackupForm::kRegression}) {
    RunConfig cfg = chain_config(AgentKind::kCrlsvi, 300, 42);
    cfg.backup_form = form;
    cfg.environment.slip = 0.2;
    cfg.schedule.alpha_scale = 0.0;  // otherwise early plans are noise-free
    const RunRecord a = run_experiment(cfg);
    const RunRecord b = run_experiment(cfg);
    EXPECT_EQ(a.episodes, b.episodes);
    cfg.seed = 43;
    EXPECT_NE(run_experiment(cfg).episodes, a.episodes);
  }
}

TEST(Baselines, UnclippedTablesAreRawBackups) {
  const RunConfig cfg = chain_config(AgentKind::kRlsviUnclipped, 50, 1);
  int checked = 0;
  run_experiment(cfg, [&](std::int64_t, const Plan& plan) {
    EXPECT_EQ(plan.tables.clip_count(), 0);
    for (std::size_t i = 0; i < plan.tables.q_hat.size(); ++i)
      EXPECT_EQ(plan.tables.q_bar[i], plan.tables.q_hat[i]);
    ++checked;
    return plan.policy;
  });
  EXPECT_EQ(checked, 50);
}

TEST(Baselines, GreedyHasNoPerturbation) {
  const RunConfig cfg = chain_config(AgentKind::kGreedyNoiseless, 50, 1);
  EXPECT_EQ(effective_schedule(cfg).beta_scale, 0.0);
  EXPECT_FALSE(planner_options(cfg).clip);
  run_experiment(cfg, [&](std::int64_t, const Plan& plan) {
    for (double w : plan.tables.noise) EXPECT_EQ(w, 0.0);
    for (double p : plan.tables.q_prior) EXPECT_EQ(p, 0.0);
    return plan.policy;
  });
}

TEST(Baselines, GreedyGetsStuckOnDistractor) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const RunRecord r = run_experiment(chain_config(AgentKind::kGreedyNoiseless, 1000, seed));
    const double H = 4.0;
    EXPECT_GE(r.episodes.back().cum_regret / 1000.0,
              0.5 * (r.v_star - H * kChainDistractorReward) / H);
  }
}

TEST(WarmUp, ClipEpisodesConcentrateEarly) {
  const std::int64_t K = 8192;
  const RunRecord r = run_experiment(chain_config(AgentKind::kCrlsvi, K, 7));
  int first = 0, second = 0;
  for (const auto& e : r.episodes) {
    if (!e.flags.no_clip_on_path) (e.k <= K / 2 ? first : second)++;
  }
  EXPECT_GT(first, 0);
  EXPECT_LT(static_cast<double>(second) / (K / 2), static_cast<double>(first) / (K / 2));
}

TEST(SublinearityFit, ExactPowerLaws) {
  std::vector<double> sqrt_law, linear;
  for (int k = 1; k <= 8192; ++k) {
    sqrt_law.push_back(3.0 * std::sqrt(k));
    linear.push_back(0.7 * k);
  }
  EXPECT_NEAR(sublinearity_fit(sqrt_law), 0.5, 1e-6);
  EXPECT_NEAR(sublinearity_fit(linear), 1.0, 1e-6);
}

TEST(SublinearityFit, Errors) {
  EXPECT_THROW(sublinearity_fit(std::vector<double>(100, 1.0)), std::invalid_argument);
  EXPECT_THROW(sublinearity_fit(std::vector<double>(5000, 0.0)), DegenerateFit);
  std::vector<double> one(5000, 0.0);
  one.back() = 1.0;
  EXPECT_THROW(sublinearity_fit(one), DegenerateFit);
}

TEST(RunConfig, Validation) {
  RunConfig cfg = chain_config(AgentKind::kCrlsvi, 0, 1);
  EXPECT_THROW(validate_config(cfg), std::invalid_argument);
  cfg.num_episodes = 10;
  cfg.schedule.delta = 0.4;
  EXPECT_THROW(validate_config(cfg), std::invalid_argument);
  EXPECT_THROW(run_experiment(cfg), std::invalid_argument);
  cfg.schedule.delta = 0.05;
  EXPECT_NO_THROW(validate_config(cfg));
}

TEST(Names, RoundTrip) {
  for (AgentKind k : {AgentKind::kCrlsvi, AgentKind::kRlsviUnclipped, AgentKind::kGreedyNoiseless})
    EXPECT_EQ(agent_kind_from_string(to_string(k)), k);
  for (BackupForm f : {BackupForm::kModelBased, BackupForm::kRegression})
    EXPECT_EQ(backup_form_from_string(to_string(f)), f);
  EXPECT_THROW(agent_kind_from_string("ucb"), std::invalid_argument);
}

}  // namespace
}  // namespace crlsvi
