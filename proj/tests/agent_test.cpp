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

#include <cmath>
#include <numbers>

#include "crlsvi/agent.hpp"
#include "crlsvi/environments.hpp"
#include "crlsvi/stats.hpp"
#include "test_support.hpp"

namespace crlsvi {
namespace {

EmpiricalModel fixed_history(std::uint64_t seed, int episodes = 30) {
  const TabularMdp m = make_random_mdp(3, 3, 2, 1.0, seed, RewardKind::kBernoulli);
  return testing::model_from(m, testing::random_trajectories(m, episodes, seed + 100), true);
}

TEST(NoiseSchedule, FrozenValues) {
  const NoiseSchedule sched(2, 2, 2, 10);
  EXPECT_NEAR(sched.log_term(), 11.06663836234181, 1e-12);
  EXPECT_NEAR(sched.beta(3), 61.93921617452626, 1e-10);
  EXPECT_NEAR(sched.alpha(3), 2741.8356234015782, 1e-8);
  EXPECT_NEAR(sched.sigma_sq(0, 1), 8.0 * std::log(16.0) / 1.0 * 1.0, 1e-12);
  EXPECT_NEAR(sched.gamma(4, 3), std::sqrt(61.93921617452626 / 10.0 * 11.06663836234181), 1e-10);
}

TEST(NoiseSchedule, Monotonicity) {
  const NoiseSchedule sched(3, 4, 2, 1000, {0.1, 0.3, 0.7});
  for (std::int64_t k = 1; k < 1000; ++k) {
    EXPECT_GE(sched.beta(k), 0.0);
    EXPECT_LE(sched.beta(k), sched.beta(k + 1));
    EXPECT_LE(sched.alpha(k), sched.alpha(k + 1));
    for (std::int64_t n = 0; n < 50; n += 3) {
      EXPECT_LT(sched.sigma_sq(n + 1, k), sched.sigma_sq(n, k));
    }
  }
}

TEST(NoiseSchedule, DeltaRange) {
  EXPECT_NEAR(max_delta(), 4.0 * stats::normal_cdf(-std::numbers::sqrt2), 1e-15);
  EXPECT_NEAR(max_delta(), 0.3146, 1e-4);
  for (double bad : {0.0, -0.1, 0.5, max_delta()}) {
    try {
      NoiseSchedule(2, 2, 2, 10, {bad, 1.0, 1.0});
      ADD_FAILURE() << "delta " << bad << " accepted";
    } catch (const std::invalid_argument& e) {
      EXPECT_NE(std::string(e.what()).find("violates 0 < delta < 4*Phi(-sqrt(2))"),
                std::string::npos);
    }
  }
  EXPECT_THROW(NoiseSchedule(2, 2, 2, 10, {0.05, -1.0, 1.0}), std::invalid_argument);
  EXPECT_NO_THROW(NoiseSchedule(2, 2, 2, 10, {0.3, 1.0, 1.0}));
}

TEST(SamplePriorAndNoise, ZeroScaleGivesZeros) {
  const EmpiricalModel em = fixed_history(1);
  const NoiseSchedule sched(3, 3, 2, 100, {0.05, 0.0, 1.0});
  RngStream rng(4);
  const auto draws = sample_prior_and_noise(sched, em, 7, rng);
  for (double x : draws.q_prior) EXPECT_EQ(x, 0.0);
  for (double x : draws.noise) EXPECT_EQ(x, 0.0);
}

TEST(SamplePriorAndNoise, VarianceAtUnvisitedTriple) {
  const EmpiricalModel em(2, 2, 2);
  const NoiseSchedule sched(2, 2, 2, 10);
  const double expected = 8.0 * std::log(16.0);
  EXPECT_NEAR(expected, 22.18070977791825, 1e-12);
  std::vector<double> w, prior;
  RngStream rng(99);
  while (w.size() < 100000) {
    const auto d = sample_prior_and_noise(sched, em, 1, rng);
    w.insert(w.end(), d.noise.begin(), d.noise.end());
    prior.insert(prior.end(), d.q_prior.begin(), d.q_prior.end());
  }
  EXPECT_NEAR(stats::variance(w) / expected, 1.0, 0.02);
  EXPECT_NEAR(stats::variance(prior) / expected, 1.0, 0.02);
}

TEST(SamplePriorAndNoise, NoiseVarianceShrinksWithCount) {
  EmpiricalModel em(1, 1, 1);
  for (int i = 0; i < 9; ++i) em.record_transition(0, 0, 0, 0.0, kTerminalState);
  const NoiseSchedule sched(1, 1, 1, 10);
  std::vector<double> w;
  RngStream rng(3);
  for (int i = 0; i < 100000; ++i) w.push_back(sample_prior_and_noise(sched, em, 2, rng).noise[0]);
  EXPECT_NEAR(stats::variance(w) / (sched.beta(2) / 20.0), 1.0, 0.02);
}

TEST(SamplePriorAndNoise, Deterministic) {
  const EmpiricalModel em = fixed_history(2);
  const NoiseSchedule sched(3, 3, 2, 100);
  RngStream a(RngStream::derive(5, 3, StreamPurpose::kNoise));
  RngStream b(RngStream::derive(5, 3, StreamPurpose::kNoise));
  const auto x = sample_prior_and_noise(sched, em, 3, a);
  const auto y = sample_prior_and_noise(sched, em, 3, b);
  EXPECT_EQ(x.q_prior, y.q_prior);
  EXPECT_EQ(x.noise, y.noise);
}

TEST(BackupModelBased, HandArithmetic) {
  // n = 2 at (0, 0, 0): rewards (1, 0), both moving to state 0.
  EmpiricalModel em(2, 2, 2);
  em.record_transition(0, 0, 0, 1.0, 0);
  em.record_transition(0, 0, 0, 0.0, 0);
  const std::vector<double> next{3.0, 1.0, 2.0, 5.0};  // max-next = (3, 5)
  const std::vector<double> noise{0.1, 0.0, 0.0, 0.0};
  const auto q = backup_model_based(em, 0, next, noise);
  EXPECT_NEAR(q[0], 1.0 / 3.0 + 2.0 + 0.1, 1e-15);
  EXPECT_NEAR(q[0], 2.4333333333333336, 1e-15);
  EXPECT_EQ(q[1], 0.0);  // n = 0, w = 0
  EXPECT_EQ(q[3], 0.0);
}

TEST(BackupModelBased, LastStepIsEmpiricalReward) {
  const EmpiricalModel em = fixed_history(3);
  const std::vector<double> zeros(6, 0.0);
  const auto q = backup_model_based(em, 2, zeros, zeros);
  for (int s = 0; s < 3; ++s) {
    for (int a = 0; a < 2; ++a) EXPECT_EQ(q[s * 2 + a], em.empirical_reward(2, s, a));
  }
}

TEST(BackupRegression, EmptyDataReturnsPrior) {
  const std::vector<double> prior{0.3, -1.2, 4.0, 0.0};
  const std::vector<double> next(4, 0.0);
  EXPECT_EQ(backup_regression({}, prior, next, 2, 2), prior);
}

TEST(BackupRegression, OneDatum) {
  const std::vector<PerturbedDatum> data{{0, 1, 1.0, 0.5, 1}};
  const std::vector<double> prior(4, 0.0);
  const std::vector<double> next{0.0, 0.0, 2.0, -1.0};  // max at state 1 is 2
  const auto q = backup_regression(data, prior, next, 2, 2);
  EXPECT_DOUBLE_EQ(q[1], 1.75);
  EXPECT_EQ(q[0], 0.0);
}

TEST(PerturbDataset, VarianceAndOrder) {
  std::vector<Transition> data(50000, Transition{1, 0, 0.25, 2});
  RngStream rng(8);
  const auto out = perturb_dataset(data, 6.0, rng);
  ASSERT_EQ(out.size(), data.size());
  std::vector<double> w;
  for (const auto& d : out) {
    EXPECT_EQ(d.state, 1);
    EXPECT_EQ(d.reward, 0.25);
    EXPECT_EQ(d.next_state, 2);
    w.push_back(d.perturbation);
  }
  EXPECT_NEAR(stats::variance(w) / 3.0, 1.0, 0.03);
}

// The closed form is affine in the Gaussian inputs (prior and per-datum
// perturbations), so its mean is the output at zero inputs and its variance
// is (beta / 2) times the sum of squared unit-probe coefficients.
TEST(BackupRegression, AnalyticMomentsMatchModelBasedLaw) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const EmpiricalModel em = fixed_history(seed, 25);
    RngStream rng(seed);
    std::vector<double> next(6);
    for (double& x : next) x = rng.uniform() * 3.0;
    for (int h = 0; h < 3; ++h) {
      const auto& samples = em.samples(h);
      std::vector<PerturbedDatum> data;
      for (const auto& t : samples) data.push_back({t.state, t.action, t.reward, 0.0, t.next_state});
      const std::vector<double> zero_prior(6, 0.0);
      const auto base = backup_regression(data, zero_prior, h == 2 ? std::vector<double>(6, 0.0) : next, 3, 2);
      const auto mean = backup_model_based(em, h, h == 2 ? std::vector<double>(6, 0.0) : next,
                                           std::vector<double>(6, 0.0));
      std::vector<double> coeff_sq(6, 0.0);
      for (std::size_t i = 0; i < 6; ++i) {
        EXPECT_NEAR(base[i], mean[i], 1e-12 * std::max(1.0, std::abs(mean[i])));
        auto prior = zero_prior;
        prior[i] = 1.0;
        const auto probe = backup_regression(data, prior, h == 2 ? std::vector<double>(6, 0.0) : next, 3, 2);
        coeff_sq[i] += std::pow(probe[i] - base[i], 2);
      }
      for (std::size_t j = 0; j < data.size(); ++j) {
        auto bumped = data;
        bumped[j].perturbation = 1.0;
        const auto probe = backup_regression(bumped, zero_prior, h == 2 ? std::vector<double>(6, 0.0) : next, 3, 2);
        for (std::size_t i = 0; i < 6; ++i) coeff_sq[i] += std::pow(probe[i] - base[i], 2);
      }
      for (int s = 0; s < 3; ++s) {
        for (int a = 0; a < 2; ++a) {
          // var = (beta / 2) * coeff_sq must equal beta / (2 (n + 1)).
          const double n = static_cast<double>(em.count(h, s, a));
          EXPECT_NEAR(coeff_sq[s * 2 + a], 1.0 / (n + 1.0), 1e-14);
        }
      }
    }
  }
}

TEST(Clip, ThresholdExamples) {
  const std::vector<double> q{1.3};
  auto r = clip(q, std::vector<std::int64_t>{5}, 7.2, 2.0);
  EXPECT_EQ(r.q_bar[0], 2.0);
  EXPECT_EQ(r.mask[0], 1);
  r = clip(q, std::vector<std::int64_t>{8}, 7.2, 2.0);
  EXPECT_EQ(r.q_bar[0], 1.3);
  EXPECT_EQ(r.mask[0], 0);
  // Strict comparison: n == alpha is clipped.
  r = clip(q, std::vector<std::int64_t>{7}, 7.0, 2.0);
  EXPECT_EQ(r.mask[0], 1);
  r = clip(q, std::vector<std::int64_t>{0}, 0.0, 2.0);
  EXPECT_EQ(r.mask[0], 1);
  r = clip(q, std::vector<std::int64_t>{1}, 0.0, 2.0);
  EXPECT_EQ(r.mask[0], 0);
}

TEST(Clip, Idempotent) {
  RngStream rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> q(12);
    std::vector<std::int64_t> n(12);
    for (auto& x : q) x = rng.normal(0.0, 5.0);
    for (auto& c : n) c = static_cast<std::int64_t>(rng.uniform() * 20);
    const double alpha = rng.uniform() * 20;
    const auto once = clip(q, n, alpha, 3.0);
    const auto twice = clip(once.q_bar, n, alpha, 3.0);
    EXPECT_EQ(once.q_bar, twice.q_bar);
    EXPECT_EQ(once.mask, twice.mask);
    for (std::size_t i = 0; i < q.size(); ++i) {
      EXPECT_TRUE(once.q_bar[i] == q[i] || once.q_bar[i] == 3.0);
    }
  }
}

void expect_table_invariants(const QTables& t) {
  const int H = t.horizon, S = t.num_states, A = t.num_actions;
  for (std::size_t i = 0; i < t.row_size(); ++i) EXPECT_EQ(t.q_bar[H * t.row_size() + i], 0.0);
  for (int s = 0; s < S; ++s) EXPECT_EQ(t.v(H, s), 0.0);
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      double best = -INFINITY;
      for (int a = 0; a < A; ++a) {
        const auto i = t.index(h, s, a);
        best = std::max(best, t.q_bar[i]);
        if (t.clipped[i]) EXPECT_EQ(t.q_bar[i], H - h);
        else EXPECT_EQ(t.q_bar[i], t.q_hat[i]);
      }
      EXPECT_EQ(t.v(h, s), best);
    }
  }
}

TEST(PlanEpisode, EmptyHistoryClipsEverything) {
  const EmpiricalModel em(3, 4, 3);
  const NoiseSchedule sched(3, 4, 3, 100);
  RngStream rng(1);
  const Plan plan = plan_episode(em, sched, 1, rng);
  EXPECT_EQ(plan.tables.clip_count(), 3 * 4 * 3);
  for (int h = 0; h < 3; ++h) {
    for (int s = 0; s < 4; ++s) {
      EXPECT_EQ(plan.policy(h, s), 0);
      for (int a = 0; a < 3; ++a) EXPECT_EQ(plan.tables.q_bar[plan.tables.index(h, s, a)], 3 - h);
    }
  }
  expect_table_invariants(plan.tables);
}

TEST(PlanEpisode, TableInvariantsBothForms) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const EmpiricalModel em = fixed_history(seed, 200);
    const NoiseSchedule sched(3, 3, 2, 1000, {0.05, 0.01, 0.001});
    for (auto form : {BackupForm::kModelBased, BackupForm::kRegression}) {
      for (bool clip_on : {true, false}) {
        RngStream rng(seed);
        const Plan plan = plan_episode(em, sched, 201, rng, {form, clip_on});
        expect_table_invariants(plan.tables);
        if (!clip_on) EXPECT_EQ(plan.tables.clip_count(), 0);
        EXPECT_EQ(plan.policy.actions, greedy_policy(plan.tables).actions);
      }
    }
  }
}

TEST(PlanEpisode, NoiselessIsGreedyOnEmpiricalModel) {
  // Every triple visited, so a zero threshold clips nothing.
  const TabularMdp m = make_random_mdp(3, 3, 2, 1.0, 4, RewardKind::kBernoulli);
  EmpiricalModel em(3, 3, 2);
  RngStream draw(4);
  for (int h = 0; h < 3; ++h)
    for (int s = 0; s < 3; ++s)
      for (int a = 0; a < 2; ++a)
        for (int i = 0; i < 5 + s + a; ++i) {
          const double r = draw.bernoulli(m.reward(h, s, a)) ? 1.0 : 0.0;
          const auto p = m.transition(h, s, a);
          em.record_transition(h, s, a, r, h < 2 ? draw.categorical(p.data(), 3) : kTerminalState);
        }
  const NoiseSchedule sched(3, 3, 2, 10000, {0.05, 0.0, 0.0});
  RngStream rng(1);
  const Plan plan = plan_episode(em, sched, 20, rng);
  // Independent oracle: backward induction on (R_hat, P_hat) with the
  // deficient mass carrying zero value.
  std::vector<double> v_next(3, 0.0);
  for (int h = 2; h >= 0; --h) {
    std::vector<double> v(3);
    for (int s = 0; s < 3; ++s) {
      double best = -INFINITY;
      int best_a = -1;
      for (int a = 0; a < 2; ++a) {
        double q = em.empirical_reward(h, s, a);
        const auto p = em.empirical_transition(h, s, a);
        if (h < 2) for (int sp = 0; sp < 3; ++sp) q += p[sp] * v_next[sp];
        EXPECT_NEAR(plan.tables.q_bar[plan.tables.index(h, s, a)], q, 1e-12);
        if (q > best + 1e-12) best = q, best_a = a;
      }
      v[s] = best;
      EXPECT_EQ(plan.policy(h, s), best_a);
    }
    v_next = v;
  }
}

TEST(PlanEpisode, Deterministic) {
  const EmpiricalModel em = fixed_history(5, 60);
  const NoiseSchedule sched(3, 3, 2, 100, {0.05, 0.1, 0.01});
  for (auto form : {BackupForm::kModelBased, BackupForm::kRegression}) {
    RngStream a(RngStream::derive(1, 61, StreamPurpose::kNoise));
    RngStream b(RngStream::derive(1, 61, StreamPurpose::kNoise));
    const Plan x = plan_episode(em, sched, 61, a, {form, true});
    const Plan y = plan_episode(em, sched, 61, b, {form, true});
    EXPECT_EQ(x.tables.q_hat, y.tables.q_hat);
    EXPECT_EQ(x.policy.actions, y.policy.actions);
  }
}

TEST(PlanEpisode, LastStepFollowsNormalLaw) {
  const EmpiricalModel em = fixed_history(6, 40);
  const NoiseSchedule sched(3, 3, 2, 100, {0.05, 0.1, 1.0});
  const int h = 2;
  int s = 0, a = 0;
  for (int ss = 0; ss < 3; ++ss)
    for (int aa = 0; aa < 2; ++aa)
      if (em.count(h, ss, aa) > em.count(h, s, a)) s = ss, a = aa;
  ASSERT_GT(em.count(h, s, a), 0);
  const double mu = em.empirical_reward(h, s, a);
  const double sd = std::sqrt(sched.sigma_sq(em.count(h, s, a), 41));
  std::vector<double> xs;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    RngStream rng(RngStream::derive(seed, 41, StreamPurpose::kTest));
    const Plan plan = plan_episode(em, sched, 41, rng);
    xs.push_back(plan.tables.q_hat[plan.tables.index(h, s, a)]);
  }
  const auto ks = stats::ks_one_sample(xs, [&](double x) { return stats::normal_cdf((x - mu) / sd); });
  EXPECT_GT(ks.p_value, 0.01) << "D = " << ks.statistic;
}

TEST(PlanEpisode, RegressionAndModelBasedFormsAgreeInLaw) {
  const EmpiricalModel em = fixed_history(7, 40);
  const NoiseSchedule sched(3, 3, 2, 100, {0.05, 0.1, 0.01});
  std::vector<double> mb, rg;
  for (std::uint64_t seed = 0; seed < 5000; ++seed) {
    RngStream r1(RngStream::derive(seed, 1, StreamPurpose::kTest));
    RngStream r2(RngStream::derive(seed, 2, StreamPurpose::kTest));
    const Plan p1 = plan_episode(em, sched, 41, r1, {BackupForm::kModelBased, true});
    const Plan p2 = plan_episode(em, sched, 41, r2, {BackupForm::kRegression, true});
    mb.push_back(p1.tables.q_hat[p1.tables.index(0, 0, 0)]);
    rg.push_back(p2.tables.q_hat[p2.tables.index(0, 0, 0)]);
  }
  EXPECT_GT(stats::ks_two_sample(mb, rg).p_value, 0.01);
}

TEST(GreedyPolicy, InvariantUnderPositiveScaling) {
  RngStream rng(77);
  QTables t(3, 4, 3);
  for (int h = 0; h < 3; ++h)
    for (auto& x : t.row(t.q_bar, h)) x = std::round(rng.normal(0.0, 2.0) * 4) / 4;
  const Policy base = greedy_policy(t);
  for (double c : {0.5, 2.0, 1e3}) {
    QTables scaled = t;
    for (int h = 0; h < 3; ++h)
      for (auto& x : scaled.row(scaled.q_bar, h)) x *= c;
    EXPECT_EQ(greedy_policy(scaled).actions, base.actions);
  }
}

TEST(QTablesCsv, OneRowPerEntry) {
  const EmpiricalModel em(2, 2, 2);
  const NoiseSchedule sched(2, 2, 2, 10);
  RngStream rng(1);
  const Plan plan = plan_episode(em, sched, 1, rng);
  std::ostringstream os;
  write_qtables_csv(plan.tables, em, 1, os, true);
  write_qtables_csv(plan.tables, em, 2, os, false);
  const std::string text = os.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 2 * 8);
  EXPECT_EQ(text.substr(0, text.find('\n')), "k,h,s,a,n,q_hat,q_bar,q_prior,noise,clipped");
}

}  // namespace
}  // namespace crlsvi
