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

#include "crlsvi/harness.hpp"

#include <chrono>
#include <cmath>

#include "crlsvi/environments.hpp"
#include "crlsvi/mdp_json.hpp"
#include "crlsvi/stats.hpp"

namespace crlsvi {

std::string to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::kCrlsvi: return "crlsvi";
    case AgentKind::kRlsviUnclipped: return "rlsvi_unclipped";
    case AgentKind::kGreedyNoiseless: return "greedy_noiseless";
  }
  return "unknown";
}

AgentKind agent_kind_from_string(const std::string& name) {
  if (name == "crlsvi") return AgentKind::kCrlsvi;
  if (name == "rlsvi_unclipped") return AgentKind::kRlsviUnclipped;
  if (name == "greedy_noiseless") return AgentKind::kGreedyNoiseless;
  throw std::invalid_argument("unknown agent '" + name +
                              "' (expected crlsvi, rlsvi_unclipped or greedy_noiseless)");
}

std::string to_string(BackupForm form) {
  return form == BackupForm::kRegression ? "regression" : "model_based";
}

BackupForm backup_form_from_string(const std::string& name) {
  if (name == "regression") return BackupForm::kRegression;
  if (name == "model_based") return BackupForm::kModelBased;
  throw std::invalid_argument("unknown backup_form '" + name +
                              "' (expected regression or model_based)");
}

TabularMdp build_environment(const EnvironmentSpec& spec) {
  if (spec.kind == "chain") return make_chain(spec.horizon, spec.num_states, spec.slip);
  if (spec.kind == "random") {
    return make_random_mdp(spec.horizon, spec.num_states, spec.num_actions, spec.dirichlet_alpha,
                           spec.seed, spec.reward_kind);
  }
  if (spec.kind == "inline") {
    if (!spec.mdp) throw std::invalid_argument("inline environment without an MDP");
    validate_mdp(*spec.mdp);
    return *spec.mdp;
  }
  if (spec.kind == "file") return load_mdp(spec.path);
  throw std::invalid_argument("unknown environment kind '" + spec.kind + "'");
}

void validate_config(const RunConfig& cfg) {
  if (cfg.num_episodes < 1) throw std::invalid_argument("K must be at least 1");
  validate_schedule_params(cfg.schedule);
}

ScheduleParams effective_schedule(const RunConfig& cfg) {
  ScheduleParams p = cfg.schedule;
  if (cfg.agent == AgentKind::kGreedyNoiseless) {
    p.beta_scale = 0.0;
    p.alpha_scale = 0.0;
  }
  return p;
}

PlannerOptions planner_options(const RunConfig& cfg) {
  return {cfg.backup_form, cfg.agent == AgentKind::kCrlsvi};
}

std::vector<double> RunRecord::cumulative_regret() const {
  std::vector<double> out;
  out.reserve(episodes.size());
  for (const auto& e : episodes) out.push_back(e.cum_regret);
  return out;
}

std::vector<EventFlags> RunRecord::flags() const {
  std::vector<EventFlags> out;
  out.reserve(episodes.size());
  for (const auto& e : episodes) out.push_back(e.flags);
  return out;
}

RunRecord run_experiment(const RunConfig& cfg, const PolicyOverride& override_policy,
                         std::ostream* qtables_out) {
  validate_config(cfg);
  const auto start = std::chrono::steady_clock::now();
  const TabularMdp m = build_environment(cfg.environment);
  const int H = m.horizon, S = m.num_states, A = m.num_actions;

  RunRecord record;
  record.config = cfg;
  record.schedule = effective_schedule(cfg);
  const NoiseSchedule schedule(H, S, A, cfg.num_episodes, record.schedule);
  const PlannerOptions options = planner_options(cfg);
  const OptimalSolution optimal = solve_optimal(m);
  record.v_star = optimal.values.V(0, m.initial_state);
  record.episodes.reserve(cfg.num_episodes);

  EmpiricalModel em(H, S, A, cfg.backup_form == BackupForm::kRegression);
  double cumulative = 0.0;
  for (std::int64_t k = 1; k <= cfg.num_episodes; ++k) {
    RngStream plan_rng = RngStream::derive(cfg.seed, k, StreamPurpose::kNoise);
    RngStream rollout_rng = RngStream::derive(cfg.seed, k, StreamPurpose::kRollout);

    Plan plan = plan_episode(em, schedule, k, plan_rng, options);
    if (override_policy) plan.policy = override_policy(k, plan);
    if (qtables_out) write_qtables_csv(plan.tables, em, k, *qtables_out, k == 1);

    const Trajectory traj = rollout(m, plan.policy, rollout_rng);
    EpisodeRecord row;
    row.k = k;
    row.flags = evaluate_events(m, optimal, em, schedule, k, plan.tables, traj);
    row.clip_count = plan.tables.clip_count();

    const ValueFunction v_pi = evaluate_policy(m, plan.policy);
    row.inst_regret = record.v_star - v_pi.V(0, m.initial_state);
    cumulative += row.inst_regret;
    row.cum_regret = cumulative;
    record.episodes.push_back(row);

    em.record_trajectory(traj);
  }
  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

double sublinearity_fit(std::span<const double> cum_regret) {
  const auto K = static_cast<std::int64_t>(cum_regret.size());
  if (K < kMinFitEpisodes) {
    throw std::invalid_argument("sublinearity fit needs K >= " + std::to_string(kMinFitEpisodes));
  }
  std::vector<double> xs, ys;
  for (std::int64_t k = K / 4; k <= K; ++k) {
    const double reg = cum_regret[k - 1];
    if (reg > 0.0) {
      xs.push_back(std::log(static_cast<double>(k)));
      ys.push_back(std::log(reg));
    }
  }
  if (xs.size() < 2) throw DegenerateFit("regret is zero over the fit window");
  return stats::ols_slope(xs, ys);
}

}  // namespace crlsvi
