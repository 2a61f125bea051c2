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

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "crlsvi/agent.hpp"
#include "crlsvi/diagnostics.hpp"
#include "crlsvi/mdp.hpp"

namespace crlsvi {

inline constexpr const char* kVersion = "0.1.0";

enum class AgentKind { kCrlsvi, kRlsviUnclipped, kGreedyNoiseless };

std::string to_string(AgentKind kind);
AgentKind agent_kind_from_string(const std::string& name);
std::string to_string(BackupForm form);
BackupForm backup_form_from_string(const std::string& name);

// Where the true MDP of a run comes from.
struct EnvironmentSpec {
  std::string kind = "chain";  // chain | random | inline | file
  int horizon = 4;
  int num_states = 4;
  int num_actions = 2;
  double slip = 0.0;
  double dirichlet_alpha = 1.0;
  std::uint64_t seed = 0;
  RewardKind reward_kind = RewardKind::kDeterministic;
  std::string path;
  std::optional<TabularMdp> mdp;
};

TabularMdp build_environment(const EnvironmentSpec& spec);

struct RunConfig {
  EnvironmentSpec environment;
  std::int64_t num_episodes = 1;
  AgentKind agent = AgentKind::kCrlsvi;
  ScheduleParams schedule;
  BackupForm backup_form = BackupForm::kModelBased;
  std::uint64_t seed = 0;
  std::string output = "run";
  bool dump_qtables = false;
};

// Throws std::invalid_argument on K < 1, delta outside (0, 4 Phi(-sqrt 2))
// or a negative scale.
void validate_config(const RunConfig& cfg);

// Schedule parameters actually used by the agent: greedy_noiseless forces
// both scales to zero.
ScheduleParams effective_schedule(const RunConfig& cfg);
PlannerOptions planner_options(const RunConfig& cfg);

struct EpisodeRecord {
  std::int64_t k = 0;
  double inst_regret = 0.0;
  double cum_regret = 0.0;
  EventFlags flags;
  int clip_count = 0;  // clipped (h, s, a) entries in this episode's table

  bool operator==(const EpisodeRecord&) const = default;
};

struct RunRecord {
  RunConfig config;
  ScheduleParams schedule;  // effective
  double v_star = 0.0;      // V*_1(s1)
  std::vector<EpisodeRecord> episodes;
  double wall_seconds = 0.0;

  std::vector<double> cumulative_regret() const;
  std::vector<EventFlags> flags() const;
};

// Replaces the agent's policy for episode k; used to inject reference agents.
using PolicyOverride = std::function<Policy(std::int64_t k, const Plan& plan)>;

// The full learning loop: plan, roll out, record, evaluate exactly, flag.
// Deterministic given cfg.seed; prior/noise and rollout draws come from
// independent per-episode streams.
RunRecord run_experiment(const RunConfig& cfg, const PolicyOverride& override_policy = {},
                         std::ostream* qtables_out = nullptr);

class DegenerateFit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Least-squares slope of log Reg(k) against log k over k in [K/4, K], where
// cum_regret[k - 1] = Reg(k). Episodes with zero regret are skipped; throws
// DegenerateFit when fewer than two remain, std::invalid_argument for
// K < 4096.
double sublinearity_fit(std::span<const double> cum_regret);

inline constexpr std::int64_t kMinFitEpisodes = 4096;

}  // namespace crlsvi
