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
#include <ostream>
#include <span>

#include "crlsvi/agent.hpp"
#include "crlsvi/empirical_model.hpp"
#include "crlsvi/mdp.hpp"

namespace crlsvi {

// Per-episode events from the regret analysis.
struct EventFlags {
  bool confidence_ok = false;    // empirical model inside the confidence set
  bool noise_ok = false;         // |w| <= gamma at every (h, s, a)
  bool q_bounded = false;        // |Q_bar - Q*| <= H - h at every (h, s, a)
  bool no_clip_on_path = false;  // no visited (h, s_h, a_h) was clipped
  bool good = false;             // confidence_ok && noise_ok && q_bounded
  bool optimistic = false;       // V_bar_1(s1) >= V*_1(s1)
  bool l1_ok = false;            // ||P_hat - P||_1 <= 4 sqrt(S L / (n + 1))

  bool operator==(const EventFlags&) const = default;
};

bool check_noise_event(std::span<const double> noise, const NoiseSchedule& schedule,
                       const EmpiricalModel& em, std::int64_t k);

// q_star must come from solve_optimal on the true MDP.
bool check_bounded_q(const QTables& tables, const ValueFunction& q_star);

bool check_optimism(double v_bar_initial, double v_star_initial);
bool check_optimism(const QTables& tables, const ValueFunction& v_star, int s1);

// Checked for every step that has an observed next state (all but the last).
bool check_l1_deviation(const EmpiricalModel& em, const TabularMdp& m, double log_term);

bool check_clip_event(const Trajectory& traj, const QTables& tables);

// Evaluates every flag for one episode. `em` is the model the plan was built
// from and `traj` the trajectory the plan then produced.
EventFlags evaluate_events(const TabularMdp& m, const OptimalSolution& optimal,
                           const EmpiricalModel& em, const NoiseSchedule& schedule,
                           std::int64_t k, const QTables& tables, const Trajectory& traj);

struct DiagnosticSummary {
  std::int64_t episodes = 0;
  std::int64_t confidence_ok = 0;
  std::int64_t noise_ok = 0;
  std::int64_t q_bounded = 0;
  std::int64_t no_clip_on_path = 0;
  std::int64_t good = 0;
  std::int64_t optimistic = 0;
  std::int64_t l1_ok = 0;
  std::int64_t optimistic_and_good = 0;
  std::int64_t clip_episodes = 0;
  std::int64_t confidence_violations = 0;
  // Episodes with confidence_ok && noise_ok && !q_bounded.
  std::int64_t bound_exceptions = 0;

  double optimism_rate_given_good() const;
  double optimism_rate() const;
  double good_rate() const;
  double clip_fraction() const;

  bool operator==(const DiagnosticSummary&) const = default;
};

// 1 / (Phi(-sqrt 2) / 2).
double optimism_constant();
// Phi(-sqrt 2) / 2, the per-episode optimism floor under the good event.
double optimism_floor();

DiagnosticSummary summarize(std::span<const EventFlags> flags);

// Two columns: metric,value.
void write_summary_csv(const DiagnosticSummary& summary, std::ostream& out);
void print_summary(const DiagnosticSummary& summary, std::ostream& out);

}  // namespace crlsvi
