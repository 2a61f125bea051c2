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
#include <stdexcept>
#include <vector>

#include "crlsvi/mdp.hpp"

namespace crlsvi {

class IndexOutOfRange : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// A next-state sentinel at a non-terminal step, or a real next state at the
// terminal step.
class SentinelMisuse : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// One observed transition at some step h; next_state is kTerminalState when
// h is the last step.
struct Transition {
  int state = 0;
  int action = 0;
  double reward = 0.0;
  int next_state = kTerminalState;
};

// Visit counts and (n + 1)-denominator estimators for a time-inhomogeneous
// tabular MDP.
//
// The estimators divide by n + 1 rather than n, so the empirical transition
// row is a sub-probability vector with mass n / (n + 1). The missing mass is
// treated as a transition into a valueless sink: every backup that consumes
// empirical_transition() gives it zero continuation value.
//
// With keep_samples the raw per-step datasets are retained in arrival order;
// the regression form of the planner needs them.
class EmpiricalModel {
 public:
  EmpiricalModel(int H, int S, int A, bool keep_samples = false);

  int horizon() const { return horizon_; }
  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  bool keeps_samples() const { return keep_samples_; }

  void record_transition(int h, int s, int a, double r, int s_next);
  void record_trajectory(const Trajectory& traj);

  std::int64_t count(int h, int s, int a) const { return counts_[sa_index(h, s, a)]; }
  double reward_sum(int h, int s, int a) const { return reward_sums_[sa_index(h, s, a)]; }
  std::int64_t transition_count(int h, int s, int a, int s_next) const {
    return transition_counts_[sa_index(h, s, a) * num_states_ + s_next];
  }
  // Counts for every (s, a) at step h, laid out s * A + a.
  std::span<const std::int64_t> counts_row(int h) const {
    return {counts_.data() + sa_index(h, 0, 0),
            static_cast<std::size_t>(num_states_) * num_actions_};
  }
  const std::vector<std::int64_t>& counts() const { return counts_; }

  // reward_sum / (n + 1); zero for an unvisited triple.
  double empirical_reward(int h, int s, int a) const;
  // transition_count / (n + 1), length S; total mass n / (n + 1).
  std::vector<double> empirical_transition(int h, int s, int a) const;

  std::span<const Transition> samples(int h) const;

  std::size_t sa_index(int h, int s, int a) const {
    return (static_cast<std::size_t>(h) * num_states_ + s) * num_actions_ + a;
  }

 private:
  void check_indices(int h, int s, int a) const;

  int horizon_;
  int num_states_;
  int num_actions_;
  bool keep_samples_;
  std::vector<std::int64_t> counts_;
  std::vector<double> reward_sums_;
  std::vector<std::int64_t> transition_counts_;
  std::vector<std::vector<Transition>> samples_;
};

// sqrt(e_k) = H * sqrt(log(2 H S A k) / (n + 1)), natural log, k >= 1.
double confidence_radius(int H, int S, int A, std::int64_t n, std::int64_t k);

struct ConfidenceReport {
  bool inside = true;
  // radius - |R_hat - R + <P_hat - P, V*_{h+1}>| per (h, s, a); negative
  // entries are violations.
  std::vector<double> slack;
  double worst_slack = 0.0;
};

// Checks whether the empirical model lies in the confidence set around the
// true MDP `m` at episode k, measured against V* of `m`.
ConfidenceReport in_confidence_set(const EmpiricalModel& em, const TabularMdp& m,
                                   const ValueFunction& v_star, std::int64_t k);

// Columns h,s,a,n,reward_sum,next_0..next_{S-1}.
void write_counts_csv(const EmpiricalModel& em, std::ostream& out);

}  // namespace crlsvi
