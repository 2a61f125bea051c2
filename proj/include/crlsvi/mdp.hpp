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

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "crlsvi/random.hpp"

namespace crlsvi {

// Timesteps are 0-based throughout the library: h = 0 is the first step of
// an episode and h = H - 1 the last. A value at step h therefore lies in
// [0, H - h].

enum class RewardKind { kDeterministic, kBernoulli };

// Finite-horizon, time-inhomogeneous tabular MDP.
//
// transitions is laid out (h, s, a, s') row-major and rewards (h, s, a)
// row-major. Construction does not validate; call validate_mdp().
struct TabularMdp {
  int horizon = 0;
  int num_states = 0;
  int num_actions = 0;
  std::vector<double> transitions;
  std::vector<double> rewards;
  RewardKind reward_kind = RewardKind::kDeterministic;
  int initial_state = 0;

  TabularMdp() = default;
  TabularMdp(int H, int S, int A, RewardKind kind = RewardKind::kDeterministic,
             int s1 = 0);

  std::size_t sa_index(int h, int s, int a) const {
    return (static_cast<std::size_t>(h) * num_states + s) * num_actions + a;
  }
  std::span<const double> transition(int h, int s, int a) const {
    return {transitions.data() + sa_index(h, s, a) * num_states,
            static_cast<std::size_t>(num_states)};
  }
  std::span<double> transition(int h, int s, int a) {
    return {transitions.data() + sa_index(h, s, a) * num_states,
            static_cast<std::size_t>(num_states)};
  }
  double reward(int h, int s, int a) const { return rewards[sa_index(h, s, a)]; }
  double& reward(int h, int s, int a) { return rewards[sa_index(h, s, a)]; }
};

class MdpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SimplexViolation : public MdpError {
 public:
  SimplexViolation(int h, int s, int a, double sum);
  int h, s, a;
  double sum;
};

class RewardRange : public MdpError {
 public:
  RewardRange(int h, int s, int a, double value);
  int h, s, a;
  double value;
};

class BadInitialState : public MdpError {
 public:
  explicit BadInitialState(int state);
  int state;
};

inline constexpr double kSimplexTolerance = 1e-12;

// Throws one of the MdpError subclasses on the first violated invariant.
void validate_mdp(const TabularMdp& m);

// Deterministic, non-stationary policy; actions laid out (h, s).
struct Policy {
  int horizon = 0;
  int num_states = 0;
  std::vector<int> actions;

  Policy() = default;
  Policy(int H, int S, int fill = 0)
      : horizon(H), num_states(S), actions(static_cast<std::size_t>(H) * S, fill) {}

  int operator()(int h, int s) const { return actions[static_cast<std::size_t>(h) * num_states + s]; }
  int& operator()(int h, int s) { return actions[static_cast<std::size_t>(h) * num_states + s]; }

  bool operator==(const Policy&) const = default;
};

// V over steps 0..H (row H is the zero terminal row) and, when produced by a
// solver, Q over steps 0..H-1.
struct ValueFunction {
  int horizon = 0;
  int num_states = 0;
  int num_actions = 0;
  std::vector<double> v;
  std::vector<double> q;

  ValueFunction() = default;
  ValueFunction(int H, int S, int A);

  double V(int h, int s) const { return v[static_cast<std::size_t>(h) * num_states + s]; }
  double& V(int h, int s) { return v[static_cast<std::size_t>(h) * num_states + s]; }
  double Q(int h, int s, int a) const {
    return q[(static_cast<std::size_t>(h) * num_states + s) * num_actions + a];
  }
  double& Q(int h, int s, int a) {
    return q[(static_cast<std::size_t>(h) * num_states + s) * num_actions + a];
  }
  std::span<const double> v_row(int h) const {
    return {v.data() + static_cast<std::size_t>(h) * num_states,
            static_cast<std::size_t>(num_states)};
  }
};

struct OptimalSolution {
  ValueFunction values;
  Policy policy;
};

// Backward induction on the Bellman optimality equations. Ties in the argmax
// go to the lowest action index.
OptimalSolution solve_optimal(const TabularMdp& m);

// Exact backward induction under a fixed policy. Q is filled for all actions.
ValueFunction evaluate_policy(const TabularMdp& m, const Policy& pi);

inline constexpr int kTerminalState = -1;

struct Step {
  int state = 0;
  int action = 0;
  double reward = 0.0;
  int next_state = kTerminalState;  // kTerminalState on the last step

  bool operator==(const Step&) const = default;
};

using Trajectory = std::vector<Step>;

// Draws one episode. Transitions and Bernoulli rewards consume `rng`.
Trajectory rollout(const TabularMdp& m, const Policy& pi, RngStream& rng);

// Lowest-index argmax over a row.
int argmax(std::span<const double> row);

}  // namespace crlsvi
