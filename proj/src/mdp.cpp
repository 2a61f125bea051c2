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

#include "crlsvi/mdp.hpp"

#include <cmath>
#include <sstream>

namespace crlsvi {
namespace {

std::string triple(int h, int s, int a) {
  std::ostringstream os;
  os << "(h=" << h << ", s=" << s << ", a=" << a << ")";
  return os.str();
}

}  // namespace

TabularMdp::TabularMdp(int H, int S, int A, RewardKind kind, int s1)
    : horizon(H),
      num_states(S),
      num_actions(A),
      transitions(static_cast<std::size_t>(H) * S * A * S, 0.0),
      rewards(static_cast<std::size_t>(H) * S * A, 0.0),
      reward_kind(kind),
      initial_state(s1) {}

SimplexViolation::SimplexViolation(int h_, int s_, int a_, double sum_)
    : MdpError("transition row " + triple(h_, s_, a_) +
               " is not a probability vector (sum = " + std::to_string(sum_) + ")"),
      h(h_), s(s_), a(a_), sum(sum_) {}

RewardRange::RewardRange(int h_, int s_, int a_, double value_)
    : MdpError("reward " + triple(h_, s_, a_) + " = " + std::to_string(value_) +
               " is outside [0, 1]"),
      h(h_), s(s_), a(a_), value(value_) {}

BadInitialState::BadInitialState(int state_)
    : MdpError("initial state " + std::to_string(state_) + " is out of range"),
      state(state_) {}

void validate_mdp(const TabularMdp& m) {
  if (m.horizon < 1 || m.num_states < 1 || m.num_actions < 1) {
    throw MdpError("horizon, num_states and num_actions must be positive");
  }
  const std::size_t sa = static_cast<std::size_t>(m.horizon) * m.num_states * m.num_actions;
  if (m.rewards.size() != sa || m.transitions.size() != sa * m.num_states) {
    throw MdpError("transition or reward table has the wrong size");
  }
  for (int h = 0; h < m.horizon; ++h) {
    for (int s = 0; s < m.num_states; ++s) {
      for (int a = 0; a < m.num_actions; ++a) {
        double sum = 0.0;
        bool negative = false;
        for (double p : m.transition(h, s, a)) {
          if (!(p >= 0.0)) negative = true;
          sum += p;
        }
        if (negative || !(std::abs(sum - 1.0) <= kSimplexTolerance)) {
          throw SimplexViolation(h, s, a, sum);
        }
        const double r = m.reward(h, s, a);
        if (!(r >= 0.0 && r <= 1.0)) throw RewardRange(h, s, a, r);
      }
    }
  }
  if (m.initial_state < 0 || m.initial_state >= m.num_states) {
    throw BadInitialState(m.initial_state);
  }
}

ValueFunction::ValueFunction(int H, int S, int A)
    : horizon(H),
      num_states(S),
      num_actions(A),
      v(static_cast<std::size_t>(H + 1) * S, 0.0),
      q(static_cast<std::size_t>(H) * S * A, 0.0) {}

int argmax(std::span<const double> row) {
  int best = 0;
  for (std::size_t i = 1; i < row.size(); ++i) {
    if (row[i] > row[best]) best = static_cast<int>(i);
  }
  return best;
}

namespace {

double expected_next(const TabularMdp& m, const ValueFunction& vf, int h, int s, int a) {
  const auto p = m.transition(h, s, a);
  const auto next = vf.v_row(h + 1);
  double acc = 0.0;
  for (int sp = 0; sp < m.num_states; ++sp) acc += p[sp] * next[sp];
  return acc;
}

}  // namespace

OptimalSolution solve_optimal(const TabularMdp& m) {
  OptimalSolution out{ValueFunction(m.horizon, m.num_states, m.num_actions),
                      Policy(m.horizon, m.num_states)};
  auto& vf = out.values;
  for (int h = m.horizon - 1; h >= 0; --h) {
    for (int s = 0; s < m.num_states; ++s) {
      for (int a = 0; a < m.num_actions; ++a) {
        vf.Q(h, s, a) = m.reward(h, s, a) + expected_next(m, vf, h, s, a);
      }
      const std::span<const double> row(&vf.Q(h, s, 0), static_cast<std::size_t>(m.num_actions));
      const int best = argmax(row);
      out.policy(h, s) = best;
      vf.V(h, s) = row[best];
    }
  }
  return out;
}

ValueFunction evaluate_policy(const TabularMdp& m, const Policy& pi) {
  ValueFunction vf(m.horizon, m.num_states, m.num_actions);
  for (int h = m.horizon - 1; h >= 0; --h) {
    for (int s = 0; s < m.num_states; ++s) {
      for (int a = 0; a < m.num_actions; ++a) {
        vf.Q(h, s, a) = m.reward(h, s, a) + expected_next(m, vf, h, s, a);
      }
      vf.V(h, s) = vf.Q(h, s, pi(h, s));
    }
  }
  return vf;
}

Trajectory rollout(const TabularMdp& m, const Policy& pi, RngStream& rng) {
  Trajectory traj;
  traj.reserve(m.horizon);
  int s = m.initial_state;
  for (int h = 0; h < m.horizon; ++h) {
    Step step;
    step.state = s;
    step.action = pi(h, s);
    const double mean = m.reward(h, s, step.action);
    step.reward = m.reward_kind == RewardKind::kBernoulli ? (rng.bernoulli(mean) ? 1.0 : 0.0) : mean;
    if (h + 1 < m.horizon) {
      const auto p = m.transition(h, s, step.action);
      step.next_state = rng.categorical(p.data(), m.num_states);
    }
    s = step.next_state;
    traj.push_back(step);
  }
  return traj;
}

}  // namespace crlsvi
