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

#include "crlsvi/empirical_model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "crlsvi/csv.hpp"

namespace crlsvi {

EmpiricalModel::EmpiricalModel(int H, int S, int A, bool keep_samples)
    : horizon_(H),
      num_states_(S),
      num_actions_(A),
      keep_samples_(keep_samples),
      counts_(static_cast<std::size_t>(H) * S * A, 0),
      reward_sums_(static_cast<std::size_t>(H) * S * A, 0.0),
      transition_counts_(static_cast<std::size_t>(H) * S * A * S, 0) {
  if (keep_samples_) samples_.resize(H);
}

void EmpiricalModel::check_indices(int h, int s, int a) const {
  if (h < 0 || h >= horizon_ || s < 0 || s >= num_states_ || a < 0 || a >= num_actions_) {
    throw IndexOutOfRange("triple (" + std::to_string(h) + ", " + std::to_string(s) + ", " +
                          std::to_string(a) + ") is out of range");
  }
}

void EmpiricalModel::record_transition(int h, int s, int a, double r, int s_next) {
  check_indices(h, s, a);
  if (!(r >= 0.0 && r <= 1.0)) {
    throw std::invalid_argument("reward " + std::to_string(r) + " is outside [0, 1]");
  }
  const bool last = h == horizon_ - 1;
  if (last != (s_next == kTerminalState)) {
    throw SentinelMisuse(last ? "the last step must end in the terminal sentinel"
                              : "terminal sentinel at non-terminal step " + std::to_string(h));
  }
  if (!last && (s_next < 0 || s_next >= num_states_)) {
    throw IndexOutOfRange("next state " + std::to_string(s_next) + " is out of range");
  }
  const std::size_t i = sa_index(h, s, a);
  ++counts_[i];
  reward_sums_[i] += r;
  if (!last) ++transition_counts_[i * num_states_ + s_next];
  if (keep_samples_) samples_[h].push_back({s, a, r, s_next});
}

void EmpiricalModel::record_trajectory(const Trajectory& traj) {
  for (int h = 0; h < static_cast<int>(traj.size()); ++h) {
    const Step& st = traj[h];
    record_transition(h, st.state, st.action, st.reward, st.next_state);
  }
}

double EmpiricalModel::empirical_reward(int h, int s, int a) const {
  const std::size_t i = sa_index(h, s, a);
  return reward_sums_[i] / static_cast<double>(counts_[i] + 1);
}

std::vector<double> EmpiricalModel::empirical_transition(int h, int s, int a) const {
  const std::size_t i = sa_index(h, s, a);
  const double denom = static_cast<double>(counts_[i] + 1);
  std::vector<double> p(num_states_);
  for (int sp = 0; sp < num_states_; ++sp) {
    p[sp] = static_cast<double>(transition_counts_[i * num_states_ + sp]) / denom;
  }
  return p;
}

std::span<const Transition> EmpiricalModel::samples(int h) const {
  if (!keep_samples_) throw std::logic_error("EmpiricalModel was built without keep_samples");
  return samples_.at(h);
}

double confidence_radius(int H, int S, int A, std::int64_t n, std::int64_t k) {
  const double log_term = std::log(2.0 * H * S * A * static_cast<double>(k));
  return H * std::sqrt(log_term / static_cast<double>(n + 1));
}

ConfidenceReport in_confidence_set(const EmpiricalModel& em, const TabularMdp& m,
                                   const ValueFunction& v_star, std::int64_t k) {
  const int H = m.horizon, S = m.num_states, A = m.num_actions;
  ConfidenceReport report;
  report.slack.resize(static_cast<std::size_t>(H) * S * A);
  report.worst_slack = std::numeric_limits<double>::infinity();
  for (int h = 0; h < H; ++h) {
    const auto next = v_star.v_row(h + 1);
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        const std::size_t i = em.sa_index(h, s, a);
        const double denom = static_cast<double>(em.count(h, s, a) + 1);
        double err = em.reward_sum(h, s, a) / denom - m.reward(h, s, a);
        if (h + 1 < H) {
          const auto p = m.transition(h, s, a);
          for (int sp = 0; sp < S; ++sp) {
            const double p_hat = static_cast<double>(em.transition_count(h, s, a, sp)) / denom;
            err += (p_hat - p[sp]) * next[sp];
          }
        }
        const double slack = confidence_radius(H, S, A, em.count(h, s, a), k) - std::abs(err);
        report.slack[i] = slack;
        report.worst_slack = std::min(report.worst_slack, slack);
        if (slack < 0.0) report.inside = false;
      }
    }
  }
  return report;
}

void write_counts_csv(const EmpiricalModel& em, std::ostream& out) {
  CsvWriter csv(out);
  std::vector<std::string> header{"h", "s", "a", "n", "reward_sum"};
  for (int sp = 0; sp < em.num_states(); ++sp) header.push_back("next_" + std::to_string(sp));
  csv.row(header);
  for (int h = 0; h < em.horizon(); ++h) {
    for (int s = 0; s < em.num_states(); ++s) {
      for (int a = 0; a < em.num_actions(); ++a) {
        std::vector<std::string> fields{std::to_string(h), std::to_string(s), std::to_string(a),
                                        std::to_string(em.count(h, s, a)),
                                        format_double(em.reward_sum(h, s, a))};
        for (int sp = 0; sp < em.num_states(); ++sp) {
          fields.push_back(std::to_string(em.transition_count(h, s, a, sp)));
        }
        csv.row(fields);
      }
    }
  }
}

}  // namespace crlsvi
