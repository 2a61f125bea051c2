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
#include <vector>

#include "crlsvi/empirical_model.hpp"
#include "crlsvi/mdp.hpp"
#include "crlsvi/random.hpp"

namespace crlsvi {

// 4 * Phi(-sqrt(2)): the exclusive upper bound on the failure probability
// delta for which the high-probability regret guarantee is stated.
double max_delta();

struct ScheduleParams {
  double delta = 0.05;
  double beta_scale = 1.0;
  double alpha_scale = 1.0;
};

// Throws std::invalid_argument when delta is outside (0, max_delta()) or a
// scale is negative.
void validate_schedule_params(const ScheduleParams& params);

// Noise variance and clipping threshold as functions of the episode index.
// All logarithms are natural.
//
//   beta(k)          = beta_scale  * H^3 S log(2 H S A k)
//   alpha(k)         = alpha_scale * 4 H^3 S log(2 H S A k) * L
//   L                = log(40 S A T / delta),  T = K H
//   sigma_sq(n, k)   = beta(k) / (2 (n + 1))
//   gamma(n, k)      = sqrt(sigma_sq(n, k) * L)
class NoiseSchedule {
 public:
  // Validates params as validate_schedule_params does.
  NoiseSchedule(int H, int S, int A, std::int64_t num_episodes, ScheduleParams params = {});

  double beta(std::int64_t k) const;
  double alpha(std::int64_t k) const;
  double sigma_sq(std::int64_t n, std::int64_t k) const;
  double gamma(std::int64_t n, std::int64_t k) const;
  double log_term() const { return log_term_; }

  const ScheduleParams& params() const { return params_; }
  int horizon() const { return H_; }
  int num_states() const { return S_; }
  int num_actions() const { return A_; }
  std::int64_t num_episodes() const { return K_; }

 private:
  double log_episode(std::int64_t k) const;

  int H_, S_, A_;
  std::int64_t K_;
  ScheduleParams params_;
  double log_term_;
};

enum class BackupForm { kRegression, kModelBased };

// Per-episode planner state. Step-indexed tables are laid out (h, s, a).
// q_bar and v_bar carry an extra all-zero row at h = H.
struct QTables {
  int horizon = 0;
  int num_states = 0;
  int num_actions = 0;
  std::vector<double> q_hat;
  std::vector<double> q_bar;
  std::vector<double> v_bar;
  std::vector<double> q_prior;
  // Aggregate perturbation of each backup. In the regression form this is
  // (Q_prior + sum of per-datum draws) / (n + 1).
  std::vector<double> noise;
  std::vector<std::uint8_t> clipped;

  QTables() = default;
  QTables(int H, int S, int A);

  std::size_t index(int h, int s, int a) const {
    return (static_cast<std::size_t>(h) * num_states + s) * num_actions + a;
  }
  std::size_t row_size() const { return static_cast<std::size_t>(num_states) * num_actions; }
  std::span<double> row(std::vector<double>& table, int h) const {
    return {table.data() + h * row_size(), row_size()};
  }
  std::span<const double> row(const std::vector<double>& table, int h) const {
    return {table.data() + h * row_size(), row_size()};
  }
  double v(int h, int s) const { return v_bar[static_cast<std::size_t>(h) * num_states + s]; }
  int clip_count() const;
};

struct PriorAndNoise {
  std::vector<double> q_prior;  // N(0, beta_k / 2), (h, s, a)
  std::vector<double> noise;    // N(0, beta_k / (2 (n + 1))), (h, s, a)
};

// Draws every prior entry first, then every noise entry, both in (h, s, a)
// order.
PriorAndNoise sample_prior_and_noise(const NoiseSchedule& schedule, const EmpiricalModel& em,
                                     std::int64_t k, RngStream& rng);

// Model-based backup for one step:
//   Q_hat(s, a) = R_hat + sum_s' P_hat(s') max_a' Q_bar_next(s', a') + w(s, a).
// q_bar_next is the (s, a) row of the following step (all zeros after the
// last step).
std::vector<double> backup_model_based(const EmpiricalModel& em, int h,
                                       std::span<const double> q_bar_next,
                                       std::span<const double> noise_row);

struct PerturbedDatum {
  int state = 0;
  int action = 0;
  double reward = 0.0;
  double perturbation = 0.0;
  int next_state = kTerminalState;
};

// Attaches an independent N(0, beta_k / 2) draw to each datum, in order.
std::vector<PerturbedDatum> perturb_dataset(std::span<const Transition> data, double beta_k,
                                            RngStream& rng);

// Closed-form minimiser of
//   sum_i (Q(s_i, a_i) - r_i - w_i - max_a' Q_bar_next(s'_i, a'))^2 + ||Q - Q_prior||^2
// which decouples per (s, a) into
//   Q(s, a) = (Q_prior(s, a) + sum_i (r_i + w_i + max_a' Q_bar_next(s'_i, a'))) / (n(s, a) + 1).
std::vector<double> backup_regression(std::span<const PerturbedDatum> data,
                                      std::span<const double> q_prior_row,
                                      std::span<const double> q_bar_next, int S, int A);

struct ClipResult {
  std::vector<double> q_bar;
  std::vector<std::uint8_t> mask;
};

// Keeps Q_hat where n > alpha, otherwise replaces it with `max_value`
// (H - h for 0-based h).
ClipResult clip(std::span<const double> q_hat, std::span<const std::int64_t> counts,
                double alpha, double max_value);

struct PlannerOptions {
  BackupForm form = BackupForm::kModelBased;
  bool clip = true;
};

struct Plan {
  QTables tables;
  Policy policy;
};

// One backward pass from the last step to the first, clipping after each
// backup, followed by greedy extraction (lowest index wins ties).
Plan plan_episode(const EmpiricalModel& em, const NoiseSchedule& schedule, std::int64_t k,
                  RngStream& rng, PlannerOptions options = {});

Policy greedy_policy(const QTables& tables);

// Columns k,h,s,a,n,q_hat,q_bar,q_prior,noise,clipped. Writes the header only
// when `header` is set so that several episodes can share one file.
void write_qtables_csv(const QTables& tables, const EmpiricalModel& em, std::int64_t k,
                       std::ostream& out, bool header);

}  // namespace crlsvi
