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

#include "crlsvi/agent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "crlsvi/csv.hpp"

namespace crlsvi {

double max_delta() { return 4.0 * 0.5 * std::erfc(1.0); }  // Phi(-sqrt 2) = erfc(1) / 2

void validate_schedule_params(const ScheduleParams& params) {
  if (!(params.delta > 0.0 && params.delta < max_delta())) {
    throw std::invalid_argument("delta = " + format_double(params.delta) +
                                " violates 0 < delta < 4*Phi(-sqrt(2)) ~= " +
                                format_double(max_delta()));
  }
  if (!(params.beta_scale >= 0.0) || !(params.alpha_scale >= 0.0)) {
    throw std::invalid_argument("beta_scale and alpha_scale must be nonnegative");
  }
}

NoiseSchedule::NoiseSchedule(int H, int S, int A, std::int64_t num_episodes,
                             ScheduleParams params)
    : H_(H), S_(S), A_(A), K_(num_episodes), params_(params) {
  if (H < 1 || S < 1 || A < 1) throw std::invalid_argument("H, S and A must be positive");
  if (num_episodes < 1) throw std::invalid_argument("number of episodes must be at least 1");
  validate_schedule_params(params);
  const double T = static_cast<double>(num_episodes) * H;
  log_term_ = std::log(40.0 * S * A * T / params.delta);
}

double NoiseSchedule::log_episode(std::int64_t k) const {
  return std::log(2.0 * H_ * S_ * A_ * static_cast<double>(k));
}

double NoiseSchedule::beta(std::int64_t k) const {
  return params_.beta_scale * std::pow(H_, 3) * S_ * log_episode(k);
}

double NoiseSchedule::alpha(std::int64_t k) const {
  return params_.alpha_scale * 4.0 * std::pow(H_, 3) * S_ * log_episode(k) * log_term_;
}

double NoiseSchedule::sigma_sq(std::int64_t n, std::int64_t k) const {
  return beta(k) / (2.0 * static_cast<double>(n + 1));
}

double NoiseSchedule::gamma(std::int64_t n, std::int64_t k) const {
  return std::sqrt(sigma_sq(n, k) * log_term_);
}

QTables::QTables(int H, int S, int A)
    : horizon(H),
      num_states(S),
      num_actions(A),
      q_hat(static_cast<std::size_t>(H) * S * A, 0.0),
      q_bar(static_cast<std::size_t>(H + 1) * S * A, 0.0),
      v_bar(static_cast<std::size_t>(H + 1) * S, 0.0),
      q_prior(static_cast<std::size_t>(H) * S * A, 0.0),
      noise(static_cast<std::size_t>(H) * S * A, 0.0),
      clipped(static_cast<std::size_t>(H) * S * A, 0) {}

int QTables::clip_count() const {
  return static_cast<int>(std::count(clipped.begin(), clipped.end(), std::uint8_t{1}));
}

PriorAndNoise sample_prior_and_noise(const NoiseSchedule& schedule, const EmpiricalModel& em,
                                     std::int64_t k, RngStream& rng) {
  if (k < 1) throw std::invalid_argument("episode index must be >= 1");
  const std::size_t size = em.counts().size();
  PriorAndNoise out{std::vector<double>(size), std::vector<double>(size)};
  const double prior_sd = std::sqrt(schedule.beta(k) / 2.0);
  for (auto& x : out.q_prior) x = rng.normal(0.0, prior_sd);
  for (std::size_t i = 0; i < size; ++i) {
    out.noise[i] = rng.normal(0.0, std::sqrt(schedule.sigma_sq(em.counts()[i], k)));
  }
  return out;
}

namespace {

// max_a' over each state of an (s, a) row.
std::vector<double> row_max(std::span<const double> q_row, int S, int A) {
  std::vector<double> v(S);
  for (int s = 0; s < S; ++s) {
    v[s] = *std::max_element(q_row.begin() + s * A, q_row.begin() + (s + 1) * A);
  }
  return v;
}

}  // namespace

std::vector<double> backup_model_based(const EmpiricalModel& em, int h,
                                       std::span<const double> q_bar_next,
                                       std::span<const double> noise_row) {
  const int S = em.num_states(), A = em.num_actions();
  const std::vector<double> v_next = row_max(q_bar_next, S, A);
  const bool last = h == em.horizon() - 1;
  std::vector<double> q(static_cast<std::size_t>(S) * A);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      const double denom = static_cast<double>(em.count(h, s, a) + 1);
      double value = em.reward_sum(h, s, a) / denom;
      if (!last) {
        for (int sp = 0; sp < S; ++sp) {
          const auto c = em.transition_count(h, s, a, sp);
          if (c) value += static_cast<double>(c) / denom * v_next[sp];
        }
      }
      q[s * A + a] = value + noise_row[s * A + a];
    }
  }
  return q;
}

std::vector<PerturbedDatum> perturb_dataset(std::span<const Transition> data, double beta_k,
                                            RngStream& rng) {
  const double sd = std::sqrt(beta_k / 2.0);
  std::vector<PerturbedDatum> out;
  out.reserve(data.size());
  for (const Transition& t : data) {
    out.push_back({t.state, t.action, t.reward, rng.normal(0.0, sd), t.next_state});
  }
  return out;
}

std::vector<double> backup_regression(std::span<const PerturbedDatum> data,
                                      std::span<const double> q_prior_row,
                                      std::span<const double> q_bar_next, int S, int A) {
  const std::vector<double> v_next = row_max(q_bar_next, S, A);
  std::vector<double> numer(q_prior_row.begin(), q_prior_row.end());
  std::vector<double> denom(numer.size(), 1.0);
  for (const PerturbedDatum& d : data) {
    const std::size_t i = static_cast<std::size_t>(d.state) * A + d.action;
    const double next = d.next_state == kTerminalState ? 0.0 : v_next[d.next_state];
    numer[i] += d.reward + d.perturbation + next;
    denom[i] += 1.0;
  }
  for (std::size_t i = 0; i < numer.size(); ++i) numer[i] /= denom[i];
  return numer;
}

ClipResult clip(std::span<const double> q_hat, std::span<const std::int64_t> counts,
                double alpha, double max_value) {
  ClipResult out{std::vector<double>(q_hat.begin(), q_hat.end()),
                 std::vector<std::uint8_t>(q_hat.size(), 0)};
  for (std::size_t i = 0; i < q_hat.size(); ++i) {
    if (!(static_cast<double>(counts[i]) > alpha)) {
      out.q_bar[i] = max_value;
      out.mask[i] = 1;
    }
  }
  return out;
}

Policy greedy_policy(const QTables& t) {
  Policy pi(t.horizon, t.num_states);
  for (int h = 0; h < t.horizon; ++h) {
    for (int s = 0; s < t.num_states; ++s) {
      pi(h, s) = argmax({t.q_bar.data() + t.index(h, s, 0), static_cast<std::size_t>(t.num_actions)});
    }
  }
  return pi;
}

Plan plan_episode(const EmpiricalModel& em, const NoiseSchedule& schedule, std::int64_t k,
                  RngStream& rng, PlannerOptions options) {
  if (k < 1) throw std::invalid_argument("episode index must be >= 1");
  const int H = em.horizon(), S = em.num_states(), A = em.num_actions();
  QTables t(H, S, A);

  std::vector<std::vector<PerturbedDatum>> perturbed;
  if (options.form == BackupForm::kModelBased) {
    PriorAndNoise draws = sample_prior_and_noise(schedule, em, k, rng);
    t.q_prior = std::move(draws.q_prior);
    t.noise = std::move(draws.noise);
  } else {
    // Prior row for step h, then one draw per datum of D_h, for h = 0..H-1.
    const double beta_k = schedule.beta(k);
    const double prior_sd = std::sqrt(beta_k / 2.0);
    perturbed.resize(H);
    for (int h = 0; h < H; ++h) {
      for (double& x : t.row(t.q_prior, h)) x = rng.normal(0.0, prior_sd);
      perturbed[h] = perturb_dataset(em.samples(h), beta_k, rng);
    }
  }

  const double alpha = options.clip ? schedule.alpha(k) : 0.0;
  for (int h = H - 1; h >= 0; --h) {
    const auto next = t.row(std::as_const(t.q_bar), h + 1);
    std::vector<double> q_hat;
    if (options.form == BackupForm::kModelBased) {
      q_hat = backup_model_based(em, h, next, t.row(std::as_const(t.noise), h));
    } else {
      q_hat = backup_regression(perturbed[h], t.row(std::as_const(t.q_prior), h), next, S, A);
      // Aggregate perturbation implied by the closed form.
      const std::vector<double> mean = backup_model_based(
          em, h, next, std::vector<double>(t.row_size(), 0.0));
      auto noise = t.row(t.noise, h);
      for (std::size_t i = 0; i < q_hat.size(); ++i) noise[i] = q_hat[i] - mean[i];
    }
    std::copy(q_hat.begin(), q_hat.end(), t.row(t.q_hat, h).begin());

    auto q_bar = t.row(t.q_bar, h);
    if (options.clip) {
      ClipResult c = clip(q_hat, em.counts_row(h), alpha, static_cast<double>(H - h));
      std::copy(c.q_bar.begin(), c.q_bar.end(), q_bar.begin());
      std::copy(c.mask.begin(), c.mask.end(), t.clipped.begin() + h * t.row_size());
    } else {
      std::copy(q_hat.begin(), q_hat.end(), q_bar.begin());
    }
    for (int s = 0; s < S; ++s) {
      t.v_bar[static_cast<std::size_t>(h) * S + s] =
          *std::max_element(q_bar.begin() + s * A, q_bar.begin() + (s + 1) * A);
    }
  }
  Policy pi = greedy_policy(t);
  return {std::move(t), std::move(pi)};
}

void write_qtables_csv(const QTables& t, const EmpiricalModel& em, std::int64_t k,
                       std::ostream& out, bool header) {
  CsvWriter csv(out);
  if (header) csv.row({"k", "h", "s", "a", "n", "q_hat", "q_bar", "q_prior", "noise", "clipped"});
  for (int h = 0; h < t.horizon; ++h) {
    for (int s = 0; s < t.num_states; ++s) {
      for (int a = 0; a < t.num_actions; ++a) {
        const std::size_t i = t.index(h, s, a);
        csv.row({std::to_string(k), std::to_string(h), std::to_string(s), std::to_string(a),
                 std::to_string(em.count(h, s, a)), format_double(t.q_hat[i]),
                 format_double(t.q_bar[i]), format_double(t.q_prior[i]), format_double(t.noise[i]),
                 t.clipped[i] ? "1" : "0"});
      }
    }
  }
}

}  // namespace crlsvi
