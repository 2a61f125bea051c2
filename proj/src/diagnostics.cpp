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

#include "crlsvi/diagnostics.hpp"

#include <cmath>
#include <iomanip>

#include "crlsvi/csv.hpp"

namespace crlsvi {

bool check_noise_event(std::span<const double> noise, const NoiseSchedule& schedule,
                       const EmpiricalModel& em, std::int64_t k) {
  const auto& counts = em.counts();
  for (std::size_t i = 0; i < noise.size(); ++i) {
    if (!(std::abs(noise[i]) <= schedule.gamma(counts[i], k))) return false;
  }
  return true;
}

bool check_bounded_q(const QTables& t, const ValueFunction& q_star) {
  for (int h = 0; h < t.horizon; ++h) {
    const double bound = static_cast<double>(t.horizon - h);
    for (int s = 0; s < t.num_states; ++s) {
      for (int a = 0; a < t.num_actions; ++a) {
        if (!(std::abs(t.q_bar[t.index(h, s, a)] - q_star.Q(h, s, a)) <= bound)) return false;
      }
    }
  }
  return true;
}

bool check_optimism(double v_bar_initial, double v_star_initial) {
  return v_bar_initial >= v_star_initial;
}

bool check_optimism(const QTables& t, const ValueFunction& v_star, int s1) {
  return check_optimism(t.v(0, s1), v_star.V(0, s1));
}

bool check_l1_deviation(const EmpiricalModel& em, const TabularMdp& m, double log_term) {
  const int S = m.num_states;
  for (int h = 0; h + 1 < m.horizon; ++h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < m.num_actions; ++a) {
        const auto p = m.transition(h, s, a);
        const double denom = static_cast<double>(em.count(h, s, a) + 1);
        double l1 = 0.0;
        for (int sp = 0; sp < S; ++sp) {
          l1 += std::abs(static_cast<double>(em.transition_count(h, s, a, sp)) / denom - p[sp]);
        }
        if (!(l1 <= 4.0 * std::sqrt(S * log_term / denom))) return false;
      }
    }
  }
  return true;
}

bool check_clip_event(const Trajectory& traj, const QTables& t) {
  for (int h = 0; h < static_cast<int>(traj.size()); ++h) {
    if (t.clipped[t.index(h, traj[h].state, traj[h].action)]) return false;
  }
  return true;
}

EventFlags evaluate_events(const TabularMdp& m, const OptimalSolution& optimal,
                           const EmpiricalModel& em, const NoiseSchedule& schedule,
                           std::int64_t k, const QTables& tables, const Trajectory& traj) {
  EventFlags f;
  f.confidence_ok = in_confidence_set(em, m, optimal.values, k).inside;
  f.noise_ok = check_noise_event(tables.noise, schedule, em, k);
  f.q_bounded = check_bounded_q(tables, optimal.values);
  f.no_clip_on_path = check_clip_event(traj, tables);
  f.good = f.confidence_ok && f.noise_ok && f.q_bounded;
  f.optimistic = check_optimism(tables, optimal.values, m.initial_state);
  f.l1_ok = check_l1_deviation(em, m, schedule.log_term());
  return f;
}

double optimism_floor() { return 0.25 * std::erfc(1.0); }
double optimism_constant() { return 1.0 / optimism_floor(); }

namespace {

double ratio(std::int64_t num, std::int64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double DiagnosticSummary::optimism_rate_given_good() const { return ratio(optimistic_and_good, good); }
double DiagnosticSummary::optimism_rate() const { return ratio(optimistic, episodes); }
double DiagnosticSummary::good_rate() const { return ratio(good, episodes); }
double DiagnosticSummary::clip_fraction() const { return ratio(clip_episodes, episodes); }

DiagnosticSummary summarize(std::span<const EventFlags> flags) {
  DiagnosticSummary out;
  for (const EventFlags& f : flags) {
    ++out.episodes;
    out.confidence_ok += f.confidence_ok;
    out.noise_ok += f.noise_ok;
    out.q_bounded += f.q_bounded;
    out.no_clip_on_path += f.no_clip_on_path;
    out.good += f.good;
    out.optimistic += f.optimistic;
    out.l1_ok += f.l1_ok;
    out.optimistic_and_good += f.optimistic && f.good;
    out.clip_episodes += !f.no_clip_on_path;
    out.confidence_violations += !f.confidence_ok;
    out.bound_exceptions += f.confidence_ok && f.noise_ok && !f.q_bounded;
  }
  return out;
}

void write_summary_csv(const DiagnosticSummary& d, std::ostream& out) {
  CsvWriter csv(out);
  csv.row({"metric", "value"});
  auto count = [&](const char* name, std::int64_t v) { csv.row({name, std::to_string(v)}); };
  auto real = [&](const char* name, double v) { csv.row({name, format_double(v)}); };
  count("episodes", d.episodes);
  count("confidence_ok", d.confidence_ok);
  count("noise_ok", d.noise_ok);
  count("q_bounded", d.q_bounded);
  count("no_clip_on_path", d.no_clip_on_path);
  count("good", d.good);
  count("optimistic", d.optimistic);
  count("l1_ok", d.l1_ok);
  count("optimistic_and_good", d.optimistic_and_good);
  count("clip_episodes", d.clip_episodes);
  count("confidence_violations", d.confidence_violations);
  count("bound_exceptions", d.bound_exceptions);
  real("optimism_rate_given_good", d.optimism_rate_given_good());
  real("optimism_rate", d.optimism_rate());
  real("good_rate", d.good_rate());
  real("clip_fraction", d.clip_fraction());
  real("optimism_constant", optimism_constant());
}

void print_summary(const DiagnosticSummary& d, std::ostream& out) {
  auto line = [&](const char* name, auto value) {
    out << std::left << std::setw(28) << name << value << '\n';
  };
  line("episodes", d.episodes);
  line("confidence violations", d.confidence_violations);
  line("noise events held", d.noise_ok);
  line("bounded-Q events held", d.q_bounded);
  line("good episodes", d.good);
  line("bound exceptions", d.bound_exceptions);
  line("clip episodes", d.clip_episodes);
  line("L1 events held", d.l1_ok);
  line("optimism rate", d.optimism_rate());
  line("optimism rate | good", d.optimism_rate_given_good());
  line("optimism floor", optimism_floor());
  line("constant C", optimism_constant());
}

}  // namespace crlsvi
