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
#include <exception>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "crlsvi/diagnostics.hpp"
#include "crlsvi/harness.hpp"
#include "json.hpp"

namespace crlsvi {

// Sweep document:
//
//   {
//     "base": { <run config> },
//     "seeds": [1, 2, 3],
//     "grid": {"beta_scale": [0.001, 0.01], "environment.slip": [0.0, 0.1]},
//     "parallelism": 4,
//     "output_dir": "sweeps/chain"
//   }
//
// Grid keys name run-config fields; "environment.<field>" reaches into the
// environment object. Cells are the cartesian product of grid values (keys
// in sorted order, last key fastest) times seeds.
struct SweepSpec {
  nlohmann::json base;
  std::vector<std::uint64_t> seeds;
  std::vector<std::pair<std::string, std::vector<nlohmann::json>>> grid;
  int parallelism = 1;
  std::string output_dir = "sweep";
};

SweepSpec parse_sweep_spec(const std::string& text, const std::string& source);
SweepSpec load_sweep_spec(const std::filesystem::path& path);

using GridPoint = std::vector<std::pair<std::string, nlohmann::json>>;
std::vector<GridPoint> expand_grid(const SweepSpec& spec);

struct CellResult {
  std::size_t grid_index = 0;
  std::uint64_t seed = 0;
  std::filesystem::path stem;
  double final_regret = 0.0;
  std::optional<double> exponent;
  DiagnosticSummary summary;
  std::vector<double> cum_regret;
};

struct AggregateRow {
  std::size_t grid_index = 0;
  GridPoint point;
  std::size_t seeds = 0;
  std::int64_t num_episodes = 0;
  double mean_regret = 0.0;
  double ci95_half_width = 0.0;
  double min_regret = 0.0;
  double max_regret = 0.0;
  std::optional<double> mean_exponent;
  double optimism_rate = 0.0;
  double optimism_rate_given_good = 0.0;
  double good_rate = 0.0;
  double clip_fraction = 0.0;
  std::int64_t confidence_violations = 0;
};

struct SweepResult {
  std::vector<CellResult> cells;  // grid-major, seeds inner
  std::vector<AggregateRow> report;
};

// A cell failed; the sweep was aborted. `cause` holds the original error.
class SweepCellError : public std::runtime_error {
 public:
  SweepCellError(std::size_t cell, const std::string& description, std::exception_ptr cause);
  std::size_t cell;
  std::exception_ptr cause;
};

// Runs every cell with up to `parallelism` worker threads, writes each
// cell's run record under output_dir, then report.csv (aggregates) and
// long.csv (x,series,value). Output is independent of the thread count.
SweepResult run_sweep(const SweepSpec& spec, const std::filesystem::path& base_dir = {});

AggregateRow aggregate(std::size_t grid_index, const GridPoint& point,
                       const std::vector<const CellResult*>& cells);

void write_report_csv(const SweepSpec& spec, const std::vector<AggregateRow>& rows,
                      std::ostream& out);

// Plot-ready long format: x,series,value.
void write_long_csv(const std::vector<std::pair<std::string, std::vector<double>>>& series,
                    std::ostream& out);

}  // namespace crlsvi
