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

#include "crlsvi/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "crlsvi/csv.hpp"
#include "crlsvi/run_io.hpp"
#include "crlsvi/stats.hpp"

namespace crlsvi {

namespace fs = std::filesystem;
using nlohmann::json;

SweepCellError::SweepCellError(std::size_t cell_, const std::string& description,
                               std::exception_ptr cause_)
    : std::runtime_error(description), cell(cell_), cause(std::move(cause_)) {}

SweepSpec parse_sweep_spec(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t offset = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + offset, '\n'));
    throw ConfigError(source, line, std::string("invalid JSON: ") + e.what());
  }
  auto fail = [&](const std::string& key, const std::string& msg) {
    const auto pos = text.find('"' + key + '"');
    const int line =
        pos == std::string::npos ? 1 : 1 + static_cast<int>(std::count(text.begin(), text.begin() + pos, '\n'));
    throw ConfigError(source, line, msg);
  };
  if (!doc.is_object()) fail("", "sweep spec must be a JSON object");
  SweepSpec spec;
  for (const auto& item : doc.items()) {
    const auto& k = item.key();
    if (k != "base" && k != "seeds" && k != "grid" && k != "parallelism" && k != "output_dir") {
      fail(k, "unknown field '" + k + "'");
    }
  }
  if (!doc.contains("base") || !doc["base"].is_object()) fail("base", "'base' must be a run config object");
  spec.base = doc["base"];
  if (!doc.contains("seeds") || !doc["seeds"].is_array() || doc["seeds"].empty()) {
    fail("seeds", "'seeds' must be a nonempty array");
  }
  for (const auto& s : doc["seeds"]) {
    if (!s.is_number_unsigned()) fail("seeds", "seeds must be nonnegative integers");
    spec.seeds.push_back(s.get<std::uint64_t>());
  }
  if (doc.contains("grid")) {
    if (!doc["grid"].is_object()) fail("grid", "'grid' must be an object of arrays");
    for (const auto& item : doc["grid"].items()) {
      if (!item.value().is_array() || item.value().empty()) {
        fail(item.key(), "grid entry '" + item.key() + "' must be a nonempty array");
      }
      spec.grid.emplace_back(item.key(), std::vector<json>(item.value().begin(), item.value().end()));
    }
  }
  if (doc.contains("parallelism")) {
    if (!doc["parallelism"].is_number_integer() || doc["parallelism"].get<int>() < 1) {
      fail("parallelism", "'parallelism' must be a positive integer");
    }
    spec.parallelism = doc["parallelism"].get<int>();
  }
  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string()) fail("output_dir", "'output_dir' must be a string");
    spec.output_dir = doc["output_dir"].get<std::string>();
  }
  return spec;
}

SweepSpec load_sweep_spec(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open sweep spec '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_sweep_spec(buf.str(), path.string());
}

std::vector<GridPoint> expand_grid(const SweepSpec& spec) {
  std::vector<GridPoint> points{GridPoint{}};
  for (const auto& [key, values] : spec.grid) {
    std::vector<GridPoint> next;
    for (const auto& point : points) {
      for (const auto& v : values) {
        GridPoint p = point;
        p.emplace_back(key, v);
        next.push_back(std::move(p));
      }
    }
    points = std::move(next);
  }
  return points;
}

namespace {

json apply_point(json base, const GridPoint& point) {
  for (const auto& [key, value] : point) {
    const auto dot = key.find('.');
    if (dot == std::string::npos) {
      base[key] = value;
    } else {
      base[key.substr(0, dot)][key.substr(dot + 1)] = value;
    }
  }
  return base;
}

std::string value_text(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

std::string cell_name(std::size_t grid_index, std::uint64_t seed) {
  return "cell_" + std::to_string(grid_index) + "_seed_" + std::to_string(seed);
}

}  // namespace

AggregateRow aggregate(std::size_t grid_index, const GridPoint& point,
                       const std::vector<const CellResult*>& cells) {
  AggregateRow row;
  row.grid_index = grid_index;
  row.point = point;
  row.seeds = cells.size();
  if (cells.empty()) return row;
  row.num_episodes = static_cast<std::int64_t>(cells.front()->cum_regret.size());
  std::vector<double> finals, exponents;
  DiagnosticSummary pooled;
  for (const CellResult* c : cells) {
    finals.push_back(c->final_regret);
    if (c->exponent) exponents.push_back(*c->exponent);
    const auto& s = c->summary;
    pooled.episodes += s.episodes;
    pooled.good += s.good;
    pooled.optimistic += s.optimistic;
    pooled.optimistic_and_good += s.optimistic_and_good;
    pooled.clip_episodes += s.clip_episodes;
    pooled.confidence_violations += s.confidence_violations;
  }
  row.mean_regret = stats::mean(finals);
  row.ci95_half_width = stats::ci95_half_width(finals);
  row.min_regret = *std::min_element(finals.begin(), finals.end());
  row.max_regret = *std::max_element(finals.begin(), finals.end());
  if (exponents.size() == cells.size()) row.mean_exponent = stats::mean(exponents);
  row.optimism_rate = pooled.optimism_rate();
  row.optimism_rate_given_good = pooled.optimism_rate_given_good();
  row.good_rate = pooled.good_rate();
  row.clip_fraction = pooled.clip_fraction();
  row.confidence_violations = pooled.confidence_violations;
  return row;
}

void write_report_csv(const SweepSpec& spec, const std::vector<AggregateRow>& rows,
                      std::ostream& out) {
  CsvWriter csv(out);
  std::vector<std::string> header{"grid_index"};
  for (const auto& [key, values] : spec.grid) header.push_back(key);
  for (const char* name : {"seeds", "K", "mean_regret", "ci95_half_width", "min_regret",
                           "max_regret", "mean_exponent", "optimism_rate",
                           "optimism_rate_given_good", "good_rate", "clip_fraction",
                           "confidence_violations"}) {
    header.push_back(name);
  }
  csv.row(header);
  for (const AggregateRow& r : rows) {
    std::vector<std::string> fields{std::to_string(r.grid_index)};
    for (const auto& [key, value] : r.point) fields.push_back(value_text(value));
    fields.push_back(std::to_string(r.seeds));
    fields.push_back(std::to_string(r.num_episodes));
    fields.push_back(format_double(r.mean_regret));
    fields.push_back(format_double(r.ci95_half_width));
    fields.push_back(format_double(r.min_regret));
    fields.push_back(format_double(r.max_regret));
    fields.push_back(r.mean_exponent ? format_double(*r.mean_exponent) : "");
    fields.push_back(format_double(r.optimism_rate));
    fields.push_back(format_double(r.optimism_rate_given_good));
    fields.push_back(format_double(r.good_rate));
    fields.push_back(format_double(r.clip_fraction));
    fields.push_back(std::to_string(r.confidence_violations));
    csv.row(fields);
  }
}

void write_long_csv(const std::vector<std::pair<std::string, std::vector<double>>>& series,
                    std::ostream& out) {
  CsvWriter csv(out);
  csv.row({"x", "series", "value"});
  for (const auto& [name, values] : series) {
    const std::size_t n = values.size();
    const std::size_t stride = std::max<std::size_t>(1, n / 256);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = i + 1;
      if (k % stride != 0 && k != 1 && k != n) continue;
      csv.row({std::to_string(k), name, format_double(values[i])});
    }
  }
}

SweepResult run_sweep(const SweepSpec& spec, const fs::path& base_dir) {
  const std::vector<GridPoint> points = expand_grid(spec);
  const fs::path out_dir = resolve_output(spec.output_dir);

  // Parse every cell up front so that config errors surface before any run.
  struct Cell {
    std::size_t grid_index;
    std::uint64_t seed;
    RunConfig config;
  };
  std::vector<Cell> cells;
  for (std::size_t g = 0; g < points.size(); ++g) {
    json doc = apply_point(spec.base, points[g]);
    for (std::uint64_t seed : spec.seeds) {
      doc["seed"] = seed;
      const std::string name = cell_name(g, seed);
      RunConfig cfg = run_config_from_json(doc, "sweep cell " + name, base_dir, doc.dump(2));
      cfg.output = (out_dir / name).string();
      cells.push_back({g, seed, std::move(cfg)});
    }
  }

  SweepResult result;
  result.cells.resize(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size() || abort.load()) return;
      const Cell& cell = cells[i];
      try {
        const RunRecord record = run_experiment(cell.config);
        save_run(record, cell.config.output);
        CellResult& r = result.cells[i];
        r.grid_index = cell.grid_index;
        r.seed = cell.seed;
        r.stem = cell.config.output;
        r.cum_regret = record.cumulative_regret();
        r.final_regret = r.cum_regret.empty() ? 0.0 : r.cum_regret.back();
        if (static_cast<std::int64_t>(r.cum_regret.size()) >= kMinFitEpisodes) {
          try {
            r.exponent = sublinearity_fit(r.cum_regret);
          } catch (const DegenerateFit&) {
          }
        }
        const auto flags = record.flags();
        r.summary = summarize(flags);
      } catch (...) {
        errors[i] = std::current_exception();
        abort.store(true);
      }
    }
  };

  const int threads = std::max(1, std::min<int>(spec.parallelism, static_cast<int>(cells.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (errors[i]) {
      std::string what = "unknown error";
      try {
        std::rethrow_exception(errors[i]);
      } catch (const std::exception& e) {
        what = e.what();
      } catch (...) {
      }
      throw SweepCellError(i, "sweep aborted: cell " + cell_name(cells[i].grid_index, cells[i].seed) +
                                  " failed: " + what,
                           errors[i]);
    }
  }

  std::vector<std::pair<std::string, std::vector<double>>> series;
  for (std::size_t g = 0; g < points.size(); ++g) {
    std::vector<const CellResult*> group;
    for (const auto& c : result.cells) {
      if (c.grid_index == g) {
        group.push_back(&c);
        series.emplace_back("g" + std::to_string(g) + "/seed" + std::to_string(c.seed), c.cum_regret);
      }
    }
    result.report.push_back(aggregate(g, points[g], group));
    std::vector<double> mean_curve(group.front()->cum_regret.size(), 0.0);
    for (const CellResult* c : group) {
      for (std::size_t i = 0; i < mean_curve.size() && i < c->cum_regret.size(); ++i) {
        mean_curve[i] += c->cum_regret[i] / static_cast<double>(group.size());
      }
    }
    series.emplace_back("g" + std::to_string(g) + "/mean", std::move(mean_curve));
  }

  std::ostringstream report, long_form;
  write_report_csv(spec, result.report, report);
  write_long_csv(series, long_form);
  write_file_atomic(out_dir / "report.csv", report.str());
  write_file_atomic(out_dir / "long.csv", long_form.str());
  return result;
}

}  // namespace crlsvi
