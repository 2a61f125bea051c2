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

#include "crlsvi/cli.hpp"

#include <sstream>

#include "CLI11.hpp"
#include "crlsvi/csv.hpp"
#include "crlsvi/diagnostics.hpp"
#include "crlsvi/harness.hpp"
#include "crlsvi/run_io.hpp"
#include "crlsvi/sweep.hpp"

namespace crlsvi::cli {

namespace fs = std::filesystem;

namespace {

// Maps an in-flight exception onto an exit code and reports it.
int report_error(std::exception_ptr error, std::ostream& err) {
  try {
    std::rethrow_exception(error);
  } catch (const SweepCellError& e) {
    err << "error: " << e.what() << '\n';
    return report_error(e.cause, err) == kIoError ? kIoError : kConfigError;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const CsvError& e) {
    err << "error: malformed CSV: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace

int cmd_run(const fs::path& config, std::optional<std::uint64_t> seed,
            std::optional<std::string> output, std::ostream& out, std::ostream& err) {
  try {
    RunConfig cfg = load_run_config(config);
    if (seed) cfg.seed = *seed;
    if (output) cfg.output = *output;
    const fs::path stem = resolve_output(cfg.output);

    std::ostringstream qtables;
    const RunRecord record = run_experiment(cfg, {}, cfg.dump_qtables ? &qtables : nullptr);
    const RunPaths paths = save_run(record, stem);
    if (cfg.dump_qtables) {
      fs::path q = stem;
      q += ".qtables.csv";
      write_file_atomic(q, qtables.str());
    }
    out << "episodes " << record.episodes.size() << ", final regret "
        << format_double(record.episodes.back().cum_regret) << '\n'
        << "wrote " << paths.csv.string() << " and " << paths.json.string() << '\n';
    return kOk;
  } catch (...) {
    return report_error(std::current_exception(), err);
  }
}

int cmd_sweep(const fs::path& spec_path, std::optional<int> parallelism,
              std::optional<std::string> output_dir, std::ostream& out, std::ostream& err) {
  try {
    SweepSpec spec = load_sweep_spec(spec_path);
    if (parallelism) spec.parallelism = *parallelism;
    if (output_dir) spec.output_dir = *output_dir;
    const SweepResult result = run_sweep(spec, spec_path.parent_path());
    out << "cells " << result.cells.size() << ", grid points " << result.report.size() << '\n';
    for (const auto& row : result.report) {
      out << "  g" << row.grid_index << ": mean Reg(K) " << format_double(row.mean_regret)
          << " +/- " << format_double(row.ci95_half_width) << '\n';
    }
    out << "wrote " << (resolve_output(spec.output_dir) / "report.csv").string() << '\n';
    return kOk;
  } catch (...) {
    return report_error(std::current_exception(), err);
  }
}

int cmd_diagnose(const fs::path& run_csv, std::optional<fs::path> out_csv, std::ostream& out,
                 std::ostream& err) {
  try {
    const auto episodes = load_run_csv(run_csv);
    std::vector<EventFlags> flags;
    flags.reserve(episodes.size());
    for (const auto& e : episodes) flags.push_back(e.flags);
    const DiagnosticSummary summary = summarize(flags);
    print_summary(summary, out);
    fs::path target = out_csv ? resolve_output(*out_csv) : run_csv;
    if (!out_csv) target.replace_extension(".summary.csv");
    std::ostringstream csv;
    write_summary_csv(summary, csv);
    write_file_atomic(target, csv.str());
    return kOk;
  } catch (...) {
    return report_error(std::current_exception(), err);
  }
}

int cmd_report(const std::vector<fs::path>& run_csvs, const fs::path& out_csv, std::ostream& out,
               std::ostream& err) {
  try {
    std::vector<std::pair<std::string, std::vector<double>>> series;
    for (const auto& path : run_csvs) {
      const auto episodes = load_run_csv(path);
      std::vector<double> curve;
      curve.reserve(episodes.size());
      for (const auto& e : episodes) curve.push_back(e.cum_regret);
      series.emplace_back(path.stem().string(), std::move(curve));
    }
    if (series.size() > 1) {
      std::size_t n = series.front().second.size();
      for (const auto& s : series) n = std::min(n, s.second.size());
      std::vector<double> mean(n, 0.0);
      for (const auto& s : series) {
        for (std::size_t i = 0; i < n; ++i) mean[i] += s.second[i] / static_cast<double>(series.size());
      }
      series.emplace_back("mean", std::move(mean));
    }
    std::ostringstream csv;
    write_long_csv(series, csv);
    const fs::path target = resolve_output(out_csv);
    write_file_atomic(target, csv.str());
    out << "wrote " << target.string() << '\n';
    return kOk;
  } catch (...) {
    return report_error(std::current_exception(), err);
  }
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Clipped randomized least-squares value iteration on tabular episodic MDPs"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  auto* run = app.add_subcommand("run", "Run one experiment from a JSON config");
  run->add_option("config", config_path, "Run config (JSON)")->required();
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--output", output, "Override the output stem");

  std::string sweep_path;
  std::optional<int> parallelism;
  std::optional<std::string> out_dir;
  auto* sweep = app.add_subcommand("sweep", "Run a seed x parameter grid and aggregate");
  sweep->add_option("spec", sweep_path, "Sweep spec (JSON)")->required();
  sweep->add_option("--parallel", parallelism, "Worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--out-dir", out_dir, "Override the output directory");

  std::string record_path;
  std::optional<std::string> summary_out;
  auto* diagnose = app.add_subcommand("diagnose", "Summarise the event flags of a run record");
  diagnose->add_option("record", record_path, "Run record CSV")->required();
  diagnose->add_option("--out", summary_out, "Summary CSV (default <record>.summary.csv)");

  std::vector<std::string> report_inputs;
  std::string report_out = "report_long.csv";
  auto* report = app.add_subcommand("report", "Long-format cumulative regret for plotting");
  report->add_option("records", report_inputs, "Run record CSVs")->required();
  report->add_option("--out", report_out, "Output CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  if (*run) return cmd_run(config_path, seed, output, out, err);
  if (*sweep) return cmd_sweep(sweep_path, parallelism, out_dir, out, err);
  if (*diagnose) {
    std::optional<fs::path> target;
    if (summary_out) target = *summary_out;
    return cmd_diagnose(record_path, target, out, err);
  }
  std::vector<fs::path> inputs(report_inputs.begin(), report_inputs.end());
  return cmd_report(inputs, report_out, out, err);
}

}  // namespace crlsvi::cli
