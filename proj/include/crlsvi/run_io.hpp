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

#include <filesystem>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "crlsvi/harness.hpp"
#include "json.hpp"

namespace crlsvi {

// A config problem tied to a line of the source document.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string source, int line, const std::string& message);
  const std::string& source() const { return source_; }
  int line() const { return line_; }

 private:
  std::string source_;
  int line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Run config document:
//
//   {
//     "environment": {"kind": "chain", "horizon": 4, "num_states": 4, "slip": 0.0},
//     "K": 16384,
//     "agent": "crlsvi",              // crlsvi | rlsvi_unclipped | greedy_noiseless
//     "delta": 0.05, "beta_scale": 1.0, "alpha_scale": 1.0,
//     "backup_form": "model_based",   // model_based | regression
//     "seed": 1,
//     "output": "runs/chain",         // stem for <stem>.csv and <stem>.json
//     "dump_qtables": false
//   }
//
// Environment kinds: chain {horizon, num_states, slip}; random {horizon,
// num_states, num_actions, dirichlet_alpha, seed, reward_kind}; file {path},
// resolved against `base_dir`; inline {mdp: <MDP document>}.
RunConfig parse_run_config(const std::string& text, const std::string& source,
                           const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);
// Same as parse_run_config but from an already-parsed document (no line
// information beyond the object start).
RunConfig run_config_from_json(const nlohmann::json& doc, const std::string& source,
                               const std::filesystem::path& base_dir = {},
                               const std::string& text = {});
nlohmann::json run_config_to_json(const RunConfig& cfg);

// Columns: k,inst_regret,cum_regret,confidence_ok,noise_ok,q_bounded,
// no_clip_on_path,good,optimistic,l1_ok,clip_count.
void write_run_csv(const RunRecord& record, std::ostream& out);
std::vector<EpisodeRecord> read_run_csv(std::istream& in);
std::vector<EpisodeRecord> load_run_csv(const std::filesystem::path& path);

nlohmann::json run_header_json(const RunRecord& record);

// Writes to a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// Relative paths resolve against $CRLSVI_OUTPUT_ROOT when it is set.
inline constexpr const char* kOutputRootEnv = "CRLSVI_OUTPUT_ROOT";
std::filesystem::path resolve_output(const std::filesystem::path& path);

struct RunPaths {
  std::filesystem::path csv;
  std::filesystem::path json;
};

// Writes <stem>.csv and <stem>.json.
RunPaths save_run(const RunRecord& record, const std::filesystem::path& stem);

}  // namespace crlsvi
