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
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace crlsvi::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,  // unparsable or invalid config, malformed CSV, bad arguments
  kIoError = 3,
};

// crlsvi run|sweep|diagnose|report ...
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int cmd_run(const std::filesystem::path& config, std::optional<std::uint64_t> seed,
            std::optional<std::string> output, std::ostream& out, std::ostream& err);
int cmd_sweep(const std::filesystem::path& spec, std::optional<int> parallelism,
              std::optional<std::string> output_dir, std::ostream& out, std::ostream& err);
int cmd_diagnose(const std::filesystem::path& run_csv, std::optional<std::filesystem::path> out_csv,
                 std::ostream& out, std::ostream& err);
int cmd_report(const std::vector<std::filesystem::path>& run_csvs,
               const std::filesystem::path& out_csv, std::ostream& out, std::ostream& err);

}  // namespace crlsvi::cli
