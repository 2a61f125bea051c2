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

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace crlsvi {

// Shortest decimal form that round-trips to the same double.
std::string format_double(double x);

// RFC 4180-style writer: fields containing a comma, quote, CR or LF are
// quoted, embedded quotes doubled, rows terminated by "\n".
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column; throws CsvError when absent.
  std::size_t column(const std::string& name) const;
};

// Parses a header plus rows. Every row must have as many fields as the
// header; a short or unterminated row throws CsvError naming the line.
CsvTable read_csv(std::istream& in);

double parse_double(const std::string& field);
long long parse_int(const std::string& field);

}  // namespace crlsvi
