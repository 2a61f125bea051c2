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

#include "crlsvi/csv.hpp"

#include <charconv>
#include <cmath>

namespace crlsvi {

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\r\n") == std::string::npos) {
      out_ << f;
      continue;
    }
    out_ << '"';
    for (char c : f) {
      if (c == '"') out_ << '"';
      out_ << c;
    }
    out_ << '"';
  }
  out_ << '\n';
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw CsvError("missing column '" + name + "'");
}

namespace {

// Reads one record; returns false at end of input. `line` tracks physical
// lines so errors can point at them.
bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line) {
  fields.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;
  std::string field;
  bool quoted = false;
  bool any = false;
  const std::size_t start_line = line + 1;
  for (;;) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) {
      if (quoted) throw CsvError("line " + std::to_string(start_line) + ": unterminated quoted field");
      fields.push_back(field);
      ++line;
      return any || !field.empty();
    }
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          field += '"';
          in.get();
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += static_cast<char>(c);
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c == '\r') {
      // tolerated before \n
    } else if (c == '\n') {
      fields.push_back(field);
      ++line;
      return true;
    } else {
      field += static_cast<char>(c);
    }
  }
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::size_t line = 0;
  std::vector<std::string> fields;
  if (!read_record(in, fields, line)) throw CsvError("empty CSV input");
  table.header = fields;
  while (read_record(in, fields, line)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (fields.size() != table.header.size()) {
      throw CsvError("line " + std::to_string(line) + ": expected " +
                     std::to_string(table.header.size()) + " fields, found " +
                     std::to_string(fields.size()));
    }
    table.rows.push_back(fields);
  }
  return table;
}

double parse_double(const std::string& field) {
  double value = 0.0;
  const char* end = field.data() + field.size();
  auto res = std::from_chars(field.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end) throw CsvError("not a number: '" + field + "'");
  return value;
}

long long parse_int(const std::string& field) {
  long long value = 0;
  const char* end = field.data() + field.size();
  auto res = std::from_chars(field.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end) throw CsvError("not an integer: '" + field + "'");
  return value;
}

}  // namespace crlsvi
