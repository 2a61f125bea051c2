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

#include "crlsvi/run_io.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "crlsvi/csv.hpp"
#include "crlsvi/mdp_json.hpp"

namespace crlsvi {

namespace fs = std::filesystem;
using nlohmann::json;

ConfigError::ConfigError(std::string source, int line, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + message),
      source_(std::move(source)),
      line_(line) {}

namespace {

int line_at_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + offset, '\n'));
}

// Line of the first occurrence of "key" in the source text, else 1.
int line_of_key(const std::string& text, const std::string& key) {
  const auto pos = text.find('"' + key + '"');
  return pos == std::string::npos ? 1 : line_at_offset(text, pos);
}

class Reader {
 public:
  Reader(const json& doc, const std::string& source, const std::string& text)
      : doc_(doc), source_(source), text_(text) {}

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    throw ConfigError(source_, line_of_key(text_, key), message);
  }

  bool has(const char* key) const { return doc_.contains(key); }

  const json& at(const char* key) const {
    if (!doc_.contains(key)) {
      throw ConfigError(source_, 1, std::string("missing required field '") + key + "'");
    }
    return doc_.at(key);
  }

  std::int64_t integer(const char* key) const {
    const json& v = at(key);
    if (!v.is_number_integer()) fail(key, std::string("field '") + key + "' must be an integer");
    return v.get<std::int64_t>();
  }
  double number(const char* key) const {
    const json& v = at(key);
    if (!v.is_number()) fail(key, std::string("field '") + key + "' must be a number");
    return v.get<double>();
  }
  std::string string(const char* key) const {
    const json& v = at(key);
    if (!v.is_string()) fail(key, std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
  }
  bool boolean(const char* key) const {
    const json& v = at(key);
    if (!v.is_boolean()) fail(key, std::string("field '") + key + "' must be a boolean");
    return v.get<bool>();
  }

  void allow_only(std::initializer_list<const char*> keys) const {
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& item : doc_.items()) {
      if (!allowed.count(item.key())) fail(item.key(), "unknown field '" + item.key() + "'");
    }
  }

 private:
  const json& doc_;
  const std::string& source_;
  const std::string& text_;
};

EnvironmentSpec parse_environment(const json& doc, const std::string& source,
                                  const std::string& text, const fs::path& base_dir) {
  if (!doc.is_object()) {
    throw ConfigError(source, line_of_key(text, "environment"), "'environment' must be an object");
  }
  Reader r(doc, source, text);
  EnvironmentSpec env;
  env.kind = r.string("kind");
  try {
    if (env.kind == "chain") {
      r.allow_only({"kind", "horizon", "num_states", "slip"});
      env.horizon = static_cast<int>(r.integer("horizon"));
      env.num_states = static_cast<int>(r.integer("num_states"));
      env.num_actions = 2;
      if (r.has("slip")) env.slip = r.number("slip");
    } else if (env.kind == "random") {
      r.allow_only({"kind", "horizon", "num_states", "num_actions", "dirichlet_alpha", "seed",
                    "reward_kind"});
      env.horizon = static_cast<int>(r.integer("horizon"));
      env.num_states = static_cast<int>(r.integer("num_states"));
      env.num_actions = static_cast<int>(r.integer("num_actions"));
      if (r.has("dirichlet_alpha")) env.dirichlet_alpha = r.number("dirichlet_alpha");
      if (r.has("seed")) env.seed = static_cast<std::uint64_t>(r.integer("seed"));
      if (r.has("reward_kind")) env.reward_kind = reward_kind_from_string(r.string("reward_kind"));
    } else if (env.kind == "file") {
      r.allow_only({"kind", "path"});
      fs::path p = r.string("path");
      env.path = (p.is_relative() && !base_dir.empty() ? base_dir / p : p).string();
      env.mdp = load_mdp(env.path);
    } else if (env.kind == "inline") {
      r.allow_only({"kind", "mdp"});
      env.mdp = mdp_from_json(r.at("mdp"));
    } else {
      r.fail("kind", "unknown environment kind '" + env.kind + "'");
    }
    if (env.mdp) {
      env.horizon = env.mdp->horizon;
      env.num_states = env.mdp->num_states;
      env.num_actions = env.mdp->num_actions;
    }
    if (env.horizon < 1 || env.num_states < 1 || env.num_actions < 1) {
      r.fail("environment", "environment dimensions must be positive");
    }
    if (env.kind == "chain" && !(env.slip >= 0.0 && env.slip < 0.5)) {
      r.fail("slip", "chain slip must lie in [0, 0.5)");
    }
    if (env.kind == "random" && !(env.dirichlet_alpha > 0.0)) {
      r.fail("dirichlet_alpha", "dirichlet_alpha must be positive");
    }
  } catch (const MdpError& e) {
    throw ConfigError(source, line_of_key(text, "environment"), e.what());
  } catch (const json::exception& e) {
    throw ConfigError(source, line_of_key(text, "environment"), e.what());
  } catch (const std::runtime_error& e) {
    if (dynamic_cast<const ConfigError*>(&e)) throw;
    throw IoError(e.what());
  }
  return env;
}

}  // namespace

RunConfig run_config_from_json(const json& doc, const std::string& source,
                               const fs::path& base_dir, const std::string& text) {
  if (!doc.is_object()) throw ConfigError(source, 1, "config must be a JSON object");
  Reader r(doc, source, text);
  r.allow_only({"environment", "K", "agent", "delta", "beta_scale", "alpha_scale", "backup_form",
                "seed", "output", "dump_qtables"});
  RunConfig cfg;
  cfg.environment = parse_environment(r.at("environment"), source, text, base_dir);
  cfg.num_episodes = r.integer("K");
  if (cfg.num_episodes < 1) r.fail("K", "K must be at least 1");
  try {
    if (r.has("agent")) cfg.agent = agent_kind_from_string(r.string("agent"));
  } catch (const std::invalid_argument& e) {
    r.fail("agent", e.what());
  }
  try {
    if (r.has("backup_form")) cfg.backup_form = backup_form_from_string(r.string("backup_form"));
  } catch (const std::invalid_argument& e) {
    r.fail("backup_form", e.what());
  }
  if (r.has("delta")) cfg.schedule.delta = r.number("delta");
  if (r.has("beta_scale")) cfg.schedule.beta_scale = r.number("beta_scale");
  if (r.has("alpha_scale")) cfg.schedule.alpha_scale = r.number("alpha_scale");
  if (!(cfg.schedule.delta > 0.0 && cfg.schedule.delta < max_delta())) {
    r.fail("delta", "delta = " + format_double(cfg.schedule.delta) +
                        " violates 0 < delta < 4*Phi(-sqrt(2)) ~= " + format_double(max_delta()) +
                        ", the range for which the high-probability regret bound holds");
  }
  if (!(cfg.schedule.beta_scale >= 0.0)) r.fail("beta_scale", "beta_scale must be nonnegative");
  if (!(cfg.schedule.alpha_scale >= 0.0)) r.fail("alpha_scale", "alpha_scale must be nonnegative");
  if (r.has("seed")) {
    const json& v = r.at("seed");
    if (!v.is_number_unsigned()) r.fail("seed", "field 'seed' must be a nonnegative integer");
    cfg.seed = v.get<std::uint64_t>();
  }
  if (r.has("output")) cfg.output = r.string("output");
  if (r.has("dump_qtables")) cfg.dump_qtables = r.boolean("dump_qtables");
  return cfg;
}

RunConfig parse_run_config(const std::string& text, const std::string& source,
                           const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // byte is 1-based and points just past the offending character.
    const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
    throw ConfigError(source, line_at_offset(text, offset), std::string("invalid JSON: ") + e.what());
  }
  return run_config_from_json(doc, source, base_dir, text);
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), path.string(), path.parent_path());
}

json run_config_to_json(const RunConfig& cfg) {
  const auto& e = cfg.environment;
  json env = {{"kind", e.kind}};
  if (e.kind == "chain") {
    env["horizon"] = e.horizon;
    env["num_states"] = e.num_states;
    env["slip"] = e.slip;
  } else if (e.kind == "random") {
    env["horizon"] = e.horizon;
    env["num_states"] = e.num_states;
    env["num_actions"] = e.num_actions;
    env["dirichlet_alpha"] = e.dirichlet_alpha;
    env["seed"] = e.seed;
    env["reward_kind"] = to_string(e.reward_kind);
  } else if (e.kind == "file") {
    env["path"] = e.path;
  } else if (e.kind == "inline" && e.mdp) {
    env["mdp"] = mdp_to_json(*e.mdp);
  }
  return {
      {"environment", env},
      {"K", cfg.num_episodes},
      {"agent", to_string(cfg.agent)},
      {"delta", cfg.schedule.delta},
      {"beta_scale", cfg.schedule.beta_scale},
      {"alpha_scale", cfg.schedule.alpha_scale},
      {"backup_form", to_string(cfg.backup_form)},
      {"seed", cfg.seed},
      {"output", cfg.output},
      {"dump_qtables", cfg.dump_qtables},
  };
}

namespace {

const std::vector<std::string> kRunColumns = {
    "k",          "inst_regret", "cum_regret", "confidence_ok", "noise_ok", "q_bounded",
    "no_clip_on_path", "good",   "optimistic", "l1_ok",         "clip_count"};

bool parse_flag(const std::string& field) {
  if (field == "1") return true;
  if (field == "0") return false;
  throw CsvError("flag column holds '" + field + "', expected 0 or 1");
}

}  // namespace

void write_run_csv(const RunRecord& record, std::ostream& out) {
  CsvWriter csv(out);
  csv.row(kRunColumns);
  auto flag = [](bool b) { return std::string(b ? "1" : "0"); };
  for (const EpisodeRecord& e : record.episodes) {
    const EventFlags& f = e.flags;
    csv.row({std::to_string(e.k), format_double(e.inst_regret), format_double(e.cum_regret),
             flag(f.confidence_ok), flag(f.noise_ok), flag(f.q_bounded), flag(f.no_clip_on_path),
             flag(f.good), flag(f.optimistic), flag(f.l1_ok), std::to_string(e.clip_count)});
  }
}

std::vector<EpisodeRecord> read_run_csv(std::istream& in) {
  const CsvTable table = read_csv(in);
  std::vector<std::size_t> col;
  for (const auto& name : kRunColumns) col.push_back(table.column(name));
  std::vector<EpisodeRecord> out;
  out.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    try {
      EpisodeRecord e;
      e.k = parse_int(row[col[0]]);
      e.inst_regret = parse_double(row[col[1]]);
      e.cum_regret = parse_double(row[col[2]]);
      e.flags.confidence_ok = parse_flag(row[col[3]]);
      e.flags.noise_ok = parse_flag(row[col[4]]);
      e.flags.q_bounded = parse_flag(row[col[5]]);
      e.flags.no_clip_on_path = parse_flag(row[col[6]]);
      e.flags.good = parse_flag(row[col[7]]);
      e.flags.optimistic = parse_flag(row[col[8]]);
      e.flags.l1_ok = parse_flag(row[col[9]]);
      e.clip_count = static_cast<int>(parse_int(row[col[10]]));
      out.push_back(e);
    } catch (const CsvError& err) {
      throw CsvError("record " + std::to_string(i + 1) + ": " + err.what());
    }
  }
  return out;
}

std::vector<EpisodeRecord> load_run_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open run record '" + path.string() + "'");
  return read_run_csv(in);
}

json run_header_json(const RunRecord& record) {
  const double final_regret = record.episodes.empty() ? 0.0 : record.episodes.back().cum_regret;
  return {
      {"version", kVersion},
      {"seed", record.config.seed},
      {"config", run_config_to_json(record.config)},
      {"effective_schedule",
       {{"delta", record.schedule.delta},
        {"beta_scale", record.schedule.beta_scale},
        {"alpha_scale", record.schedule.alpha_scale}}},
      {"v_star", record.v_star},
      {"episodes", record.episodes.size()},
      {"final_regret", final_regret},
      {"wall_seconds", record.wall_seconds},
  };
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "'");
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() + "'");
}

fs::path resolve_output(const fs::path& path) {
  if (path.is_absolute()) return path;
  if (const char* root = std::getenv(kOutputRootEnv); root && *root) return fs::path(root) / path;
  return path;
}

RunPaths save_run(const RunRecord& record, const fs::path& stem) {
  RunPaths paths{stem, stem};
  paths.csv += ".csv";
  paths.json += ".json";
  std::ostringstream csv;
  write_run_csv(record, csv);
  write_file_atomic(paths.csv, csv.str());
  write_file_atomic(paths.json, run_header_json(record).dump(2) + "\n");
  return paths;
}

}  // namespace crlsvi
