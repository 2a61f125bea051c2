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

#include "crlsvi/mdp_json.hpp"

#include <fstream>

namespace crlsvi {

std::string to_string(RewardKind kind) {
  return kind == RewardKind::kBernoulli ? "bernoulli" : "deterministic";
}

RewardKind reward_kind_from_string(const std::string& name) {
  if (name == "deterministic") return RewardKind::kDeterministic;
  if (name == "bernoulli") return RewardKind::kBernoulli;
  throw MdpError("unknown reward_kind '" + name + "'");
}

nlohmann::json mdp_to_json(const TabularMdp& m) {
  return {
      {"horizon", m.horizon},
      {"num_states", m.num_states},
      {"num_actions", m.num_actions},
      {"reward_kind", to_string(m.reward_kind)},
      {"initial_state", m.initial_state},
      {"transitions", m.transitions},
      {"rewards", m.rewards},
  };
}

TabularMdp mdp_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw MdpError("MDP document must be a JSON object");
  auto positive = [&](const char* key) {
    if (!doc.contains(key) || !doc.at(key).is_number_integer()) {
      throw MdpError(std::string("MDP field '") + key + "' must be an integer");
    }
    const int v = doc.at(key).get<int>();
    if (v < 1) throw MdpError(std::string("MDP field '") + key + "' must be positive");
    return v;
  };
  TabularMdp m(positive("horizon"), positive("num_states"), positive("num_actions"));
  if (doc.contains("reward_kind")) {
    m.reward_kind = reward_kind_from_string(doc.at("reward_kind").get<std::string>());
  }
  if (doc.contains("initial_state")) m.initial_state = doc.at("initial_state").get<int>();

  auto read_array = [&](const char* key, std::vector<double>& out) {
    if (!doc.contains(key) || !doc.at(key).is_array()) {
      throw MdpError(std::string("MDP field '") + key + "' must be an array");
    }
    const auto& arr = doc.at(key);
    if (arr.size() != out.size()) {
      throw MdpError(std::string("MDP field '") + key + "' has " + std::to_string(arr.size()) +
                     " entries, expected " + std::to_string(out.size()));
    }
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_number()) throw MdpError(std::string("MDP field '") + key + "' holds a non-number");
      out[i] = arr[i].get<double>();
    }
  };
  read_array("transitions", m.transitions);
  read_array("rewards", m.rewards);
  validate_mdp(m);
  return m;
}

TabularMdp load_mdp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open MDP file '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw MdpError("MDP file '" + path + "': " + e.what());
  }
  return mdp_from_json(doc);
}

void save_mdp(const TabularMdp& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write MDP file '" + path + "'");
  out << mdp_to_json(m).dump(2) << '\n';
}

}  // namespace crlsvi
