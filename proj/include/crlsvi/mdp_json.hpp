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

#include <string>

#include "crlsvi/mdp.hpp"
#include "json.hpp"

namespace crlsvi {

// JSON document for a TabularMdp:
//
//   {
//     "horizon": H, "num_states": S, "num_actions": A,
//     "reward_kind": "deterministic" | "bernoulli",
//     "initial_state": s1,
//     "transitions": [H*S*A*S numbers, (h, s, a, s') row-major],
//     "rewards":     [H*S*A numbers, (h, s, a) row-major]
//   }
//
// reward_kind and initial_state are optional (defaults: deterministic, 0).

nlohmann::json mdp_to_json(const TabularMdp& m);

// Structural errors (missing fields, wrong lengths) throw MdpError. The
// result is validated before it is returned.
TabularMdp mdp_from_json(const nlohmann::json& doc);

TabularMdp load_mdp(const std::string& path);
void save_mdp(const TabularMdp& m, const std::string& path);

std::string to_string(RewardKind kind);
RewardKind reward_kind_from_string(const std::string& name);

}  // namespace crlsvi
