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

#include "crlsvi/mdp.hpp"

namespace crlsvi {

// Two-action chain over states 0..S-1 starting at state 0. Action 1 moves
// one state right (staying at S-1) with probability 1 - slip and one state
// left otherwise; action 0 moves one state left (staying at 0). Reward 1 for
// action 1 at state S-1 and 0.01 for action 0 at state 0, at every step.
// With S = 1 this is a two-armed bandit. Requires slip in [0, 0.5).
TabularMdp make_chain(int H, int S, double slip = 0.0);

inline constexpr double kChainDistractorReward = 0.01;

// Transition rows from a symmetric Dirichlet(dirichlet_alpha), mean rewards
// uniform on [0, 1], initial state 0.
TabularMdp make_random_mdp(int H, int S, int A, double dirichlet_alpha, std::uint64_t seed,
                           RewardKind kind = RewardKind::kDeterministic);

}  // namespace crlsvi
