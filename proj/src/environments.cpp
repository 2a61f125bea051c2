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

#include "crlsvi/environments.hpp"

#include <algorithm>
#include <stdexcept>

namespace crlsvi {

TabularMdp make_chain(int H, int S, double slip) {
  if (H < 1 || S < 1) throw std::invalid_argument("chain needs H >= 1 and S >= 1");
  if (!(slip >= 0.0 && slip < 0.5)) throw std::invalid_argument("chain slip must lie in [0, 0.5)");
  TabularMdp m(H, S, 2);
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      const int left = std::max(s - 1, 0);
      const int right = std::min(s + 1, S - 1);
      m.transition(h, s, 0)[left] = 1.0;
      m.transition(h, s, 1)[right] += 1.0 - slip;
      m.transition(h, s, 1)[left] += slip;
    }
    m.reward(h, 0, 0) = kChainDistractorReward;
    m.reward(h, S - 1, 1) = 1.0;
  }
  validate_mdp(m);
  return m;
}

TabularMdp make_random_mdp(int H, int S, int A, double dirichlet_alpha, std::uint64_t seed,
                           RewardKind kind) {
  if (!(dirichlet_alpha > 0.0)) throw std::invalid_argument("dirichlet_alpha must be positive");
  TabularMdp m(H, S, A, kind);
  RngStream rng = RngStream::derive(seed, 0, StreamPurpose::kEnvironment);
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        auto row = m.transition(h, s, a);
        double total = 0.0;
        for (double& p : row) total += (p = rng.gamma(dirichlet_alpha));
        if (total > 0.0) {
          for (double& p : row) p /= total;
        } else {
          row[0] = 1.0;  // every gamma draw underflowed
        }
        m.reward(h, s, a) = rng.uniform();
      }
    }
  }
  validate_mdp(m);
  return m;
}

}  // namespace crlsvi
