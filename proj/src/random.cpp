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

#include "crlsvi/random.hpp"

namespace crlsvi {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream RngStream::derive(std::uint64_t master_seed, std::uint64_t episode,
                            StreamPurpose purpose) {
  std::uint64_t key = mix64(master_seed);
  key = mix64(key ^ episode);
  key = mix64(key ^ static_cast<std::uint64_t>(purpose));
  return RngStream(key);
}

double RngStream::uniform() {
  return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
}

double RngStream::normal(double mean, double stddev) {
  if (stddev == 0.0) return mean;
  return mean + stddev * standard_normal_(engine_);
}

double RngStream::gamma(double shape) {
  return std::gamma_distribution<double>(shape, 1.0)(engine_);
}

bool RngStream::bernoulli(double p) { return uniform() < p; }

int RngStream::categorical(const double* probs, int size) {
  const double u = uniform();
  double acc = 0.0;
  int last_positive = 0;
  for (int i = 0; i < size; ++i) {
    if (probs[i] > 0.0) last_positive = i;
    acc += probs[i];
    if (u < acc) return i;
  }
  return last_positive;
}

}  // namespace crlsvi
