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
#include <random>

namespace crlsvi {

// Consumers of randomness inside one run. Each gets its own stream so that
// adding draws to one consumer never shifts the values seen by another.
enum class StreamPurpose : std::uint64_t {
  kPrior = 1,
  kNoise = 2,
  kRollout = 3,
  kEnvironment = 4,
  kTest = 5,
};

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// A seeded pseudo-random stream. Thin wrapper over mt19937_64 so that every
// sampling site goes through the same distributions.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  // Counter-based derivation: (master seed, episode, purpose) -> stream.
  static RngStream derive(std::uint64_t master_seed, std::uint64_t episode,
                          StreamPurpose purpose);

  double uniform();  // [0, 1)
  double normal(double mean, double stddev);
  double gamma(double shape);
  bool bernoulli(double p);
  // Index drawn from a (possibly deficient) probability vector. Residual
  // mass, if any, falls on the last index with positive weight.
  int categorical(const double* probs, int size);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> standard_normal_{0.0, 1.0};
};

}  // namespace crlsvi
