// Copyright 2026 The ASGN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace asgn {

// Deterministic random stream.
//
// Draws come from std::mt19937_64, whose output sequence is fixed by the C++
// standard. Real-valued and bounded-integer draws are derived from the raw
// 64-bit outputs here rather than through <random> distributions, whose
// algorithms differ between standard libraries.
//
// fork(tag, index) derives an independent child stream from the *seed* of
// this stream, never from its current position, so children are stable no
// matter how many draws the parent has made:
//   child_seed = splitmix64(seed ^ fnv1a64(tag) ^ splitmix64(index + 1))
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  // Uniform integer in [0, n); rejection sampling, no modulo bias.
  std::size_t below(std::size_t n);
  // Standard normal via Box-Muller (one value per call, no caching).
  double normal();

  RngStream fork(std::string_view tag, std::uint64_t index = 0) const;

  template <typename T>
  void shuffle(std::span<T> items) {
    // Fisher-Yates, high index first.
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = below(i);
      std::swap(items[i - 1], items[j]);
    }
  }

  // k distinct indices from [0, n), in draw order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

}  // namespace asgn
