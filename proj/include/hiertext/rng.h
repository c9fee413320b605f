// Copyright 2026 The hiertext Authors.
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
#include <string_view>
#include <utility>
#include <vector>

namespace hiertext {

/// Derives an independent seed from a root seed, a purpose tag, and up to two
/// numeric keys. Every random decision in the project flows through a stream
/// named this way, so consumers never share or interleave sequences.
std::uint64_t derive_seed(std::uint64_t root_seed, std::string_view purpose,
                          std::uint64_t key0 = 0, std::uint64_t key1 = 0);

/// A named substream of the root seed. Uniform doubles are produced from the
/// raw 64-bit output directly so sequences do not depend on the standard
/// library's distribution implementations.
class RngStream {
 public:
  /// From a seed already produced by derive_seed.
  explicit RngStream(std::uint64_t derived_seed) : gen_(derived_seed) {}

  RngStream(std::uint64_t root_seed, std::string_view purpose,
            std::uint64_t key0 = 0, std::uint64_t key1 = 0)
      : gen_(derive_seed(root_seed, purpose, key0, key1)) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Uniform in {0, ..., n-1}; n must be positive.
  std::size_t next_index(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

  bool next_bernoulli(double p) { return next_double() < p; }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[next_index(i)]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace hiertext
