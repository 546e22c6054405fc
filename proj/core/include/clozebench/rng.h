// Copyright 2026 The clozebench Authors
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

#ifndef CLOZEBENCH_RNG_H_
#define CLOZEBENCH_RNG_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace clozebench {

// 64-bit FNV-1a. Used for seed derivation and content fingerprints.
uint64_t Fnv1a64(std::string_view data, uint64_t basis = 0xcbf29ce484222325ULL);
std::string HexDigest(uint64_t h);

// Mixes a run seed with a unit key (sequence id, instance id, ...) so that
// per-unit randomness does not depend on corpus order.
uint64_t DeriveSeed(uint64_t seed, std::string_view key);

// Seeded generator with portable draws. The distributions in <random> are
// implementation-defined, so bounded integers and reals are derived here
// directly from the engine output to keep artifacts byte-identical across
// standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t Next() { return engine_(); }

  // Uniform in [0, n). n must be positive.
  size_t UniformIndex(size_t n);

  // Uniform in [0, 1).
  double UniformReal();

  // `k` distinct indices from [0, n), sorted ascending.
  std::vector<size_t> SampleWithoutReplacement(size_t n, size_t k);

  template <typename T>
  void Shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[UniformIndex(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace clozebench

#endif  // CLOZEBENCH_RNG_H_
