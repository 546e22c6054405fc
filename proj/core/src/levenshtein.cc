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

// Myers' bit-vector edit distance with Hyyrö's block decomposition: the DP
// matrix is processed column by column, 64 rows per machine word, carrying
// the horizontal delta of each block's bottom row into the next block.

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "clozebench/perturb.h"

namespace clozebench {
namespace {

constexpr int kWord = 64;

struct Block {
  uint64_t pv = ~uint64_t{0};  // vertical +1 deltas
  uint64_t mv = 0;             // vertical -1 deltas
};

// Advances one block by one column; returns the horizontal delta leaving its
// bottom row (`last` selects that row).
int Advance(Block& b, uint64_t eq, int hin, uint64_t last) {
  const uint64_t pv = b.pv, mv = b.mv;
  const uint64_t xv = eq | mv;
  if (hin < 0) eq |= 1;
  const uint64_t xh = (((eq & pv) + pv) ^ pv) | eq;
  uint64_t ph = mv | ~(xh | pv);
  uint64_t mh = pv & xh;
  int hout = 0;
  if (ph & last) hout = 1;
  else if (mh & last) hout = -1;
  ph <<= 1;
  mh <<= 1;
  if (hin < 0) mh |= 1;
  else if (hin > 0) ph |= 1;
  b.pv = mh | ~(xv | ph);
  b.mv = ph & xv;
  return hout;
}

}  // namespace

size_t LevenshteinDistance(std::span<const int32_t> a, std::span<const int32_t> b) {
  if (a.size() < b.size()) std::swap(a, b);  // rows = longer sequence
  const size_t m = a.size();
  if (b.empty()) return m;
  const size_t blocks = (m + kWord - 1) / kWord;
  std::unordered_map<int32_t, std::vector<uint64_t>> peq;
  for (size_t i = 0; i < m; ++i) {
    auto& v = peq[a[i]];
    if (v.empty()) v.assign(blocks, 0);
    v[i / kWord] |= uint64_t{1} << (i % kWord);
  }
  const uint64_t full_last = uint64_t{1} << (kWord - 1);
  const uint64_t tail_last = uint64_t{1} << ((m - 1) % kWord);
  std::vector<Block> state(blocks);
  size_t score = m;
  for (const int32_t c : b) {
    const auto it = peq.find(c);
    int h = 1;  // top row: D[0][j] = j
    for (size_t k = 0; k < blocks; ++k) {
      const uint64_t eq = it == peq.end() ? 0 : it->second[k];
      h = Advance(state[k], eq, h, k + 1 == blocks ? tail_last : full_last);
    }
    score = static_cast<size_t>(static_cast<long long>(score) + h);
  }
  return score;
}

}  // namespace clozebench
