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

#include <benchmark/benchmark.h>

#include <numeric>

#include "clozebench/perturb.h"
#include "clozebench/tokenizer.h"

namespace clozebench {
namespace {

std::vector<int32_t> Sequence(const Tokenizer& tok, size_t n) {
  std::vector<int32_t> ids(n);
  const auto& regular = tok.regular_ids();
  for (size_t i = 0; i < n; ++i) ids[i] = regular[(i * 7919) % regular.size()];
  return ids;
}

void BM_Levenshtein(benchmark::State& state) {
  std::vector<int32_t> a(state.range(0));
  std::iota(a.begin(), a.end(), 0);
  auto b = a;
  for (size_t i = 0; i < b.size(); i += 10) b[i] = -1;
  for (auto _ : state) benchmark::DoNotOptimize(LevenshteinDistance(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Levenshtein)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_Reorder(benchmark::State& state) {
  const auto tok = Tokenizer::Builtin();
  const auto ids = Sequence(tok, state.range(0));
  const auto spec = PerturbSpec::Parse("reorder:8@3", 1);
  for (auto _ : state) benchmark::DoNotOptimize(PerturbTokens(ids, spec, tok, "bench"));
}
BENCHMARK(BM_Reorder)->Arg(64)->Arg(256)->Arg(512);

void BM_Mask(benchmark::State& state) {
  const auto tok = Tokenizer::Builtin();
  const auto ids = Sequence(tok, state.range(0));
  const auto spec = PerturbSpec::Parse("mask:32", 1);
  for (auto _ : state) benchmark::DoNotOptimize(PerturbTokens(ids, spec, tok, "bench"));
}
BENCHMARK(BM_Mask)->Arg(512);

}  // namespace
}  // namespace clozebench
