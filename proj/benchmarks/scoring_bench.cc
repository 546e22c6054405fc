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

#include "clozebench/mock_backends.h"
#include "clozebench/tokenizer.h"

namespace clozebench {
namespace {

const char kAbstract[] =
    "Blood sugar level can be controlled by insulin. Insulin is secreted by beta cells in the pancreas. "
    "血糖値はインスリンによって制御される。インスリンは膵臓のβ細胞から分泌される。";

void BM_Tokenize(benchmark::State& state) {
  const auto tok = Tokenizer::Builtin();
  for (auto _ : state) benchmark::DoNotOptimize(tok.Encode(kAbstract));
  state.SetBytesProcessed(state.iterations() * (sizeof(kAbstract) - 1));
}
BENCHMARK(BM_Tokenize);

void BM_BigramScore(benchmark::State& state) {
  const auto tok = Tokenizer::Builtin();
  BigramScorer scorer(7, tok.vocab_size());
  const auto ids = tok.Encode(kAbstract);
  const size_t split = ids.size() / 2;
  const ScoreRequest req{{ids.begin(), ids.begin() + split}, {ids.begin() + split, ids.end()}};
  for (auto _ : state) benchmark::DoNotOptimize(scorer.Score(req));
}
BENCHMARK(BM_BigramScore);

}  // namespace
}  // namespace clozebench
