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

// Deterministic in-process backends. Every mock is a pure function of its
// construction parameters and the request, so runs against them are
// byte-reproducible.

#ifndef CLOZEBENCH_MOCK_BACKENDS_H_
#define CLOZEBENCH_MOCK_BACKENDS_H_

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "clozebench/gateway.h"
#include "clozebench/jsonl.h"
#include "clozebench/nlp.h"

namespace clozebench {

// Assigns the same logprob to every target token.
class ConstantScorer : public ScoringBackend {
 public:
  explicit ConstantScorer(double logprob = -1.0);
  ScoreResponse Score(const ScoreRequest& request) override;

 private:
  double logprob_;
};

// First-order Markov model over token ids with pseudo-random, seed-derived
// transition weights. p(next | prev) is normalized over the whole
// vocabulary; prev = kStart is the sequence-start state.
class BigramScorer : public ScoringBackend {
 public:
  static constexpr int32_t kStart = -1;

  BigramScorer(uint64_t seed, size_t vocab_size);

  double TransitionProbability(int32_t prev, int32_t next) const;
  ScoreResponse Score(const ScoreRequest& request) override;

  size_t vocab_size() const { return vocab_size_; }

 private:
  double Weight(int32_t prev, int32_t next) const;
  double RowSum(int32_t prev) const;

  uint64_t seed_;
  size_t vocab_size_;
  mutable std::mutex mu_;
  mutable std::map<int32_t, double> row_sums_;
};

// Rule-based stand-in for an instruction-following LLM. Understands the
// shipped prompt templates (see PromptLibrary) and answers each task from
// the rendered input: judges via a lexicon matcher, crafts cloze and
// question forms, draws distractors from the lexicon, applies the quality
// rubric, and performs simple rewrites. Fact judgments carry token logprobs
// so yes-confidence can be read.
class PipelineMock : public GenerationBackend {
 public:
  struct Options {
    uint64_t seed = 0;
    // Lexicon used for entity lookups and distractor candidates; empty uses
    // the shipped biomedical lexicon.
    std::string lexicon_path;
  };

  explicit PipelineMock(Options options);

  Completion Generate(const GenerationRequest& request) override;
  bool SupportsLogprobs() const override { return true; }

 private:
  Completion Judge(const Json& input) const;
  std::string Craft(const Json& input) const;
  std::string Distractors(const Json& input) const;
  std::string Review(const Json& input) const;
  std::string QaPairs(const Json& input, size_t k) const;
  std::string Rewrite(const std::string& kind, const Json& input) const;

  std::string LabelOf(std::string_view surface, std::string_view lang) const;
  double Unit(std::string_view key) const;  // deterministic value in [0,1)

  Options options_;
  std::unique_ptr<nlp::LexiconRecognizer> lexicon_;
};

// Replays recorded replies. Lookup order: exact prompt hash, then the
// "sentence" field of the rendered input, then a FIFO queue.
//
// File format: {"supports_logprobs": bool,
//               "by_hash": {"<fnv1a64 hex>": reply, ...},
//               "by_sentence": {"<sentence>": reply, ...},
//               "queue": [reply, ...]}
// where reply is a string or {"text": ..., "tokens": [{"text", "logprob",
// "top": [{"token", "logprob"}]}]}.
class CannedGenerator : public GenerationBackend {
 public:
  explicit CannedGenerator(const Json& spec);
  static std::shared_ptr<CannedGenerator> FromFile(const std::string& path);

  Completion Generate(const GenerationRequest& request) override;
  bool SupportsLogprobs() const override { return supports_logprobs_; }

  static std::string PromptHash(std::string_view prompt);

 private:
  std::map<std::string, Completion> by_hash_;
  std::map<std::string, Completion> by_sentence_;
  std::mutex mu_;
  std::deque<Completion> queue_;
  bool supports_logprobs_ = false;
};

Completion CompletionFromJson(const Json& reply);

}  // namespace clozebench

#endif  // CLOZEBENCH_MOCK_BACKENDS_H_
