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

// Dataset generation: fact detection -> query crafting -> distractor
// generation -> quality filtering. Every stage is a filtration; each dropped
// unit lands in the rejection ledger exactly once.

#ifndef CLOZEBENCH_ADAXEVAL_H_
#define CLOZEBENCH_ADAXEVAL_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "clozebench/corpus.h"
#include "clozebench/gateway.h"
#include "clozebench/jsonl.h"
#include "clozebench/nlp_client.h"
#include "clozebench/prompts.h"

namespace clozebench {

inline constexpr std::string_view kBlank = "[BLANK]";

struct Triple {
  std::string subject;
  std::string relation;
  std::string object;

  Json ToJson() const;
  static Triple FromJson(const Json& j);
  // "" when valid, otherwise the violated invariant.
  std::string Problem() const;
  bool operator==(const Triple&) const = default;
};

struct JudgeOutput {
  std::string judge;
  bool factuality = false;
  double yes_confidence = 0.0;
  bool truncated = false;  // yes token absent from the returned top-k
  std::optional<Triple> triple;
  std::string reason;
  bool failed = false;  // generation failure; contributes nothing
  std::string error;

  Json ToJson() const;
};

struct FactCandidate {
  Sentence sentence;
  std::string lang;
  std::vector<JudgeOutput> judgments;
  double combined_confidence = 0.0;
  size_t yes_votes = 0;
  std::optional<Triple> selected_triple;
};

struct EvalInstance {
  std::string id;  // <doc_id>:<sentence index>
  std::string lang;
  std::string doc_id;
  size_t sentence_index = 0;
  std::string sentence;
  Triple triple;
  std::string cloze_query;
  std::string paraphrase_query;
  std::vector<std::string> options;
  size_t answer_index = 0;
  Json provenance = Json::object();

  Json ToJson() const;
  static EvalInstance FromJson(const Json& j);
};

// Max/min codepoint length over the options; infinity when one is empty.
double OptionLengthRatio(const std::vector<std::string>& options);

// Every violated EvalInstance invariant; empty when the instance is valid.
std::vector<std::string> InstanceProblems(const EvalInstance& inst, double max_length_ratio = 3.0);

std::vector<EvalInstance> ReadDataset(const std::filesystem::path& path);
void WriteDataset(const std::filesystem::path& path, const std::vector<EvalInstance>& instances);

struct Rejection {
  std::string unit_id;
  std::string stage;
  std::string reason;

  Json ToJson() const;
};

// Append-only and thread-safe; emitted sorted by (unit_id, stage).
class RejectionLedger {
 public:
  void Add(std::string unit_id, std::string stage, std::string reason);
  std::vector<Rejection> Sorted() const;
  size_t size() const;

 private:
  mutable std::mutex mu_;
  std::vector<Rejection> items_;
};

struct GenerateConfig {
  std::vector<std::string> judges;
  std::string generator;
  std::string filter;
  double threshold = 2.0;         // combined confidence must exceed this
  size_t min_yes_votes = 2;       // judgments with yes_confidence > 0.5
  size_t min_entities = 2;
  double max_length_ratio = 3.0;  // option length-cue guard
  int max_attempts = 2;           // per structured call, first call included
  int distractor_rounds = 3;
  uint64_t seed = 0;
  size_t workers = 8;

  Json ToJson() const;
};

// Picks among judge triples: highest-confidence yes judge, then the shortest
// object, then judge order. nullopt when no yes judgment carries a triple.
std::optional<Triple> SelectTriple(const std::vector<JudgeOutput>& judgments);

// Answer slot for an instance, uniform over 0..3 under the run seed.
size_t AnswerIndexFor(uint64_t seed, std::string_view instance_id);

bool IsQuestionForm(std::string_view text, std::string_view lang);

struct CraftedQueries {
  std::string cloze;
  std::string paraphrase;
};

struct FilterOutcome {
  std::vector<EvalInstance> kept;
  std::map<std::string, bool> interlingual_supported;  // by instance id, for judged instances
  size_t held = 0;  // judge failed twice; never kept
};

class Pipeline {
 public:
  // Throws CapabilityError if a judge cannot return logprobs and
  // ValidationError for unknown backends.
  Pipeline(Gateway& gateway, PromptLibrary prompts, GenerateConfig config);

  std::vector<FactCandidate> DetectFacts(const std::vector<Sentence>& sentences, std::string_view lang,
                                         RejectionLedger* ledger = nullptr);

  std::optional<CraftedQueries> CraftQueries(const FactCandidate& cand, std::string* error);

  std::optional<std::vector<std::string>> GenerateDistractors(const std::string& cloze,
                                                              const std::string& answer,
                                                              std::string_view lang, std::string* error);

  // `corpus` supplies paired documents for the interlingual check; may be null.
  FilterOutcome FilterQuality(const std::vector<EvalInstance>& instances, const Corpus* corpus,
                              RejectionLedger* ledger = nullptr);

  // Query crafting + distractors + answer placement for retained facts.
  // `crafted_by_lang` receives the per-language count surviving crafting.
  std::vector<EvalInstance> BuildInstances(const std::vector<FactCandidate>& facts,
                                           RejectionLedger* ledger = nullptr,
                                           std::map<std::string, size_t>* crafted_by_lang = nullptr);

  // Generation failures (as opposed to rejections) seen per stage.
  size_t Failures(const std::string& stage) const;

  Json Provenance() const;
  const GenerateConfig& config() const { return config_; }

 private:
  JudgeOutput RunJudge(const std::string& judge, const Sentence& s, std::string_view lang);

  void CountFailure(const std::string& stage);

  Gateway& gateway_;
  PromptLibrary prompts_;
  GenerateConfig config_;
  mutable std::mutex fail_mu_;
  std::map<std::string, size_t> failures_;
};

struct StageCounts {
  std::vector<std::string> stages;
  std::map<std::string, std::map<std::string, size_t>> counts;  // stage -> lang -> n

  void Set(const std::string& stage, const std::string& lang, size_t n);
  std::string ToCsv() const;
};

struct BuildResult {
  std::vector<EvalInstance> instances;
  std::vector<Json> manifest;
  StageCounts counts;
  std::vector<Rejection> rejections;
  std::vector<std::string> warnings;
};

// Runs every stage over `corpus` and writes, under out_dir:
//   dataset.jsonl, cloze.jsonl, paraphrase.jsonl, interlingual_manifest.jsonl,
//   stage_counts.csv, rejections.jsonl
// A stage whose every unit fails with a backend error aborts with a
// RuntimeFailure after the partial outputs are written.
BuildResult BuildDataset(const Corpus& corpus, const nlp::NlpAdapters& nlp, Pipeline& pipeline,
                         const std::filesystem::path& out_dir);

}  // namespace clozebench

#endif  // CLOZEBENCH_ADAXEVAL_H_
