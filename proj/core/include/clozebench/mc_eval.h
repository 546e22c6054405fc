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

// Loglikelihood multiple-choice scoring. Each option is scored as the mean
// per-token NLL (nats) of a target continuation given a context; the
// prediction is the option with the lowest loss.
//
//   cloze:       context = text before [BLANK]
//                target  = option + text after [BLANK]
//   paraphrase:  context = question
//                target  = option (" " + option for space-delimited languages)
//
// A trailing space in the cloze context moves onto the target, so the
// context never ends in a lone space token.

#ifndef CLOZEBENCH_MC_EVAL_H_
#define CLOZEBENCH_MC_EVAL_H_

#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "clozebench/adaxeval.h"
#include "clozebench/gateway.h"
#include "clozebench/registry.h"
#include "clozebench/tokenizer.h"

namespace clozebench {

enum class EvalMode { kCloze, kParaphrase, kInterlingual };

std::string ModeName(EvalMode mode);
EvalMode ParseMode(const std::string& name);  // throws ValidationError

struct OptionScore {
  size_t option_index = 0;
  double mean_nll = 0.0;
  size_t token_count = 0;

  Json ToJson() const;
  static OptionScore FromJson(const Json& j);
};

struct InstanceResult {
  std::string instance_id;
  std::string checkpoint_id;
  std::string lang;
  std::string mode;
  bool scored = false;  // false: at least one option failed
  std::string error;
  std::vector<OptionScore> scores;  // 4 when scored
  size_t answer_index = 0;
  size_t predicted_index = 0;
  bool tie = false;  // the minimum loss is shared; lowest index wins
  bool correct = false;
  double correct_loss = 0.0;
  double loss_ratio = 0.0;  // NaN when undefined
  bool ratio_defined = false;

  std::vector<double> Losses() const;
  Json ToJson() const;
  static InstanceResult FromJson(const Json& j);
};

struct Argmin {
  size_t index = 0;
  bool tie = false;
};

// Lowest value; exact ties go to the lowest index and set `tie`.
Argmin PredictArgmin(std::span<const double> losses);

// correct / sum. nullopt unless every loss is finite and positive.
std::optional<double> LossRatio(std::span<const double> losses, size_t correct);

// Scoring requests for one option. Throws ValidationError on a malformed
// query (cloze without exactly one [BLANK], empty question, empty target).
ScoreRequest BuildClozeRequest(const Tokenizer& tok, const std::string& cloze, const std::string& option);
ScoreRequest BuildParaphraseRequest(const Tokenizer& tok, const std::string& question, const std::string& option,
                                    const std::string& lang);

// "" for languages written without spaces between words.
std::string OptionSeparator(const std::string& lang);

// Fills prediction fields from the scores.
void Finalize(InstanceResult& r);

struct AccuracyRow {
  std::string checkpoint_id;
  std::string mode;
  std::string lang;  // "all" for the aggregate row
  double accuracy = 0.0;
  size_t n = 0;  // scored instances
  size_t ties = 0;
  size_t unscored = 0;
};

struct EvalOptions {
  EvalMode mode = EvalMode::kCloze;
  double max_unscored_fraction = 0.01;
  // Restricts evaluation to these query languages; empty means all.
  std::set<std::string> languages;
  // Interlingual mode: restricts to instances listed here (the paired-corpus
  // manifest); empty means every selected instance.
  std::set<std::string> instance_ids;
  // When false the unscored threshold is reported in EvalRun::failures
  // instead of thrown, so callers can persist results first.
  bool throw_on_failure = true;
};

struct EvalRun {
  std::vector<InstanceResult> results;  // sorted by (instance_id, checkpoint order)
  std::vector<AccuracyRow> accuracy;    // by checkpoint order, then lang
  std::vector<std::string> failures;

  // Throws RuntimeFailure listing `failures`, if any.
  void ThrowIfFailed() const;
};

EvalRun EvaluateDataset(const std::vector<EvalInstance>& dataset, const CheckpointRegistry& checkpoints,
                        Gateway& gateway, const Tokenizer& tokenizer, const EvalOptions& options);

// Accuracy rows recomputed from stored results (used by report and dynamics).
std::vector<AccuracyRow> ComputeAccuracy(const std::vector<InstanceResult>& results,
                                         const std::vector<std::string>& checkpoint_order);

std::string AccuracyCsv(const std::vector<AccuracyRow>& rows);

void WriteResults(const std::filesystem::path& path, const std::vector<InstanceResult>& results);
std::vector<InstanceResult> ReadResults(const std::filesystem::path& path);

}  // namespace clozebench

#endif  // CLOZEBENCH_MC_EVAL_H_
