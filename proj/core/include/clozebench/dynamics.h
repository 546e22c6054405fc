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

// Analytics over evaluation results across ordered checkpoints: loss
// trajectories, the loss ratio, onset of overfitting, state transitions,
// pattern labels and per-token loss attribution.

#ifndef CLOZEBENCH_DYNAMICS_H_
#define CLOZEBENCH_DYNAMICS_H_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "clozebench/gateway.h"
#include "clozebench/mc_eval.h"
#include "clozebench/nlp.h"
#include "clozebench/registry.h"
#include "clozebench/tokenizer.h"

namespace clozebench {

// One instance's results in checkpoint order.
struct Trajectory {
  std::string instance_id;
  std::string lang;
  std::vector<InstanceResult> points;

  std::vector<double> CorrectLosses() const;
};

struct TrajectorySet {
  std::vector<std::string> checkpoints;
  std::vector<Trajectory> trajectories;  // sorted by instance id
  // Instances dropped because some checkpoint left them unscored or missing.
  std::vector<std::string> excluded;
};

// Groups results by instance in `checkpoint_order`. Throws ValidationError on
// duplicate (instance, checkpoint) keys or checkpoints outside the order.
TrajectorySet BuildTrajectories(const std::vector<InstanceResult>& results,
                                const std::vector<std::string>& checkpoint_order);

// Checkpoint order as first seen in a result store.
std::vector<std::string> CheckpointOrder(const std::vector<InstanceResult>& results);

enum class Transition { kRetained, kAcquired, kForgotten, kUnacquired };

std::string TransitionName(Transition t);
Transition ClassifyTransition(bool pre_correct, bool post_correct);
// Throws ValidationError unless both results are scored and belong to the
// same instance.
Transition ClassifyTransition(const InstanceResult& pre, const InstanceResult& post);

struct TransitionCounts {
  size_t retained = 0;
  size_t acquired = 0;
  size_t forgotten = 0;
  size_t unacquired = 0;

  void Add(Transition t);
  size_t total() const { return retained + acquired + forgotten + unacquired; }
};

// Counts per language plus "all" for checkpoints (pre, post); pre < post.
std::map<std::string, TransitionCounts> CountTransitions(const TrajectorySet& set, size_t pre, size_t post);

struct Onset {
  size_t index = 0;
  bool at_end = false;  // minimum at the last point: no overfitting observed
};

// Index of the global minimum, earliest on ties. Throws on empty input.
Onset DetectOnset(std::span<const double> losses);

enum class Pattern { kStableGain, kLossShielding, kUnstable };

std::string PatternName(Pattern p);

struct PatternResult {
  Pattern label = Pattern::kUnstable;
  bool insufficient = false;  // fewer than 3 checkpoints
  size_t onset = 0;
};

// Labels an instance that is correct at the final checkpoint:
//   StableGain     final correct loss < initial and the correct option is
//                  the argmin at every checkpoint from the onset on;
//   LossShielding  final >= initial and, once the correct option first
//                  becomes the argmin, it stays the argmin to the end;
//   Unstable       everything else.
// Throws ValidationError when the instance is wrong at the final checkpoint.
PatternResult ClassifyPattern(const Trajectory& traj);

struct PatternCounts {
  size_t stable_gain = 0;
  size_t loss_shielding = 0;
  size_t unstable = 0;
  size_t insufficient = 0;
};

// Per language plus "all", over final-correct instances.
std::map<std::string, PatternCounts> CountPatterns(const TrajectorySet& set);

// (checkpoint, metric, group, value) rows.
struct SeriesRow {
  std::string checkpoint;
  std::string metric;
  std::string group;
  double value = 0.0;
};

std::string SeriesCsv(const std::vector<SeriesRow>& rows);

// accuracy, correct_loss, distractor_loss (mean over the three distractors)
// and loss_ratio per checkpoint for each language and "all".
std::vector<SeriesRow> LossSeries(const TrajectorySet& set);

// --- per-token attribution -------------------------------------------------

// Language group of a token surface from the majority script among its
// letters: Latin -> "EN"; Hiragana, Katakana, Han -> "JA"; otherwise digits
// -> "NUM"; anything else (punctuation, spaces, unknown) -> "X".
std::string LanguageGroup(std::string_view surface);

std::vector<std::string> LanguageGroups(std::span<const nlp::Token> tokens);

// POS groups via the word tagger; tokens the tagger cannot cover get "X".
std::vector<std::string> PosGroups(std::span<const nlp::Token> tokens, std::string_view text,
                                   std::string_view lang, const nlp::WordTagger& tagger);

struct GroupCurve {
  std::string group;
  size_t token_count = 0;
  std::vector<double> means;  // one per checkpoint
};

// nlls[t][i] is token i's nll at checkpoint t. Groups sorted by name; rows
// with fewer entries than `groups` throw ValidationError.
std::vector<GroupCurve> AttributeTokens(std::span<const std::string> groups,
                                        const std::vector<std::vector<double>>& nlls);

enum class Grouping { kLanguage, kPos };

Grouping ParseGrouping(const std::string& name);  // "language" | "pos"

struct AttributionDoc {
  std::string id;
  std::string lang;
  std::string text;
};

struct AttributionRun {
  std::vector<SeriesRow> series;  // metric "token_nll", one row per (checkpoint, group)
  std::vector<GroupCurve> curves;
  std::vector<std::string> warnings;  // unscored documents, tagger fallbacks
};

// Scores every document as one sequence at each checkpoint, groups its
// tokens, and pools the groups over documents. `tagger` is required for
// POS grouping.
AttributionRun AttributeDocuments(const std::vector<AttributionDoc>& docs, Grouping grouping,
                                  const Tokenizer& tokenizer, const CheckpointRegistry& checkpoints,
                                  Gateway& gateway, const nlp::WordTagger* tagger);

}  // namespace clozebench

#endif  // CLOZEBENCH_DYNAMICS_H_
