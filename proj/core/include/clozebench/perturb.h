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

// Controlled corruption of training sequences.
//
// Token kinds act on tokenizer ids (mask, random, delete, reorder) or on
// tagger word units (monosyn, mltlsyn). Sentence kinds rewrite a share of a
// document's sentences through a rewriter backend (syntax, lexicon,
// semantic, translation) or keep one quarter of them (partial).
//
// Every choice is drawn from Rng(DeriveSeed(spec.seed, sequence_id)), so a
// sequence's result does not depend on corpus order.

#ifndef CLOZEBENCH_PERTURB_H_
#define CLOZEBENCH_PERTURB_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clozebench/gateway.h"
#include "clozebench/jsonl.h"
#include "clozebench/mc_eval.h"
#include "clozebench/nlp.h"
#include "clozebench/prompts.h"
#include "clozebench/registry.h"
#include "clozebench/tokenizer.h"

namespace clozebench {

enum class PerturbKind {
  kMask,
  kRandom,
  kDelete,
  kReorder,
  kMonoSyn,
  kMltlSyn,
  kPartial,
  kSyntax,
  kLexicon,
  kSemantic,
  kTranslation,
};

std::string KindName(PerturbKind kind);

struct PerturbSpec {
  PerturbKind kind = PerturbKind::kMask;
  int intensity_pct = 0;       // X; unused for partial
  std::optional<int> window;   // Y, reorder only
  std::optional<int> segment;  // a in 1..4, partial only
  uint64_t seed = 0;

  // "mask:8", "mask-8", "reorder:8@3", "partial:2". Throws ValidationError.
  static PerturbSpec Parse(const std::string& text, uint64_t seed = 0);
  void Validate() const;

  std::string ToString() const;  // canonical "kind:X[@Y]" / "partial:a"
  std::string Suffix() const;    // file suffix: "mask-8", "reorder-8@3", "partial-2"
  bool IsIdKind() const;         // mask, random, delete, reorder
  bool IsSynonymKind() const;
  bool IsRewriteKind() const;    // syntax, lexicon, semantic, translation
};

// round(X/100 * n), halves rounded up.
size_t AffectedCount(int intensity_pct, size_t n);

// Token-level Levenshtein distance (unit costs), bit-parallel over 64-row
// blocks.
size_t LevenshteinDistance(std::span<const int32_t> a, std::span<const int32_t> b);

struct EditReport {
  size_t target = 0;    // k
  size_t replaced = 0;
  size_t deleted = 0;
  size_t moved = 0;     // tokens whose index changed
  size_t distance = 0;  // achieved Levenshtein distance to the original
  size_t eligible = 0;  // synonym kinds: eligible word units
  size_t shortfall = 0; // k minus what could be applied
  size_t attempts = 0;  // reorder swap attempts
  bool noop = false;    // k == 0
  bool within_tolerance = true;  // reorder: |distance - k| <= 1

  Json ToJson() const;
};

struct PerturbedSequence {
  std::vector<int32_t> original;
  std::vector<int32_t> perturbed;
  EditReport report;
  // Reorder: original index of the token now at each position.
  std::vector<size_t> source_index;
};

// mask / random / delete / reorder. Throws ValidationError for other kinds,
// empty input, or a vocabulary without enough regular tokens.
PerturbedSequence PerturbTokens(std::span<const int32_t> ids, const PerturbSpec& spec, const Tokenizer& tokenizer,
                                std::string_view sequence_id);

// Core of PerturbTokens with the vocabulary passed explicitly.
PerturbedSequence PerturbIds(std::span<const int32_t> ids, const PerturbSpec& spec, int32_t unk_id,
                             std::span<const int32_t> regular_ids, std::string_view sequence_id);

struct SynonymResources {
  const nlp::WordTagger* tagger = nullptr;
  const nlp::WordNet* wordnet = nullptr;
  const nlp::StopWords* stopwords = nullptr;
};

struct SynonymResult {
  std::string text;
  std::vector<nlp::Token> words;        // word units of the original
  std::vector<size_t> eligible;         // indexes into `words`
  std::vector<size_t> replaced;         // indexes into `words`
  std::vector<std::string> replacements;  // parallel to `replaced`
  EditReport report;                    // counts over word units
};

// Target language of mltlsyn for a document in `lang`.
std::string OtherLanguage(const std::string& lang);

// monosyn / mltlsyn over word units; n is the word count.
SynonymResult PerturbSynonyms(const std::string& text, const std::string& lang, const PerturbSpec& spec,
                              const SynonymResources& res, std::string_view sequence_id);

struct PartialSegment {
  std::vector<std::string> sentences;
  size_t begin = 0;  // index of the first sentence of the segment
  bool empty = false;
};

// Four contiguous segments by count, remainders to the earliest segments.
PartialSegment SplitPartial(const std::vector<std::string>& sentences, int segment);

struct SentenceRewriteResult {
  std::vector<std::string> sentences;
  std::vector<size_t> selected;  // sentence indexes chosen for rewriting
  std::vector<size_t> failed;    // chosen but kept original
  bool noop = false;

  Json ToJson() const;
};

// syntax / lexicon / semantic / translation through `rewriter`. Throws
// RuntimeFailure when more than 20% of the selected sentences fail.
SentenceRewriteResult PerturbSentences(const std::vector<std::string>& sentences, const std::string& lang,
                                       const PerturbSpec& spec, Gateway& gateway, const std::string& rewriter,
                                       const PromptLibrary& prompts, std::string_view sequence_id,
                                       int max_attempts = 2);

// --- perturbed-loss tracking ----------------------------------------------

struct VariantSet {
  std::string name;  // "original" or a spec suffix
  std::vector<std::string> sequence_ids;
  std::vector<std::vector<int32_t>> sequences;
};

struct TrackRow {
  std::string variant;
  std::string checkpoint;
  double mean_nll = 0.0;  // mean over sequences of per-sequence mean nll
  size_t scored = 0;
  size_t unscored = 0;
};

struct TrackOnset {
  std::string variant;
  size_t onset_index = 0;
  std::string onset_checkpoint;
  bool at_end = false;
};

struct TrackResult {
  std::vector<TrackRow> rows;
  std::vector<TrackOnset> onsets;
};

// Throws RuntimeFailure when more than `max_unscored_fraction` of a
// variant's sequences fail at some checkpoint.
TrackResult TrackPerturbedLoss(const std::vector<VariantSet>& variants, const CheckpointRegistry& checkpoints,
                               Gateway& gateway, double max_unscored_fraction = 0.01);

std::string TrackCsv(const TrackResult& r);

}  // namespace clozebench

#endif  // CLOZEBENCH_PERTURB_H_
