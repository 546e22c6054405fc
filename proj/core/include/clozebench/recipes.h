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

// Continual-training corpus recipes: instruction mining from document
// metadata, QA-pair generation, cross-lingual transfer corpora and the
// budgeted, shuffled mix of a knowledge corpus with a transfer corpus.
//
// Mixed corpus framing: one document per line, text::EscapeLine applied, so
// embedded newlines and backslashes survive. The manifest CSV has columns
// doc_id, source, kind, token_count, offset (byte offset of the line).

#ifndef CLOZEBENCH_RECIPES_H_
#define CLOZEBENCH_RECIPES_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "clozebench/corpus.h"
#include "clozebench/gateway.h"
#include "clozebench/nlp.h"
#include "clozebench/nlp_client.h"
#include "clozebench/prompts.h"
#include "clozebench/tokenizer.h"

namespace clozebench {

// --- instruction mining ------------------------------------------------------

struct InstructionTemplate {
  std::string kind;
  std::string input_field;   // io_rule
  std::string output_field;
  std::vector<std::string> variants;  // exactly 10
};

class InstructionTemplates {
 public:
  // data/templates/instructions.json
  static InstructionTemplates Builtin();
  // Throws ValidationError unless every kind has 10 variants and io_rules
  // name known document fields.
  static InstructionTemplates FromJson(const Json& j);

  const InstructionTemplate& Get(const std::string& kind) const;
  std::vector<std::string> kinds() const;

 private:
  std::map<std::string, InstructionTemplate> by_kind_;
  std::vector<std::string> order_;
};

// Every io_rule field reference understood by the miner.
const std::set<std::string>& KnownInstructionFields();

struct DiagnosisAnnotation {
  std::string findings;
  std::string diagnosis;
};

// JSONL of {"doc_id","findings","diagnosis"}.
std::map<std::string, DiagnosisAnnotation> ReadDiagnosisAnnotations(const std::filesystem::path& path);

struct InstructionRecord {
  std::string doc_id;
  std::string kind;
  size_t variant = 0;
  std::string text;

  Json ToJson() const;
};

struct MineContext {
  const Corpus* corpus = nullptr;  // partner lookup for translation
  const nlp::SentenceSplitter* splitter = nullptr;
  const std::map<std::string, DiagnosisAnnotation>* diagnosis = nullptr;
};

struct MineReport {
  std::map<std::string, std::vector<std::string>> skipped;  // kind -> "doc_id: reason"
  size_t records = 0;

  void Merge(const MineReport& other);
  Json ToJson() const;
};

// Keyword lists used to locate sections when a document has no `sections`.
const std::map<std::string, std::vector<std::string>>& SectionKeywords();

// At most one record per kind, variant chosen by
// Rng(DeriveSeed(seed, doc_id + ":" + kind)). Kinds whose fields are missing
// are skipped and reported.
std::vector<InstructionRecord> MineInstructions(const Document& doc, const std::vector<std::string>& kinds,
                                                const InstructionTemplates& templates, const MineContext& ctx,
                                                uint64_t seed, MineReport* report = nullptr);

// --- QA pairs -------------------------------------------------------------

struct QaPair {
  std::string question;
  std::string answer;
};

struct QaResult {
  std::vector<QaPair> pairs;
  size_t shortfall = 0;
  size_t malformed = 0;
  std::string error;  // total failure
};

QaResult GenerateQaPairs(const Document& doc, Gateway& gateway, const std::string& generator,
                         const PromptLibrary& prompts, size_t k = 5, int max_attempts = 2);

// --- corpora ---------------------------------------------------------------

struct CorpusDoc {
  std::string id;
  std::string source;  // knowledge | transfer
  std::string kind;    // document, instruction:<kind>, qa, or a transfer kind
  std::string text;
  size_t token_count = 0;
};

enum class TransferKind {
  kNone,
  kMedicalMonolingual,
  kBalancedTranslation,
  kScienceTranslation,
  kMedicalTranslation,
  kMedicalRoman,
  kMedicalRoman2En,
};

std::string TransferKindName(TransferKind k);
TransferKind ParseTransferKind(const std::string& name);

struct TransferSources {
  // JParaCrawl TSV: the last two tab-separated columns are English, Japanese.
  std::filesystem::path jparacrawl;
  // ASPEC-style lines "doc_id ||| domain ||| ja ||| en" (extra leading
  // columns, e.g. a score, are ignored).
  std::filesystem::path aspec;
  std::set<std::string> aspec_excluded_domains = {"medical", "chemical"};
  // Medical documents (J-STAGE style) for the medical_* kinds.
  const Corpus* medical = nullptr;
  std::string medical_lang = "ja";
  const nlp::Romanizer* romanizer = nullptr;
  const nlp::SentenceSplitter* splitter = nullptr;
  // Document ids that must never appear (evaluation sources and partners).
  std::set<std::string> exclude_ids;
};

struct BudgetReport {
  size_t budget = 0;
  size_t total_tokens = 0;
  size_t documents = 0;
  bool truncated_last = false;
  size_t contamination_removed = 0;
  size_t domain_excluded = 0;

  Json ToJson() const;
};

// Takes documents in order until the budget is reached; the last document
// is cut at a sentence boundary so the total never exceeds the budget.
// Throws ValidationError stating the shortfall when the pool is too small.
std::vector<CorpusDoc> TakeBudget(std::vector<CorpusDoc> pool, size_t budget, const Tokenizer& tokenizer,
                                  const nlp::SentenceSplitter& splitter, BudgetReport* report);

// Transfer corpus C_T. kind none yields an empty corpus.
std::vector<CorpusDoc> BuildTransferCorpus(TransferKind kind, const TransferSources& sources, size_t budget,
                                           uint64_t seed, const Tokenizer& tokenizer, BudgetReport* report = nullptr);

// Document ids referenced by evaluation artifacts: dataset.jsonl records
// (source.doc_id), interlingual manifests (paired_doc_id) and plain
// {"doc_id"} lines. Paired partners are added when `corpus` is given.
std::set<std::string> LoadEvalDocIds(const std::vector<std::filesystem::path>& paths, const Corpus* corpus = nullptr);

struct MixManifestRow {
  std::string doc_id;
  std::string source;
  std::string kind;
  size_t token_count = 0;
  size_t offset = 0;
};

struct MixResult {
  std::vector<CorpusDoc> docs;  // shuffled
  std::vector<MixManifestRow> manifest;
  size_t knowledge_tokens = 0;
  size_t transfer_tokens = 0;
  size_t total_tokens = 0;
};

// Concatenates C_K and C_T and shuffles at document level under `seed`.
// Throws ValidationError when C_K is empty or ids repeat.
MixResult MixCorpus(std::vector<CorpusDoc> knowledge, std::vector<CorpusDoc> transfer, uint64_t seed);

// Writes <stem>.txt and <stem>.manifest.csv.
void WriteMix(const std::filesystem::path& corpus_path, const std::filesystem::path& manifest_path,
              const MixResult& mix);

// Reads a mixed corpus back: one unescaped document per line.
std::vector<std::string> ReadMixedCorpus(const std::filesystem::path& path);

// --- end-to-end recipe ----------------------------------------------------

// {"knowledge_corpus": path, "transfer_kind": "none"|..., "token_budget_each": n,
//  "seed": n, "instructions": {"kinds": [...], "qa_pairs": bool},
//  "sources": {"jparacrawl": path, "aspec": path, "medical_corpus": path, "medical_lang": "ja"},
//  "eval_manifests": [paths], "diagnosis_annotations": path}
struct RecipeSpec {
  std::filesystem::path knowledge_corpus;
  TransferKind transfer_kind = TransferKind::kNone;
  size_t token_budget_each = 0;
  uint64_t seed = 0;
  std::vector<std::string> instruction_kinds;
  bool qa_pairs = false;
  std::filesystem::path jparacrawl;
  std::filesystem::path aspec;
  std::filesystem::path medical_corpus;
  std::string medical_lang = "ja";
  std::vector<std::filesystem::path> eval_manifests;
  std::filesystem::path diagnosis_annotations;

  // Relative paths resolve against `base_dir`.
  static RecipeSpec FromJson(const Json& j, const std::filesystem::path& base_dir = {});
  void Validate() const;
  Json ToJson() const;
};

struct RecipeContext {
  const Tokenizer* tokenizer = nullptr;
  nlp::NlpAdapters nlp;
  Gateway* gateway = nullptr;  // needed for qa_pairs
  std::string generator;
  const PromptLibrary* prompts = nullptr;
};

struct RecipeResult {
  MixResult mix;
  BudgetReport knowledge;
  BudgetReport transfer;
  MineReport mining;
  size_t qa_records = 0;
  size_t qa_shortfall = 0;
  Json ToJson() const;  // report without the documents
};

// Builds C_K (documents + mined instructions + QA pairs, budgeted), C_T
// (contamination filtered against the evaluation manifests, budgeted) and
// their mix. C_K is the knowledge source itself and is not filtered. Writes corpus.txt,
// manifest.csv and recipe_report.json under out_dir.
RecipeResult RunRecipe(const RecipeSpec& spec, const RecipeContext& ctx, const std::filesystem::path& out_dir);

}  // namespace clozebench

#endif  // CLOZEBENCH_RECIPES_H_
