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

// Bilingual document corpora.
//
// Corpus file: UTF-8, one JSON object per line:
//   {"id","lang","pair_id","title","abstract","keywords":[],"fields":[],"sections":{}}
// `pair_id`, `keywords`, `fields` and `sections` are optional.
//
// Sentence store (<corpus>.sentences): one JSON object per line:
//   {"doc_id","index","text","entities":[{"surface","label","start","end"}]}

#ifndef CLOZEBENCH_CORPUS_H_
#define CLOZEBENCH_CORPUS_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "clozebench/jsonl.h"
#include "clozebench/nlp.h"

namespace clozebench {

struct Document {
  std::string id;
  std::string lang;
  std::optional<std::string> pair_id;
  std::string title;
  std::string abstract;
  std::vector<std::string> keywords;
  std::vector<std::string> fields;
  std::map<std::string, std::string> sections;

  Json ToJson() const;
  // Throws ValidationError describing the first schema violation.
  static Document FromJson(const Json& j);

  bool operator==(const Document&) const = default;
};

struct Sentence {
  std::string doc_id;
  size_t index = 0;
  std::string text;
  std::vector<nlp::Entity> entities;

  Json ToJson() const;
  static Sentence FromJson(const Json& j);

  bool operator==(const Sentence&) const = default;
};

struct BilingualPair {
  std::string pair_id;
  std::string doc_x;  // document ids, doc_x.lang != doc_y.lang
  std::string doc_y;
};

inline const std::set<std::string>& DefaultLanguages() {
  static const std::set<std::string> kLangs = {"en", "ja"};
  return kLangs;
}

class Corpus {
 public:
  explicit Corpus(std::set<std::string> languages = DefaultLanguages())
      : languages_(std::move(languages)) {}

  // Ingests a corpus file. When `lang` is set every record must carry it.
  // Errors (ValidationError): malformed record with its line number,
  // duplicate id, unknown language code, pair_id shared by two documents in
  // the same language. A failing file leaves the corpus unchanged.
  size_t Ingest(const std::filesystem::path& path, std::optional<std::string> lang = std::nullopt);

  // Adds already-parsed documents with the same checks as Ingest.
  void Add(std::vector<Document> docs);

  // Canonical JSONL in ingestion order.
  void Export(const std::filesystem::path& path) const;

  const Document* Find(std::string_view id) const;
  const Document& Get(std::string_view id) const;
  const std::vector<Document>& documents() const { return docs_; }
  size_t size() const { return docs_.size(); }
  bool empty() const { return docs_.empty(); }

  std::vector<BilingualPair> Pairs() const;
  // Id of the translation of `doc_id`, when paired.
  std::optional<std::string> PartnerOf(std::string_view doc_id) const;

  const std::set<std::string>& languages() const { return languages_; }

 private:
  std::set<std::string> languages_;
  std::vector<Document> docs_;
  std::map<std::string, size_t, std::less<>> index_;
  // pair_id -> lang -> doc id
  std::map<std::string, std::map<std::string, std::string>> pairs_;
};

// Splits the abstract into sentences. Adapter failures are rethrown as
// BackendError naming the document.
std::vector<Sentence> SplitSentences(const Document& doc, const nlp::SentenceSplitter& splitter);

struct FilterReport {
  std::vector<std::string> warnings;  // one per sentence skipped on NER failure
  size_t ner_fallbacks = 0;
};

// Keeps sentences with at least `min_entities` recognized entities, attaching
// the entities. Order preserved.
std::vector<Sentence> FilterFactualCandidates(const std::vector<Sentence>& sentences,
                                              std::string_view lang,
                                              const nlp::EntityRecognizer& ner,
                                              size_t min_entities = 2,
                                              FilterReport* report = nullptr);

void WriteSentences(const std::filesystem::path& path, const std::vector<Sentence>& sentences);
std::vector<Sentence> ReadSentences(const std::filesystem::path& path);

}  // namespace clozebench

#endif  // CLOZEBENCH_CORPUS_H_
