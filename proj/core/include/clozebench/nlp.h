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

// NLP capability interfaces. Every capability has a deterministic built-in
// implementation (lexicon NER, rule splitter, rule tagger, kana romanizer)
// and a remote implementation speaking the NLP service wire protocol
// (nlp_client.h). Results produced by a fallback carry `fallback = true`.

#ifndef CLOZEBENCH_NLP_H_
#define CLOZEBENCH_NLP_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace clozebench::nlp {

// Entity span in UTF-8 byte offsets of the analysed text, [start, end).
struct Entity {
  std::string surface;
  std::string label;
  size_t start = 0;
  size_t end = 0;

  bool operator==(const Entity&) const = default;
};

struct Token {
  std::string surface;
  std::optional<int32_t> id;
  std::optional<std::string> pos;
  // Byte span in the source text.
  std::optional<std::pair<size_t, size_t>> offset;

  bool operator==(const Token&) const = default;
};

// Closed UPOS-style tag set.
inline constexpr std::string_view kPosTags[] = {
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X"};

bool IsValidPosTag(std::string_view tag);

// Tags eligible for synonym substitution: common/proper nouns, verbal-noun
// and adjectival-noun stems, general verbs.
bool IsContentTag(std::string_view tag);

struct EntityResult {
  std::vector<Entity> entities;
  bool fallback = false;
  std::string warning;
};

struct SplitResult {
  std::vector<std::string> sentences;
  bool fallback = false;
  std::string warning;
};

struct TagResult {
  std::vector<Token> tokens;  // word-level tokens with pos and offset
  bool fallback = false;
  bool failed = false;
  std::string warning;
};

struct RomanizeResult {
  std::string text;
  bool fallback = false;
  // Kanji (or other non-kana script) was passed through unconverted.
  bool has_unconverted = false;
  std::string warning;
};

class EntityRecognizer {
 public:
  virtual ~EntityRecognizer() = default;
  virtual EntityResult Recognize(std::string_view text, std::string_view lang) const = 0;
};

class SentenceSplitter {
 public:
  virtual ~SentenceSplitter() = default;
  virtual SplitResult Split(std::string_view text, std::string_view lang) const = 0;
};

// Word segmentation plus part-of-speech tagging (morphological analysis).
class WordTagger {
 public:
  virtual ~WordTagger() = default;
  virtual TagResult TagWords(std::string_view text, std::string_view lang) const = 0;
};

class Romanizer {
 public:
  virtual ~Romanizer() = default;
  virtual RomanizeResult Romanize(std::string_view text) const = 0;
};

// ---------------------------------------------------------------------------
// Built-in implementations.

// Longest-match dictionary NER. Lexicon lines: surface<TAB>label[<TAB>lang].
// Latin entries match case-insensitively and only on word boundaries.
class LexiconRecognizer : public EntityRecognizer {
 public:
  struct Entry {
    std::string surface;
    std::string label;
    std::string lang;  // empty: any language
  };

  explicit LexiconRecognizer(std::vector<Entry> entries);
  static LexiconRecognizer FromTsv(std::string_view contents);
  static LexiconRecognizer FromFile(const std::string& path);

  EntityResult Recognize(std::string_view text, std::string_view lang) const override;

  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
  // Folded first codepoint -> entry indexes, longest surface first.
  std::map<std::string, std::vector<size_t>> by_first_;
};

// Splits after terminal punctuation: {. ! ?} followed by whitespace or end
// (skipping common abbreviations and decimals) and {。 ！ ？} unconditionally.
class RuleSentenceSplitter : public SentenceSplitter {
 public:
  SplitResult Split(std::string_view text, std::string_view lang) const override;
};

// Script-run segmentation with lexicon lookup and character-class rules.
class RuleWordTagger : public WordTagger {
 public:
  RuleWordTagger();  // uses the shipped POS lexicon
  explicit RuleWordTagger(std::map<std::string, std::string> lexicon);
  static RuleWordTagger FromTsv(std::string_view contents);

  TagResult TagWords(std::string_view text, std::string_view lang) const override;

  // Tag for a standalone surface string.
  std::string TagSurface(std::string_view surface) const;

 private:
  std::map<std::string, std::string> lexicon_;
};

// Hepburn kana table. Kanji are passed through and flagged.
class KanaRomanizer : public Romanizer {
 public:
  RomanizeResult Romanize(std::string_view text) const override;
};

// Tags model tokens using a word tagger over `text`: each token receives the
// tag of the word containing its first non-space byte. Whitespace-only
// tokens and tokens outside every word get X. On tagger failure every token
// is tagged X and the result is flagged.
TagResult TagPos(std::span<const Token> tokens, std::string_view text, std::string_view lang,
                 const WordTagger& tagger);

// Stop-word lists, one word per line, keyed by language.
class StopWords {
 public:
  StopWords() = default;
  static StopWords Builtin();
  void Add(std::string_view lang, std::string_view contents);
  bool Contains(std::string_view lang, std::string_view word) const;

 private:
  std::map<std::string, std::set<std::string>, std::less<>> words_;
};

// Japanese-WordNet style synonym index. Input lines:
//   synset-id<TAB>lemma<TAB>lang
// Three-letter language codes (jpn, eng) are normalized to ja, en. Lines
// starting with '#' are ignored.
class WordNet {
 public:
  static WordNet FromTsv(std::string_view contents);
  static WordNet FromFile(const std::string& path);
  // The bilingual sample shipped in data/nlp/wordnet_sample.tsv.
  static WordNet Builtin();

  // Lemmas in `target_lang` sharing a synset with (lemma, source_lang),
  // excluding the lemma itself; sorted and de-duplicated.
  std::vector<std::string> LookupSynonyms(std::string_view lemma, std::string_view source_lang,
                                          std::string_view target_lang) const;

  size_t size() const { return entry_count_; }

 private:
  // (lemma, lang) -> synsets
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> synsets_of_;
  // synset -> (lemma, lang)
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> members_;
  size_t entry_count_ = 0;
};

std::string NormalizeLangCode(std::string_view code);

}  // namespace clozebench::nlp

#endif  // CLOZEBENCH_NLP_H_
