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

#include <algorithm>

#include "clozebench/embedded.h"
#include "clozebench/error.h"
#include "clozebench/nlp.h"
#include "clozebench/text.h"

namespace clozebench::nlp {
namespace {

using text::Script;

bool IsPunctuationMark(char32_t cp) {
  switch (cp) {
    case '.': case ',': case ';': case ':': case '!': case '?': case '(': case ')':
    case '[': case ']': case '{': case '}': case '"': case '\'': case '-': case '/':
    case U'。': case U'、': case U'「': case U'」': case U'『': case U'』': case U'（':
    case U'）': case U'・': case U'！': case U'？': case U'，': case U'．': case U'：':
    case U'；': case U'【': case U'】': case U'“': case U'”': case U'‘': case U'’':
    case U'—': case U'–':
      return true;
    default:
      return false;
  }
}

// Script class used for run segmentation. Latin letters and the prolonged
// sound mark stay attached to their runs.
int RunClass(char32_t cp) {
  if (cp == U'ー') return static_cast<int>(Script::kKatakana);
  return static_cast<int>(text::ScriptOf(cp));
}

struct Run {
  size_t begin;
  size_t end;
  Script script;
};

std::vector<Run> SegmentRuns(std::string_view s) {
  std::vector<Run> runs;
  for (const auto& cp : text::Codepoints(s)) {
    const Script sc = cp.cp == U'ー' ? Script::kKatakana : text::ScriptOf(cp.cp);
    if (sc == Script::kSpace) continue;
    const bool single = sc == Script::kPunct || sc == Script::kOther;
    if (!single && !runs.empty() && runs.back().end == cp.begin &&
        static_cast<int>(runs.back().script) == RunClass(cp.cp)) {
      runs.back().end = cp.end;
    } else {
      runs.push_back({cp.begin, cp.end, sc});
    }
  }
  return runs;
}

}  // namespace

bool IsValidPosTag(std::string_view tag) {
  return std::find(std::begin(kPosTags), std::end(kPosTags), tag) != std::end(kPosTags);
}

bool IsContentTag(std::string_view tag) {
  return tag == "NOUN" || tag == "PROPN" || tag == "VERB" || tag == "ADJ";
}

RuleWordTagger::RuleWordTagger() : RuleWordTagger(FromTsv(EmbeddedFile("nlp/pos_lexicon.tsv"))) {}

RuleWordTagger::RuleWordTagger(std::map<std::string, std::string> lexicon)
    : lexicon_(std::move(lexicon)) {
  for (const auto& [surface, tag] : lexicon_) {
    if (!IsValidPosTag(tag)) throw ValidationError("POS lexicon: unknown tag " + tag);
  }
}

RuleWordTagger RuleWordTagger::FromTsv(std::string_view contents) {
  std::map<std::string, std::string> lex;
  for (const auto& line : text::SplitLines(contents)) {
    if (line.empty() || line[0] == '#') continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos) throw ValidationError("POS lexicon line needs a tab: " + line);
    lex[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return RuleWordTagger(std::move(lex));
}

std::string RuleWordTagger::TagSurface(std::string_view surface_in) const {
  const std::string_view surface = text::Trim(surface_in);
  if (surface.empty()) return "X";
  if (auto it = lexicon_.find(std::string(surface)); it != lexicon_.end()) return it->second;
  if (auto it = lexicon_.find(text::ToLowerAscii(surface)); it != lexicon_.end()) return it->second;

  bool all_digit = true, all_punct = true, all_sym = true, any_upper = false, all_upper = true;
  bool any_digit = false;
  Script first = Script::kOther;
  bool mixed = false;
  const auto cps = text::Codepoints(surface);
  for (size_t i = 0; i < cps.size(); ++i) {
    const char32_t cp = cps[i].cp;
    const Script sc = cp == U'ー' ? Script::kKatakana : text::ScriptOf(cp);
    if (i == 0) first = sc;
    else if (sc != first) mixed = true;
    const bool digitish = sc == Script::kDigit || ((cp == '.' || cp == ',' || cp == '%') && i > 0);
    all_digit = all_digit && digitish;
    any_digit = any_digit || sc == Script::kDigit;
    all_punct = all_punct && IsPunctuationMark(cp);
    all_sym = all_sym && (sc == Script::kPunct || sc == Script::kOther);
    if (sc == Script::kLatin) {
      const bool up = cp >= 'A' && cp <= 'Z';
      any_upper = any_upper || up;
      all_upper = all_upper && (up || (cp >= '0' && cp <= '9'));
    }
  }
  if (all_digit && any_digit) return "NUM";
  if (all_punct) return "PUNCT";
  if (all_sym) return "SYM";
  if (mixed) return first == Script::kLatin ? "PROPN" : "NOUN";
  switch (first) {
    case Script::kDigit: return "NUM";
    case Script::kKatakana:
    case Script::kHan: return "NOUN";
    case Script::kLatin:
      if (any_upper && all_upper && cps.size() > 1) return "PROPN";
      return "NOUN";
    default: return "X";
  }
}

TagResult RuleWordTagger::TagWords(std::string_view s, std::string_view /*lang*/) const {
  TagResult result;
  result.fallback = true;
  const auto runs = SegmentRuns(s);
  for (size_t r = 0; r < runs.size(); ++r) {
    const Run& run = runs[r];
    if (run.script == Script::kHiragana) {
      // Greedy longest lexicon match inside hiragana runs (particles,
      // auxiliaries); unmatched stretches become single X words.
      size_t pos = run.begin;
      size_t pending = std::string::npos;
      auto flush_pending = [&](size_t end) {
        if (pending == std::string::npos) return;
        result.tokens.push_back({std::string(s.substr(pending, end - pending)), std::nullopt,
                                 std::string("X"), std::make_pair(pending, end)});
        pending = std::string::npos;
      };
      while (pos < run.end) {
        size_t best = 0;
        std::string best_tag;
        for (size_t end = run.end; end > pos; --end) {
          if (end < run.end && (static_cast<unsigned char>(s[end]) & 0xC0) == 0x80) continue;
          auto it = lexicon_.find(std::string(s.substr(pos, end - pos)));
          if (it != lexicon_.end()) {
            best = end;
            best_tag = it->second;
            break;
          }
        }
        if (best) {
          flush_pending(pos);
          result.tokens.push_back({std::string(s.substr(pos, best - pos)), std::nullopt, best_tag,
                                   std::make_pair(pos, best)});
          pos = best;
        } else {
          if (pending == std::string::npos) pending = pos;
          pos = text::DecodeAt(s, pos).end;
        }
      }
      flush_pending(run.end);
      continue;
    }
    const std::string surface(s.substr(run.begin, run.end - run.begin));
    std::string tag = TagSurface(surface);
    // A single kanji directly followed by kana inflection is a verb stem (示した).
    if (run.script == Script::kHan && lexicon_.find(surface) == lexicon_.end() &&
        text::CodepointLength(surface) == 1 && r + 1 < runs.size() &&
        runs[r + 1].begin == run.end && runs[r + 1].script == Script::kHiragana)
      tag = "VERB";
    result.tokens.push_back({surface, std::nullopt, tag, std::make_pair(run.begin, run.end)});
  }
  return result;
}

TagResult TagPos(std::span<const Token> tokens, std::string_view s, std::string_view lang,
                 const WordTagger& tagger) {
  TagResult result;
  result.tokens.assign(tokens.begin(), tokens.end());
  TagResult words;
  try {
    words = tagger.TagWords(s, lang);
  } catch (const BackendError& e) {
    words.failed = true;
    words.warning = e.what();
  }
  result.fallback = words.fallback;
  if (words.failed) {
    for (auto& t : result.tokens) t.pos = "X";
    result.failed = true;
    result.fallback = true;
    result.warning = words.warning.empty() ? "tagger failed" : words.warning;
    return result;
  }
  for (auto& t : result.tokens) {
    t.pos = "X";
    if (!t.offset) continue;
    size_t probe = t.offset->first;
    while (probe < t.offset->second) {
      const auto cp = text::DecodeAt(s, probe);
      if (!text::IsSpace(cp.cp)) break;
      probe = cp.end;
    }
    if (probe >= t.offset->second) continue;
    for (const auto& w : words.tokens) {
      if (!w.offset) continue;
      if (w.offset->first <= probe && probe < w.offset->second) {
        t.pos = w.pos && IsValidPosTag(*w.pos) ? *w.pos : "X";
        break;
      }
    }
  }
  return result;
}

StopWords StopWords::Builtin() {
  StopWords sw;
  sw.Add("en", EmbeddedFile("nlp/stopwords.en.txt"));
  sw.Add("ja", EmbeddedFile("nlp/stopwords.ja.txt"));
  return sw;
}

void StopWords::Add(std::string_view lang, std::string_view contents) {
  auto& set = words_[NormalizeLangCode(lang)];
  for (const auto& line : text::SplitLines(contents)) {
    const auto w = text::Trim(line);
    if (!w.empty() && w[0] != '#') set.insert(text::ToLowerAscii(w));
  }
}

bool StopWords::Contains(std::string_view lang, std::string_view word) const {
  auto it = words_.find(NormalizeLangCode(lang));
  if (it == words_.end()) return false;
  return it->second.count(text::ToLowerAscii(text::Trim(word))) > 0;
}

}  // namespace clozebench::nlp
