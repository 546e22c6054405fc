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

#include <array>

#include "clozebench/nlp.h"
#include "clozebench/text.h"

namespace clozebench::nlp {
namespace {

constexpr std::array<std::string_view, 14> kAbbreviations = {
    "e.g", "i.e", "al", "fig", "figs", "vs", "dr", "approx", "cf",
    "eq", "ref", "refs", "resp", "ca"};

bool IsCjkTerminal(char32_t cp) {
  return cp == U'。' || cp == U'！' || cp == U'？' || cp == 0xFF0E;
}

bool IsLatinTerminal(char32_t cp) { return cp == '.' || cp == '!' || cp == '?'; }

bool IsCloser(char32_t cp) {
  return cp == ')' || cp == '"' || cp == '\'' || cp == U'」' || cp == U'』' || cp == U'）' ||
         cp == U'”' || cp == U'’';
}

// Lower-cased word immediately before byte offset `end` (exclusive).
std::string WordBefore(std::string_view s, size_t end) {
  size_t b = end;
  while (b > 0) {
    const char c = s[b - 1];
    if (c == ' ' || c == '\t' || c == '\n' || c == '(') break;
    --b;
  }
  return text::ToLowerAscii(s.substr(b, end - b));
}

}  // namespace

SplitResult RuleSentenceSplitter::Split(std::string_view s, std::string_view /*lang*/) const {
  SplitResult result;
  result.fallback = true;
  const auto cps = text::Codepoints(s);
  size_t sent_start = 0;
  auto flush = [&](size_t end) {
    const auto piece = text::Trim(s.substr(sent_start, end - sent_start));
    if (!piece.empty()) result.sentences.emplace_back(piece);
    sent_start = end;
  };
  for (size_t i = 0; i < cps.size(); ++i) {
    const char32_t cp = cps[i].cp;
    if (IsCjkTerminal(cp)) {
      size_t j = i + 1;
      while (j < cps.size() && IsCloser(cps[j].cp)) ++j;
      flush(j < cps.size() ? cps[j].begin : s.size());
      i = j - 1;
      continue;
    }
    if (!IsLatinTerminal(cp)) continue;
    size_t j = i + 1;
    while (j < cps.size() && (IsLatinTerminal(cps[j].cp) || IsCloser(cps[j].cp))) ++j;
    if (j < cps.size() && !text::IsSpace(cps[j].cp)) continue;
    if (cp == '.') {
      std::string word = WordBefore(s, cps[i].begin);
      while (!word.empty() && (word.back() == '.')) word.pop_back();
      bool abbrev = false;
      for (auto a : kAbbreviations) abbrev = abbrev || word == a;
      if (abbrev) continue;
      size_t k = j;
      while (k < cps.size() && text::IsSpace(cps[k].cp)) ++k;
      if (k < cps.size() && cps[k].cp >= 'a' && cps[k].cp <= 'z') continue;
    }
    flush(j < cps.size() ? cps[j].begin : s.size());
    i = j - 1;
  }
  flush(s.size());
  return result;
}

}  // namespace clozebench::nlp
