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

#include "clozebench/error.h"
#include "clozebench/jsonl.h"
#include "clozebench/nlp.h"
#include "clozebench/text.h"

namespace clozebench::nlp {
namespace {

bool IsWordChar(char32_t cp) {
  const auto s = text::ScriptOf(cp);
  return s == text::Script::kLatin || s == text::Script::kDigit;
}

std::string FoldedFirst(std::string_view s) {
  if (s.empty()) return {};
  const auto cp = text::DecodeAt(s, 0);
  return text::ToLowerAscii(s.substr(0, cp.end));
}

bool MatchesFolded(std::string_view text, size_t pos, std::string_view surface) {
  if (pos + surface.size() > text.size()) return false;
  for (size_t i = 0; i < surface.size(); ++i) {
    char a = text[pos + i], b = surface[i];
    if (a >= 'A' && a <= 'Z') a = static_cast<char>(a - 'A' + 'a');
    if (b >= 'A' && b <= 'Z') b = static_cast<char>(b - 'A' + 'a');
    if (a != b) return false;
  }
  return true;
}

}  // namespace

LexiconRecognizer::LexiconRecognizer(std::vector<Entry> entries) : entries_(std::move(entries)) {
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].surface.empty()) continue;
    entries_[i].lang = entries_[i].lang.empty() ? "" : NormalizeLangCode(entries_[i].lang);
    by_first_[FoldedFirst(entries_[i].surface)].push_back(i);
  }
  for (auto& [key, idx] : by_first_) {
    std::stable_sort(idx.begin(), idx.end(), [this](size_t a, size_t b) {
      return entries_[a].surface.size() > entries_[b].surface.size();
    });
  }
}

LexiconRecognizer LexiconRecognizer::FromTsv(std::string_view contents) {
  std::vector<Entry> entries;
  for (const auto& line : text::SplitLines(contents)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    size_t start = 0;
    while (true) {
      const size_t tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (cols.size() < 2) throw ValidationError("lexicon line needs surface<TAB>label: " + line);
    entries.push_back({cols[0], cols[1], cols.size() > 2 ? cols[2] : ""});
  }
  return LexiconRecognizer(std::move(entries));
}

LexiconRecognizer LexiconRecognizer::FromFile(const std::string& path) {
  return FromTsv(ReadFile(path));
}

EntityResult LexiconRecognizer::Recognize(std::string_view text_in, std::string_view lang) const {
  EntityResult result;
  const std::string norm_lang = NormalizeLangCode(lang);
  size_t pos = 0;
  char32_t prev = 0;
  while (pos < text_in.size()) {
    const auto cp = text::DecodeAt(text_in, pos);
    bool matched = false;
    auto it = by_first_.find(text::ToLowerAscii(text_in.substr(pos, cp.end - pos)));
    if (it != by_first_.end() && !(IsWordChar(cp.cp) && IsWordChar(prev))) {
      for (size_t idx : it->second) {
        const Entry& e = entries_[idx];
        if (!e.lang.empty() && !norm_lang.empty() && e.lang != norm_lang) continue;
        if (!MatchesFolded(text_in, pos, e.surface)) continue;
        const size_t end = pos + e.surface.size();
        // Right boundary check for entries ending in a word character.
        size_t last = end - 1;
        while (last > pos && (static_cast<unsigned char>(text_in[last]) & 0xC0) == 0x80) --last;
        if (end < text_in.size() && IsWordChar(text::DecodeAt(text_in, last).cp) &&
            IsWordChar(text::DecodeAt(text_in, end).cp))
          continue;
        result.entities.push_back({std::string(text_in.substr(pos, e.surface.size())), e.label, pos, end});
        prev = text::DecodeAt(text_in, last).cp;
        pos = end;
        matched = true;
        break;
      }
    }
    if (!matched) {
      prev = cp.cp;
      pos = cp.end;
    }
  }
  return result;
}

std::string NormalizeLangCode(std::string_view code) {
  std::string c = text::ToLowerAscii(text::Trim(code));
  // Region and script subtags do not change the language group.
  if (const size_t dash = c.find_first_of("-_"); dash != std::string::npos && dash > 0) c.resize(dash);
  if (c == "jpn" || c == "jp" || c == "ja") return "ja";
  if (c == "eng" || c == "en") return "en";
  return c;
}

}  // namespace clozebench::nlp
