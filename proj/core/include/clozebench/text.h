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

// UTF-8 and Unicode script helpers shared by the NLP fallbacks.

#ifndef CLOZEBENCH_TEXT_H_
#define CLOZEBENCH_TEXT_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace clozebench::text {

enum class Script {
  kLatin,
  kHiragana,
  kKatakana,
  kHan,
  kDigit,
  kPunct,
  kSpace,
  kOther,
};

struct CodepointSpan {
  char32_t cp;
  size_t begin;  // byte offset
  size_t end;    // byte offset, exclusive
};

// Decodes one codepoint at `pos`. Invalid bytes decode to U+FFFD with length 1.
CodepointSpan DecodeAt(std::string_view s, size_t pos);

std::vector<CodepointSpan> Codepoints(std::string_view s);

void AppendUtf8(std::string& out, char32_t cp);
std::string EncodeUtf8(char32_t cp);

size_t CodepointLength(std::string_view s);

// Byte offset of the `cp_index`-th codepoint (size() when past the end).
size_t ByteOffsetOfCodepoint(std::string_view s, size_t cp_index);
size_t CodepointIndexOfByte(std::string_view s, size_t byte_offset);

Script ScriptOf(char32_t cp);

bool IsSpace(char32_t cp);

std::string_view Trim(std::string_view s);
std::string ToLowerAscii(std::string_view s);
bool StartsWith(std::string_view s, std::string_view prefix);
bool EndsWith(std::string_view s, std::string_view suffix);

// Number of non-overlapping occurrences of `needle` in `hay`.
size_t CountOccurrences(std::string_view hay, std::string_view needle);

std::string ReplaceAll(std::string s, std::string_view from, std::string_view to);

std::vector<std::string> SplitLines(std::string_view s);

// Escapes '\\' and newlines so a document fits on one line; Unescape undoes it.
std::string EscapeLine(std::string_view s);
std::string UnescapeLine(std::string_view s);

}  // namespace clozebench::text

#endif  // CLOZEBENCH_TEXT_H_
