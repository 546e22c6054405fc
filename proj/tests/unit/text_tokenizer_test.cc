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

#include <gtest/gtest.h>

#include "clozebench/error.h"
#include "clozebench/jsonl.h"
#include "clozebench/rng.h"
#include "clozebench/text.h"
#include "clozebench/tokenizer.h"

namespace clozebench {
namespace {

TEST(Text, CodepointOffsets) {
  const std::string s = "a肺b";
  EXPECT_EQ(text::CodepointLength(s), 3u);
  EXPECT_EQ(text::ByteOffsetOfCodepoint(s, 2), 4u);
  EXPECT_EQ(text::CodepointIndexOfByte(s, 4), 2u);
  EXPECT_EQ(text::ScriptOf(U'肺'), text::Script::kHan);
  EXPECT_EQ(text::ScriptOf(U'は'), text::Script::kHiragana);
  EXPECT_EQ(text::ScriptOf(U'ア'), text::Script::kKatakana);
  EXPECT_EQ(text::ScriptOf(U'7'), text::Script::kDigit);
}

TEST(Text, EscapeLineRoundTrips) {
  for (std::string s : {"plain", "two\nlines", "tab\there", "back\\slash\r\n"}) {
    const std::string e = text::EscapeLine(s);
    EXPECT_EQ(e.find('\n'), std::string::npos);
    EXPECT_EQ(text::UnescapeLine(e), s);
  }
}

TEST(Text, SmallHelpers) {
  EXPECT_EQ(text::Trim("  x y \n"), "x y");
  EXPECT_EQ(text::CountOccurrences("[BLANK] and [BLANK]", "[BLANK]"), 2u);
  EXPECT_EQ(text::ReplaceAll("a-b-c", "-", "+"), "a+b+c");
  EXPECT_EQ(text::ToLowerAscii("EGFR Gene"), "egfr gene");
}

TEST(Jsonl, CanonicalDumpSortsKeys) {
  EXPECT_EQ(CanonicalDump(Json::parse(R"({"b":1,"a":{"d":2,"c":3}})")), R"({"a":{"c":3,"d":2},"b":1})");
  EXPECT_EQ(CsvRow({"a", "b,c", "d\"e"}), "a,\"b,c\",\"d\"\"e\"\n");
}

TEST(Rng, DeriveSeedIsStableAndKeyed) {
  EXPECT_EQ(DeriveSeed(7, "x"), DeriveSeed(7, "x"));
  EXPECT_NE(DeriveSeed(7, "x"), DeriveSeed(7, "y"));
  EXPECT_NE(DeriveSeed(7, "x"), DeriveSeed(8, "x"));
  Rng rng(1);
  const auto s = rng.SampleWithoutReplacement(10, 4);
  EXPECT_EQ(std::set<size_t>(s.begin(), s.end()).size(), 4u);
}

TEST(Tokenizer, GreedyLongestMatch) {
  const auto tok = Tokenizer::FromPieces({"<unk>", "a", "b", "ab", "abc", "▁c"});
  EXPECT_EQ(tok.Encode("abcab"), (std::vector<int32_t>{4, 3}));
  EXPECT_EQ(tok.Encode("ab c"), (std::vector<int32_t>{3, 5}));
  EXPECT_EQ(tok.Encode("xa"), (std::vector<int32_t>{0, 1}));
  EXPECT_EQ(tok.CountTokens(""), 0u);
}

TEST(Tokenizer, MultiCodepointPiecesWithoutSingleCharacters) {
  const auto tok = Tokenizer::FromPieces({"<unk>", "EGFR", "発現", "する"});
  EXPECT_EQ(tok.Encode("EGFR発現する"), (std::vector<int32_t>{1, 2, 3}));
  EXPECT_EQ(tok.Encode("EGF"), (std::vector<int32_t>{0, 0, 0}));
}

TEST(Tokenizer, OffsetsAndInverse) {
  const auto tok = Tokenizer::Builtin();
  const std::string s = "EGFR mutations in 肺癌 patients.";
  const auto enc = tok.Tokenize(s);
  EXPECT_EQ(Tokenizer::Detokenize(enc.tokens), s);
  size_t cursor = 0;
  for (const auto& t : enc.tokens) {
    ASSERT_TRUE(t.offset);
    EXPECT_EQ(t.offset->first, cursor);
    EXPECT_EQ(s.substr(t.offset->first, t.offset->second - t.offset->first), t.surface);
    cursor = t.offset->second;
  }
  EXPECT_EQ(tok.Decode(tok.Encode(s)), tok.Normalize(s));
}

TEST(Tokenizer, UnknownAndSpecials) {
  const auto tok = Tokenizer::FromPieces({"<s>", "<unk>", "a"});
  EXPECT_EQ(tok.unk_id(), 1);
  EXPECT_TRUE(tok.IsSpecial(0));
  EXPECT_EQ(tok.regular_ids(), (std::vector<int32_t>{2}));
  EXPECT_EQ(tok.Decode(std::vector<int32_t>{2, 1}), "a\xEF\xBF\xBD");
  EXPECT_THROW(Tokenizer::FromPieces({"a"}), ValidationError);
  EXPECT_THROW(tok.Decode(std::vector<int32_t>{9}), ValidationError);
}

TEST(Tokenizer, VocabTextIgnoresScores) {
  const auto tok = Tokenizer::FromVocabText("<unk>\t0\nx\t-1.5\ny\t-2\n");
  EXPECT_EQ(tok.vocab_size(), 3u);
  EXPECT_EQ(tok.Encode("yx"), (std::vector<int32_t>{2, 1}));
  EXPECT_NE(tok.Fingerprint(), Tokenizer::Builtin().Fingerprint());
}

}  // namespace
}  // namespace clozebench
