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

#include "clozebench/jsonl.h"
#include "clozebench/nlp.h"
#include "test_util.h"

namespace clozebench::nlp {
namespace {

TEST(SentenceSplitter, English) {
  RuleSentenceSplitter s;
  const auto r = s.Split("EGFR is mutated in e.g. lung cancer. Dr. Sato agreed. Is it common?", "en");
  EXPECT_EQ(r.sentences, (std::vector<std::string>{"EGFR is mutated in e.g. lung cancer.", "Dr. Sato agreed.",
                                                   "Is it common?"}));
}

TEST(SentenceSplitter, Japanese) {
  RuleSentenceSplitter s;
  const auto r = s.Split("肺癌は多い。治療は難しい！本当か？", "ja");
  EXPECT_EQ(r.sentences, (std::vector<std::string>{"肺癌は多い。", "治療は難しい！", "本当か？"}));
}

TEST(Lexicon, LongestMatchWithLabels) {
  auto ner = LexiconRecognizer::FromTsv("lung cancer\tDisease\t\ncancer\tDisease\t\nEGFR\tGene\ten\n");
  const auto r = ner.Recognize("EGFR drives lung cancer.", "en");
  ASSERT_EQ(r.entities.size(), 2u);
  EXPECT_EQ(r.entities[0], (Entity{"EGFR", "Gene", 0, 4}));
  EXPECT_EQ(r.entities[1], (Entity{"lung cancer", "Disease", 12, 23}));
  EXPECT_TRUE(ner.Recognize("EGFR", "ja").entities.empty());
}

TEST(WordTagger, OffsetsCoverWords) {
  RuleWordTagger tagger;
  const std::string s = "Insulin lowers glucose.";
  const auto r = tagger.TagWords(s, "en");
  ASSERT_FALSE(r.tokens.empty());
  for (const auto& t : r.tokens) {
    ASSERT_TRUE(t.offset && t.pos);
    EXPECT_EQ(s.substr(t.offset->first, t.offset->second - t.offset->first), t.surface);
    EXPECT_TRUE(IsValidPosTag(*t.pos));
  }
  EXPECT_EQ(*r.tokens.back().pos, "PUNCT");
}

TEST(WordTagger, JapaneseScriptRuns) {
  RuleWordTagger tagger;
  const auto r = tagger.TagWords("糖尿病の患者", "ja");
  std::vector<std::string> words;
  for (const auto& t : r.tokens) words.push_back(t.surface);
  EXPECT_EQ(words, (std::vector<std::string>{"糖尿病", "の", "患者"}));
  EXPECT_EQ(*r.tokens[1].pos, "ADP");
  EXPECT_TRUE(IsContentTag(*r.tokens[0].pos));
}

TEST(Romanizer, Kana) {
  KanaRomanizer r;
  EXPECT_EQ(r.Romanize("とうきょう").text, "toukyou");
  EXPECT_EQ(r.Romanize("カルシウム").text, "karushiumu");
  EXPECT_EQ(r.Romanize("がっこう").text, "gakkou");
  const auto k = r.Romanize("肺がん");
  EXPECT_TRUE(k.has_unconverted);
}

TEST(WordNet, MiniBilingualLookup) {
  const auto wn = WordNet::FromFile(test::DataPath("mini_wordnet.tsv"));
  EXPECT_EQ(wn.LookupSynonyms("糖尿病", "ja", "en"), (std::vector<std::string>{"diabetes", "diabetes mellitus"}));
  EXPECT_EQ(wn.LookupSynonyms("diabetes", "en", "en"), (std::vector<std::string>{"diabetes mellitus"}));
  EXPECT_TRUE(wn.LookupSynonyms("unknown", "en", "ja").empty());
}

TEST(WordNet, ShippedSample) {
  const auto wn = WordNet::Builtin();
  EXPECT_GT(wn.size(), 0u);
  EXPECT_FALSE(wn.LookupSynonyms("diabetes", "en", "ja").empty());
}

TEST(StopWords, Builtin) {
  const auto sw = StopWords::Builtin();
  EXPECT_TRUE(sw.Contains("en", "the"));
  EXPECT_FALSE(sw.Contains("en", "insulin"));
  EXPECT_TRUE(sw.Contains("ja", "こと"));
}

TEST(Lang, Normalize) {
  EXPECT_EQ(NormalizeLangCode("EN"), "en");
  EXPECT_EQ(NormalizeLangCode("ja-JP"), "ja");
}

}  // namespace
}  // namespace clozebench::nlp
