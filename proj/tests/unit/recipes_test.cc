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

#include <set>

#include "clozebench/error.h"
#include "clozebench/mock_backends.h"
#include "clozebench/prompts.h"
#include "clozebench/recipes.h"
#include "clozebench/tokenizer.h"
#include "test_util.h"

namespace clozebench {
namespace {

Corpus Fixture() {
  Corpus c;
  c.Ingest(test::SourceDataPath("fixtures/corpus.jsonl"));
  return c;
}

TEST(Templates, TenKindsTenVariants) {
  const auto t = InstructionTemplates::Builtin();
  ASSERT_EQ(t.kinds().size(), 10u);
  for (const auto& k : t.kinds()) EXPECT_EQ(t.Get(k).variants.size(), 10u) << k;
  EXPECT_THROW(t.Get("poetry"), ValidationError);
}

TEST(Mining, ResolvesFieldsAndReportsSkips) {
  const auto corpus = Fixture();
  const auto& doc = corpus.Get("en-001");
  nlp::RuleSentenceSplitter splitter;
  MineContext ctx{&corpus, &splitter, nullptr};
  MineReport report;
  const auto recs = MineInstructions(doc, {"summarization", "translation", "conclusion", "diagnosis"},
                                     InstructionTemplates::Builtin(), ctx, 9, &report);
  std::set<std::string> kinds;
  for (const auto& r : recs) kinds.insert(r.kind);
  EXPECT_TRUE(kinds.count("summarization"));
  EXPECT_TRUE(kinds.count("translation"));
  EXPECT_TRUE(kinds.count("conclusion"));
  EXPECT_TRUE(report.skipped.count("diagnosis"));  // no annotations supplied
  for (const auto& r : recs) {
    if (r.kind == "summarization") EXPECT_NE(r.text.find(doc.title), std::string::npos);
    if (r.kind == "translation") EXPECT_NE(r.text.find(corpus.Get("ja-001").abstract), std::string::npos);
  }
  // Deterministic variant choice.
  const auto again = MineInstructions(doc, {"summarization"}, InstructionTemplates::Builtin(), ctx, 9);
  EXPECT_EQ(again[0].text, recs[0].text);
}

TEST(Qa, CannedPairsAndMalformedEntries) {
  Gateway gw;
  gw.AddGenerator("g", std::make_shared<CannedGenerator>(Json{
                           {"queue", {R"({"pairs": [{"question": "What lowers glucose?", "answer": "Insulin"},
                                                    {"question": ""}, {"question": "Where?", "answer": "Pancreas"}]})"}}}));
  const auto r = GenerateQaPairs(Fixture().Get("en-001"), gw, "g", PromptLibrary::Builtin(), 5);
  EXPECT_EQ(r.pairs.size(), 2u);
  EXPECT_EQ(r.malformed, 1u);
  EXPECT_EQ(r.shortfall, 3u);
}

TEST(Budget, StopsAtBudgetAndTruncatesOnSentences) {
  const auto tok = Tokenizer::Builtin();
  nlp::RuleSentenceSplitter splitter;
  std::vector<CorpusDoc> pool;
  for (int i = 0; i < 10; ++i)
    pool.push_back({"d" + std::to_string(i), "knowledge", "document",
                    "Insulin lowers glucose. The pancreas secretes insulin. Diabetes is common.", 0});
  BudgetReport report;
  const size_t per_doc = tok.CountTokens(pool[0].text);
  const auto out = TakeBudget(pool, per_doc * 3 + per_doc / 2, tok, splitter, &report);
  size_t total = 0;
  for (const auto& d : out) {
    EXPECT_EQ(d.token_count, tok.CountTokens(d.text));
    total += d.token_count;
  }
  EXPECT_EQ(total, report.total_tokens);
  EXPECT_LE(total, per_doc * 3 + per_doc / 2);
  EXPECT_GT(total, per_doc * 3);
  EXPECT_TRUE(report.truncated_last);
}

TEST(EvalIds, PartnersAreAdded) {
  test::TempDir dir;
  WriteJsonLines(dir / "m.jsonl", {Json{{"source", {{"doc_id", "en-001"}, {"sentence_index", 0}}}}});
  const auto corpus = Fixture();
  EXPECT_EQ(LoadEvalDocIds({dir / "m.jsonl"}, &corpus), (std::set<std::string>{"en-001", "ja-001"}));
  EXPECT_EQ(LoadEvalDocIds({dir / "m.jsonl"}), (std::set<std::string>{"en-001"}));
}

TEST(Transfer, MonolingualExcludesEvaluationDocuments) {
  const auto corpus = Fixture();
  const auto tok = Tokenizer::Builtin();
  nlp::RuleSentenceSplitter splitter;
  TransferSources src;
  src.medical = &corpus;
  src.splitter = &splitter;
  src.exclude_ids = {"ja-001", "ja-002"};
  BudgetReport report;
  const auto docs = BuildTransferCorpus(TransferKind::kMedicalMonolingual, src, 40, 3, tok, &report);
  EXPECT_FALSE(docs.empty());
  for (const auto& d : docs) {
    EXPECT_NE(d.id, "ja-001");
    EXPECT_NE(d.id, "ja-002");
    EXPECT_EQ(corpus.Get(d.id).lang, "ja");
  }
  EXPECT_EQ(report.contamination_removed, 2u);
}

TEST(Transfer, ShortSourceAndUnknownKind) {
  const auto corpus = Fixture();
  nlp::RuleSentenceSplitter splitter;
  TransferSources src;
  src.medical = &corpus;
  src.splitter = &splitter;
  EXPECT_THROW(BuildTransferCorpus(TransferKind::kMedicalMonolingual, src, 1000000, 3, Tokenizer::Builtin()),
               ValidationError);
  EXPECT_THROW(ParseTransferKind("pirate"), ValidationError);
}

TEST(Mix, ManifestMatchesWrittenCorpus) {
  test::TempDir dir;
  const auto tok = Tokenizer::Builtin();
  std::vector<CorpusDoc> k = {{"k1", "knowledge", "document", "Insulin.\nLine two.", 0}, {"k2", "knowledge", "qa", "Q? A.", 0}};
  std::vector<CorpusDoc> t = {{"t1", "transfer", "medical_monolingual", "インスリン。", 0}};
  for (auto* v : {&k, &t})
    for (auto& d : *v) d.token_count = tok.CountTokens(d.text);
  const auto mix = MixCorpus(k, t, 1);
  WriteMix(dir / "corpus.txt", dir / "manifest.csv", mix);
  const auto lines = ReadMixedCorpus(dir / "corpus.txt");
  ASSERT_EQ(lines.size(), 3u);
  size_t sum = 0;
  for (size_t i = 0; i < lines.size(); ++i) {
    EXPECT_EQ(lines[i], mix.docs[i].text);  // newlines survive the line framing
    sum += tok.CountTokens(lines[i]);
  }
  EXPECT_EQ(sum, mix.total_tokens);
  EXPECT_EQ(mix.knowledge_tokens + mix.transfer_tokens, mix.total_tokens);
}

TEST(Recipe, SpecValidation) {
  EXPECT_THROW(RecipeSpec::FromJson(Json::parse(R"({"token_budget_each": 5})")), ValidationError);
  EXPECT_THROW(RecipeSpec::FromJson(Json::parse(R"({"knowledge_corpus": "k.jsonl", "token_budget_each": 0})")),
               ValidationError);
  EXPECT_THROW(RecipeSpec::FromJson(Json::parse(R"({"knowledge_corpus": "k.jsonl", "token_budget_each": 5})"), "/nope"),
               ValidationError);
  test::TempDir dir;
  WriteFile(dir / "k.jsonl", "");
  const auto s = RecipeSpec::FromJson(Json::parse(R"({"knowledge_corpus": "k.jsonl", "token_budget_each": 5})"), dir.path());
  EXPECT_EQ(s.knowledge_corpus, dir / "k.jsonl");
}

}  // namespace
}  // namespace clozebench
