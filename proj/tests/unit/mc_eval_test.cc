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

#include <cmath>

#include "clozebench/adaxeval.h"
#include "clozebench/error.h"
#include "clozebench/mc_eval.h"
#include "clozebench/mock_backends.h"
#include "clozebench/registry.h"
#include "clozebench/tokenizer.h"
#include "test_util.h"

namespace clozebench {
namespace {

TEST(Argmin, EarliestIndexOnTies) {
  const std::vector<double> l = {2.0, 1.0, 1.0, 3.0};
  const auto a = PredictArgmin(l);
  EXPECT_EQ(a.index, 1u);
  EXPECT_TRUE(a.tie);
  EXPECT_FALSE(PredictArgmin(std::vector<double>{3, 2, 1, 4}).tie);
}

TEST(LossRatio, DefinedOnlyForPositiveFiniteLosses) {
  EXPECT_DOUBLE_EQ(*LossRatio(std::vector<double>{1, 1, 1, 1}, 2), 0.25);
  EXPECT_FALSE(LossRatio(std::vector<double>{0, 1, 1, 1}, 0));
  EXPECT_FALSE(LossRatio(std::vector<double>{NAN, 1, 1, 1}, 0));
  EXPECT_FALSE(LossRatio(std::vector<double>{1, 1, 1, 1}, 4));
}

TEST(Requests, ClozeMovesTrailingSpaceToTarget) {
  const auto tok = Tokenizer::Builtin();
  const auto r = BuildClozeRequest(tok, "Blood pressure is regulated by the [BLANK].", "kidney");
  EXPECT_EQ(r.context_tokens, tok.Encode("Blood pressure is regulated by the"));
  EXPECT_EQ(r.target_tokens, tok.Encode(" kidney."));
  EXPECT_THROW(BuildClozeRequest(tok, "no blank", "x"), ValidationError);
}

TEST(Requests, ParaphraseSeparatorByLanguage) {
  const auto tok = Tokenizer::Builtin();
  EXPECT_EQ(OptionSeparator("en"), " ");
  EXPECT_EQ(OptionSeparator("ja"), "");
  EXPECT_EQ(BuildParaphraseRequest(tok, "Which organ?", "kidney", "en").target_tokens, tok.Encode(" kidney"));
  EXPECT_EQ(BuildParaphraseRequest(tok, "どの臓器か？", "腎臓", "ja").target_tokens, tok.Encode("腎臓"));
}

class FailingFor : public ScoringBackend {
 public:
  explicit FailingFor(std::vector<int32_t> bad) : bad_(std::move(bad)) {}
  ScoreResponse Score(const ScoreRequest& r) override {
    if (r.context_tokens == bad_) throw BackendError("down");
    return ScoreResponse::FromNlls(std::vector<double>(r.target_tokens.size(), 1.0));
  }

 private:
  std::vector<int32_t> bad_;
};

std::vector<EvalInstance> Planted() { return ReadDataset(test::DataPath("planted_defects.jsonl")); }

TEST(Evaluate, ConstantScorerTiesToFirstOption) {
  Gateway gw;
  gw.AddScorer("const", std::make_shared<ConstantScorer>(-1.0));
  const CheckpointRegistry ck{{{"c", "const"}}};
  const auto data = Planted();
  const auto run = EvaluateDataset(data, ck, gw, Tokenizer::Builtin(), {});
  ASSERT_EQ(run.results.size(), data.size());
  size_t first = 0;
  for (const auto& d : data) first += d.answer_index == 0;
  for (const auto& r : run.results) {
    EXPECT_EQ(r.predicted_index, 0u);
    EXPECT_TRUE(r.tie);
    EXPECT_EQ(r.mode, "cloze");
  }
  const auto& all = run.accuracy.back().lang == "all" ? run.accuracy.back() : run.accuracy.front();
  EXPECT_EQ(all.n, data.size());
  EXPECT_DOUBLE_EQ(all.accuracy, static_cast<double>(first) / data.size());
}

TEST(Evaluate, LanguageFilterAndInterlingualManifest) {
  Gateway gw;
  gw.AddScorer("const", std::make_shared<ConstantScorer>());
  const CheckpointRegistry ck{{{"c", "const"}}};
  EvalOptions opt;
  opt.mode = EvalMode::kInterlingual;
  EXPECT_THROW(EvaluateDataset(Planted(), ck, gw, Tokenizer::Builtin(), opt), ValidationError);
  opt.languages = {"ja"};
  opt.instance_ids = {"ja-001:0", "ja-002:1"};
  const auto run = EvaluateDataset(Planted(), ck, gw, Tokenizer::Builtin(), opt);
  ASSERT_EQ(run.results.size(), 2u);
  EXPECT_EQ(run.results[0].instance_id, "ja-001:0");
  EXPECT_EQ(run.results[0].mode, "interlingual");
}

TEST(Evaluate, UnscoredBeyondThresholdFails) {
  const auto tok = Tokenizer::Builtin();
  const auto data = Planted();
  Gateway gw(RetryPolicy{0, std::chrono::milliseconds(1)});
  gw.AddScorer("flaky", std::make_shared<FailingFor>(BuildClozeRequest(tok, data[0].cloze_query, "x").context_tokens));
  const CheckpointRegistry ck{{{"c", "flaky"}}};
  EvalOptions opt;
  opt.throw_on_failure = false;
  const auto run = EvaluateDataset(data, ck, gw, tok, opt);
  EXPECT_FALSE(run.failures.empty());
  EXPECT_FALSE(run.results[0].scored);
  EXPECT_THROW(run.ThrowIfFailed(), RuntimeFailure);
  opt.max_unscored_fraction = 0.5;
  EXPECT_TRUE(EvaluateDataset(data, ck, gw, tok, opt).failures.empty());
}

TEST(Results, JsonRoundTrip) {
  test::TempDir dir;
  Gateway gw;
  gw.AddScorer("b", std::make_shared<BigramScorer>(1, Tokenizer::Builtin().vocab_size()));
  const auto run = EvaluateDataset(Planted(), CheckpointRegistry{{{"c", "b"}}}, gw, Tokenizer::Builtin(), {});
  WriteResults(dir / "r.jsonl", run.results);
  const auto back = ReadResults(dir / "r.jsonl");
  ASSERT_EQ(back.size(), run.results.size());
  for (size_t i = 0; i < back.size(); ++i) EXPECT_EQ(back[i].ToJson(), run.results[i].ToJson());
  EXPECT_EQ(AccuracyCsv(ComputeAccuracy(back, {"c"})), AccuracyCsv(run.accuracy));
}

}  // namespace
}  // namespace clozebench
