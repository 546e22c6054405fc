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

#include <sstream>

#include "cli.h"
#include "clozebench/adaxeval.h"
#include "clozebench/jsonl.h"
#include "clozebench/text.h"
#include "test_util.h"

namespace clozebench {
namespace {

struct CliRun {
  int code;
  std::string out, err;
};

CliRun RunCli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::Run(args, out, err);
  return {code, out.str(), err.str()};
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(RunCli({}).code, cli::kValidation);
  EXPECT_EQ(RunCli({"frobnicate"}).code, cli::kValidation);
  EXPECT_EQ(RunCli({"generate", "--corpus", "fixtures", "--backends", "mock"}).code, cli::kValidation);  // no seed
  EXPECT_EQ(RunCli({"generate", "--corpus", "fixtures", "--seed", "x"}).code, cli::kValidation);
  EXPECT_EQ(RunCli({"eval", "--dataset", "/nonexistent/dataset.jsonl"}).code, cli::kValidation);
  EXPECT_EQ(RunCli({"report", "--kind", "pie"}).code, cli::kValidation);
  EXPECT_EQ(RunCli({"--version"}).code, cli::kOk);
}

TEST(Cli, GenerateEvalDynamicsReport) {
  test::TempDir dir;
  const auto gen = (dir / "gen").string(), ev = (dir / "eval").string(), dyn = (dir / "dyn").string(),
             rep = (dir / "rep").string();
  auto g = RunCli({"generate", "--corpus", "fixtures", "--backends", "mock", "--seed", "7", "--out", gen});
  ASSERT_EQ(g.code, cli::kOk) << g.err;
  const auto n = ReadDataset(dir / "gen" / "dataset.jsonl").size();
  ASSERT_GT(n, 0u);
  EXPECT_TRUE(std::filesystem::exists(dir / "gen" / "provenance.json"));

  auto e = RunCli({"eval", "--dataset", gen + "/dataset.jsonl", "--backends", "mock", "--checkpoints", "mock", "--mode",
                "cloze", "--out", ev});
  ASSERT_EQ(e.code, cli::kOk) << e.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "eval" / "accuracy.csv"));

  auto d = RunCli({"dynamics", "--results", ev + "/results.jsonl", "--out", dyn});
  ASSERT_EQ(d.code, cli::kOk) << d.err;
  for (const char* f : {"series.csv", "transitions.csv", "patterns.csv"})
    EXPECT_TRUE(std::filesystem::exists(dir / "dyn" / f)) << f;

  auto r = RunCli({"report", "--kind", "transitions", "--results", ev + "/results.jsonl", "--out", rep});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  std::istringstream in(ReadFile(dir / "rep" / "transitions.csv"));
  std::string line;
  size_t total = 0;
  std::getline(in, line);
  while (std::getline(in, line))
    if (line.rfind("all,", 0) == 0) total += std::stoul(line.substr(line.rfind(',') + 1));
  EXPECT_EQ(total, n);
  EXPECT_TRUE(std::filesystem::exists(dir / "rep" / "transitions.plot.json.meta.json"));
}

TEST(Cli, InterlingualNeedsLanguages) {
  test::TempDir dir;
  const auto gen = (dir / "gen").string();
  ASSERT_EQ(RunCli({"generate", "--corpus", "fixtures", "--backends", "mock", "--seed", "3", "--out", gen}).code, cli::kOk);
  EXPECT_EQ(RunCli({"eval", "--dataset", gen + "/dataset.jsonl", "--backends", "mock", "--checkpoints", "mock", "--mode",
                 "interlingual", "--out", (dir / "e").string()})
                .code,
            cli::kValidation);
  const auto ok = RunCli({"eval", "--dataset", gen + "/dataset.jsonl", "--backends", "mock", "--checkpoints", "mock",
                       "--mode", "interlingual", "--languages", "ja", "--manifest", gen + "/interlingual_manifest.jsonl",
                       "--out", (dir / "e").string()});
  EXPECT_EQ(ok.code, cli::kOk) << ok.err;
}

TEST(Cli, PerturbAndTrack) {
  test::TempDir dir;
  const auto pert = (dir / "p").string();
  auto p = RunCli({"perturb", "--corpus", "fixtures", "--seed", "5", "--spec", "mask:8", "--spec", "reorder:8@2", "--out",
                pert});
  ASSERT_EQ(p.code, cli::kOk) << p.err;
  ASSERT_TRUE(std::filesystem::exists(dir / "p" / "perturbed-mask-8.jsonl"));
  auto t = RunCli({"track", "--corpus", "fixtures", "--backends", "mock", "--checkpoints", "mock", "--variant",
                pert + "/perturbed-mask-8.jsonl", "--variant", pert + "/perturbed-reorder-8@2.jsonl", "--out",
                (dir / "t").string()});
  ASSERT_EQ(t.code, cli::kOk) << t.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "t" / "track.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "t" / "onsets.csv"));
}

TEST(Cli, RecipeWritesMixAndManifest) {
  test::TempDir dir;
  // The transfer source must not share ids with the knowledge corpus.
  std::string medical;
  for (const auto& line : text::SplitLines(ReadFile(test::SourceDataPath("fixtures/corpus.jsonl"))))
    if (!line.empty()) medical += text::ReplaceAll(line, R"("id": ")", R"("id": "med-)") + "\n";
  WriteFile(dir / "medical.jsonl", medical);
  WriteFile(dir / "recipe.json", R"({"knowledge_corpus": ")" + test::SourceDataPath("fixtures/corpus.jsonl") +
                                     R"(", "transfer_kind": "medical_monolingual", "token_budget_each": 300,
      "sources": {"medical_corpus": "medical.jsonl"}})");
  auto r = RunCli({"recipe", "--recipe", (dir / "recipe.json").string(), "--seed", "2", "--out", (dir / "out").string()});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  for (const char* f : {"corpus.txt", "manifest.csv", "recipe_report.json", "corpus.txt.meta.json"})
    EXPECT_TRUE(std::filesystem::exists(dir / "out" / f)) << f;
}

}  // namespace
}  // namespace clozebench
