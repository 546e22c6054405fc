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
#include "clozebench/report.h"
#include "test_util.h"

namespace clozebench {
namespace {

InstanceResult Point(const std::string& id, const std::string& ckpt, bool correct) {
  InstanceResult r;
  r.instance_id = id;
  r.checkpoint_id = ckpt;
  r.lang = "en";
  r.mode = "cloze";
  r.scored = true;
  r.answer_index = 0;
  for (size_t i = 0; i < 4; ++i) r.scores.push_back({i, i == 0 ? (correct ? 1.0 : 3.0) : 2.0, 1});
  Finalize(r);
  return r;
}

TEST(Meta, HashIsCanonical) {
  const auto a = RunMeta::For(Json::parse(R"({"b":1,"a":2})"), {{"seed", 7}});
  const auto b = RunMeta::For(Json::parse(R"({"a":2,"b":1})"), {{"seed", 7}});
  EXPECT_EQ(a.config_hash, b.config_hash);
  EXPECT_NE(a.config_hash, RunMeta::For(Json::parse(R"({"a":3})"), {}).config_hash);
  EXPECT_EQ(a.ToJson()["version"], std::string(kVersion));
}

TEST(Reports, TransitionsSumToInstances) {
  std::vector<InstanceResult> rs;
  for (int i = 0; i < 6; ++i) {
    rs.push_back(Point("i" + std::to_string(i), "c0", i % 2));
    rs.push_back(Point("i" + std::to_string(i), "c1", i % 3));
  }
  const auto set = BuildTrajectories(rs, CheckpointOrder(rs));
  const auto art = TransitionReport(set, 0, 1);
  size_t total = 0;
  std::istringstream in(art.csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "group,state,count");
  while (std::getline(in, line))
    if (line.rfind("all,", 0) == 0) total += std::stoul(line.substr(line.rfind(',') + 1));
  EXPECT_EQ(total, 6u);
  EXPECT_EQ(art.spec["chart"], "bar");
  EXPECT_EQ(art.spec["data"], "transitions.csv");
}

TEST(Reports, WritesCsvSpecAndSidecars) {
  test::TempDir dir;
  std::vector<InstanceResult> rs = {Point("a", "c0", true), Point("a", "c1", false)};
  WriteReport(dir.path(), ReportKind::kAccuracy, AccuracyReport(rs), RunMeta::For({}, {}));
  for (const char* f : {"accuracy.csv", "accuracy.plot.json", "accuracy.csv.meta.json", "accuracy.plot.json.meta.json"})
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  EXPECT_EQ(ReadJsonFile(dir / "accuracy.plot.json")["kind"], "accuracy");
}

TEST(Reports, PassThroughValidatesHeader) {
  EXPECT_NO_THROW(AttributionReport("checkpoint,metric,group,value\nc0,token_nll,EN,1.5\n"));
  EXPECT_THROW(AttributionReport("a,b\n1,2\n"), ValidationError);
  EXPECT_THROW(PerturbationReport("variant,checkpoint,mean_nll,scored,unscored\nx,c0,1\n"), ValidationError);
  EXPECT_THROW(ParseReportKind("pie"), ValidationError);
  EXPECT_EQ(ReportKindName(ParseReportKind("patterns")), "patterns");
}

}  // namespace
}  // namespace clozebench
