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

// Report artifacts: plot data as CSV plus a small plot-spec JSON that any
// plotting tool can render, and a run-metadata sidecar for every artifact.
//
// Plot spec:
//   {"kind","title","chart":"line"|"bar","data":"<csv file name>",
//    "x","y","series","facet"}
// Sidecar <artifact>.meta.json: {"config_hash","seeds","version"}.

#ifndef CLOZEBENCH_REPORT_H_
#define CLOZEBENCH_REPORT_H_

#include <filesystem>
#include <string>
#include <vector>

#include "clozebench/dynamics.h"
#include "clozebench/jsonl.h"
#include "clozebench/mc_eval.h"

namespace clozebench {

inline constexpr std::string_view kVersion = "0.3.0";

struct RunMeta {
  std::string config_hash;
  Json seeds = Json::object();
  std::string version = std::string(kVersion);

  // Hash of the canonical form of `config`.
  static RunMeta For(const Json& config, Json seeds);
  Json ToJson() const;
};

// Writes <artifact>.meta.json for a file produced elsewhere.
void WriteSidecar(const std::filesystem::path& artifact, const RunMeta& meta);

// Writes `contents` to `path` and the sidecar next to it.
void WriteArtifact(const std::filesystem::path& path, std::string_view contents, const RunMeta& meta);

enum class ReportKind { kAccuracy, kLoss, kRatio, kTransitions, kPatterns, kAttribution, kPerturbation };

std::string ReportKindName(ReportKind k);
ReportKind ParseReportKind(const std::string& name);

struct ReportArtifact {
  std::string csv;
  Json spec;
};

// From an evaluation result store, in checkpoint order.
ReportArtifact AccuracyReport(const std::vector<InstanceResult>& results);
ReportArtifact LossReport(const TrajectorySet& set);
ReportArtifact RatioReport(const TrajectorySet& set);
// Rows (group, state, count); pre/post index into set.checkpoints.
ReportArtifact TransitionReport(const TrajectorySet& set, size_t pre, size_t post);
ReportArtifact PatternReport(const TrajectorySet& set);
// Pass-through of series CSVs written by `dynamics --attribution` and
// `track`, re-validated and given a plot spec.
ReportArtifact AttributionReport(const std::string& series_csv);
ReportArtifact PerturbationReport(const std::string& track_csv);

// Writes <kind>.csv and <kind>.plot.json (each with a sidecar) under dir.
void WriteReport(const std::filesystem::path& dir, ReportKind kind, const ReportArtifact& artifact,
                 const RunMeta& meta);

}  // namespace clozebench

#endif  // CLOZEBENCH_REPORT_H_
