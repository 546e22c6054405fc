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

#include "clozebench/report.h"

#include "clozebench/error.h"
#include "clozebench/rng.h"

namespace clozebench {
namespace {

const std::vector<std::pair<std::string, ReportKind>>& KindNames() {
  static const std::vector<std::pair<std::string, ReportKind>> kNames = {
      {"accuracy", ReportKind::kAccuracy},         {"loss", ReportKind::kLoss},
      {"ratio", ReportKind::kRatio},               {"transitions", ReportKind::kTransitions},
      {"patterns", ReportKind::kPatterns},         {"attribution", ReportKind::kAttribution},
      {"perturbation", ReportKind::kPerturbation}};
  return kNames;
}

Json Spec(ReportKind kind, std::string title, std::string chart, std::string x, std::string y, std::string series,
          Json facet = nullptr) {
  return {{"kind", ReportKindName(kind)},
          {"title", std::move(title)},
          {"chart", std::move(chart)},
          {"data", ReportKindName(kind) + ".csv"},
          {"x", std::move(x)},
          {"y", std::move(y)},
          {"series", std::move(series)},
          {"facet", std::move(facet)}};
}

// Minimal RFC 4180 reader for the CSVs this project writes.
std::vector<std::vector<std::string>> ParseCsv(const std::string& s) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (quoted) {
      if (c == '"' && i + 1 < s.size() && s[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
      continue;
    }
    any = true;
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < s.size() && s[i + 1] == '\n') ++i;
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      field += c;
    }
  }
  if (quoted) throw ValidationError("unterminated quoted CSV field");
  if (any || !field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

// Checks the header and column count, then re-emits canonically.
std::string Revalidate(const std::string& csv, const std::vector<std::string>& header, const char* what) {
  const auto rows = ParseCsv(csv);
  if (rows.empty() || rows[0] != header) {
    std::string want;
    for (const auto& h : header) want += (want.empty() ? "" : ",") + h;
    throw ValidationError(std::string(what) + " CSV must start with header '" + want + "'");
  }
  std::string out;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != header.size()) {
      throw ValidationError(std::string(what) + " CSV row " + std::to_string(i + 1) + " has " +
                            std::to_string(rows[i].size()) + " fields, expected " + std::to_string(header.size()));
    }
    out += CsvRow(rows[i]);
  }
  return out;
}

std::string FilterSeries(const std::vector<SeriesRow>& rows, std::initializer_list<std::string_view> metrics) {
  std::vector<SeriesRow> keep;
  for (const auto& r : rows)
    for (auto m : metrics)
      if (r.metric == m) keep.push_back(r);
  return SeriesCsv(keep);
}

}  // namespace

RunMeta RunMeta::For(const Json& config, Json seeds) {
  RunMeta m;
  m.config_hash = HexDigest(Fnv1a64(CanonicalDump(config)));
  m.seeds = std::move(seeds);
  return m;
}

Json RunMeta::ToJson() const { return {{"config_hash", config_hash}, {"seeds", seeds}, {"version", version}}; }

void WriteSidecar(const std::filesystem::path& artifact, const RunMeta& meta) {
  WriteFile(artifact.string() + ".meta.json", meta.ToJson().dump(2) + "\n");
}

void WriteArtifact(const std::filesystem::path& path, std::string_view contents, const RunMeta& meta) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  WriteFile(path, contents);
  WriteSidecar(path, meta);
}

std::string ReportKindName(ReportKind k) {
  for (const auto& [n, v] : KindNames())
    if (v == k) return n;
  return "";
}

ReportKind ParseReportKind(const std::string& name) {
  for (const auto& [n, v] : KindNames())
    if (n == name) return v;
  std::string known;
  for (const auto& [n, _] : KindNames()) known += (known.empty() ? "" : ", ") + n;
  throw ValidationError("unknown report kind '" + name + "' (expected one of " + known + ")");
}

ReportArtifact AccuracyReport(const std::vector<InstanceResult>& results) {
  return {AccuracyCsv(ComputeAccuracy(results, CheckpointOrder(results))),
          Spec(ReportKind::kAccuracy, "Accuracy by checkpoint", "line", "checkpoint_id", "accuracy", "lang", "mode")};
}

ReportArtifact LossReport(const TrajectorySet& set) {
  return {FilterSeries(LossSeries(set), {"correct_loss", "distractor_loss"}),
          Spec(ReportKind::kLoss, "Correct and distractor loss", "line", "checkpoint", "value", "metric", "group")};
}

ReportArtifact RatioReport(const TrajectorySet& set) {
  return {FilterSeries(LossSeries(set), {"loss_ratio"}),
          Spec(ReportKind::kRatio, "Loss ratio", "line", "checkpoint", "value", "group")};
}

ReportArtifact TransitionReport(const TrajectorySet& set, size_t pre, size_t post) {
  std::string csv = CsvRow({"group", "state", "count"});
  for (const auto& [g, c] : CountTransitions(set, pre, post)) {
    csv += CsvRow({g, "Retained", std::to_string(c.retained)});
    csv += CsvRow({g, "Acquired", std::to_string(c.acquired)});
    csv += CsvRow({g, "Forgotten", std::to_string(c.forgotten)});
    csv += CsvRow({g, "Unacquired", std::to_string(c.unacquired)});
  }
  const std::string title = "Transitions " + set.checkpoints.at(pre) + " -> " + set.checkpoints.at(post);
  return {csv, Spec(ReportKind::kTransitions, title, "bar", "state", "count", "group")};
}

ReportArtifact PatternReport(const TrajectorySet& set) {
  std::string csv = CsvRow({"group", "pattern", "count"});
  for (const auto& [g, c] : CountPatterns(set)) {
    csv += CsvRow({g, PatternName(Pattern::kStableGain), std::to_string(c.stable_gain)});
    csv += CsvRow({g, PatternName(Pattern::kLossShielding), std::to_string(c.loss_shielding)});
    csv += CsvRow({g, PatternName(Pattern::kUnstable), std::to_string(c.unstable)});
    csv += CsvRow({g, "Insufficient", std::to_string(c.insufficient)});
  }
  return {csv, Spec(ReportKind::kPatterns, "Learning patterns", "bar", "pattern", "count", "group")};
}

ReportArtifact AttributionReport(const std::string& series_csv) {
  return {Revalidate(series_csv, {"checkpoint", "metric", "group", "value"}, "attribution"),
          Spec(ReportKind::kAttribution, "Mean token loss by group", "line", "checkpoint", "value", "group")};
}

ReportArtifact PerturbationReport(const std::string& track_csv) {
  return {Revalidate(track_csv, {"variant", "checkpoint", "mean_nll", "scored", "unscored"}, "track"),
          Spec(ReportKind::kPerturbation, "Loss on perturbed variants", "line", "checkpoint", "mean_nll", "variant")};
}

void WriteReport(const std::filesystem::path& dir, ReportKind kind, const ReportArtifact& artifact,
                 const RunMeta& meta) {
  const std::string name = ReportKindName(kind);
  WriteArtifact(dir / (name + ".csv"), artifact.csv, meta);
  WriteArtifact(dir / (name + ".plot.json"), artifact.spec.dump(2) + "\n", meta);
}

}  // namespace clozebench
