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

#include "cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <optional>
#include <ostream>
#include <set>

#include "clozebench/adaxeval.h"
#include "clozebench/corpus.h"
#include "clozebench/dynamics.h"
#include "clozebench/embedded.h"
#include "clozebench/error.h"
#include "clozebench/gateway.h"
#include "clozebench/jsonl.h"
#include "clozebench/mc_eval.h"
#include "clozebench/nlp_client.h"
#include "clozebench/perturb.h"
#include "clozebench/prompts.h"
#include "clozebench/recipes.h"
#include "clozebench/registry.h"
#include "clozebench/report.h"
#include "clozebench/tokenizer.h"

namespace clozebench::cli {
namespace fs = std::filesystem;
namespace {

constexpr std::string_view kFixtureCorpus = "fixtures";

// Effective configuration of one run: the --config file with command-line
// overrides applied. Its canonical JSON (minus "out") is what the sidecar
// hash covers.
struct RunConfig {
  std::vector<std::string> corpus;  // paths, or "fixtures"
  std::string backends = "mock";
  std::string checkpoints = "mock";
  std::string tokenizer = "builtin";
  std::string prompts_dir;
  nlp::NlpConfig nlp;
  std::string wordnet;  // empty: shipped sample
  std::optional<uint64_t> seed;
  std::optional<double> threshold;
  std::string mode = "cloze";
  std::vector<std::string> specs;
  std::optional<size_t> budget;
  std::map<std::string, bool> stages;
  std::string out;

  static RunConfig FromJson(const Json& j);
  Json ToJson() const;
  bool Stage(const std::string& name) const {
    auto it = stages.find(name);
    return it == stages.end() || it->second;
  }
};

RunConfig RunConfig::FromJson(const Json& j) {
  RunConfig c;
  try {
    if (j.contains("corpus")) {
      if (j["corpus"].is_string()) c.corpus = {j["corpus"].get<std::string>()};
      else c.corpus = j["corpus"].get<std::vector<std::string>>();
    }
    c.backends = j.value("backends", c.backends);
    c.checkpoints = j.value("checkpoints", c.checkpoints);
    c.tokenizer = j.value("tokenizer", c.tokenizer);
    c.prompts_dir = j.value("prompts_dir", "");
    if (j.contains("nlp")) {
      const Json& n = j["nlp"];
      c.nlp.service_url = n.value("service_url", "");
      c.nlp.lexicon_path = n.value("lexicon", "");
      c.nlp.pos_lexicon_path = n.value("pos_lexicon", "");
    }
    c.wordnet = j.value("wordnet", "");
    if (j.contains("seed")) c.seed = j["seed"].get<uint64_t>();
    if (j.contains("threshold")) c.threshold = j["threshold"].get<double>();
    c.mode = j.value("mode", c.mode);
    if (j.contains("spec")) {
      if (j["spec"].is_string()) c.specs = {j["spec"].get<std::string>()};
      else c.specs = j["spec"].get<std::vector<std::string>>();
    }
    if (j.contains("budget")) c.budget = j["budget"].get<size_t>();
    c.stages = j.value("stages", std::map<std::string, bool>{});
    c.out = j.value("out", "");
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return c;
}

Json RunConfig::ToJson() const {
  Json j = {{"corpus", corpus},           {"backends", backends},
            {"checkpoints", checkpoints}, {"tokenizer", tokenizer},
            {"prompts_dir", prompts_dir}, {"wordnet", wordnet},
            {"mode", mode},               {"spec", specs},
            {"stages", stages},
            {"nlp",
             {{"service_url", nlp.service_url},
              {"lexicon", nlp.lexicon_path},
              {"pos_lexicon", nlp.pos_lexicon_path}}}};
  j["seed"] = seed ? Json(*seed) : Json(nullptr);
  j["threshold"] = threshold ? Json(*threshold) : Json(nullptr);
  j["budget"] = budget ? Json(*budget) : Json(nullptr);
  return j;
}

void RequireFile(const std::string& path, const char* what) {
  if (path.empty()) throw ValidationError(std::string(what) + " is required");
  if (!fs::exists(path)) throw ValidationError(std::string(what) + " not found: " + path);
}

void RequireRegistry(const std::string& spec, const char* what) {
  if (spec != "mock") RequireFile(spec, what);
}

uint64_t RequireSeed(const RunConfig& c, const char* stage) {
  if (!c.seed) throw ValidationError(std::string(stage) + " needs --seed (or \"seed\" in the config)");
  return *c.seed;
}

fs::path RequireOut(const RunConfig& c) {
  if (c.out.empty()) throw ValidationError("--out is required");
  fs::create_directories(c.out);
  return c.out;
}

Corpus LoadCorpus(const std::vector<std::string>& specs) {
  if (specs.empty()) throw ValidationError("--corpus is required");
  Corpus corpus;
  for (const auto& s : specs) {
    if (s == kFixtureCorpus) {
      std::vector<Document> docs;
      const std::string_view body = EmbeddedFile("fixtures/corpus.jsonl");
      size_t start = 0;
      while (start < body.size()) {
        size_t end = body.find('\n', start);
        if (end == std::string_view::npos) end = body.size();
        const std::string_view line = body.substr(start, end - start);
        if (!line.empty()) docs.push_back(Document::FromJson(Json::parse(line)));
        start = end + 1;
      }
      corpus.Add(std::move(docs));
    } else {
      RequireFile(s, "corpus");
      corpus.Ingest(s);
    }
  }
  return corpus;
}

PromptLibrary LoadPrompts(const RunConfig& c) {
  return c.prompts_dir.empty() ? PromptLibrary::Builtin() : PromptLibrary::WithOverrides(c.prompts_dir);
}

struct Backends {
  Gateway gateway;
  BackendRegistry registry;
};

std::unique_ptr<Backends> LoadBackends(const RunConfig& c, const Tokenizer& tok) {
  RequireRegistry(c.backends, "backend registry");
  auto b = std::make_unique<Backends>();
  b->registry = BackendRegistry::Load(c.backends);
  b->registry.Populate(b->gateway, tok.vocab_size());
  return b;
}

Json Seeds(const RunConfig& c) { return {{"seed", c.seed ? Json(*c.seed) : Json(nullptr)}}; }

RunMeta MetaFor(const std::string& command, const RunConfig& c, const Json& extra = Json::object()) {
  Json cfg = c.ToJson();
  cfg["command"] = command;
  cfg["inputs"] = extra;
  return RunMeta::For(cfg, Seeds(c));
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= s.size()) {
    size_t end = s.find(',', start);
    if (end == std::string::npos) end = s.size();
    if (end > start) out.push_back(s.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

// Selects one mode's results; fails when several modes are mixed and none
// was named.
std::vector<InstanceResult> ResultsForMode(std::vector<InstanceResult> results, const std::string& mode, bool explicit_mode) {
  std::set<std::string> modes;
  for (const auto& r : results) modes.insert(r.mode);
  if (!explicit_mode) {
    if (modes.size() > 1) throw ValidationError("results mix several modes; pass --mode");
    return results;
  }
  const std::string name = ModeName(ParseMode(mode));
  std::erase_if(results, [&](const InstanceResult& r) { return r.mode != name; });
  if (results.empty()) throw ValidationError("no results in mode " + mode);
  return results;
}

std::string JoinSentences(const std::vector<std::string>& s, const std::string& lang) {
  const std::string sep = OptionSeparator(lang);
  std::string out;
  for (size_t i = 0; i < s.size(); ++i) out += (i ? sep : "") + s[i];
  return out;
}

// --- subcommands -------------------------------------------------------------

int Ingest(const RunConfig& c, std::ostream& out) {
  const fs::path dir = RequireOut(c);
  const Corpus corpus = LoadCorpus(c.corpus);
  const auto nlp = nlp::MakeNlpAdapters(c.nlp);
  std::vector<Sentence> all, kept;
  Json report = {{"documents", corpus.size()}, {"pairs", corpus.Pairs().size()}, {"warnings", Json::array()}};
  for (const auto& d : corpus.documents()) {
    auto sentences = SplitSentences(d, *nlp.splitter);
    FilterReport fr;
    auto k = FilterFactualCandidates(sentences, d.lang, *nlp.ner, 2, &fr);
    for (auto& w : fr.warnings) report["warnings"].push_back(w);
    all.insert(all.end(), sentences.begin(), sentences.end());
    kept.insert(kept.end(), k.begin(), k.end());
  }
  report["sentences"] = all.size();
  report["candidates"] = kept.size();
  const RunMeta meta = MetaFor("ingest", c);
  corpus.Export(dir / "corpus.jsonl");
  WriteSidecar(dir / "corpus.jsonl", meta);
  WriteSentences(dir / "sentences.jsonl", all);
  WriteSidecar(dir / "sentences.jsonl", meta);
  WriteSentences(dir / "candidates.jsonl", kept);
  WriteSidecar(dir / "candidates.jsonl", meta);
  WriteArtifact(dir / "ingest_report.json", report.dump(2) + "\n", meta);
  out << "ingested " << corpus.size() << " documents, " << all.size() << " sentences, " << kept.size()
      << " entity-bearing candidates\n";
  return kOk;
}

int Generate(const RunConfig& c, std::ostream& out) {
  const uint64_t seed = RequireSeed(c, "generate");
  const fs::path dir = RequireOut(c);
  const Corpus corpus = LoadCorpus(c.corpus);
  const Tokenizer tok = Tokenizer::Load(c.tokenizer);
  auto b = LoadBackends(c, tok);
  GenerateConfig gc;
  gc.judges = b->registry.roles.judges;
  gc.generator = b->registry.roles.generator;
  gc.filter = b->registry.roles.filter;
  gc.seed = seed;
  if (c.threshold) gc.threshold = *c.threshold;
  const auto nlp = nlp::MakeNlpAdapters(c.nlp);
  Pipeline pipeline(b->gateway, LoadPrompts(c), gc);
  const RunMeta meta = MetaFor("generate", c, gc.ToJson());
  BuildResult result;
  try {
    result = BuildDataset(corpus, nlp, pipeline, dir);
  } catch (const RuntimeFailure&) {
    for (const char* f : {"dataset.jsonl", "cloze.jsonl", "paraphrase.jsonl", "interlingual_manifest.jsonl",
                          "stage_counts.csv", "rejections.jsonl"})
      if (fs::exists(dir / f)) WriteSidecar(dir / f, meta);
    throw;
  }
  for (const char* f : {"dataset.jsonl", "cloze.jsonl", "paraphrase.jsonl", "interlingual_manifest.jsonl",
                        "stage_counts.csv", "rejections.jsonl"})
    WriteSidecar(dir / f, meta);
  Json prov = {{"config", gc.ToJson()}, {"prompts", pipeline.Provenance()}};
  WriteArtifact(dir / "provenance.json", prov.dump(2) + "\n", meta);
  for (const auto& w : result.warnings) out << "warning: " << w << "\n";
  out << "generated " << result.instances.size() << " instances (" << result.rejections.size() << " rejections)\n";
  return kOk;
}

int Eval(const RunConfig& c, const std::string& dataset_path, const std::string& manifest,
         const std::string& languages, double max_unscored, std::ostream& out) {
  RequireFile(dataset_path, "--dataset");
  RequireRegistry(c.checkpoints, "checkpoint registry");
  const fs::path dir = RequireOut(c);
  const auto dataset = ReadDataset(dataset_path);
  const Tokenizer tok = Tokenizer::Load(c.tokenizer);
  auto b = LoadBackends(c, tok);
  const auto ckpts = CheckpointRegistry::Load(c.checkpoints);
  EvalOptions opt;
  opt.mode = ParseMode(c.mode);
  opt.max_unscored_fraction = max_unscored;
  for (const auto& l : SplitList(languages)) opt.languages.insert(l);
  if (!manifest.empty()) {
    RequireFile(manifest, "--manifest");
    ReadJsonLines(manifest, [&](const Json& j, size_t) { opt.instance_ids.insert(j.at("instance_id").get<std::string>()); });
  }
  opt.throw_on_failure = false;
  EvalRun run = EvaluateDataset(dataset, ckpts, b->gateway, tok, opt);
  const RunMeta meta = MetaFor("eval", c, {{"dataset", dataset_path}, {"manifest", manifest}, {"languages", languages}});
  // Results are written even when the run exceeds its failure threshold.
  WriteResults(dir / "results.jsonl", run.results);
  WriteSidecar(dir / "results.jsonl", meta);
  WriteArtifact(dir / "accuracy.csv", AccuracyCsv(run.accuracy), meta);
  run.ThrowIfFailed();
  for (const auto& r : run.accuracy)
    if (r.lang == "all") out << r.checkpoint_id << " " << r.mode << " accuracy " << FormatDouble(r.accuracy) << " (n=" << r.n << ")\n";
  return kOk;
}

int Dynamics(const RunConfig& c, const std::string& results_path, bool explicit_mode, std::optional<size_t> pre,
             std::optional<size_t> post, const std::string& grouping, std::ostream& out) {
  const fs::path dir = RequireOut(c);
  const RunMeta meta = MetaFor("dynamics", c, {{"results", results_path}, {"grouping", grouping}});
  if (c.Stage("attribution") && !grouping.empty()) {
    const Corpus corpus = LoadCorpus(c.corpus);
    const Tokenizer tok = Tokenizer::Load(c.tokenizer);
    RequireRegistry(c.checkpoints, "checkpoint registry");
    auto b = LoadBackends(c, tok);
    const auto nlp = nlp::MakeNlpAdapters(c.nlp);
    std::vector<AttributionDoc> docs;
    for (const auto& d : corpus.documents()) docs.push_back({d.id, d.lang, d.abstract});
    auto run = AttributeDocuments(docs, ParseGrouping(grouping), tok, CheckpointRegistry::Load(c.checkpoints),
                                  b->gateway, nlp.tagger.get());
    WriteArtifact(dir / "attribution.csv", SeriesCsv(run.series), meta);
    std::string groups = CsvRow({"group", "token_count"});
    for (const auto& g : run.curves) groups += CsvRow({g.group, std::to_string(g.token_count)});
    WriteArtifact(dir / "attribution_groups.csv", groups, meta);
    for (const auto& w : run.warnings) out << "warning: " << w << "\n";
    out << "attributed " << run.curves.size() << " groups\n";
  }
  if (results_path.empty()) {
    if (grouping.empty()) throw ValidationError("dynamics needs --results and/or --grouping");
    return kOk;
  }
  RequireFile(results_path, "--results");
  const auto results = ResultsForMode(ReadResults(results_path), c.mode, explicit_mode);
  const auto set = BuildTrajectories(results, CheckpointOrder(results));
  if (set.checkpoints.size() < 2) throw ValidationError("dynamics needs results from at least 2 checkpoints");
  const size_t a = pre.value_or(0), z = post.value_or(set.checkpoints.size() - 1);
  if (a >= z || z >= set.checkpoints.size()) throw ValidationError("need 0 <= --pre < --post < checkpoint count");
  if (c.Stage("series")) WriteArtifact(dir / "series.csv", SeriesCsv(LossSeries(set)), meta);
  if (c.Stage("transitions")) {
    std::string csv = CsvRow({"group", "pre", "post", "retained", "acquired", "forgotten", "unacquired", "n"});
    for (const auto& [g, t] : CountTransitions(set, a, z))
      csv += CsvRow({g, set.checkpoints[a], set.checkpoints[z], std::to_string(t.retained), std::to_string(t.acquired),
                     std::to_string(t.forgotten), std::to_string(t.unacquired), std::to_string(t.total())});
    WriteArtifact(dir / "transitions.csv", csv, meta);
  }
  if (c.Stage("patterns")) {
    std::vector<Json> rows;
    for (const auto& t : set.trajectories) {
      const auto losses = t.CorrectLosses();
      const Onset o = DetectOnset(losses);
      Json row = {{"instance_id", t.instance_id}, {"lang", t.lang}, {"onset", o.index}, {"onset_at_end", o.at_end},
                  {"onset_checkpoint", set.checkpoints[o.index]}, {"pattern", nullptr}};
      if (t.points.back().correct) {
        const auto p = ClassifyPattern(t);
        row["pattern"] = p.insufficient ? "Insufficient" : PatternName(p.label);
      }
      rows.push_back(std::move(row));
    }
    WriteJsonLines(dir / "patterns.jsonl", rows);
    WriteSidecar(dir / "patterns.jsonl", meta);
    std::string csv = CsvRow({"group", "stable_gain", "loss_shielding", "unstable", "insufficient"});
    for (const auto& [g, p] : CountPatterns(set))
      csv += CsvRow({g, std::to_string(p.stable_gain), std::to_string(p.loss_shielding), std::to_string(p.unstable),
                     std::to_string(p.insufficient)});
    WriteArtifact(dir / "patterns.csv", csv, meta);
  }
  out << set.trajectories.size() << " trajectories over " << set.checkpoints.size() << " checkpoints ("
      << set.excluded.size() << " excluded)\n";
  return kOk;
}

int Perturb(const RunConfig& c, std::ostream& out) {
  const uint64_t seed = RequireSeed(c, "perturb");
  if (c.specs.empty()) throw ValidationError("perturb needs --spec kind:X[@Y]");
  const fs::path dir = RequireOut(c);
  const Corpus corpus = LoadCorpus(c.corpus);
  const Tokenizer tok = Tokenizer::Load(c.tokenizer);
  const auto nlp = nlp::MakeNlpAdapters(c.nlp);
  std::vector<PerturbSpec> specs;
  for (const auto& s : c.specs) specs.push_back(PerturbSpec::Parse(s, seed));
  std::unique_ptr<Backends> b;
  std::optional<nlp::WordNet> wordnet;
  const nlp::StopWords stop = nlp::StopWords::Builtin();
  const PromptLibrary prompts = LoadPrompts(c);
  for (const auto& spec : specs) {
    if (spec.IsRewriteKind() && !b) b = LoadBackends(c, tok);
    if (spec.IsSynonymKind() && !wordnet) {
      if (!c.wordnet.empty()) RequireFile(c.wordnet, "wordnet");
      wordnet = c.wordnet.empty() ? nlp::WordNet::Builtin() : nlp::WordNet::FromFile(c.wordnet);
    }
  }
  const RunMeta meta = MetaFor("perturb", c);
  for (const auto& spec : specs) {
    std::vector<Json> rows;
    for (const auto& d : corpus.documents()) {
      Json row = {{"id", d.id}, {"lang", d.lang}, {"spec", spec.ToString()}};
      if (spec.IsIdKind()) {
        const auto ids = tok.Encode(d.abstract);
        if (ids.empty()) continue;
        const auto p = PerturbTokens(ids, spec, tok, d.id);
        row["ids"] = p.perturbed;
        row["text"] = tok.Decode(p.perturbed);
        row["report"] = p.report.ToJson();
      } else if (spec.IsSynonymKind()) {
        const auto r = PerturbSynonyms(d.abstract, d.lang, spec, {nlp.tagger.get(), &*wordnet, &stop}, d.id);
        row["text"] = r.text;
        row["report"] = r.report.ToJson();
      } else {
        auto sentences = nlp.splitter->Split(d.abstract, d.lang).sentences;
        if (spec.kind == PerturbKind::kPartial) {
          const auto seg = SplitPartial(sentences, *spec.segment);
          row["text"] = JoinSentences(seg.sentences, d.lang);
          row["report"] = {{"begin", seg.begin}, {"sentences", seg.sentences.size()}, {"noop", seg.empty}};
        } else {
          const auto r = PerturbSentences(sentences, d.lang, spec, b->gateway, b->registry.roles.rewriter, prompts, d.id);
          row["text"] = JoinSentences(r.sentences, d.lang);
          row["report"] = r.ToJson();
        }
      }
      rows.push_back(std::move(row));
    }
    const fs::path path = dir / ("perturbed-" + spec.Suffix() + ".jsonl");
    WriteJsonLines(path, rows);
    WriteSidecar(path, meta);
    out << spec.ToString() << ": " << rows.size() << " sequences -> " << path.string() << "\n";
  }
  return kOk;
}

int Track(const RunConfig& c, const std::vector<std::string>& variants, std::ostream& out) {
  const fs::path dir = RequireOut(c);
  const Corpus corpus = LoadCorpus(c.corpus);
  const Tokenizer tok = Tokenizer::Load(c.tokenizer);
  RequireRegistry(c.checkpoints, "checkpoint registry");
  auto b = LoadBackends(c, tok);
  std::vector<VariantSet> sets(1);
  sets[0].name = "original";
  for (const auto& d : corpus.documents()) {
    auto ids = tok.Encode(d.abstract);
    if (ids.empty()) continue;
    sets[0].sequence_ids.push_back(d.id);
    sets[0].sequences.push_back(std::move(ids));
  }
  for (const auto& v : variants) {
    RequireFile(v, "--variant");
    VariantSet set;
    ReadJsonLines(v, [&](const Json& j, size_t) {
      if (set.name.empty()) set.name = PerturbSpec::Parse(j.at("spec").get<std::string>()).Suffix();
      std::vector<int32_t> ids = j.contains("ids") ? j["ids"].get<std::vector<int32_t>>()
                                                   : tok.Encode(j.at("text").get<std::string>());
      if (ids.empty()) return;
      set.sequence_ids.push_back(j.at("id").get<std::string>());
      set.sequences.push_back(std::move(ids));
    });
    if (set.name.empty()) throw ValidationError(v + ": no perturbed sequences");
    sets.push_back(std::move(set));
  }
  const auto result = TrackPerturbedLoss(sets, CheckpointRegistry::Load(c.checkpoints), b->gateway);
  const RunMeta meta = MetaFor("track", c, {{"variants", variants}});
  WriteArtifact(dir / "track.csv", TrackCsv(result), meta);
  std::string onsets = CsvRow({"variant", "onset_index", "onset_checkpoint", "at_end"});
  for (const auto& o : result.onsets)
    onsets += CsvRow({o.variant, std::to_string(o.onset_index), o.onset_checkpoint, o.at_end ? "true" : "false"});
  WriteArtifact(dir / "onsets.csv", onsets, meta);
  out << "tracked " << sets.size() << " variants\n";
  return kOk;
}

int Recipe(const RunConfig& c, const std::string& recipe_path, std::ostream& out) {
  RequireFile(recipe_path, "--recipe");
  const fs::path dir = RequireOut(c);
  const fs::path rp(recipe_path);
  Json j = ReadJsonFile(rp);
  if (c.seed) j["seed"] = *c.seed;
  if (c.budget) j["token_budget_each"] = *c.budget;
  if (!j.contains("seed")) throw ValidationError("recipe needs a seed (--seed or \"seed\" in the recipe)");
  const RecipeSpec spec = RecipeSpec::FromJson(j, rp.parent_path());
  const Tokenizer tok = Tokenizer::Load(c.tokenizer);
  const PromptLibrary prompts = LoadPrompts(c);
  std::unique_ptr<Backends> b;
  RecipeContext ctx;
  ctx.tokenizer = &tok;
  ctx.nlp = nlp::MakeNlpAdapters(c.nlp);
  ctx.prompts = &prompts;
  if (spec.qa_pairs) {
    b = LoadBackends(c, tok);
    ctx.gateway = &b->gateway;
    ctx.generator = b->registry.roles.generator;
  }
  const auto result = RunRecipe(spec, ctx, dir);
  const RunMeta meta = MetaFor("recipe", c, spec.ToJson());
  for (const char* f : {"corpus.txt", "manifest.csv", "recipe_report.json"}) WriteSidecar(dir / f, meta);
  out << "mixed " << result.mix.docs.size() << " documents, " << result.mix.total_tokens << " tokens ("
      << result.mix.knowledge_tokens << " knowledge + " << result.mix.transfer_tokens << " transfer)\n";
  return kOk;
}

int Report(const RunConfig& c, const std::string& kind_name, const std::string& results_path,
           const std::string& input_path, bool explicit_mode, std::optional<size_t> pre, std::optional<size_t> post,
           std::ostream& out) {
  const ReportKind kind = ParseReportKind(kind_name);
  const fs::path dir = RequireOut(c);
  ReportArtifact art;
  if (kind == ReportKind::kAttribution || kind == ReportKind::kPerturbation) {
    RequireFile(input_path, "--input");
    const std::string csv = ReadFile(input_path);
    art = kind == ReportKind::kAttribution ? AttributionReport(csv) : PerturbationReport(csv);
  } else {
    RequireFile(results_path, "--results");
    auto results = ReadResults(results_path);
    if (kind == ReportKind::kAccuracy) {
      if (explicit_mode) results = ResultsForMode(std::move(results), c.mode, true);
      art = AccuracyReport(results);
    } else {
      results = ResultsForMode(std::move(results), c.mode, explicit_mode);
      const auto set = BuildTrajectories(results, CheckpointOrder(results));
      if (kind == ReportKind::kLoss) art = LossReport(set);
      if (kind == ReportKind::kRatio) art = RatioReport(set);
      if (kind == ReportKind::kPatterns) art = PatternReport(set);
      if (kind == ReportKind::kTransitions) {
        if (set.checkpoints.size() < 2) throw ValidationError("transitions need results from at least 2 checkpoints");
        const size_t a = pre.value_or(0), z = post.value_or(set.checkpoints.size() - 1);
        if (a >= z || z >= set.checkpoints.size()) throw ValidationError("need 0 <= --pre < --post < checkpoint count");
        art = TransitionReport(set, a, z);
      }
    }
  }
  WriteReport(dir, kind, art, MetaFor("report", c, {{"kind", kind_name}, {"results", results_path}, {"input", input_path}}));
  out << "wrote " << (dir / (kind_name + ".csv")).string() << "\n";
  return kOk;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"clozebench: knowledge-probing dataset generation, evaluation and training-dynamics analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  // Shared flags; each subcommand registers the ones it uses.
  std::string config_path, seed_text, threshold_text, budget_text, out_dir, backends, checkpoints, tokenizer, mode,
      nlp_url, wordnet;
  std::vector<std::string> corpus, specs;
  auto common = [&](CLI::App* s, bool with_corpus) {
    s->add_option("--config", config_path, "RunConfig JSON file")->check(CLI::ExistingFile);
    s->add_option("--out", out_dir, "Output directory");
    s->add_option("--tokenizer", tokenizer, "'builtin' or a vocabulary file");
    s->add_option("--nlp-service", nlp_url, "Base URL of the NLP service (built-in adapters otherwise)");
    if (with_corpus) s->add_option("--corpus", corpus, "Corpus JSONL file(s), or 'fixtures'");
  };
  auto models = [&](CLI::App* s) {
    s->add_option("--backends", backends, "Backend registry JSON, or 'mock'");
    s->add_option("--checkpoints", checkpoints, "Checkpoint registry JSON, or 'mock'");
  };

  auto* ingest = app.add_subcommand("ingest", "Validate a corpus, split sentences and keep entity-bearing ones");
  common(ingest, true);

  auto* generate = app.add_subcommand("generate", "Build the evaluation dataset from a corpus");
  common(generate, true);
  models(generate);
  generate->add_option("--seed", seed_text, "Seed");
  generate->add_option("--threshold", threshold_text, "Combined fact-confidence threshold");

  std::string dataset, manifest, languages;
  double max_unscored = 0.01;
  auto* eval = app.add_subcommand("eval", "Score a dataset at every checkpoint");
  common(eval, false);
  models(eval);
  eval->add_option("--dataset", dataset, "dataset.jsonl")->required();
  eval->add_option("--mode", mode, "cloze | paraphrase | interlingual");
  eval->add_option("--manifest", manifest, "interlingual_manifest.jsonl (interlingual mode)");
  eval->add_option("--languages", languages, "Comma-separated query languages");
  eval->add_option("--max-unscored", max_unscored, "Tolerated fraction of unscored instances")->check(CLI::Range(0.0, 1.0));

  std::string results, grouping, input, kind;
  std::optional<size_t> pre, post;
  auto* dynamics = app.add_subcommand("dynamics", "Loss/ratio series, transitions, onsets, patterns, attribution");
  common(dynamics, true);
  models(dynamics);
  dynamics->add_option("--results", results, "results.jsonl from eval");
  dynamics->add_option("--mode", mode, "Mode to analyse when results mix modes");
  dynamics->add_option("--pre", pre, "Index of the earlier checkpoint (default first)");
  dynamics->add_option("--post", post, "Index of the later checkpoint (default last)");
  dynamics->add_option("--grouping", grouping, "Token attribution grouping: language | pos");

  auto* perturb = app.add_subcommand("perturb", "Write perturbed variants of corpus documents");
  common(perturb, true);
  models(perturb);
  perturb->add_option("--seed", seed_text, "Seed");
  perturb->add_option("--spec", specs, "kind:X[@Y] (repeatable)");
  perturb->add_option("--wordnet", wordnet, "WordNet TSV (synset, lemma, lang)");

  std::vector<std::string> variants;
  auto* track = app.add_subcommand("track", "Loss of original and perturbed variants across checkpoints");
  common(track, true);
  models(track);
  track->add_option("--variant", variants, "perturbed-*.jsonl from perturb (repeatable)");

  std::string recipe_path;
  auto* recipe = app.add_subcommand("recipe", "Build and mix the knowledge and transfer corpora");
  common(recipe, false);
  models(recipe);
  recipe->add_option("--recipe", recipe_path, "RecipeSpec JSON")->required();
  recipe->add_option("--seed", seed_text, "Seed (overrides the recipe)");
  recipe->add_option("--budget", budget_text, "Token budget per corpus (overrides the recipe)");

  auto* report = app.add_subcommand("report", "Render plot data (CSV + plot spec)");
  common(report, false);
  report->add_option("--kind", kind, "accuracy | loss | ratio | transitions | patterns | attribution | perturbation")->required();
  report->add_option("--results", results, "results.jsonl (accuracy, loss, ratio, transitions, patterns)");
  report->add_option("--input", input, "attribution.csv or track.csv");
  report->add_option("--mode", mode, "Mode to report when results mix modes");
  report->add_option("--pre", pre, "Transitions: earlier checkpoint index");
  report->add_option("--post", post, "Transitions: later checkpoint index");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kValidation;
  }

  try {
    RunConfig c = config_path.empty() ? RunConfig{} : RunConfig::FromJson(ReadJsonFile(config_path));
    if (!corpus.empty()) c.corpus = corpus;
    if (!backends.empty()) c.backends = backends;
    if (!checkpoints.empty()) c.checkpoints = checkpoints;
    if (!tokenizer.empty()) c.tokenizer = tokenizer;
    if (!nlp_url.empty()) c.nlp.service_url = nlp_url;
    if (!wordnet.empty()) c.wordnet = wordnet;
    if (!out_dir.empty()) c.out = out_dir;
    if (!specs.empty()) c.specs = specs;
    const bool explicit_mode = !mode.empty() || (!config_path.empty() && ReadJsonFile(config_path).contains("mode"));
    if (!mode.empty()) c.mode = mode;
    auto parse_num = [](const std::string& text, const char* flag, auto parse) {
      try {
        size_t used = 0;
        auto v = parse(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
      } catch (const std::logic_error&) {
        throw ValidationError(std::string(flag) + ": not a number: " + text);
      }
    };
    if (!seed_text.empty())
      c.seed = parse_num(seed_text, "--seed", [](const std::string& s, size_t* u) { return std::stoull(s, u); });
    if (!threshold_text.empty())
      c.threshold = parse_num(threshold_text, "--threshold", [](const std::string& s, size_t* u) { return std::stod(s, u); });
    if (!budget_text.empty())
      c.budget = parse_num(budget_text, "--budget", [](const std::string& s, size_t* u) { return std::stoull(s, u); });

    if (*ingest) return Ingest(c, out);
    if (*generate) return Generate(c, out);
    if (*eval) return Eval(c, dataset, manifest, languages, max_unscored, out);
    if (*dynamics) return Dynamics(c, results, explicit_mode, pre, post, grouping, out);
    if (*perturb) return Perturb(c, out);
    if (*track) return Track(c, variants, out);
    if (*recipe) return Recipe(c, recipe_path, out);
    if (*report) return Report(c, kind, results, input, explicit_mode, pre, post, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const CapabilityError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const RuntimeFailure& e) {
    err << "failure: " << e.what() << "\n";
    return kRuntime;
  } catch (const BackendError& e) {
    err << "backend failure: " << e.what() << "\n";
    return kRuntime;
  } catch (const Json::exception& e) {
    err << "error: malformed JSON: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return kRuntime;
  }
  return kValidation;
}

}  // namespace clozebench::cli
