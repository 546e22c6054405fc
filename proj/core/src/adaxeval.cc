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

#include "clozebench/adaxeval.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "clozebench/error.h"
#include "clozebench/parallel.h"
#include "clozebench/rng.h"
#include "clozebench/structured.h"
#include "clozebench/text.h"

namespace clozebench {
namespace {

std::string Fold(std::string_view s) { return text::ToLowerAscii(text::Trim(s)); }

std::string Join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

const char* kStageDocuments = "documents";
const char* kStageSentences = "sentences";
const char* kStageEntities = "entity_filter";
const char* kStageFacts = "fact_detection";
const char* kStageCraft = "query_crafting";
const char* kStageDistractors = "distractors";
const char* kStageFilter = "quality_filter";

}  // namespace

// ---------------------------------------------------------------------------
// Types

Json Triple::ToJson() const { return {{"subject", subject}, {"relation", relation}, {"object", object}}; }

Triple Triple::FromJson(const Json& j) {
  return {j.at("subject").get<std::string>(), j.at("relation").get<std::string>(),
          j.at("object").get<std::string>()};
}

std::string Triple::Problem() const {
  if (text::Trim(subject).empty()) return "empty subject";
  if (text::Trim(relation).empty()) return "empty relation";
  if (text::Trim(object).empty()) return "empty object";
  if (Fold(subject) == Fold(object)) return "object identical to subject";
  return {};
}

Json JudgeOutput::ToJson() const {
  Json j = {{"judge", judge}, {"factuality", factuality ? "yes" : "no"}, {"yes_confidence", yes_confidence},
            {"truncated", truncated}, {"reason", reason}, {"failed", failed}};
  j["triple"] = triple ? triple->ToJson() : Json(nullptr);
  if (failed) j["error"] = error;
  return j;
}

Json EvalInstance::ToJson() const {
  return {{"id", id},
          {"lang", lang},
          {"source", {{"doc_id", doc_id}, {"sentence_index", sentence_index}}},
          {"sentence", sentence},
          {"triple", triple.ToJson()},
          {"cloze_query", cloze_query},
          {"paraphrase_query", paraphrase_query},
          {"options", options},
          {"answer_index", answer_index},
          {"provenance", provenance}};
}

EvalInstance EvalInstance::FromJson(const Json& j) {
  EvalInstance e;
  e.id = j.at("id").get<std::string>();
  e.lang = j.at("lang").get<std::string>();
  e.doc_id = j.at("source").at("doc_id").get<std::string>();
  e.sentence_index = j.at("source").at("sentence_index").get<size_t>();
  e.sentence = j.value("sentence", "");
  e.triple = Triple::FromJson(j.at("triple"));
  e.cloze_query = j.at("cloze_query").get<std::string>();
  e.paraphrase_query = j.at("paraphrase_query").get<std::string>();
  e.options = j.at("options").get<std::vector<std::string>>();
  e.answer_index = j.at("answer_index").get<size_t>();
  e.provenance = j.value("provenance", Json::object());
  return e;
}

double OptionLengthRatio(const std::vector<std::string>& options) {
  if (options.empty()) return std::numeric_limits<double>::infinity();
  size_t lo = std::numeric_limits<size_t>::max(), hi = 0;
  for (const auto& o : options) {
    const size_t n = text::CodepointLength(o);
    lo = std::min(lo, n);
    hi = std::max(hi, n);
  }
  if (lo == 0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(hi) / static_cast<double>(lo);
}

std::vector<std::string> InstanceProblems(const EvalInstance& inst, double max_length_ratio) {
  std::vector<std::string> problems;
  if (inst.id.empty()) problems.push_back("empty id");
  if (inst.lang.empty()) problems.push_back("empty lang");
  if (const auto p = inst.triple.Problem(); !p.empty()) problems.push_back("triple: " + p);
  if (text::CountOccurrences(inst.cloze_query, kBlank) != 1) problems.push_back("cloze must contain exactly one [BLANK]");
  if (text::Trim(inst.paraphrase_query).empty()) problems.push_back("empty paraphrase");
  if (inst.paraphrase_query.find(kBlank) != std::string::npos) problems.push_back("paraphrase contains [BLANK]");
  if (inst.options.size() != 4) {
    problems.push_back("expected 4 options");
  } else {
    std::set<std::string> folded;
    for (const auto& o : inst.options) {
      if (text::Trim(o).empty()) problems.push_back("empty option");
      folded.insert(Fold(o));
    }
    if (folded.size() != 4) problems.push_back("options are not pairwise distinct");
    if (OptionLengthRatio(inst.options) > max_length_ratio) problems.push_back("option length ratio exceeds bound");
  }
  if (inst.answer_index >= 4) {
    problems.push_back("answer_index out of range");
  } else if (inst.answer_index < inst.options.size() && inst.options[inst.answer_index] != inst.triple.object) {
    problems.push_back("answer option differs from the triple object");
  }
  return problems;
}

std::vector<EvalInstance> ReadDataset(const std::filesystem::path& path) {
  std::vector<EvalInstance> out;
  ReadJsonLines(path, [&](const Json& j, size_t line) {
    try {
      out.push_back(EvalInstance::FromJson(j));
    } catch (const Json::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
  });
  return out;
}

void WriteDataset(const std::filesystem::path& path, const std::vector<EvalInstance>& instances) {
  std::vector<Json> records;
  records.reserve(instances.size());
  for (const auto& i : instances) records.push_back(i.ToJson());
  WriteJsonLines(path, records);
}

Json Rejection::ToJson() const { return {{"unit_id", unit_id}, {"stage", stage}, {"reason", reason}}; }

void RejectionLedger::Add(std::string unit_id, std::string stage, std::string reason) {
  std::lock_guard lock(mu_);
  items_.push_back({std::move(unit_id), std::move(stage), std::move(reason)});
}

std::vector<Rejection> RejectionLedger::Sorted() const {
  std::lock_guard lock(mu_);
  auto out = items_;
  std::sort(out.begin(), out.end(), [](const Rejection& a, const Rejection& b) {
    return std::tie(a.unit_id, a.stage, a.reason) < std::tie(b.unit_id, b.stage, b.reason);
  });
  return out;
}

size_t RejectionLedger::size() const {
  std::lock_guard lock(mu_);
  return items_.size();
}

Json GenerateConfig::ToJson() const {
  return {{"judges", judges},
          {"generator", generator},
          {"filter", filter},
          {"threshold", threshold},
          {"min_yes_votes", min_yes_votes},
          {"min_entities", min_entities},
          {"max_length_ratio", max_length_ratio},
          {"max_attempts", max_attempts},
          {"distractor_rounds", distractor_rounds},
          {"seed", seed}};
}

std::optional<Triple> SelectTriple(const std::vector<JudgeOutput>& judgments) {
  const JudgeOutput* best = nullptr;
  for (const auto& j : judgments) {
    if (j.failed || !j.factuality || !j.triple) continue;
    if (!best || j.yes_confidence > best->yes_confidence ||
        (j.yes_confidence == best->yes_confidence &&
         text::CodepointLength(j.triple->object) < text::CodepointLength(best->triple->object))) {
      best = &j;
    }
  }
  if (!best) return std::nullopt;
  return best->triple;
}

size_t AnswerIndexFor(uint64_t seed, std::string_view instance_id) {
  Rng rng(DeriveSeed(seed, "answer-index|" + std::string(instance_id)));
  return rng.UniformIndex(4);
}

bool IsQuestionForm(std::string_view s, std::string_view lang) {
  s = text::Trim(s);
  if (s.empty()) return false;
  if (text::EndsWith(s, "?") || text::EndsWith(s, "？")) return true;
  return lang == "ja" && (text::EndsWith(s, "か") || text::EndsWith(s, "か。"));
}

// ---------------------------------------------------------------------------
// Pipeline

Pipeline::Pipeline(Gateway& gateway, PromptLibrary prompts, GenerateConfig config)
    : gateway_(gateway), prompts_(std::move(prompts)), config_(std::move(config)) {
  if (config_.judges.empty()) throw ValidationError("at least one judge backend is required");
  for (const auto& j : config_.judges) {
    if (!gateway_.HasGenerator(j)) throw ValidationError("unknown judge backend '" + j + "'");
    if (!gateway_.SupportsLogprobs(j)) {
      throw CapabilityError("judge backend '" + j + "' does not expose token logprobs");
    }
  }
  for (const auto* name : {&config_.generator, &config_.filter}) {
    if (!gateway_.HasGenerator(*name)) throw ValidationError("unknown generation backend '" + *name + "'");
  }
  if (config_.threshold < 0) throw ValidationError("threshold must be non-negative");
  if (config_.max_length_ratio < 1.0) throw ValidationError("max_length_ratio must be >= 1");
  if (config_.min_entities < 1) throw ValidationError("min_entities must be at least 1");
  for (const char* task : {"fact_judge", "craft_queries", "distractors", "quality_filter"}) prompts_.Get(task);
}

void Pipeline::CountFailure(const std::string& stage) {
  std::lock_guard lock(fail_mu_);
  ++failures_[stage];
}

size_t Pipeline::Failures(const std::string& stage) const {
  std::lock_guard lock(fail_mu_);
  auto it = failures_.find(stage);
  return it == failures_.end() ? 0 : it->second;
}

Json Pipeline::Provenance() const {
  Json prompts = Json::object();
  for (const char* task : {"fact_judge", "craft_queries", "distractors", "quality_filter"}) {
    prompts[task] = prompts_.Get(task).hash;
  }
  return {{"models", {{"judges", config_.judges}, {"generator", config_.generator}, {"filter", config_.filter}}},
          {"prompts", prompts},
          {"seed", config_.seed}};
}

JudgeOutput Pipeline::RunJudge(const std::string& judge, const Sentence& s, std::string_view lang) {
  static const Schema kSchema = {{"factuality", FieldSpec::Type::kYesNo, true, false},
                                 {"triple", FieldSpec::Type::kObject, false, true},
                                 {"reason", FieldSpec::Type::kString, false, true}};
  JudgeOutput out;
  out.judge = judge;
  const std::string prompt = prompts_.Render("fact_judge", {{"sentence", s.text}, {"lang", lang}});
  StructuredResult r;
  try {
    r = GenerateStructured(gateway_, judge, prompt, kSchema, config_.max_attempts, 5);
  } catch (const CapabilityError&) {
    throw;
  } catch (const Error& e) {
    r.error = e.what();
  }
  if (!r.ok()) {
    out.failed = true;
    out.error = r.error;
    return out;
  }
  const Json& rec = *r.record;
  out.factuality = Fold(rec.at("factuality").get<std::string>()) == "yes";
  if (rec.contains("reason") && rec.at("reason").is_string()) out.reason = rec.at("reason").get<std::string>();
  const YesConfidence yc = YesConfidenceFromCompletion(*r.completion);
  out.yes_confidence = yc.located ? std::clamp(yc.value, 0.0, 1.0) : 0.0;
  out.truncated = yc.truncated;
  if (out.factuality && rec.contains("triple") && rec.at("triple").is_object()) {
    try {
      Triple t = Triple::FromJson(rec.at("triple"));
      if (t.Problem().empty()) out.triple = std::move(t);
    } catch (const Json::exception&) {
      // Malformed triple: judgment stands, triple absent.
    }
  }
  return out;
}

std::vector<FactCandidate> Pipeline::DetectFacts(const std::vector<Sentence>& sentences, std::string_view lang,
                                                 RejectionLedger* ledger) {
  std::vector<std::optional<FactCandidate>> slots(sentences.size());
  ParallelFor(sentences.size(), config_.workers, [&](size_t i) {
    const Sentence& s = sentences[i];
    const std::string unit = s.doc_id + ":" + std::to_string(s.index);
    FactCandidate cand{s, std::string(lang), {}, 0.0, 0, std::nullopt};
    size_t failed = 0;
    for (const auto& judge : config_.judges) {
      cand.judgments.push_back(RunJudge(judge, s, lang));
      const auto& j = cand.judgments.back();
      if (j.failed) {
        ++failed;
        continue;
      }
      cand.combined_confidence += j.yes_confidence;
      if (j.yes_confidence > 0.5) ++cand.yes_votes;
    }
    if (failed == config_.judges.size()) {
      CountFailure(kStageFacts);
      if (ledger) ledger->Add(unit, kStageFacts, "generation failure: every judge failed");
      return;
    }
    cand.selected_triple = SelectTriple(cand.judgments);
    std::string reason;
    if (!(cand.combined_confidence > config_.threshold)) {
      reason = "combined confidence " + FormatDouble(cand.combined_confidence) + " <= " + FormatDouble(config_.threshold);
    } else if (cand.yes_votes < config_.min_yes_votes) {
      reason = "only " + std::to_string(cand.yes_votes) + " yes judgments";
    } else if (!cand.selected_triple) {
      reason = "no valid triple from a yes judgment";
    }
    if (!reason.empty()) {
      if (ledger) ledger->Add(unit, kStageFacts, reason);
      return;
    }
    slots[i] = std::move(cand);
  });
  std::vector<FactCandidate> out;
  for (auto& s : slots)
    if (s) out.push_back(std::move(*s));
  return out;
}

std::optional<CraftedQueries> Pipeline::CraftQueries(const FactCandidate& cand, std::string* error) {
  if (!cand.selected_triple) throw ValidationError("craft_queries needs a selected triple");
  static const Schema kSchema = {{"cloze", FieldSpec::Type::kString}, {"paraphrase", FieldSpec::Type::kString}};
  const std::string lang = cand.lang;
  auto validate = [&](const Json& rec) -> std::string {
    const auto cloze = rec.at("cloze").get<std::string>();
    const auto para = rec.at("paraphrase").get<std::string>();
    if (text::CountOccurrences(cloze, kBlank) != 1) return "the cloze must contain [BLANK] exactly once";
    if (para.find(kBlank) != std::string::npos) return "the paraphrase must not contain [BLANK]";
    if (!IsQuestionForm(para, lang)) return "the paraphrase must be a question";
    return {};
  };
  const Json input = {{"sentence", cand.sentence.text}, {"lang", lang}, {"triple", cand.selected_triple->ToJson()}};
  auto r = GenerateStructured(gateway_, config_.generator, prompts_.Render("craft_queries", input), kSchema,
                              config_.max_attempts, 0, validate);
  if (!r.ok()) {
    if (error) *error = r.error;
    return std::nullopt;
  }
  return CraftedQueries{std::string(text::Trim(r.record->at("cloze").get<std::string>())),
                        std::string(text::Trim(r.record->at("paraphrase").get<std::string>()))};
}

std::optional<std::vector<std::string>> Pipeline::GenerateDistractors(const std::string& cloze,
                                                                      const std::string& answer,
                                                                      std::string_view lang, std::string* error) {
  static const Schema kSchema = {{"distractors", FieldSpec::Type::kArray}};
  auto validate = [&](const Json& rec) -> std::string {
    const Json& d = rec.at("distractors");
    if (d.size() != 3) return "exactly three distractors are required";
    std::set<std::string> seen{Fold(answer)};
    for (const auto& x : d) {
      if (!x.is_string() || text::Trim(x.get<std::string>()).empty()) return "distractors must be non-empty strings";
      if (!seen.insert(Fold(x.get<std::string>())).second) {
        return "distractors must differ from the answer and from each other";
      }
    }
    return {};
  };
  std::vector<std::string> avoid;
  std::string last_error;
  for (int round = 0; round < std::max(1, config_.distractor_rounds); ++round) {
    Json input = {{"cloze", cloze}, {"answer", answer}, {"lang", lang}};
    if (!avoid.empty()) input["avoid"] = avoid;
    auto r = GenerateStructured(gateway_, config_.generator, prompts_.Render("distractors", input), kSchema,
                                config_.max_attempts, 0, validate);
    if (!r.ok()) {
      last_error = r.error;
      continue;
    }
    std::vector<std::string> ds;
    for (const auto& x : r.record->at("distractors")) ds.emplace_back(text::Trim(x.get<std::string>()));
    std::vector<std::string> all = ds;
    all.push_back(answer);
    if (OptionLengthRatio(all) <= config_.max_length_ratio) return ds;
    last_error = "option length ratio " + FormatDouble(OptionLengthRatio(all)) + " exceeds " +
                 FormatDouble(config_.max_length_ratio);
    avoid.insert(avoid.end(), ds.begin(), ds.end());
  }
  if (error) *error = last_error;
  return std::nullopt;
}

std::vector<EvalInstance> Pipeline::BuildInstances(const std::vector<FactCandidate>& facts, RejectionLedger* ledger,
                                                   std::map<std::string, size_t>* crafted_by_lang) {
  std::vector<std::optional<EvalInstance>> slots(facts.size());
  std::vector<char> crafted(facts.size(), 0);
  const Json provenance = Provenance();
  ParallelFor(facts.size(), config_.workers, [&](size_t i) {
    const FactCandidate& f = facts[i];
    const std::string id = f.sentence.doc_id + ":" + std::to_string(f.sentence.index);
    std::string error;
    auto q = CraftQueries(f, &error);
    if (!q) {
      CountFailure(kStageCraft);
      if (ledger) ledger->Add(id, kStageCraft, "generation failure: " + error);
      return;
    }
    crafted[i] = 1;
    const std::string& answer = f.selected_triple->object;
    auto ds = GenerateDistractors(q->cloze, answer, f.lang, &error);
    if (!ds) {
      if (ledger) ledger->Add(id, kStageDistractors, error);
      return;
    }
    EvalInstance inst;
    inst.id = id;
    inst.lang = f.lang;
    inst.doc_id = f.sentence.doc_id;
    inst.sentence_index = f.sentence.index;
    inst.sentence = f.sentence.text;
    inst.triple = *f.selected_triple;
    inst.cloze_query = q->cloze;
    inst.paraphrase_query = q->paraphrase;
    inst.answer_index = AnswerIndexFor(config_.seed, id);
    inst.options = *ds;
    inst.options.insert(inst.options.begin() + static_cast<long>(inst.answer_index), answer);
    inst.provenance = provenance;
    Json judgments = Json::array();
    for (const auto& j : f.judgments) judgments.push_back(j.ToJson());
    inst.provenance["judgments"] = judgments;
    inst.provenance["combined_confidence"] = f.combined_confidence;
    if (auto problems = InstanceProblems(inst, config_.max_length_ratio); !problems.empty()) {
      if (ledger) ledger->Add(id, kStageDistractors, "invalid instance: " + Join(problems, "; "));
      return;
    }
    slots[i] = std::move(inst);
  });
  std::vector<EvalInstance> out;
  for (size_t i = 0; i < facts.size(); ++i) {
    if (crafted[i] && crafted_by_lang) ++(*crafted_by_lang)[facts[i].lang];
    if (slots[i]) out.push_back(std::move(*slots[i]));
  }
  return out;
}

FilterOutcome Pipeline::FilterQuality(const std::vector<EvalInstance>& instances, const Corpus* corpus,
                                      RejectionLedger* ledger) {
  static const Schema kSchema = {{"cloze", FieldSpec::Type::kString},
                                 {"paraphrase", FieldSpec::Type::kString},
                                 {"options", FieldSpec::Type::kString},
                                 {"interlingual_supported", FieldSpec::Type::kYesNo},
                                 {"reasons", FieldSpec::Type::kArray, false, true}};
  auto validate = [](const Json& rec) -> std::string {
    for (const char* k : {"cloze", "paraphrase", "options"}) {
      const std::string v = Fold(rec.at(k).get<std::string>());
      if (v != "pass" && v != "fail") return std::string("'") + k + "' must be pass or fail";
    }
    return {};
  };
  enum class Verdict { kPending, kKept, kRejected, kFailed };
  struct Slot {
    Verdict verdict = Verdict::kPending;
    bool supported = false;
    std::string detail;
  };
  std::vector<Slot> slots(instances.size());
  auto judge = [&](size_t i) {
    const EvalInstance& inst = instances[i];
    if (auto problems = InstanceProblems(inst, config_.max_length_ratio); !problems.empty()) {
      throw ValidationError("filter_quality received an invalid instance " + inst.id + ": " + Join(problems, "; "));
    }
    Json input = {{"sentence", inst.sentence},     {"lang", inst.lang},
                  {"triple", inst.triple.ToJson()}, {"cloze", inst.cloze_query},
                  {"paraphrase", inst.paraphrase_query}, {"options", inst.options},
                  {"answer_index", inst.answer_index}, {"paired_document", nullptr}};
    if (corpus) {
      if (auto partner = corpus->PartnerOf(inst.doc_id)) {
        const Document& d = corpus->Get(*partner);
        input["paired_document"] = {{"lang", d.lang}, {"abstract", d.abstract}};
      }
    }
    StructuredResult r;
    try {
      r = GenerateStructured(gateway_, config_.filter, prompts_.Render("quality_filter", input), kSchema,
                             config_.max_attempts, 0, validate);
    } catch (const BackendError& e) {
      r.error = e.what();
    }
    Slot& slot = slots[i];
    if (!r.ok()) {
      slot.verdict = Verdict::kFailed;
      slot.detail = r.error;
      return;
    }
    const Json& rec = *r.record;
    slot.supported = Fold(rec.at("interlingual_supported").get<std::string>()) == "yes";
    std::vector<std::string> failed;
    for (const char* k : {"cloze", "paraphrase", "options"}) {
      if (Fold(rec.at(k).get<std::string>()) == "fail") failed.push_back(k);
    }
    if (failed.empty()) {
      slot.verdict = Verdict::kKept;
      return;
    }
    std::vector<std::string> reasons;
    if (rec.contains("reasons") && rec.at("reasons").is_array()) {
      for (const auto& x : rec.at("reasons"))
        if (x.is_string()) reasons.push_back(x.get<std::string>());
    }
    slot.verdict = Verdict::kRejected;
    slot.detail = "failed " + Join(failed, ", ") + (reasons.empty() ? "" : ": " + Join(reasons, "; "));
  };
  ParallelFor(instances.size(), config_.workers, judge);
  // Retry queue: one more pass over judge failures.
  std::vector<size_t> queue;
  for (size_t i = 0; i < slots.size(); ++i)
    if (slots[i].verdict == Verdict::kFailed) queue.push_back(i);
  ParallelFor(queue.size(), config_.workers, [&](size_t k) { judge(queue[k]); });

  FilterOutcome out;
  for (size_t i = 0; i < instances.size(); ++i) {
    const Slot& s = slots[i];
    const std::string& id = instances[i].id;
    switch (s.verdict) {
      case Verdict::kKept:
        out.kept.push_back(instances[i]);
        out.interlingual_supported[id] = s.supported;
        break;
      case Verdict::kRejected:
        out.interlingual_supported[id] = s.supported;
        if (ledger) ledger->Add(id, kStageFilter, s.detail);
        break;
      default:
        ++out.held;
        CountFailure(kStageFilter);
        if (ledger) ledger->Add(id, kStageFilter, "held: judge failed after retry: " + s.detail);
        break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stage counts and the end-to-end build

void StageCounts::Set(const std::string& stage, const std::string& lang, size_t n) {
  if (std::find(stages.begin(), stages.end(), stage) == stages.end()) stages.push_back(stage);
  counts[stage][lang] = n;
}

std::string StageCounts::ToCsv() const {
  std::set<std::string> langs;
  for (const auto& [_, m] : counts)
    for (const auto& [l, __] : m) langs.insert(l);
  std::vector<std::string> header{"stage"};
  header.insert(header.end(), langs.begin(), langs.end());
  header.push_back("total");
  std::string out = CsvRow(header);
  for (const auto& stage : stages) {
    std::vector<std::string> row{stage};
    size_t total = 0;
    for (const auto& l : langs) {
      const auto& m = counts.at(stage);
      const size_t n = m.count(l) ? m.at(l) : 0;
      total += n;
      row.push_back(std::to_string(n));
    }
    row.push_back(std::to_string(total));
    out += CsvRow(row);
  }
  return out;
}

namespace {

void WriteOutputs(const std::filesystem::path& out_dir, const BuildResult& r) {
  std::filesystem::create_directories(out_dir);
  WriteDataset(out_dir / "dataset.jsonl", r.instances);
  std::vector<Json> cloze, para;
  for (const auto& i : r.instances) {
    cloze.push_back({{"id", i.id}, {"lang", i.lang}, {"query", i.cloze_query}, {"options", i.options},
                     {"answer_index", i.answer_index}});
    para.push_back({{"id", i.id}, {"lang", i.lang}, {"query", i.paraphrase_query}, {"options", i.options},
                    {"answer_index", i.answer_index}});
  }
  WriteJsonLines(out_dir / "cloze.jsonl", cloze);
  WriteJsonLines(out_dir / "paraphrase.jsonl", para);
  WriteJsonLines(out_dir / "interlingual_manifest.jsonl", r.manifest);
  WriteFile(out_dir / "stage_counts.csv", r.counts.ToCsv());
  std::vector<Json> rej;
  for (const auto& x : r.rejections) rej.push_back(x.ToJson());
  WriteJsonLines(out_dir / "rejections.jsonl", rej);
}

}  // namespace

BuildResult BuildDataset(const Corpus& corpus, const nlp::NlpAdapters& nlp, Pipeline& pipeline,
                         const std::filesystem::path& out_dir) {
  BuildResult result;
  RejectionLedger ledger;
  std::set<std::string> langs;
  for (const auto& d : corpus.documents()) langs.insert(d.lang);
  std::map<std::string, size_t> docs_by_lang, sents_by_lang, ent_by_lang;
  std::map<std::string, std::vector<Sentence>> candidates;  // by lang

  for (const auto& doc : corpus.documents()) {
    ++docs_by_lang[doc.lang];
    const auto sentences = SplitSentences(doc, *nlp.splitter);
    sents_by_lang[doc.lang] += sentences.size();
    FilterReport report;
    auto kept = FilterFactualCandidates(sentences, doc.lang, *nlp.ner, pipeline.config().min_entities, &report);
    std::set<size_t> kept_idx;
    for (const auto& s : kept) kept_idx.insert(s.index);
    for (const auto& s : sentences) {
      if (kept_idx.count(s.index)) continue;
      const std::string key = s.doc_id + "#" + std::to_string(s.index) + ":";
      std::string reason = "fewer than " + std::to_string(pipeline.config().min_entities) + " entities";
      for (const auto& w : report.warnings)
        if (text::StartsWith(w, key)) reason = "NER failure: " + w.substr(key.size() + 1);
      ledger.Add(s.doc_id + ":" + std::to_string(s.index), kStageEntities, reason);
    }
    ent_by_lang[doc.lang] += kept.size();
    auto& bucket = candidates[doc.lang];
    bucket.insert(bucket.end(), kept.begin(), kept.end());
  }
  for (const auto& l : langs) {
    result.counts.Set(kStageDocuments, l, docs_by_lang[l]);
  }
  for (const auto& l : langs) result.counts.Set(kStageSentences, l, sents_by_lang[l]);
  for (const auto& l : langs) result.counts.Set(kStageEntities, l, ent_by_lang[l]);

  auto abort_if_dead = [&](const char* stage, size_t inputs, size_t outputs, size_t failures) {
    if (inputs > 0 && outputs == 0 && failures == inputs) {
      result.rejections = ledger.Sorted();
      WriteOutputs(out_dir, result);
      throw RuntimeFailure(std::string("stage ") + stage + " failed for every unit; partial outputs kept in " +
                           out_dir.string());
    }
  };

  std::vector<FactCandidate> facts;
  size_t fact_inputs = 0;
  for (const auto& l : langs) {
    auto f = pipeline.DetectFacts(candidates[l], l, &ledger);
    fact_inputs += candidates[l].size();
    result.counts.Set(kStageFacts, l, f.size());
    facts.insert(facts.end(), std::make_move_iterator(f.begin()), std::make_move_iterator(f.end()));
  }
  abort_if_dead(kStageFacts, fact_inputs, facts.size(), pipeline.Failures(kStageFacts));

  std::map<std::string, size_t> crafted;
  auto instances = pipeline.BuildInstances(facts, &ledger, &crafted);
  for (const auto& l : langs) result.counts.Set(kStageCraft, l, crafted[l]);
  size_t crafted_total = 0;
  for (const auto& [_, n] : crafted) crafted_total += n;
  abort_if_dead(kStageCraft, facts.size(), crafted_total, pipeline.Failures(kStageCraft));
  std::map<std::string, size_t> distracted;
  for (const auto& i : instances) ++distracted[i.lang];
  for (const auto& l : langs) result.counts.Set(kStageDistractors, l, distracted[l]);

  std::sort(instances.begin(), instances.end(), [](const EvalInstance& a, const EvalInstance& b) { return a.id < b.id; });
  auto filtered = pipeline.FilterQuality(instances, &corpus, &ledger);
  abort_if_dead(kStageFilter, instances.size(), filtered.kept.size(), pipeline.Failures(kStageFilter));
  std::map<std::string, size_t> kept_by_lang;
  for (const auto& i : filtered.kept) ++kept_by_lang[i.lang];
  for (const auto& l : langs) result.counts.Set(kStageFilter, l, kept_by_lang[l]);
  result.instances = std::move(filtered.kept);

  for (const auto& inst : result.instances) {
    if (auto partner = corpus.PartnerOf(inst.doc_id)) {
      result.manifest.push_back({{"instance_id", inst.id},
                                 {"paired_doc_id", *partner},
                                 {"supported_flag", filtered.interlingual_supported.at(inst.id)}});
    }
  }
  if (corpus.Pairs().empty()) {
    result.warnings.push_back("corpus has no bilingual pairs; the interlingual manifest is empty");
  }
  result.rejections = ledger.Sorted();
  WriteOutputs(out_dir, result);
  return result;
}

}  // namespace clozebench
