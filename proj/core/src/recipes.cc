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

#include "clozebench/recipes.h"

#include <algorithm>
#include <fstream>

#include "clozebench/embedded.h"
#include "clozebench/error.h"
#include "clozebench/rng.h"
#include "clozebench/structured.h"
#include "clozebench/text.h"

namespace clozebench {
namespace {

std::string JoinWith(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string SentenceJoiner(const std::string& lang) { return lang == "ja" ? "" : " "; }
std::string ListJoiner(const std::string& lang) { return lang == "ja" ? "、" : ", "; }

std::string LanguageName(const std::string& lang) {
  if (lang == "en") return "English";
  if (lang == "ja") return "Japanese";
  return lang;
}

std::string Substitute(std::string s, const std::map<std::string, std::string>& slots) {
  for (const auto& [k, v] : slots) s = text::ReplaceAll(std::move(s), "{" + k + "}", v);
  return s;
}

// Resolves one io_rule field. Returns false with `why` when unavailable.
struct FieldResolver {
  const Document& doc;
  const MineContext& ctx;
  uint64_t seed;
  std::optional<std::vector<std::string>> sentences_;
  std::map<std::string, std::string> extra;  // extra template slots
  std::optional<std::pair<std::string, std::string>> section_;  // (name, text)

  const std::vector<std::string>& Sentences() {
    if (!sentences_) {
      static const nlp::RuleSentenceSplitter kFallback;
      const nlp::SentenceSplitter& sp = ctx.splitter ? *ctx.splitter : kFallback;
      sentences_ = sp.Split(doc.abstract, doc.lang).sentences;
    }
    return *sentences_;
  }

  bool Section(std::string* why) {
    if (section_) return true;
    std::vector<std::pair<std::string, std::string>> found;
    if (!doc.sections.empty()) {
      for (const auto& [name, body] : doc.sections)
        if (!text::Trim(body).empty()) found.emplace_back(name, body);
    } else {
      for (const auto& [name, words] : SectionKeywords()) {
        std::vector<std::string> hits;
        for (const auto& s : Sentences()) {
          const std::string lower = text::ToLowerAscii(s);
          if (std::any_of(words.begin(), words.end(), [&](const std::string& w) {
                return lower.find(w) != std::string::npos;
              })) {
            hits.push_back(s);
          }
        }
        if (!hits.empty()) found.emplace_back(name, JoinWith(hits, SentenceJoiner(doc.lang)));
      }
    }
    if (found.empty()) {
      *why = doc.sections.empty() ? "no section keywords matched" : "sections are empty";
      return false;
    }
    Rng rng(DeriveSeed(seed, doc.id + ":gmrc:section"));
    section_ = found[rng.UniformIndex(found.size())];
    extra["section"] = section_->first;
    return true;
  }

  bool Resolve(const std::string& field, std::string* out, std::string* why) {
    auto need = [&](bool ok, const char* reason) {
      if (!ok) *why = reason;
      return ok;
    };
    if (field == "title") {
      *out = doc.title;
      return need(!text::Trim(doc.title).empty(), "no title");
    }
    if (field == "abstract") {
      *out = doc.abstract;
      return need(!text::Trim(doc.abstract).empty(), "no abstract");
    }
    if (field == "keywords") {
      *out = JoinWith(doc.keywords, ListJoiner(doc.lang));
      return need(!doc.keywords.empty(), "no keywords");
    }
    if (field == "fields") {
      *out = JoinWith(doc.fields, ListJoiner(doc.lang));
      return need(!doc.fields.empty(), "no fields");
    }
    if (field == "partner.abstract") {
      if (!ctx.corpus) return need(false, "no corpus for partner lookup");
      const auto partner = ctx.corpus->PartnerOf(doc.id);
      if (!partner) return need(false, "no paired document");
      const Document& p = ctx.corpus->Get(*partner);
      *out = p.abstract;
      extra["source_language"] = LanguageName(doc.lang);
      extra["target_language"] = LanguageName(p.lang);
      return need(!text::Trim(p.abstract).empty(), "paired document has no abstract");
    }
    if (field == "diagnosis.findings" || field == "diagnosis.diagnosis") {
      if (!ctx.diagnosis) return need(false, "no diagnosis annotations supplied");
      const auto it = ctx.diagnosis->find(doc.id);
      if (it == ctx.diagnosis->end()) return need(false, "document has no diagnosis annotation");
      *out = field == "diagnosis.findings" ? it->second.findings : it->second.diagnosis;
      return need(!text::Trim(*out).empty(), "empty diagnosis annotation");
    }
    if (field == "section.context") {
      if (!Section(why)) return false;
      *out = doc.abstract;
      return true;
    }
    if (field == "section.text") {
      if (!Section(why)) return false;
      *out = section_->second;
      return true;
    }
    const auto& s = Sentences();
    const std::string j = SentenceJoiner(doc.lang);
    if (s.size() < 2) return need(false, "abstract has fewer than 2 sentences");
    const size_t half = s.size() / 2;
    if (field == "abstract.first_half") {
      *out = JoinWith({s.begin(), s.begin() + static_cast<long>(half)}, j);
    } else if (field == "abstract.second_half") {
      *out = JoinWith({s.begin() + static_cast<long>(half), s.end()}, j);
    } else if (field == "abstract.without_last") {
      *out = JoinWith({s.begin(), s.end() - 1}, j);
    } else if (field == "abstract.last_sentence") {
      *out = s.back();
    } else if (field == "abstract.without_first") {
      *out = JoinWith({s.begin() + 1, s.end()}, j);
    } else if (field == "abstract.first_sentence") {
      *out = s.front();
    } else if (field == "abstract.shuffled") {
      std::vector<std::string> shuffled = s;
      Rng rng(DeriveSeed(seed, doc.id + ":reordering:shuffle"));
      rng.Shuffle(shuffled);
      if (shuffled == s) std::rotate(shuffled.begin(), shuffled.begin() + 1, shuffled.end());
      *out = JoinWith(shuffled, "\n");
    } else {
      return need(false, "unknown field");
    }
    return true;
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// Templates

const std::set<std::string>& KnownInstructionFields() {
  static const std::set<std::string> kFields = {
      "title",          "abstract",           "keywords",
      "fields",         "partner.abstract",   "abstract.first_half",
      "abstract.second_half", "abstract.without_last", "abstract.last_sentence",
      "abstract.without_first", "abstract.first_sentence", "abstract.shuffled",
      "diagnosis.findings", "diagnosis.diagnosis", "section.context",
      "section.text"};
  return kFields;
}

InstructionTemplates InstructionTemplates::FromJson(const Json& j) {
  InstructionTemplates t;
  try {
    for (const auto& k : j.at("kinds")) {
      InstructionTemplate it;
      it.kind = k.at("kind").get<std::string>();
      it.input_field = k.at("io_rule").at("input").get<std::string>();
      it.output_field = k.at("io_rule").at("output").get<std::string>();
      it.variants = k.at("variants").get<std::vector<std::string>>();
      if (it.variants.size() != 10) {
        throw ValidationError("instruction kind '" + it.kind + "' has " + std::to_string(it.variants.size()) +
                              " variants; exactly 10 are required");
      }
      for (const auto* f : {&it.input_field, &it.output_field}) {
        if (!KnownInstructionFields().count(*f)) {
          throw ValidationError("instruction kind '" + it.kind + "' references unknown field '" + *f + "'");
        }
      }
      for (const auto& v : it.variants) {
        if (v.find("{input}") == std::string::npos || v.find("{output}") == std::string::npos) {
          throw ValidationError("instruction kind '" + it.kind + "': every variant needs {input} and {output}");
        }
      }
      if (t.by_kind_.count(it.kind)) throw ValidationError("duplicate instruction kind '" + it.kind + "'");
      t.order_.push_back(it.kind);
      t.by_kind_[it.kind] = std::move(it);
    }
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("instruction templates: ") + e.what());
  }
  return t;
}

InstructionTemplates InstructionTemplates::Builtin() {
  return FromJson(Json::parse(EmbeddedFile("templates/instructions.json")));
}

const InstructionTemplate& InstructionTemplates::Get(const std::string& kind) const {
  const auto it = by_kind_.find(kind);
  if (it == by_kind_.end()) throw ValidationError("unknown instruction kind '" + kind + "'");
  return it->second;
}

std::vector<std::string> InstructionTemplates::kinds() const { return order_; }

const std::map<std::string, std::vector<std::string>>& SectionKeywords() {
  // Lower-cased substrings; Japanese entries match as-is.
  static const std::map<std::string, std::vector<std::string>> kKeywords = {
      {"background", {"background", "aim of", "purpose", "objective", "目的", "背景"}},
      {"methods", {"we performed", "we analyzed", "were enrolled", "we measured", "方法", "対象と"}},
      {"results", {"we found", "showed", "was associated", "were associated", "結果", "認められ"}},
      {"conclusion", {"conclude", "suggest", "these findings", "結論", "示唆"}},
  };
  return kKeywords;
}

std::map<std::string, DiagnosisAnnotation> ReadDiagnosisAnnotations(const std::filesystem::path& path) {
  std::map<std::string, DiagnosisAnnotation> out;
  ReadJsonLines(path, [&](const Json& j, size_t line) {
    try {
      out[j.at("doc_id").get<std::string>()] = {j.at("findings").get<std::string>(),
                                                j.at("diagnosis").get<std::string>()};
    } catch (const Json::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
  });
  return out;
}

Json InstructionRecord::ToJson() const {
  return {{"doc_id", doc_id}, {"kind", kind}, {"variant", variant}, {"text", text}};
}

void MineReport::Merge(const MineReport& other) {
  records += other.records;
  for (const auto& [k, v] : other.skipped) skipped[k].insert(skipped[k].end(), v.begin(), v.end());
}

Json MineReport::ToJson() const {
  Json s = Json::object();
  for (const auto& [k, v] : skipped) s[k] = {{"count", v.size()}, {"documents", v}};
  return {{"records", records}, {"skipped", s}};
}

std::vector<InstructionRecord> MineInstructions(const Document& doc, const std::vector<std::string>& kinds,
                                                const InstructionTemplates& templates, const MineContext& ctx,
                                                uint64_t seed, MineReport* report) {
  std::vector<InstructionRecord> out;
  for (const auto& kind : kinds) {
    const InstructionTemplate& t = templates.Get(kind);
    FieldResolver r{doc, ctx, seed, std::nullopt, {}, std::nullopt};
    std::string input, output, why;
    if (!r.Resolve(t.input_field, &input, &why) || !r.Resolve(t.output_field, &output, &why)) {
      if (report) report->skipped[kind].push_back(doc.id + ": " + why);
      continue;
    }
    Rng rng(DeriveSeed(seed, doc.id + ":" + kind));
    const size_t v = rng.UniformIndex(t.variants.size());
    auto slots = r.extra;
    slots["input"] = input;
    slots["output"] = output;
    out.push_back({doc.id, kind, v, Substitute(t.variants[v], slots)});
    if (report) ++report->records;
  }
  return out;
}

// ---------------------------------------------------------------------------
// QA pairs

QaResult GenerateQaPairs(const Document& doc, Gateway& gateway, const std::string& generator,
                         const PromptLibrary& prompts, size_t k, int max_attempts) {
  static const Schema kSchema = {{"pairs", FieldSpec::Type::kArray}};
  QaResult out;
  const Json input = {{"title", doc.title}, {"abstract", doc.abstract}, {"lang", doc.lang}, {"k", k}};
  StructuredResult r;
  try {
    r = GenerateStructured(gateway, generator, prompts.Render("qa_pairs", input, {{"k", std::to_string(k)}}), kSchema,
                           max_attempts);
  } catch (const BackendError& e) {
    r.error = e.what();
  }
  if (!r.ok()) {
    out.error = r.error;
    out.shortfall = k;
    return out;
  }
  for (const auto& p : r.record->at("pairs")) {
    if (out.pairs.size() == k) break;
    const bool ok = p.is_object() && p.contains("question") && p.contains("answer") && p["question"].is_string() &&
                    p["answer"].is_string() && !text::Trim(p["question"].get<std::string>()).empty() &&
                    !text::Trim(p["answer"].get<std::string>()).empty();
    if (!ok) {
      ++out.malformed;
      continue;
    }
    out.pairs.push_back({std::string(text::Trim(p["question"].get<std::string>())),
                         std::string(text::Trim(p["answer"].get<std::string>()))});
  }
  out.shortfall = k - out.pairs.size();
  return out;
}

// ---------------------------------------------------------------------------
// Mixing

MixResult MixCorpus(std::vector<CorpusDoc> knowledge, std::vector<CorpusDoc> transfer, uint64_t seed) {
  if (knowledge.empty()) throw ValidationError("knowledge corpus C_K is empty");
  MixResult mix;
  for (const auto& d : knowledge) mix.knowledge_tokens += d.token_count;
  for (const auto& d : transfer) mix.transfer_tokens += d.token_count;
  mix.docs = std::move(knowledge);
  mix.docs.insert(mix.docs.end(), std::make_move_iterator(transfer.begin()), std::make_move_iterator(transfer.end()));
  std::set<std::string> ids;
  for (const auto& d : mix.docs)
    if (!ids.insert(d.id).second) throw ValidationError("document id '" + d.id + "' appears twice in the mix");
  Rng rng(DeriveSeed(seed, "mix"));
  rng.Shuffle(mix.docs);
  size_t offset = 0;
  for (const auto& d : mix.docs) {
    mix.manifest.push_back({d.id, d.source, d.kind, d.token_count, offset});
    offset += text::EscapeLine(d.text).size() + 1;
    mix.total_tokens += d.token_count;
  }
  return mix;
}

void WriteMix(const std::filesystem::path& corpus_path, const std::filesystem::path& manifest_path,
              const MixResult& mix) {
  std::string body;
  for (const auto& d : mix.docs) {
    body += text::EscapeLine(d.text);
    body += '\n';
  }
  WriteFile(corpus_path, body);
  std::string csv = CsvRow({"doc_id", "source", "kind", "token_count", "offset"});
  for (const auto& m : mix.manifest) {
    csv += CsvRow({m.doc_id, m.source, m.kind, std::to_string(m.token_count), std::to_string(m.offset)});
  }
  WriteFile(manifest_path, csv);
}

std::vector<std::string> ReadMixedCorpus(const std::filesystem::path& path) {
  std::vector<std::string> out;
  const std::string body = ReadFile(path);
  size_t start = 0;
  while (start < body.size()) {
    size_t end = body.find('\n', start);
    if (end == std::string::npos) end = body.size();
    out.push_back(text::UnescapeLine(std::string_view(body).substr(start, end - start)));
    start = end + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Recipe

RecipeSpec RecipeSpec::FromJson(const Json& j, const std::filesystem::path& base_dir) {
  auto path = [&](const std::string& p) -> std::filesystem::path {
    if (p.empty()) return {};
    const std::filesystem::path fp(p);
    return fp.is_absolute() || base_dir.empty() ? fp : base_dir / fp;
  };
  RecipeSpec s;
  try {
    s.knowledge_corpus = path(j.at("knowledge_corpus").get<std::string>());
    s.transfer_kind = ParseTransferKind(j.value("transfer_kind", "none"));
    s.token_budget_each = j.at("token_budget_each").get<size_t>();
    s.seed = j.value("seed", uint64_t{0});
    if (j.contains("instructions")) {
      const Json& ins = j.at("instructions");
      s.instruction_kinds = ins.value("kinds", std::vector<std::string>{});
      s.qa_pairs = ins.value("qa_pairs", false);
    }
    if (j.contains("sources")) {
      const Json& src = j.at("sources");
      s.jparacrawl = path(src.value("jparacrawl", ""));
      s.aspec = path(src.value("aspec", ""));
      s.medical_corpus = path(src.value("medical_corpus", ""));
      s.medical_lang = src.value("medical_lang", "ja");
    }
    for (const auto& p : j.value("eval_manifests", std::vector<std::string>{})) s.eval_manifests.push_back(path(p));
    s.diagnosis_annotations = path(j.value("diagnosis_annotations", ""));
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("recipe spec: ") + e.what());
  }
  s.Validate();
  return s;
}

void RecipeSpec::Validate() const {
  if (knowledge_corpus.empty()) throw ValidationError("recipe needs knowledge_corpus");
  if (token_budget_each == 0) throw ValidationError("token_budget_each must be positive");
  const InstructionTemplates t = InstructionTemplates::Builtin();
  for (const auto& k : instruction_kinds) t.Get(k);
  auto must_exist = [](const std::filesystem::path& p, const char* what) {
    if (!p.empty() && !std::filesystem::exists(p)) throw ValidationError(std::string(what) + " not found: " + p.string());
  };
  must_exist(knowledge_corpus, "knowledge corpus");
  must_exist(jparacrawl, "JParaCrawl source");
  must_exist(aspec, "ASPEC source");
  must_exist(medical_corpus, "medical corpus");
  must_exist(diagnosis_annotations, "diagnosis annotations");
  for (const auto& p : eval_manifests) must_exist(p, "evaluation manifest");
  switch (transfer_kind) {
    case TransferKind::kBalancedTranslation:
      if (jparacrawl.empty()) throw ValidationError("balanced_translation needs sources.jparacrawl");
      break;
    case TransferKind::kScienceTranslation:
      if (aspec.empty()) throw ValidationError("science_translation needs sources.aspec");
      break;
    case TransferKind::kNone: break;
    default:
      if (medical_corpus.empty()) {
        throw ValidationError(TransferKindName(transfer_kind) + " needs sources.medical_corpus");
      }
  }
}

Json RecipeSpec::ToJson() const {
  std::vector<std::string> manifests;
  for (const auto& p : eval_manifests) manifests.push_back(p.string());
  return {{"knowledge_corpus", knowledge_corpus.string()},
          {"transfer_kind", TransferKindName(transfer_kind)},
          {"token_budget_each", token_budget_each},
          {"seed", seed},
          {"instructions", {{"kinds", instruction_kinds}, {"qa_pairs", qa_pairs}}},
          {"sources",
           {{"jparacrawl", jparacrawl.string()},
            {"aspec", aspec.string()},
            {"medical_corpus", medical_corpus.string()},
            {"medical_lang", medical_lang}}},
          {"eval_manifests", manifests},
          {"diagnosis_annotations", diagnosis_annotations.string()}};
}

Json RecipeResult::ToJson() const {
  return {{"knowledge", knowledge.ToJson()},
          {"transfer", transfer.ToJson()},
          {"mining", mining.ToJson()},
          {"qa_records", qa_records},
          {"qa_shortfall", qa_shortfall},
          {"tokens",
           {{"knowledge", mix.knowledge_tokens}, {"transfer", mix.transfer_tokens}, {"total", mix.total_tokens}}},
          {"documents", mix.docs.size()}};
}

RecipeResult RunRecipe(const RecipeSpec& spec, const RecipeContext& ctx, const std::filesystem::path& out_dir) {
  spec.Validate();
  if (!ctx.tokenizer || !ctx.nlp.splitter) throw ValidationError("recipe needs a tokenizer and a sentence splitter");
  if (spec.qa_pairs && (!ctx.gateway || !ctx.prompts || ctx.generator.empty())) {
    throw ValidationError("qa_pairs needs a generator backend");
  }
  RecipeResult result;
  Corpus knowledge;
  knowledge.Ingest(spec.knowledge_corpus);
  std::optional<std::map<std::string, DiagnosisAnnotation>> diagnosis;
  if (!spec.diagnosis_annotations.empty()) diagnosis = ReadDiagnosisAnnotations(spec.diagnosis_annotations);

  const InstructionTemplates templates = InstructionTemplates::Builtin();
  const MineContext mine_ctx{&knowledge, ctx.nlp.splitter.get(), diagnosis ? &*diagnosis : nullptr};
  std::vector<CorpusDoc> pool;
  for (const auto& doc : knowledge.documents()) {
    pool.push_back({doc.id, "knowledge", "document", doc.title + "\n" + doc.abstract, 0});
    for (const auto& rec : MineInstructions(doc, spec.instruction_kinds, templates, mine_ctx, spec.seed, &result.mining)) {
      pool.push_back({doc.id + "#" + rec.kind, "knowledge", "instruction:" + rec.kind, rec.text, 0});
    }
    if (spec.qa_pairs) {
      const QaResult qa = GenerateQaPairs(doc, *ctx.gateway, ctx.generator, *ctx.prompts);
      result.qa_shortfall += qa.shortfall;
      for (size_t i = 0; i < qa.pairs.size(); ++i) {
        const bool ja = doc.lang == "ja";
        pool.push_back({doc.id + "#qa" + std::to_string(i), "knowledge", "qa",
                        std::string(ja ? "質問: " : "Question: ") + qa.pairs[i].question +
                            (ja ? "\n回答: " : "\nAnswer: ") + qa.pairs[i].answer,
                        0});
        ++result.qa_records;
      }
    }
  }
  auto ck = TakeBudget(std::move(pool), spec.token_budget_each, *ctx.tokenizer, *ctx.nlp.splitter, &result.knowledge);

  std::vector<CorpusDoc> ct;
  if (spec.transfer_kind != TransferKind::kNone) {
    Corpus medical;
    if (!spec.medical_corpus.empty()) medical.Ingest(spec.medical_corpus);
    TransferSources src;
    src.jparacrawl = spec.jparacrawl;
    src.aspec = spec.aspec;
    src.medical = &medical;
    src.medical_lang = spec.medical_lang;
    src.romanizer = ctx.nlp.romanizer.get();
    src.splitter = ctx.nlp.splitter.get();
    src.exclude_ids = LoadEvalDocIds(spec.eval_manifests, &medical);
    for (const auto& id : LoadEvalDocIds(spec.eval_manifests, &knowledge)) src.exclude_ids.insert(id);
    ct = BuildTransferCorpus(spec.transfer_kind, src, spec.token_budget_each, spec.seed, *ctx.tokenizer,
                             &result.transfer);
  }
  result.mix = MixCorpus(std::move(ck), std::move(ct), spec.seed);
  std::filesystem::create_directories(out_dir);
  WriteMix(out_dir / "corpus.txt", out_dir / "manifest.csv", result.mix);
  WriteFile(out_dir / "recipe_report.json", result.ToJson().dump(2) + "\n");
  return result;
}

}  // namespace clozebench
