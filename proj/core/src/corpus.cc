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

#include "clozebench/corpus.h"

#include "clozebench/error.h"
#include "clozebench/text.h"

namespace clozebench {
namespace {

std::string RecordName(const Json& j) {
  if (j.is_object() && j.contains("id") && j["id"].is_string()) return "'" + j["id"].get<std::string>() + "'";
  return "<no id>";
}

std::vector<std::string> StringList(const Json& j, const char* key) {
  std::vector<std::string> out;
  if (!j.contains(key) || j[key].is_null()) return out;
  if (!j[key].is_array()) throw ValidationError(std::string("field '") + key + "' must be a list");
  for (const auto& v : j[key]) {
    if (!v.is_string()) throw ValidationError(std::string("field '") + key + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::string RequiredString(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw ValidationError(std::string("missing or non-string field '") + key + "'");
  }
  return j[key].get<std::string>();
}

}  // namespace

Json Document::ToJson() const {
  Json j = {{"id", id},
            {"lang", lang},
            {"pair_id", pair_id ? Json(*pair_id) : Json(nullptr)},
            {"title", title},
            {"abstract", abstract},
            {"keywords", keywords},
            {"fields", fields},
            {"sections", Json::object()}};
  for (const auto& [k, v] : sections) j["sections"][k] = v;
  return j;
}

Document Document::FromJson(const Json& j) {
  if (!j.is_object()) throw ValidationError("record is not a JSON object");
  Document d;
  d.id = RequiredString(j, "id");
  d.lang = RequiredString(j, "lang");
  if (d.id.empty()) throw ValidationError("empty id");
  if (d.lang.empty()) throw ValidationError("empty lang");
  if (j.contains("pair_id") && !j["pair_id"].is_null()) {
    if (!j["pair_id"].is_string()) throw ValidationError("field 'pair_id' must be a string");
    if (!j["pair_id"].get<std::string>().empty()) d.pair_id = j["pair_id"].get<std::string>();
  }
  d.title = j.contains("title") && j["title"].is_string() ? j["title"].get<std::string>() : "";
  if (!j.contains("abstract") || !j["abstract"].is_string()) {
    throw ValidationError("missing field 'abstract'");
  }
  d.abstract = j["abstract"].get<std::string>();
  if (text::Trim(d.abstract).empty()) throw ValidationError("empty 'abstract'");
  d.keywords = StringList(j, "keywords");
  d.fields = StringList(j, "fields");
  if (j.contains("sections") && !j["sections"].is_null()) {
    if (!j["sections"].is_object()) throw ValidationError("field 'sections' must be an object");
    for (const auto& [k, v] : j["sections"].items()) {
      if (!v.is_string()) throw ValidationError("section '" + k + "' must be text");
      d.sections[k] = v.get<std::string>();
    }
  }
  return d;
}

Json Sentence::ToJson() const {
  Json ents = Json::array();
  for (const auto& e : entities) {
    ents.push_back({{"surface", e.surface}, {"label", e.label}, {"start", e.start}, {"end", e.end}});
  }
  return {{"doc_id", doc_id}, {"index", index}, {"text", text}, {"entities", ents}};
}

Sentence Sentence::FromJson(const Json& j) {
  Sentence s;
  s.doc_id = RequiredString(j, "doc_id");
  s.index = j.at("index").get<size_t>();
  s.text = RequiredString(j, "text");
  if (j.contains("entities")) {
    for (const auto& e : j["entities"]) {
      nlp::Entity ent{e.at("surface").get<std::string>(), e.at("label").get<std::string>(),
                      e.at("start").get<size_t>(), e.at("end").get<size_t>()};
      if (ent.start > ent.end || ent.end > s.text.size()) {
        throw ValidationError("entity span outside sentence " + s.doc_id + "#" + std::to_string(s.index));
      }
      s.entities.push_back(std::move(ent));
    }
  }
  return s;
}

size_t Corpus::Ingest(const std::filesystem::path& path, std::optional<std::string> lang) {
  if (!std::filesystem::exists(path)) throw ValidationError("corpus file not found: " + path.string());
  std::vector<Document> batch;
  ReadJsonLines(path, [&](const Json& j, size_t line_no) {
    try {
      Document d = Document::FromJson(j);
      if (lang && d.lang != *lang) {
        throw ValidationError("language '" + d.lang + "' differs from expected '" + *lang + "'");
      }
      batch.push_back(std::move(d));
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": record " +
                            RecordName(j) + ": " + e.what());
    }
  });
  const size_t n = batch.size();
  Add(std::move(batch));
  return n;
}

void Corpus::Add(std::vector<Document> docs) {
  // Validate the whole batch before mutating.
  std::set<std::string, std::less<>> seen;
  auto pairs = pairs_;
  for (const auto& d : docs) {
    if (!languages_.count(d.lang)) throw ValidationError("unknown language code '" + d.lang + "' in " + d.id);
    if (index_.count(d.id) || !seen.insert(d.id).second) {
      throw ValidationError("duplicate document id '" + d.id + "'");
    }
    if (d.pair_id) {
      auto& by_lang = pairs[*d.pair_id];
      if (by_lang.count(d.lang)) {
        throw ValidationError("pair_id '" + *d.pair_id + "' has two '" + d.lang + "' documents (" +
                              by_lang[d.lang] + ", " + d.id + ")");
      }
      by_lang[d.lang] = d.id;
    }
  }
  pairs_ = std::move(pairs);
  for (auto& d : docs) {
    index_.emplace(d.id, docs_.size());
    docs_.push_back(std::move(d));
  }
}

void Corpus::Export(const std::filesystem::path& path) const {
  std::vector<Json> records;
  records.reserve(docs_.size());
  for (const auto& d : docs_) records.push_back(d.ToJson());
  WriteJsonLines(path, records);
}

const Document* Corpus::Find(std::string_view id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &docs_[it->second];
}

const Document& Corpus::Get(std::string_view id) const {
  const Document* d = Find(id);
  if (!d) throw ValidationError("unknown document id '" + std::string(id) + "'");
  return *d;
}

std::vector<BilingualPair> Corpus::Pairs() const {
  std::vector<BilingualPair> out;
  for (const auto& [pid, by_lang] : pairs_) {
    if (by_lang.size() != 2) continue;
    auto it = by_lang.begin();
    const std::string x = it->second;
    ++it;
    out.push_back({pid, x, it->second});
  }
  return out;
}

std::optional<std::string> Corpus::PartnerOf(std::string_view doc_id) const {
  const Document* d = Find(doc_id);
  if (!d || !d->pair_id) return std::nullopt;
  const auto& by_lang = pairs_.at(*d->pair_id);
  for (const auto& [lang, id] : by_lang) {
    if (lang != d->lang) return id;
  }
  return std::nullopt;
}

std::vector<Sentence> SplitSentences(const Document& doc, const nlp::SentenceSplitter& splitter) {
  if (text::Trim(doc.abstract).empty()) throw ValidationError("document " + doc.id + " has no abstract");
  nlp::SplitResult split;
  try {
    split = splitter.Split(doc.abstract, doc.lang);
  } catch (const BackendError& e) {
    throw BackendError("sentence splitting failed for " + doc.id + ": " + e.what());
  }
  std::vector<Sentence> out;
  for (auto& s : split.sentences) {
    if (text::Trim(s).empty()) continue;
    out.push_back({doc.id, out.size(), std::string(text::Trim(s)), {}});
  }
  return out;
}

std::vector<Sentence> FilterFactualCandidates(const std::vector<Sentence>& sentences,
                                              std::string_view lang,
                                              const nlp::EntityRecognizer& ner,
                                              size_t min_entities, FilterReport* report) {
  if (min_entities < 1) throw ValidationError("min_entities must be at least 1");
  std::vector<Sentence> out;
  for (const auto& s : sentences) {
    nlp::EntityResult r;
    try {
      r = ner.Recognize(s.text, lang);
    } catch (const Error& e) {
      if (report) report->warnings.push_back(s.doc_id + "#" + std::to_string(s.index) + ": " + e.what());
      continue;
    }
    if (report && r.fallback) ++report->ner_fallbacks;
    if (r.entities.size() < min_entities) continue;
    Sentence kept = s;
    kept.entities = std::move(r.entities);
    out.push_back(std::move(kept));
  }
  return out;
}

void WriteSentences(const std::filesystem::path& path, const std::vector<Sentence>& sentences) {
  std::vector<Json> records;
  records.reserve(sentences.size());
  for (const auto& s : sentences) records.push_back(s.ToJson());
  WriteJsonLines(path, records);
}

std::vector<Sentence> ReadSentences(const std::filesystem::path& path) {
  std::vector<Sentence> out;
  ReadJsonLines(path, [&](const Json& j, size_t line_no) {
    try {
      out.push_back(Sentence::FromJson(j));
    } catch (const Json::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  });
  return out;
}

}  // namespace clozebench
