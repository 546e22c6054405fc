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

// Transfer-enhancement corpora (C_T) and the token budget cut.

#include <fstream>

#include "clozebench/error.h"
#include "clozebench/recipes.h"
#include "clozebench/rng.h"
#include "clozebench/text.h"

namespace clozebench {
namespace {

const std::vector<std::pair<std::string, TransferKind>>& KindNames() {
  static const std::vector<std::pair<std::string, TransferKind>> kNames = {
      {"none", TransferKind::kNone},
      {"medical_monolingual", TransferKind::kMedicalMonolingual},
      {"balanced_translation", TransferKind::kBalancedTranslation},
      {"science_translation", TransferKind::kScienceTranslation},
      {"medical_translation", TransferKind::kMedicalTranslation},
      {"medical_roman", TransferKind::kMedicalRoman},
      {"medical_roman2en", TransferKind::kMedicalRoman2En}};
  return kNames;
}

std::string GuessLang(std::string_view s) {
  for (const auto& cp : text::Codepoints(s)) {
    const auto sc = text::ScriptOf(cp.cp);
    if (sc == text::Script::kHiragana || sc == text::Script::kKatakana || sc == text::Script::kHan) return "ja";
  }
  return "en";
}

// Translation instruction in one direction.
std::string TranslationRecord(const std::string& src_lang, const std::string& src, const std::string& tgt_lang,
                              const std::string& tgt) {
  auto name = [](const std::string& l) { return l == "ja" ? "Japanese" : l == "ja-Latn" ? "romanized Japanese" : "English"; };
  return "Translate the following " + std::string(name(src_lang)) + " text into " + name(tgt_lang) + ".\n" + src +
         "\nTranslation: " + tgt;
}

std::string DirectedTranslation(uint64_t seed, const std::string& key, const std::string& lang_a, const std::string& a,
                                const std::string& lang_b, const std::string& b) {
  Rng rng(DeriveSeed(seed, key + ":direction"));
  return rng.UniformIndex(2) == 0 ? TranslationRecord(lang_a, a, lang_b, b) : TranslationRecord(lang_b, b, lang_a, a);
}

template <typename Fn>
void ForEachLine(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::string line;
  size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::Trim(line).empty()) continue;
    fn(line, n);
  }
}

std::vector<std::string> SplitOn(const std::string& s, std::string_view sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const size_t at = s.find(sep, start);
    out.emplace_back(text::Trim(std::string_view(s).substr(start, at == std::string::npos ? std::string::npos : at - start)));
    if (at == std::string::npos) break;
    start = at + sep.size();
  }
  return out;
}

std::string DocText(const Document& d) { return d.title.empty() ? d.abstract : d.title + "\n" + d.abstract; }

std::string Romanize(const nlp::Romanizer* r, const std::string& s) {
  static const nlp::KanaRomanizer kFallback;
  return (r ? *r : static_cast<const nlp::Romanizer&>(kFallback)).Romanize(s).text;
}

}  // namespace

std::string TransferKindName(TransferKind k) {
  for (const auto& [n, v] : KindNames())
    if (v == k) return n;
  return "";
}

TransferKind ParseTransferKind(const std::string& name) {
  for (const auto& [n, v] : KindNames())
    if (n == name) return v;
  std::string known;
  for (const auto& [n, _] : KindNames()) known += (known.empty() ? "" : ", ") + n;
  throw ValidationError("unknown transfer corpus kind '" + name + "' (expected one of " + known + ")");
}

Json BudgetReport::ToJson() const {
  return {{"budget", budget},
          {"total_tokens", total_tokens},
          {"documents", documents},
          {"truncated_last", truncated_last},
          {"contamination_removed", contamination_removed},
          {"domain_excluded", domain_excluded}};
}

std::vector<CorpusDoc> TakeBudget(std::vector<CorpusDoc> pool, size_t budget, const Tokenizer& tokenizer,
                                  const nlp::SentenceSplitter& splitter, BudgetReport* report) {
  BudgetReport local;
  BudgetReport& rep = report ? *report : local;
  rep.budget = budget;
  size_t available = 0;
  for (auto& d : pool) {
    d.token_count = tokenizer.CountTokens(d.text);
    available += d.token_count;
  }
  if (available < budget) {
    throw ValidationError("source has " + std::to_string(available) + " tokens, " + std::to_string(budget - available) +
                          " short of the " + std::to_string(budget) + "-token budget");
  }
  std::vector<CorpusDoc> out;
  size_t total = 0;
  for (auto& d : pool) {
    if (total == budget) break;
    if (total + d.token_count <= budget) {
      total += d.token_count;
      out.push_back(std::move(d));
      continue;
    }
    // Longest sentence-boundary prefix that fits.
    const size_t room = budget - total;
    const auto sentences = splitter.Split(d.text, GuessLang(d.text)).sentences;
    size_t cursor = 0, best_end = 0, best_tokens = 0;
    for (const auto& s : sentences) {
      const size_t at = d.text.find(s, cursor);
      if (at == std::string::npos) break;
      cursor = at + s.size();
      const size_t n = tokenizer.CountTokens(std::string_view(d.text).substr(0, cursor));
      if (n > room) break;
      best_end = cursor;
      best_tokens = n;
    }
    if (best_end > 0) {
      d.text.resize(best_end);
      d.token_count = best_tokens;
      total += best_tokens;
      rep.truncated_last = true;
      out.push_back(std::move(d));
    }
    break;
  }
  rep.total_tokens = total;
  rep.documents = out.size();
  return out;
}

std::set<std::string> LoadEvalDocIds(const std::vector<std::filesystem::path>& paths, const Corpus* corpus) {
  std::set<std::string> ids;
  for (const auto& p : paths) {
    ReadJsonLines(p, [&](const Json& j, size_t) {
      if (!j.is_object()) return;
      if (j.contains("source") && j["source"].is_object() && j["source"].contains("doc_id")) {
        ids.insert(j["source"]["doc_id"].get<std::string>());
      }
      for (const char* key : {"doc_id", "paired_doc_id"}) {
        if (j.contains(key) && j[key].is_string()) ids.insert(j[key].get<std::string>());
      }
      if (j.contains("instance_id") && j["instance_id"].is_string()) {
        const std::string id = j["instance_id"].get<std::string>();
        ids.insert(id.substr(0, id.rfind(':')));
      }
    });
  }
  if (corpus) {
    std::set<std::string> partners;
    for (const auto& id : ids)
      if (corpus->Find(id))
        if (auto p = corpus->PartnerOf(id)) partners.insert(*p);
    ids.insert(partners.begin(), partners.end());
  }
  return ids;
}

std::vector<CorpusDoc> BuildTransferCorpus(TransferKind kind, const TransferSources& sources, size_t budget,
                                           uint64_t seed, const Tokenizer& tokenizer, BudgetReport* report) {
  BudgetReport local;
  BudgetReport& rep = report ? *report : local;
  rep = BudgetReport{};
  rep.budget = budget;
  if (kind == TransferKind::kNone) return {};
  const std::string name = TransferKindName(kind);
  std::vector<CorpusDoc> pool;
  auto add = [&](std::string id, std::string text) {
    pool.push_back({std::move(id), "transfer", name, std::move(text), 0});
  };
  auto excluded = [&](const std::string& id) {
    if (!sources.exclude_ids.count(id)) return false;
    ++rep.contamination_removed;
    return true;
  };

  switch (kind) {
    case TransferKind::kBalancedTranslation: {
      if (sources.jparacrawl.empty()) throw ValidationError("balanced_translation needs a JParaCrawl file");
      ForEachLine(sources.jparacrawl, [&](const std::string& line, size_t n) {
        const auto cols = SplitOn(line, "\t");
        if (cols.size() < 2) throw ValidationError(sources.jparacrawl.string() + ":" + std::to_string(n) + ": expected tab-separated columns");
        const std::string& en = cols[cols.size() - 2];
        const std::string& ja = cols.back();
        if (en.empty() || ja.empty()) return;
        const std::string id = "jparacrawl:" + std::to_string(n);
        add(id, DirectedTranslation(seed, id, "en", en, "ja", ja));
      });
      break;
    }
    case TransferKind::kScienceTranslation: {
      if (sources.aspec.empty()) throw ValidationError("science_translation needs an ASPEC file");
      ForEachLine(sources.aspec, [&](const std::string& line, size_t n) {
        const auto cols = SplitOn(line, "|||");
        if (cols.size() < 4) {
          throw ValidationError(sources.aspec.string() + ":" + std::to_string(n) + ": expected 'doc_id ||| domain ||| ja ||| en'");
        }
        const std::string& doc_id = cols[cols.size() - 4];
        const std::string domain = text::ToLowerAscii(cols[cols.size() - 3]);
        if (sources.aspec_excluded_domains.count(domain)) {
          ++rep.domain_excluded;
          return;
        }
        if (excluded(doc_id)) return;
        const std::string id = "aspec:" + doc_id + ":" + std::to_string(n);
        add(id, DirectedTranslation(seed, id, "ja", cols[cols.size() - 2], "en", cols.back()));
      });
      break;
    }
    default: {
      if (!sources.medical) throw ValidationError(name + " needs a medical corpus");
      const Corpus& med = *sources.medical;
      for (const auto& d : med.documents()) {
        if (d.lang != sources.medical_lang) continue;
        const auto partner_id = med.PartnerOf(d.id);
        const bool needs_partner = kind == TransferKind::kMedicalTranslation || kind == TransferKind::kMedicalRoman2En;
        if (needs_partner && !partner_id) continue;
        if (excluded(d.id) || (partner_id && needs_partner && excluded(*partner_id))) continue;
        switch (kind) {
          case TransferKind::kMedicalMonolingual: add(d.id, DocText(d)); break;
          case TransferKind::kMedicalTranslation: {
            const Document& p = med.Get(*partner_id);
            add(d.id, DirectedTranslation(seed, d.id, d.lang, DocText(d), p.lang, DocText(p)));
            break;
          }
          case TransferKind::kMedicalRoman:
            add(d.id, "Convert the following Japanese text into romaji.\n" + DocText(d) + "\nRomaji: " +
                          Romanize(sources.romanizer, DocText(d)));
            break;
          case TransferKind::kMedicalRoman2En: {
            const Document& p = med.Get(*partner_id);
            add(d.id, DirectedTranslation(seed, d.id, "ja-Latn", Romanize(sources.romanizer, DocText(d)), p.lang,
                                          DocText(p)));
            break;
          }
          default: break;
        }
      }
    }
  }
  static const nlp::RuleSentenceSplitter kFallback;
  const nlp::SentenceSplitter& sp = sources.splitter ? *sources.splitter : kFallback;
  const size_t removed = rep.contamination_removed, domain = rep.domain_excluded;
  auto out = TakeBudget(std::move(pool), budget, tokenizer, sp, &rep);
  rep.contamination_removed = removed;
  rep.domain_excluded = domain;
  return out;
}

}  // namespace clozebench
