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

#include <map>

#include "clozebench/dynamics.h"
#include "clozebench/error.h"
#include "clozebench/text.h"

namespace clozebench {

std::string LanguageGroup(std::string_view surface) {
  size_t latin = 0, ja = 0, digits = 0;
  const char* first = nullptr;
  for (const auto& cp : text::Codepoints(surface)) {
    switch (text::ScriptOf(cp.cp)) {
      case text::Script::kLatin:
        ++latin;
        if (!first) first = "EN";
        break;
      case text::Script::kHiragana:
      case text::Script::kKatakana:
      case text::Script::kHan:
        ++ja;
        if (!first) first = "JA";
        break;
      case text::Script::kDigit: ++digits; break;
      default: break;
    }
  }
  if (latin > ja) return "EN";
  if (ja > latin) return "JA";
  if (latin > 0) return first;  // equal letter counts: first letter decides
  return digits > 0 ? "NUM" : "X";
}

std::vector<std::string> LanguageGroups(std::span<const nlp::Token> tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(LanguageGroup(t.surface));
  return out;
}

std::vector<std::string> PosGroups(std::span<const nlp::Token> tokens, std::string_view text,
                                   std::string_view lang, const nlp::WordTagger& tagger) {
  const nlp::TagResult tagged = nlp::TagPos(tokens, text, lang, tagger);
  std::vector<std::string> out;
  out.reserve(tagged.tokens.size());
  for (const auto& t : tagged.tokens) out.push_back(t.pos.value_or("X"));
  return out;
}

std::vector<GroupCurve> AttributeTokens(std::span<const std::string> groups,
                                        const std::vector<std::vector<double>>& nlls) {
  std::map<std::string, GroupCurve> curves;
  for (const auto& g : groups) {
    auto& c = curves[g];
    c.group = g;
    ++c.token_count;
  }
  for (auto& [_, c] : curves) c.means.assign(nlls.size(), 0.0);
  for (size_t t = 0; t < nlls.size(); ++t) {
    if (nlls[t].size() != groups.size()) {
      throw ValidationError("checkpoint " + std::to_string(t) + " has " + std::to_string(nlls[t].size()) +
                            " token nlls for " + std::to_string(groups.size()) + " tokens");
    }
    for (size_t i = 0; i < groups.size(); ++i) curves[groups[i]].means[t] += nlls[t][i];
  }
  std::vector<GroupCurve> out;
  for (auto& [_, c] : curves) {
    for (double& m : c.means) m /= static_cast<double>(c.token_count);
    out.push_back(std::move(c));
  }
  return out;
}

Grouping ParseGrouping(const std::string& name) {
  if (name == "language") return Grouping::kLanguage;
  if (name == "pos") return Grouping::kPos;
  throw ValidationError("unknown grouping '" + name + "' (expected language or pos)");
}

AttributionRun AttributeDocuments(const std::vector<AttributionDoc>& docs, Grouping grouping,
                                  const Tokenizer& tokenizer, const CheckpointRegistry& checkpoints,
                                  Gateway& gateway, const nlp::WordTagger* tagger) {
  checkpoints.Validate(gateway);
  if (grouping == Grouping::kPos && !tagger) throw ValidationError("POS grouping needs a word tagger");
  AttributionRun run;
  std::vector<std::vector<std::string>> doc_groups(docs.size());
  std::vector<ScoreRequest> requests(docs.size());
  for (size_t d = 0; d < docs.size(); ++d) {
    const auto enc = tokenizer.Tokenize(docs[d].text);
    requests[d] = {{}, enc.ids()};
    if (grouping == Grouping::kLanguage) {
      doc_groups[d] = LanguageGroups(enc.tokens);
    } else {
      const auto tagged = nlp::TagPos(enc.tokens, docs[d].text, docs[d].lang, *tagger);
      if (tagged.failed || tagged.fallback) run.warnings.push_back(docs[d].id + ": POS fallback: " + tagged.warning);
      for (const auto& t : tagged.tokens) doc_groups[d].push_back(t.pos.value_or("X"));
    }
  }
  // Per checkpoint token nlls; documents unscored anywhere are dropped.
  std::vector<std::vector<std::vector<double>>> nlls(checkpoints.checkpoints.size());
  std::vector<char> ok(docs.size(), 1);
  for (size_t c = 0; c < checkpoints.checkpoints.size(); ++c) {
    std::vector<ScoreRequest> live;
    std::vector<size_t> where;
    for (size_t d = 0; d < docs.size(); ++d) {
      if (requests[d].target_tokens.empty()) {
        ok[d] = 0;
        continue;
      }
      live.push_back(requests[d]);
      where.push_back(d);
    }
    auto got = gateway.ScoreMany(checkpoints.checkpoints[c].backend, live);
    nlls[c].resize(docs.size());
    for (size_t j = 0; j < where.size(); ++j) {
      if (!got[j]) {
        ok[where[j]] = 0;
        continue;
      }
      nlls[c][where[j]] = got[j]->token_nlls;
    }
  }
  std::vector<std::string> groups;
  std::vector<std::vector<double>> pooled(checkpoints.checkpoints.size());
  for (size_t d = 0; d < docs.size(); ++d) {
    if (!ok[d]) {
      run.warnings.push_back(docs[d].id + ": unscored");
      continue;
    }
    groups.insert(groups.end(), doc_groups[d].begin(), doc_groups[d].end());
    for (size_t c = 0; c < pooled.size(); ++c) pooled[c].insert(pooled[c].end(), nlls[c][d].begin(), nlls[c][d].end());
  }
  run.curves = AttributeTokens(groups, pooled);
  for (size_t c = 0; c < checkpoints.checkpoints.size(); ++c) {
    for (const auto& g : run.curves) run.series.push_back({checkpoints.checkpoints[c].id, "token_nll", g.group, g.means[c]});
  }
  return run;
}

}  // namespace clozebench
