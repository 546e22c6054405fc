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

#include "clozebench/error.h"
#include "clozebench/perturb.h"
#include "clozebench/rng.h"
#include "clozebench/structured.h"
#include "clozebench/text.h"

namespace clozebench {


PartialSegment SplitPartial(const std::vector<std::string>& sentences, int segment) {
  if (segment < 1 || segment > 4) throw ValidationError("partial segment must be in 1..4");
  const size_t s = sentences.size(), base = s / 4, extra = s % 4;
  size_t begin = 0;
  for (int a = 1; a < segment; ++a) begin += base + (static_cast<size_t>(a - 1) < extra ? 1 : 0);
  const size_t len = base + (static_cast<size_t>(segment - 1) < extra ? 1 : 0);
  PartialSegment out;
  out.begin = begin;
  out.sentences.assign(sentences.begin() + static_cast<long>(begin),
                       sentences.begin() + static_cast<long>(begin + len));
  out.empty = len == 0;
  return out;
}

Json SentenceRewriteResult::ToJson() const {
  return {{"selected", selected}, {"failed", failed}, {"noop", noop}};
}

SentenceRewriteResult PerturbSentences(const std::vector<std::string>& sentences, const std::string& lang,
                                       const PerturbSpec& spec, Gateway& gateway, const std::string& rewriter,
                                       const PromptLibrary& prompts, std::string_view sequence_id,
                                       int max_attempts) {
  spec.Validate();
  if (!spec.IsRewriteKind()) throw ValidationError(KindName(spec.kind) + " is not a sentence rewrite");
  if (!gateway.HasGenerator(rewriter)) throw ValidationError("unknown rewriter backend '" + rewriter + "'");
  SentenceRewriteResult out;
  out.sentences = sentences;
  const size_t k = AffectedCount(spec.intensity_pct, sentences.size());
  if (k == 0) {
    out.noop = true;
    return out;
  }
  Rng rng(DeriveSeed(spec.seed, sequence_id));
  out.selected = rng.SampleWithoutReplacement(sentences.size(), k);
  const std::string task = "rewrite_" + KindName(spec.kind);
  static const Schema kSchema = {{"rewrite", FieldSpec::Type::kString}};
  auto non_empty = [](const Json& rec) -> std::string {
    return text::Trim(rec.at("rewrite").get<std::string>()).empty() ? "the rewrite must not be empty" : "";
  };
  for (size_t idx : out.selected) {
    Json input = {{"sentence", sentences[idx]}, {"lang", lang}};
    if (spec.kind == PerturbKind::kTranslation) input["target_lang"] = OtherLanguage(lang);
    StructuredResult r;
    try {
      r = GenerateStructured(gateway, rewriter, prompts.Render(task, input), kSchema, max_attempts, 0, non_empty);
    } catch (const BackendError& e) {
      r.error = e.what();
    }
    if (!r.ok()) {
      out.failed.push_back(idx);
      continue;
    }
    out.sentences[idx] = std::string(text::Trim(r.record->at("rewrite").get<std::string>()));
  }
  if (out.failed.size() * 5 > out.selected.size()) {
    throw RuntimeFailure("sequence " + std::string(sequence_id) + ": " + std::to_string(out.failed.size()) + " of " +
                         std::to_string(out.selected.size()) + " sentence rewrites failed (limit 20%)");
  }
  return out;
}

}  // namespace clozebench
