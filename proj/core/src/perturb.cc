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

#include "clozebench/perturb.h"

#include <algorithm>
#include <cstdlib>
#include <map>

#include "clozebench/dynamics.h"
#include "clozebench/error.h"
#include "clozebench/rng.h"
#include "clozebench/text.h"

namespace clozebench {
namespace {

const std::map<std::string, PerturbKind>& KindTable() {
  static const std::map<std::string, PerturbKind> kTable = {
      {"mask", PerturbKind::kMask},         {"random", PerturbKind::kRandom},
      {"delete", PerturbKind::kDelete},     {"reorder", PerturbKind::kReorder},
      {"monosyn", PerturbKind::kMonoSyn},   {"mltlsyn", PerturbKind::kMltlSyn},
      {"partial", PerturbKind::kPartial},   {"syntax", PerturbKind::kSyntax},
      {"lexicon", PerturbKind::kLexicon},   {"semantic", PerturbKind::kSemantic},
      {"translation", PerturbKind::kTranslation}};
  return kTable;
}

int ParseInt(const std::string& s, const std::string& what) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos || s.size() > 6) {
    throw ValidationError("bad " + what + " '" + s + "'");
  }
  return std::stoi(s);
}

}  // namespace

std::string KindName(PerturbKind kind) {
  for (const auto& [name, k] : KindTable())
    if (k == kind) return name;
  return "";
}

PerturbSpec PerturbSpec::Parse(const std::string& text, uint64_t seed) {
  const size_t sep = text.find_first_of(":-");
  if (sep == std::string::npos) throw ValidationError("perturbation spec '" + text + "' is not kind:X[@Y]");
  const std::string name = text.substr(0, sep);
  const auto it = KindTable().find(name);
  if (it == KindTable().end()) throw ValidationError("unknown perturbation kind '" + name + "'");
  PerturbSpec spec;
  spec.kind = it->second;
  spec.seed = seed;
  std::string rest = text.substr(sep + 1);
  if (const size_t at = rest.find('@'); at != std::string::npos) {
    spec.window = ParseInt(rest.substr(at + 1), "window");
    rest = rest.substr(0, at);
  }
  if (spec.kind == PerturbKind::kPartial) {
    spec.segment = ParseInt(rest, "segment");
  } else {
    spec.intensity_pct = ParseInt(rest, "intensity");
  }
  spec.Validate();
  return spec;
}

void PerturbSpec::Validate() const {
  const std::string name = KindName(kind);
  if (window.has_value() != (kind == PerturbKind::kReorder)) {
    throw ValidationError(kind == PerturbKind::kReorder ? "reorder needs a window: reorder:X@Y"
                                                        : "a window applies to reorder only");
  }
  if (window && *window < 1) throw ValidationError("reorder window must be at least 1");
  if (segment.has_value() != (kind == PerturbKind::kPartial)) {
    throw ValidationError(kind == PerturbKind::kPartial ? "partial needs a segment 1..4" : "a segment applies to partial only");
  }
  if (segment && (*segment < 1 || *segment > 4)) throw ValidationError("partial segment must be in 1..4");
  if (kind != PerturbKind::kPartial && (intensity_pct < 0 || intensity_pct > 100)) {
    throw ValidationError(name + " intensity must be in [0, 100]");
  }
}

std::string PerturbSpec::ToString() const {
  if (kind == PerturbKind::kPartial) return "partial:" + std::to_string(*segment);
  std::string s = KindName(kind) + ":" + std::to_string(intensity_pct);
  if (window) s += "@" + std::to_string(*window);
  return s;
}

std::string PerturbSpec::Suffix() const {
  std::string s = ToString();
  s[s.find(':')] = '-';
  return s;
}

bool PerturbSpec::IsIdKind() const {
  return kind == PerturbKind::kMask || kind == PerturbKind::kRandom || kind == PerturbKind::kDelete ||
         kind == PerturbKind::kReorder;
}

bool PerturbSpec::IsSynonymKind() const { return kind == PerturbKind::kMonoSyn || kind == PerturbKind::kMltlSyn; }

bool PerturbSpec::IsRewriteKind() const {
  return kind == PerturbKind::kSyntax || kind == PerturbKind::kLexicon || kind == PerturbKind::kSemantic ||
         kind == PerturbKind::kTranslation;
}

size_t AffectedCount(int intensity_pct, size_t n) {
  return (static_cast<size_t>(intensity_pct) * n + 50) / 100;
}

Json EditReport::ToJson() const {
  return {{"target", target},     {"replaced", replaced}, {"deleted", deleted},   {"moved", moved},
          {"distance", distance}, {"eligible", eligible}, {"shortfall", shortfall}, {"attempts", attempts},
          {"noop", noop},         {"within_tolerance", within_tolerance}};
}

// ---------------------------------------------------------------------------
// Id-level kinds

namespace {

// Randomized windowed swaps. A swap of positions i and j is admissible when
// both tokens stay within `window` of their original positions, and kept
// when it does not move the distance away from the target. Stops at the
// target, after 50n attempts, or once within +-1 of the target with no
// improvement for 2n attempts (odd targets are often unreachable by swaps).
void Reorder(std::span<const int32_t> ids, size_t k, size_t window, Rng& rng, PerturbedSequence& out) {
  const size_t n = ids.size();
  std::vector<size_t> src(n);
  for (size_t i = 0; i < n; ++i) src[i] = i;
  std::vector<int32_t> cur(ids.begin(), ids.end());
  size_t d = 0;
  const size_t budget = 50 * n;
  size_t attempts = 0, last_gain = 0;
  auto gap = [&](size_t dist) { return dist > k ? dist - k : k - dist; };
  while (d != k && attempts < budget && n > 1) {
    if (gap(d) <= 1 && attempts - last_gain >= 2 * n) break;
    ++attempts;
    const size_t i = rng.UniformIndex(n);
    const size_t lo = i >= window ? i - window : 0;
    const size_t hi = std::min(n - 1, i + window);
    const size_t j = lo + rng.UniformIndex(hi - lo + 1);
    if (j == i || cur[i] == cur[j]) continue;
    auto displaced = [&](size_t orig, size_t pos) { return (orig > pos ? orig - pos : pos - orig) > window; };
    if (displaced(src[i], j) || displaced(src[j], i)) continue;
    std::swap(cur[i], cur[j]);
    const size_t nd = LevenshteinDistance(ids, cur);
    if (gap(nd) <= gap(d)) {
      if (gap(nd) < gap(d)) last_gain = attempts;
      std::swap(src[i], src[j]);
      d = nd;
    } else {
      std::swap(cur[i], cur[j]);
    }
  }
  out.perturbed = std::move(cur);
  out.source_index = std::move(src);
  out.report.attempts = attempts;
  out.report.distance = d;
  out.report.within_tolerance = gap(d) <= 1;
  for (size_t p = 0; p < n; ++p) out.report.moved += out.source_index[p] != p;
}

}  // namespace

PerturbedSequence PerturbIds(std::span<const int32_t> ids, const PerturbSpec& spec, int32_t unk_id,
                             std::span<const int32_t> regular_ids, std::string_view sequence_id) {
  spec.Validate();
  if (!spec.IsIdKind()) throw ValidationError(KindName(spec.kind) + " is not a token-id perturbation");
  if (ids.empty()) throw ValidationError("cannot perturb an empty sequence");
  PerturbedSequence out;
  out.original.assign(ids.begin(), ids.end());
  const size_t n = ids.size();
  const size_t k = AffectedCount(spec.intensity_pct, n);
  out.report.target = k;
  if (k == 0) {
    out.perturbed = out.original;
    out.report.noop = true;
    return out;
  }
  Rng rng(DeriveSeed(spec.seed, sequence_id));
  switch (spec.kind) {
    case PerturbKind::kMask: {
      if (unk_id < 0) throw ValidationError("vocabulary has no unknown token");
      out.perturbed = out.original;
      for (size_t p : rng.SampleWithoutReplacement(n, k)) out.perturbed[p] = unk_id;
      out.report.replaced = k;
      break;
    }
    case PerturbKind::kRandom: {
      if (regular_ids.size() < 2) throw ValidationError("random replacement needs at least two regular tokens");
      out.perturbed = out.original;
      for (size_t p : rng.SampleWithoutReplacement(n, k)) {
        // Uniform over regular ids other than the original token.
        const auto self = std::find(regular_ids.begin(), regular_ids.end(), ids[p]);
        if (self == regular_ids.end()) {
          out.perturbed[p] = regular_ids[rng.UniformIndex(regular_ids.size())];
        } else {
          size_t r = rng.UniformIndex(regular_ids.size() - 1);
          if (r >= static_cast<size_t>(self - regular_ids.begin())) ++r;
          out.perturbed[p] = regular_ids[r];
        }
      }
      out.report.replaced = k;
      break;
    }
    case PerturbKind::kDelete: {
      const auto drop = rng.SampleWithoutReplacement(n, k);
      size_t next = 0;
      for (size_t p = 0; p < n; ++p) {
        if (next < drop.size() && drop[next] == p) {
          ++next;
          continue;
        }
        out.perturbed.push_back(ids[p]);
      }
      out.report.deleted = k;
      break;
    }
    case PerturbKind::kReorder:
      Reorder(ids, k, static_cast<size_t>(*spec.window), rng, out);
      return out;
    default: break;
  }
  out.report.distance = LevenshteinDistance(out.original, out.perturbed);
  return out;
}

PerturbedSequence PerturbTokens(std::span<const int32_t> ids, const PerturbSpec& spec, const Tokenizer& tokenizer,
                                std::string_view sequence_id) {
  return PerturbIds(ids, spec, tokenizer.unk_id(), tokenizer.regular_ids(), sequence_id);
}

// ---------------------------------------------------------------------------
// Synonym kinds

std::string OtherLanguage(const std::string& lang) { return lang == "ja" ? "en" : "ja"; }

SynonymResult PerturbSynonyms(const std::string& source, const std::string& lang, const PerturbSpec& spec,
                              const SynonymResources& res, std::string_view sequence_id) {
  spec.Validate();
  if (!spec.IsSynonymKind()) throw ValidationError(KindName(spec.kind) + " is not a synonym perturbation");
  if (!res.tagger || !res.wordnet || !res.stopwords) throw ValidationError("synonym perturbation needs tagger, WordNet and stop words");
  const std::string target_lang = spec.kind == PerturbKind::kMonoSyn ? lang : OtherLanguage(lang);
  SynonymResult out;
  const nlp::TagResult tagged = res.tagger->TagWords(source, lang);
  if (tagged.failed) throw BackendError("word tagging failed: " + tagged.warning);
  out.words = tagged.tokens;
  if (out.words.empty()) throw ValidationError("cannot perturb an empty sequence");
  const size_t k = AffectedCount(spec.intensity_pct, out.words.size());
  out.report.target = k;

  std::vector<std::vector<std::string>> candidates(out.words.size());
  for (size_t i = 0; i < out.words.size(); ++i) {
    const nlp::Token& w = out.words[i];
    if (!w.pos || !nlp::IsContentTag(*w.pos) || !w.offset) continue;
    const std::string lower = text::ToLowerAscii(w.surface);
    if (res.stopwords->Contains(lang, lower)) continue;
    auto syn = res.wordnet->LookupSynonyms(w.surface, lang, target_lang);
    if (syn.empty() && lower != w.surface) syn = res.wordnet->LookupSynonyms(lower, lang, target_lang);
    std::erase_if(syn, [&](const std::string& s) { return s == w.surface; });
    if (syn.empty()) continue;
    candidates[i] = std::move(syn);
    out.eligible.push_back(i);
  }
  out.report.eligible = out.eligible.size();
  out.text = source;
  if (k == 0) {
    out.report.noop = true;
    return out;
  }
  const size_t applied = std::min(k, out.eligible.size());
  out.report.shortfall = k - applied;
  Rng rng(DeriveSeed(spec.seed, sequence_id));
  for (size_t pick : rng.SampleWithoutReplacement(out.eligible.size(), applied)) {
    const size_t w = out.eligible[pick];
    out.replaced.push_back(w);
    out.replacements.push_back(candidates[w][rng.UniformIndex(candidates[w].size())]);
  }
  // Splice from the back so earlier byte offsets stay valid.
  for (size_t r = out.replaced.size(); r-- > 0;) {
    const auto [b, e] = *out.words[out.replaced[r]].offset;
    out.text.replace(b, e - b, out.replacements[r]);
  }
  out.report.replaced = applied;
  out.report.distance = applied;
  return out;
}

// ---------------------------------------------------------------------------
// Tracking

TrackResult TrackPerturbedLoss(const std::vector<VariantSet>& variants, const CheckpointRegistry& checkpoints,
                               Gateway& gateway, double max_unscored_fraction) {
  checkpoints.Validate(gateway);
  TrackResult out;
  std::vector<std::string> failures;
  for (const auto& v : variants) {
    std::vector<ScoreRequest> requests;
    for (const auto& seq : v.sequences) requests.push_back({{}, seq});
    std::vector<double> curve;
    for (const auto& ck : checkpoints.checkpoints) {
      std::vector<std::optional<ScoreResponse>> resp(requests.size());
      // Empty sequences cannot be scored; keep them out of the backend call.
      std::vector<ScoreRequest> live;
      std::vector<size_t> where;
      for (size_t i = 0; i < requests.size(); ++i) {
        if (requests[i].target_tokens.empty()) continue;
        where.push_back(i);
        live.push_back(requests[i]);
      }
      auto got = gateway.ScoreMany(ck.backend, live);
      for (size_t j = 0; j < where.size(); ++j) resp[where[j]] = std::move(got[j]);
      TrackRow row{v.name, ck.id, 0.0, 0, 0};
      double sum = 0;
      for (const auto& r : resp) {
        if (!r) {
          ++row.unscored;
          continue;
        }
        ++row.scored;
        sum += r->mean_nll;
      }
      row.mean_nll = row.scored ? sum / static_cast<double>(row.scored) : 0.0;
      if (!resp.empty() && static_cast<double>(row.unscored) > max_unscored_fraction * static_cast<double>(resp.size())) {
        failures.push_back(v.name + " @ " + ck.id + ": " + std::to_string(row.unscored) + " of " +
                           std::to_string(resp.size()) + " sequences unscored");
      }
      curve.push_back(row.mean_nll);
      out.rows.push_back(row);
    }
    const Onset o = DetectOnset(curve);
    out.onsets.push_back({v.name, o.index, checkpoints.checkpoints[o.index].id, o.at_end});
  }
  if (!failures.empty()) {
    std::string msg = "loss tracking failed:";
    for (const auto& f : failures) msg += "\n  " + f;
    throw RuntimeFailure(msg);
  }
  return out;
}

std::string TrackCsv(const TrackResult& r) {
  std::string out = CsvRow({"variant", "checkpoint", "mean_nll", "scored", "unscored"});
  for (const auto& row : r.rows) {
    out += CsvRow({row.variant, row.checkpoint, FormatDouble(row.mean_nll), std::to_string(row.scored),
                   std::to_string(row.unscored)});
  }
  return out;
}

}  // namespace clozebench
