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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails. Every check runs on mock backends and
// the built-in NLP adapters; oracles are brute-force re-derivations that do
// not call the code under test.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cli.h"
#include "clozebench/adaxeval.h"
#include "clozebench/corpus.h"
#include "clozebench/dynamics.h"
#include "clozebench/jsonl.h"
#include "clozebench/mc_eval.h"
#include "clozebench/mock_backends.h"
#include "clozebench/nlp_client.h"
#include "clozebench/parallel.h"
#include "clozebench/perturb.h"
#include "clozebench/recipes.h"
#include "clozebench/registry.h"
#include "clozebench/rng.h"
#include "clozebench/text.h"
#include "clozebench/tokenizer.h"

namespace cb = clozebench;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and sizes.
constexpr double kNllTolerance = 1e-9;
constexpr double kOracleSeconds = 10.0;
constexpr size_t kOracleInstances = 50;
constexpr size_t kQuadruples = 1000;
constexpr size_t kSequencesPerSpec = 500;
constexpr double kPerturbSeconds = 60.0;
constexpr size_t kOnsetMaxLength = 6;
constexpr int kOnsetValues = 5;  // trajectory values 0..4
constexpr size_t kMinSchemaInstances = 400;
constexpr double kChiSquareAlpha = 0.01;
constexpr size_t kStreamTokens = 500000;

const fs::path kFixtureCorpus = fs::path(CLOZEBENCH_SOURCE_DATA_DIR) / "fixtures" / "corpus.jsonl";
const fs::path kTestData = fs::path(CLOZEBENCH_TEST_DATA_DIR);

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> failures;

  void Fail(std::string what) {
    pass = false;
    if (failures.size() < 5) failures.push_back(std::move(what));
  }
};

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

fs::path ScratchDir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("clozebench_acceptance_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct MockWorld {
  cb::Tokenizer tokenizer = cb::Tokenizer::Builtin();
  cb::Gateway gateway;
  cb::BackendRegistry registry = cb::BackendRegistry::BuiltinMock();
  cb::nlp::NlpAdapters nlp = cb::nlp::MakeNlpAdapters({});

  MockWorld() { registry.Populate(gateway, tokenizer.vocab_size()); }

  cb::GenerateConfig Config(uint64_t seed) const {
    cb::GenerateConfig gc;
    gc.judges = registry.roles.judges;
    gc.generator = registry.roles.generator;
    gc.filter = registry.roles.filter;
    gc.seed = seed;
    return gc;
  }
};

// ---------------------------------------------------------------------------
// 1. Chain-rule oracle on a 3-symbol bigram table.

// Maps text to ids of the vocabulary {<unk>, a, b, c} without the tokenizer.
std::vector<int32_t> OracleIds(const std::string& s) {
  std::vector<int32_t> ids;
  for (char ch : s) ids.push_back(ch == 'a' ? 1 : ch == 'b' ? 2 : ch == 'c' ? 3 : 0);
  return ids;
}

// Mean nll of `target` after `context` by marginalising the joint
// distribution over every completion of the same length.
double OracleMeanNll(const cb::BigramScorer& table, const std::vector<int32_t>& context,
                     const std::vector<int32_t>& target) {
  const int32_t v = static_cast<int32_t>(table.vocab_size());
  auto joint = [&](const std::vector<int32_t>& seq) {
    double p = 1.0;
    int32_t prev = cb::BigramScorer::kStart;
    for (int32_t id : seq) {
      p *= table.TransitionProbability(prev, id);
      prev = id;
    }
    return p;
  };
  std::vector<int32_t> full = context;
  full.insert(full.end(), target.begin(), target.end());
  const double p_full = joint(full);
  double p_context = 0.0;
  std::vector<int32_t> tail(target.size(), 0);
  while (true) {
    std::vector<int32_t> seq = context;
    seq.insert(seq.end(), tail.begin(), tail.end());
    p_context += joint(seq);
    size_t i = 0;
    while (i < tail.size() && ++tail[i] == v) tail[i++] = 0;
    if (i == tail.size()) break;
  }
  return -std::log(p_full / p_context) / static_cast<double>(target.size());
}

std::string RandomWord(cb::Rng& rng, size_t min_len, size_t max_len) {
  const size_t n = min_len + rng.UniformIndex(max_len - min_len + 1);
  std::string s;
  for (size_t i = 0; i < n; ++i) s += static_cast<char>('a' + rng.UniformIndex(3));
  return s;
}

Outcome CheckOracle() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const cb::Tokenizer tok = cb::Tokenizer::FromPieces({"<unk>", "a", "b", "c"});
  cb::Gateway gw;
  auto t0 = std::make_shared<cb::BigramScorer>(101, 4);
  auto t1 = std::make_shared<cb::BigramScorer>(202, 4);
  gw.AddScorer("t0", t0);
  gw.AddScorer("t1", t1);
  cb::CheckpointRegistry ckpts{{{"c0", "t0"}, {"c1", "t1"}}};
  const std::map<std::string, const cb::BigramScorer*> tables = {{"c0", t0.get()}, {"c1", t1.get()}};

  cb::Rng rng(4242);
  std::vector<cb::EvalInstance> dataset;
  for (size_t i = 0; i < kOracleInstances; ++i) {
    cb::EvalInstance inst;
    char id[16];
    std::snprintf(id, sizeof(id), "syn-%02zu", i);
    inst.id = id;
    inst.doc_id = "syn";
    inst.sentence_index = i;
    inst.lang = i % 2 ? "ja" : "en";  // en inserts a separator before the option
    // Context 1..3 symbols; option 1..2; suffix 0..1: at most 4+3 symbols.
    const std::string prefix = RandomWord(rng, 1, 3), suffix = RandomWord(rng, 0, 1);
    std::set<std::string> opts;
    while (opts.size() < 4) opts.insert(RandomWord(rng, 1, 2));
    inst.options.assign(opts.begin(), opts.end());
    rng.Shuffle(inst.options);
    inst.answer_index = rng.UniformIndex(4);
    inst.cloze_query = prefix + std::string(cb::kBlank) + suffix;
    inst.paraphrase_query = RandomWord(rng, 1, 4);
    inst.sentence = prefix + inst.options[inst.answer_index] + suffix;
    inst.triple = {prefix, "r", inst.options[inst.answer_index]};
    dataset.push_back(std::move(inst));
  }

  size_t compared = 0;
  for (auto mode : {cb::EvalMode::kCloze, cb::EvalMode::kParaphrase}) {
    cb::EvalOptions opt;
    opt.mode = mode;
    const auto run = cb::EvaluateDataset(dataset, ckpts, gw, tok, opt);
    std::map<std::string, const cb::EvalInstance*> by_id;
    for (const auto& d : dataset) by_id[d.id] = &d;
    if (run.results.size() != dataset.size() * 2) o.Fail("expected one result per instance and checkpoint");
    for (const auto& r : run.results) {
      const auto& inst = *by_id.at(r.instance_id);
      std::vector<double> oracle;
      for (const auto& option : inst.options) {
        std::vector<int32_t> ctx, tgt;
        if (mode == cb::EvalMode::kCloze) {
          const size_t at = inst.cloze_query.find(cb::kBlank);
          ctx = OracleIds(inst.cloze_query.substr(0, at));
          tgt = OracleIds(option + inst.cloze_query.substr(at + cb::kBlank.size()));
        } else {
          ctx = OracleIds(inst.paraphrase_query);
          tgt = OracleIds((inst.lang == "en" ? " " : "") + option);
        }
        oracle.push_back(OracleMeanNll(*tables.at(r.checkpoint_id), ctx, tgt));
      }
      // Earliest index among values within the tolerance of the minimum:
      // options that tie in exact arithmetic can differ by an ulp here.
      const double lo = *std::min_element(oracle.begin(), oracle.end());
      size_t best = 0;
      while (oracle[best] - lo >= kNllTolerance) ++best;
      for (size_t k = 0; k < 4; ++k) {
        const double d = std::fabs(r.scores.at(k).mean_nll - oracle[k]);
        ++compared;
        if (!(d < kNllTolerance)) o.Fail(r.instance_id + " option " + std::to_string(k) + " |delta|=" + std::to_string(d));
      }
      if (r.predicted_index != best) {
        std::string losses;
        for (double l : oracle) losses += " " + cb::FormatDouble(l);
        o.Fail(r.instance_id + "@" + r.checkpoint_id + " predicted " + std::to_string(r.predicted_index) +
               ", oracle argmin " + std::to_string(best) + " over" + losses);
      }
    }
  }
  const double secs = Seconds(start);
  if (secs >= kOracleSeconds) o.Fail("runtime " + std::to_string(secs) + " s");
  o.detail = std::to_string(compared) + " option losses vs brute-force marginalisation, |delta| < 1e-9, " +
             cb::FormatDouble(std::round(secs * 1000) / 1000) + " s";
  return o;
}

// ---------------------------------------------------------------------------
// 2. Loss-ratio / argmin invariants.

Outcome CheckLossShielding() {
  Outcome o;
  cb::Rng rng(777);
  size_t strict = 0;
  for (size_t q = 0; q < kQuadruples; ++q) {
    std::array<double, 4> losses;
    for (double& l : losses) l = std::exp(rng.UniformReal() * 8.0 - 4.0);
    if (q % 10 == 0) losses[rng.UniformIndex(4)] = losses[rng.UniformIndex(4)];  // some ties
    const size_t correct = rng.UniformIndex(4);
    const auto ratio = cb::LossRatio(losses, correct);
    if (!ratio || !(*ratio > 0.0 && *ratio < 1.0)) o.Fail("ratio outside (0,1) at quadruple " + std::to_string(q));
    bool strict_min = true;
    for (size_t i = 0; i < 4; ++i)
      if (i != correct && !(losses[correct] < losses[i])) strict_min = false;
    if (strict_min) {
      ++strict;
      if (!(ratio && *ratio < 0.25)) o.Fail("strict argmin with ratio >= 0.25 at quadruple " + std::to_string(q));
    }
    const auto base = cb::PredictArgmin(losses);
    for (double shift : {-0.5 * *std::min_element(losses.begin(), losses.end()), 0.75, 3.0, 100.0}) {
      std::array<double, 4> moved;
      for (size_t i = 0; i < 4; ++i) moved[i] = losses[i] + shift;
      const auto a = cb::PredictArgmin(moved);
      if (a.index != base.index || a.tie != base.tie) o.Fail("argmin moved under +" + std::to_string(shift));
    }
  }
  o.detail = std::to_string(kQuadruples) + " quadruples (" + std::to_string(strict) + " strict argmin), " +
             std::to_string(o.failures.size()) + " failures";
  return o;
}

// ---------------------------------------------------------------------------
// 3. Transition partition on an evaluated fixture.

Outcome CheckTransitions() {
  Outcome o;
  MockWorld w;
  cb::Corpus corpus;
  corpus.Ingest(kFixtureCorpus);
  cb::Pipeline pipeline(w.gateway, cb::PromptLibrary::Builtin(), w.Config(7));
  const auto built = cb::BuildDataset(corpus, w.nlp, pipeline, ScratchDir("transitions"));
  size_t checked = 0;
  for (auto mode : {cb::EvalMode::kCloze, cb::EvalMode::kParaphrase}) {
    cb::EvalOptions opt;
    opt.mode = mode;
    const auto run = cb::EvaluateDataset(built.instances, cb::CheckpointRegistry::BuiltinMock(), w.gateway, w.tokenizer, opt);
    const auto set = cb::BuildTrajectories(run.results, cb::CheckpointOrder(run.results));
    // post-accuracy from the accuracy table, keyed (checkpoint, lang).
    std::map<std::pair<std::string, std::string>, cb::AccuracyRow> acc;
    for (const auto& r : run.accuracy) acc[{r.checkpoint_id, r.lang}] = r;
    for (size_t pre = 0; pre < set.checkpoints.size(); ++pre) {
      for (size_t post = pre + 1; post < set.checkpoints.size(); ++post) {
        for (const auto& [group, c] : cb::CountTransitions(set, pre, post)) {
          size_t n = 0;
          for (const auto& t : set.trajectories)
            if (group == "all" || t.lang == group) ++n;
          const auto& row = acc.at({set.checkpoints[post], group});
          const double expected = row.accuracy * static_cast<double>(n);
          ++checked;
          if (c.total() != n) o.Fail(group + ": counts sum to " + std::to_string(c.total()) + ", N=" + std::to_string(n));
          if (row.n != n || static_cast<double>(c.retained + c.acquired) != std::round(expected) ||
              std::fabs(expected - std::round(expected)) > 1e-9)
            o.Fail(group + ": Retained+Acquired=" + std::to_string(c.retained + c.acquired) + ", accuracy*N=" +
                   std::to_string(expected));
        }
      }
    }
  }
  o.detail = std::to_string(checked) + " (mode, checkpoint pair, group) tables on " +
             std::to_string(built.instances.size()) + " fixture instances";
  return o;
}

// ---------------------------------------------------------------------------
// 4. Perturbation properties.

size_t DpLevenshtein(const std::vector<int32_t>& a, const std::vector<int32_t>& b) {
  std::vector<size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), 0);
  for (size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

size_t RoundedCount(int pct, size_t n) {
  // round(pct% of n) with halves up, in exact integer arithmetic.
  return (static_cast<size_t>(pct) * n * 2 + 100) / 200;
}

bool IsSubsequence(const std::vector<int32_t>& sub, const std::vector<int32_t>& seq) {
  size_t i = 0;
  for (int32_t x : seq)
    if (i < sub.size() && sub[i] == x) ++i;
  return i == sub.size();
}

std::string CheckIdSequence(const std::vector<int32_t>& orig, const cb::PerturbSpec& spec, const cb::Tokenizer& tok,
                            const std::string& seq_id) {
  const auto p = cb::PerturbTokens(orig, spec, tok, seq_id);
  const auto again = cb::PerturbTokens(orig, spec, tok, seq_id);
  if (again.perturbed != p.perturbed) return "not deterministic";
  const size_t k = RoundedCount(spec.intensity_pct, orig.size());
  switch (spec.kind) {
    case cb::PerturbKind::kMask:
    case cb::PerturbKind::kRandom: {
      if (p.perturbed.size() != orig.size()) return "length changed";
      size_t changed = 0;
      for (size_t i = 0; i < orig.size(); ++i) {
        if (p.perturbed[i] == orig[i]) continue;
        ++changed;
        if (spec.kind == cb::PerturbKind::kMask && p.perturbed[i] != tok.unk_id()) return "mask wrote a non-<unk> token";
        if (spec.kind == cb::PerturbKind::kRandom && tok.IsSpecial(p.perturbed[i])) return "random wrote a special token";
      }
      if (changed != k) return "replaced " + std::to_string(changed) + " of expected " + std::to_string(k);
      return "";
    }
    case cb::PerturbKind::kDelete:
      if (orig.size() - p.perturbed.size() != k) return "deleted " + std::to_string(orig.size() - p.perturbed.size());
      if (!IsSubsequence(p.perturbed, orig)) return "delete output is not a subsequence";
      return "";
    case cb::PerturbKind::kReorder: {
      auto a = orig, b = p.perturbed;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      if (a != b) return "multiset changed";
      const size_t y = static_cast<size_t>(*spec.window);
      if (k > 0) {
        if (p.source_index.size() != orig.size()) return "missing source index";
        std::vector<char> seen(orig.size(), 0);
        for (size_t i = 0; i < orig.size(); ++i) {
          const size_t s = p.source_index[i];
          if (s >= orig.size() || seen[s]++) return "source index is not a permutation";
          if (orig[s] != p.perturbed[i]) return "source index disagrees with output";
          if ((s > i ? s - i : i - s) > y) return "token moved beyond the window";
        }
      } else if (p.perturbed != orig) {
        return "k=0 changed the sequence";
      }
      const size_t d = DpLevenshtein(orig, p.perturbed);
      if ((d > k ? d - k : k - d) > 1)
        return "distance " + std::to_string(d) + " vs target " + std::to_string(k) + " (n=" + std::to_string(orig.size()) + ")";
      return "";
    }
    default: return "unexpected kind";
  }
}

// Random prose over a pool mixing synonym-bearing content words, plain
// content words and function words.
std::string RandomProse(cb::Rng& rng, const std::string& lang) {
  static const std::vector<std::string> kEn = {"the", "of", "and", "in", "is", "with", "a", "was",
                                               "diabetes", "insulin", "patient", "study", "cell", "tumor",
                                               "therapy", "risk", "effect", "symptom", "disease", "liver",
                                               "glucose", "protein", "analysis", "inhibit", "evaluate", "observe",
                                               "Insulin", "Patient", "level", "increase", "expression", "treat"};
  static const std::vector<std::string> kJa = {"は", "の", "を", "に", "が", "と", "。", "糖尿病", "患者", "研究",
                                               "細胞", "腫瘍", "治療", "効果", "症状", "肝臓", "インスリン", "リスク",
                                               "発現", "増加", "血糖", "評価", "する", "した", "抑制"};
  const auto& pool = lang == "ja" ? kJa : kEn;
  const size_t n = 5 + rng.UniformIndex(30);
  std::string s;
  for (size_t i = 0; i < n; ++i) {
    if (i && lang != "ja") s += ' ';
    s += pool[rng.UniformIndex(pool.size())];
  }
  return s + (lang == "ja" ? "。" : ".");
}

std::string CheckSynonymText(const std::string& text, const std::string& lang, const cb::PerturbSpec& spec,
                             const cb::SynonymResources& res, const std::string& seq_id) {
  const auto r = cb::PerturbSynonyms(text, lang, spec, res, seq_id);
  if (cb::PerturbSynonyms(text, lang, spec, res, seq_id).text != r.text) return "not deterministic";
  const std::string target = spec.kind == cb::PerturbKind::kMonoSyn ? lang : (lang == "ja" ? "en" : "ja");
  // Independent eligibility from a fresh tagging of the source.
  const auto tagged = res.tagger->TagWords(text, lang);
  if (tagged.tokens.size() != r.words.size()) return "word units differ from the tagger";
  std::set<size_t> eligible;
  for (size_t i = 0; i < tagged.tokens.size(); ++i) {
    const auto& w = tagged.tokens[i];
    if (!w.pos || !(*w.pos == "NOUN" || *w.pos == "PROPN" || *w.pos == "VERB" || *w.pos == "ADJ")) continue;
    std::string lower = w.surface;
    for (char& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (res.stopwords->Contains(lang, lower)) continue;
    auto syn = res.wordnet->LookupSynonyms(w.surface, lang, target);
    if (syn.empty()) syn = res.wordnet->LookupSynonyms(lower, lang, target);
    std::erase(syn, w.surface);
    if (!syn.empty()) eligible.insert(i);
  }
  const size_t k = RoundedCount(spec.intensity_pct, r.words.size());
  if (r.replaced.size() != std::min(k, eligible.size()))
    return "replaced " + std::to_string(r.replaced.size()) + ", expected " + std::to_string(std::min(k, eligible.size()));
  // Rebuild the output from untouched source bytes plus the replacements.
  std::map<size_t, std::string> repl;
  for (size_t j = 0; j < r.replaced.size(); ++j) {
    const size_t w = r.replaced[j];
    if (!eligible.count(w)) return "touched ineligible word '" + r.words[w].surface + "'";
    const auto& word = tagged.tokens[w];
    std::string lower = word.surface;
    for (char& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    auto syn = res.wordnet->LookupSynonyms(word.surface, lang, target);
    auto syn_lower = res.wordnet->LookupSynonyms(lower, lang, target);
    if (std::find(syn.begin(), syn.end(), r.replacements[j]) == syn.end() &&
        std::find(syn_lower.begin(), syn_lower.end(), r.replacements[j]) == syn_lower.end())
      return "replacement '" + r.replacements[j] + "' is not a synonym of '" + word.surface + "'";
    repl[w] = r.replacements[j];
  }
  std::string rebuilt;
  size_t cursor = 0;
  for (size_t i = 0; i < tagged.tokens.size(); ++i) {
    const auto [b, e] = *tagged.tokens[i].offset;
    rebuilt += text.substr(cursor, b - cursor);
    rebuilt += repl.count(i) ? repl[i] : text.substr(b, e - b);
    cursor = e;
  }
  rebuilt += text.substr(cursor);
  if (rebuilt != r.text) return "text changed outside the replaced words";
  return "";
}

Outcome CheckPerturbations() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const cb::Tokenizer tok = cb::Tokenizer::Builtin();
  const auto& regular = tok.regular_ids();
  std::vector<std::string> specs;
  for (int x : {2, 4, 8, 16, 32}) {
    for (const char* k : {"mask", "random", "delete", "monosyn", "mltlsyn"}) specs.push_back(std::string(k) + ":" + std::to_string(x));
    for (int y : {1, 2, 4, 8, 16}) specs.push_back("reorder:" + std::to_string(x) + "@" + std::to_string(y));
  }
  const cb::nlp::RuleWordTagger tagger;
  const cb::nlp::WordNet wordnet = cb::nlp::WordNet::Builtin();
  const cb::nlp::StopWords stop = cb::nlp::StopWords::Builtin();
  const cb::SynonymResources res{&tagger, &wordnet, &stop};

  std::atomic<size_t> total{0};
  std::mutex mu;
  for (const auto& text : specs) {
    const auto spec = cb::PerturbSpec::Parse(text, 99);
    std::vector<std::string> errors(kSequencesPerSpec);
    cb::ParallelFor(kSequencesPerSpec, 8, [&](size_t i) {
      cb::Rng rng(cb::DeriveSeed(1234, text + "#" + std::to_string(i)));
      const std::string seq_id = "seq-" + std::to_string(i);
      if (spec.IsIdKind()) {
        std::vector<int32_t> ids(1 + rng.UniformIndex(200));
        for (auto& id : ids) id = regular[rng.UniformIndex(regular.size())];
        // Some sequences with repeated tokens stress the reorder skip rule.
        if (i % 7 == 0)
          for (auto& id : ids) id = regular[rng.UniformIndex(3)];
        errors[i] = CheckIdSequence(ids, spec, tok, seq_id);
      } else {
        const std::string lang = i % 2 ? "ja" : "en";
        errors[i] = CheckSynonymText(RandomProse(rng, lang), lang, spec, res, seq_id);
      }
      ++total;
    });
    std::lock_guard lock(mu);
    for (size_t i = 0; i < errors.size(); ++i)
      if (!errors[i].empty()) o.Fail(text + " seq " + std::to_string(i) + ": " + errors[i]);
  }
  const double secs = Seconds(start);
  if (secs >= kPerturbSeconds) o.Fail("runtime " + std::to_string(secs) + " s");
  o.detail = std::to_string(total.load()) + " sequences over " + std::to_string(specs.size()) + " specs, " +
             cb::FormatDouble(std::round(secs * 100) / 100) + " s";
  return o;
}

// ---------------------------------------------------------------------------
// 5. Onset detection against enumeration.

Outcome CheckOnset() {
  Outcome o;
  size_t count = 0;
  for (size_t len = 1; len <= kOnsetMaxLength; ++len) {
    std::vector<int> digits(len, 0);
    while (true) {
      std::vector<double> traj(digits.begin(), digits.end());
      size_t expected = 0;
      for (size_t i = 0; i < len; ++i) {
        bool is_min = true;
        for (size_t j = 0; j < len; ++j)
          if (traj[j] < traj[i]) is_min = false;
        if (is_min) {
          expected = i;
          break;
        }
      }
      const auto got = cb::DetectOnset(traj);
      ++count;
      if (got.index != expected || got.at_end != (expected == len - 1)) {
        std::string t;
        for (int d : digits) t += std::to_string(d);
        o.Fail("trajectory " + t + ": got " + std::to_string(got.index) + ", expected " + std::to_string(expected));
      }
      size_t i = 0;
      while (i < len && ++digits[i] == kOnsetValues) digits[i++] = 0;
      if (i == len) break;
    }
  }
  o.detail = std::to_string(count) + " trajectories (lengths 1-6, values 0-4)";
  return o;
}

// ---------------------------------------------------------------------------
// 6. End-to-end determinism and planted defects.

std::string RunCli(const std::vector<std::string>& args, int* code) {
  std::ostringstream out, err;
  *code = clozebench::cli::Run(args, out, err);
  return err.str();
}

Outcome CheckDeterminism() {
  Outcome o;
  const fs::path a = ScratchDir("generate_a"), b = ScratchDir("generate_b");
  for (const auto& dir : {a, b}) {
    int code = 0;
    const std::string err = RunCli({"generate", "--corpus", kFixtureCorpus.string(), "--backends", "mock", "--seed", "7",
                                    "--out", dir.string()},
                                   &code);
    if (code != 0) o.Fail("generate exited " + std::to_string(code) + ": " + err);
  }
  size_t compared = 0;
  for (const char* f : {"dataset.jsonl", "interlingual_manifest.jsonl", "stage_counts.csv", "cloze.jsonl",
                        "paraphrase.jsonl", "rejections.jsonl", "dataset.jsonl.meta.json"}) {
    if (!fs::exists(a / f) || !fs::exists(b / f)) {
      o.Fail(std::string(f) + " missing");
      continue;
    }
    ++compared;
    if (cb::ReadFile(a / f) != cb::ReadFile(b / f)) o.Fail(std::string(f) + " differs between runs");
  }
  size_t n_instances = 0;
  if (fs::exists(a / "dataset.jsonl")) n_instances = cb::ReadDataset(a / "dataset.jsonl").size();
  if (n_instances == 0) o.Fail("empty dataset");

  // Planted defects: 12 instances, 4 with defects only the quality judge sees.
  MockWorld w;
  cb::Pipeline pipeline(w.gateway, cb::PromptLibrary::Builtin(), w.Config(7));
  const auto planted = cb::ReadDataset(kTestData / "planted_defects.jsonl");
  std::set<std::string> good;
  {
    std::istringstream in(cb::ReadFile(kTestData / "planted_defects.good.txt"));
    for (std::string line; std::getline(in, line);)
      if (!line.empty()) good.insert(line);
  }
  const auto outcome = pipeline.FilterQuality(planted, nullptr);
  std::set<std::string> kept;
  for (const auto& i : outcome.kept) kept.insert(i.id);
  if (planted.size() != 12 || good.size() != 8) o.Fail("planted fixture is not 12/8");
  if (kept != good) o.Fail("kept " + std::to_string(kept.size()) + " instances, not the 8 known-good ones");
  o.detail = std::to_string(compared) + " artifacts byte-identical over 2 runs (" + std::to_string(n_instances) +
             " instances); planted defects kept " + std::to_string(kept.size()) + "/12";
  return o;
}

// ---------------------------------------------------------------------------
// 7. Schema validity and answer-index uniformity.

double ChiSquareSurvivalDf3(double x) {
  return std::erfc(std::sqrt(x / 2.0)) + std::sqrt(2.0 * x / M_PI) * std::exp(-x / 2.0);
}

// Documents of "<A> <verb> <B>." sentences over lexicon entities.
cb::Corpus SyntheticCorpus(size_t docs) {
  const std::vector<std::string> genes = {"EGFR", "KRAS", "TP53", "BRCA1", "HER2", "ALK", "VEGF", "MYC", "BRAF"};
  const std::vector<std::string> en_obj = {"insulin", "metformin", "aspirin", "heparin", "warfarin", "cisplatin",
                                           "gefitinib", "ibuprofen", "dopamine", "serotonin", "cortisol", "calcium"};
  const std::vector<std::string> ja_obj = {"糖尿病", "高血圧", "乳癌", "貧血", "結核", "喘息", "胃癌", "肺炎",
                                           "心不全", "膵癌", "痛風", "敗血症"};
  const std::vector<std::string> verbs = {"inhibits", "activates", "regulates", "binds", "modulates"};
  cb::Corpus corpus;
  std::vector<cb::Document> out;
  cb::Rng rng(2024);
  for (size_t d = 0; d < docs; ++d) {
    cb::Document doc;
    const bool ja = d % 2 == 1;
    char id[24];
    std::snprintf(id, sizeof(id), "%s-syn-%04zu", ja ? "ja" : "en", d);
    doc.id = id;
    doc.lang = ja ? "ja" : "en";
    doc.title = "synthetic";
    for (int s = 0; s < 4; ++s) {
      const std::string& a = genes[rng.UniformIndex(genes.size())];
      if (ja) {
        const std::string& b = ja_obj[rng.UniformIndex(ja_obj.size())];
        doc.abstract += a + "は" + b + "と関連する。";
      } else {
        const std::string& b = en_obj[rng.UniformIndex(en_obj.size())];
        doc.abstract += (s ? " " : "") + a + " " + verbs[rng.UniformIndex(verbs.size())] + " " + b + ".";
      }
    }
    out.push_back(std::move(doc));
  }
  corpus.Add(std::move(out));
  return corpus;
}

Outcome CheckSchema() {
  Outcome o;
  MockWorld w;
  const cb::Corpus corpus = SyntheticCorpus(130);
  cb::Pipeline pipeline(w.gateway, cb::PromptLibrary::Builtin(), w.Config(11));
  auto built = cb::BuildDataset(corpus, w.nlp, pipeline, ScratchDir("schema"));
  // The fixture dataset must satisfy the same invariants.
  cb::Corpus fixture;
  fixture.Ingest(kFixtureCorpus);
  cb::Pipeline fixture_pipeline(w.gateway, cb::PromptLibrary::Builtin(), w.Config(7));
  const auto fixture_built = cb::BuildDataset(fixture, w.nlp, fixture_pipeline, ScratchDir("schema_fixture"));
  std::vector<cb::EvalInstance> all = built.instances;
  all.insert(all.end(), fixture_built.instances.begin(), fixture_built.instances.end());

  std::array<size_t, 4> counts{};
  for (const auto& inst : all) {
    // Independent re-derivation of the invariants.
    if (cb::text::CountOccurrences(inst.cloze_query, cb::kBlank) != 1) o.Fail(inst.id + ": blank count");
    if (inst.paraphrase_query.find(cb::kBlank) != std::string::npos) o.Fail(inst.id + ": blank in paraphrase");
    std::set<std::string> folded;
    size_t lo = SIZE_MAX, hi = 0;
    for (const auto& opt : inst.options) {
      std::string f = opt;
      for (char& ch : f) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      folded.insert(f);
      const size_t len = cb::text::CodepointLength(opt);
      lo = std::min(lo, len);
      hi = std::max(hi, len);
    }
    if (inst.options.size() != 4 || folded.size() != 4) o.Fail(inst.id + ": options not 4 distinct");
    if (inst.answer_index >= inst.options.size()) o.Fail(inst.id + ": answer_index out of range");
    else if (inst.options[inst.answer_index] != inst.triple.object) o.Fail(inst.id + ": answer is not the object");
    if (lo == 0 || static_cast<double>(hi) > 3.0 * static_cast<double>(lo)) o.Fail(inst.id + ": length-cue ratio > 3");
    if (inst.triple.subject.empty() || inst.triple.relation.empty() || inst.triple.object.empty())
      o.Fail(inst.id + ": incomplete triple");
    // Round trip through the dataset schema.
    if (cb::EvalInstance::FromJson(inst.ToJson()).ToJson() != inst.ToJson()) o.Fail(inst.id + ": JSON round trip");
    if (!cb::InstanceProblems(inst).empty()) o.Fail(inst.id + ": " + cb::InstanceProblems(inst).front());
    if (inst.answer_index < 4) ++counts[inst.answer_index];
  }
  const size_t n = built.instances.size();
  std::array<size_t, 4> mock_counts{};
  for (const auto& inst : built.instances) ++mock_counts[inst.answer_index];
  const double expected = static_cast<double>(n) / 4.0;
  double chi2 = 0.0;
  for (size_t c : mock_counts) chi2 += (c - expected) * (c - expected) / expected;
  const double p = ChiSquareSurvivalDf3(chi2);
  if (n < kMinSchemaInstances) o.Fail("only " + std::to_string(n) + " mock-generated instances");
  if (!(p > kChiSquareAlpha)) o.Fail("answer-index chi2=" + std::to_string(chi2) + " p=" + std::to_string(p));
  o.detail = std::to_string(all.size()) + " instances schema-valid; answer-index counts " +
             std::to_string(mock_counts[0]) + "/" + std::to_string(mock_counts[1]) + "/" + std::to_string(mock_counts[2]) +
             "/" + std::to_string(mock_counts[3]) + " over " + std::to_string(n) + ", chi2=" +
             cb::FormatDouble(std::round(chi2 * 1000) / 1000) + ", p=" + cb::FormatDouble(std::round(p * 1000) / 1000);
  return o;
}

// ---------------------------------------------------------------------------
// 8. Recipe accounting.

std::string SyntheticParagraph(cb::Rng& rng, bool ja) {
  static const std::vector<std::string> kEn = {"insulin", "regulates", "glucose", "in", "the", "liver", "and",
                                               "muscle", "tissue", "patients", "with", "diabetes", "show", "higher",
                                               "levels", "of", "inflammation", "markers"};
  static const std::vector<std::string> kJa = {"インスリン", "は", "肝臓", "で", "血糖", "を", "調節", "する",
                                               "糖尿病", "患者", "の", "炎症", "マーカー", "が", "高い"};
  std::string s;
  const size_t sentences = 3 + rng.UniformIndex(5);
  for (size_t i = 0; i < sentences; ++i) {
    const size_t words = 6 + rng.UniformIndex(10);
    std::string sentence;
    for (size_t w = 0; w < words; ++w) {
      if (w && !ja) sentence += ' ';
      sentence += ja ? kJa[rng.UniformIndex(kJa.size())] : kEn[rng.UniformIndex(kEn.size())];
    }
    if (!ja) sentence[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(sentence[0])));
    s += (i && !ja ? " " : "") + sentence + (ja ? "。" : ".");
  }
  return s;
}

Outcome CheckRecipe() {
  Outcome o;
  const cb::Tokenizer tok = cb::Tokenizer::Builtin();
  const cb::nlp::RuleSentenceSplitter splitter;
  cb::Rng rng(31337);

  // Knowledge stream.
  std::vector<cb::CorpusDoc> pool;
  size_t pool_tokens = 0;
  for (size_t i = 0; pool_tokens < kStreamTokens + 20000; ++i) {
    char id[16];
    std::snprintf(id, sizeof(id), "k-%05zu", i);
    cb::CorpusDoc d{id, "knowledge", "document", SyntheticParagraph(rng, false), 0};
    pool_tokens += tok.CountTokens(d.text);
    pool.push_back(std::move(d));
  }
  cb::BudgetReport kr;
  auto knowledge = cb::TakeBudget(pool, kStreamTokens, tok, splitter, &kr);

  // Transfer stream from a medical corpus that also holds the evaluation
  // documents and their translations.
  std::vector<cb::Document> med;
  size_t med_tokens = 0;
  std::set<std::string> eval_ids;
  std::vector<cb::Json> eval_manifest;
  for (size_t i = 0; med_tokens < kStreamTokens + 60000; ++i) {
    cb::Document ja;
    ja.id = "med-ja-" + std::to_string(i);
    ja.lang = "ja";
    ja.abstract = SyntheticParagraph(rng, true);
    med_tokens += tok.CountTokens(ja.abstract);
    if (i % 25 == 0) {
      // Evaluation source in English; its Japanese partner must be removed.
      cb::Document en;
      en.id = "med-en-" + std::to_string(i);
      en.lang = "en";
      en.abstract = SyntheticParagraph(rng, false);
      en.pair_id = ja.pair_id = "pair-" + std::to_string(i);
      eval_manifest.push_back({{"source", {{"doc_id", en.id}, {"sentence_index", 0}}}, {"id", en.id + ":0"}});
      eval_ids.insert(en.id);
      eval_ids.insert(ja.id);
      med.push_back(std::move(en));
    } else if (i % 25 == 7) {
      eval_manifest.push_back({{"doc_id", ja.id}});  // directly referenced
      eval_ids.insert(ja.id);
    }
    med.push_back(std::move(ja));
  }
  cb::Corpus medical;
  medical.Add(med);
  const fs::path dir = ScratchDir("recipe");
  cb::WriteJsonLines(dir / "eval_manifest.jsonl", eval_manifest);

  cb::TransferSources src;
  src.medical = &medical;
  src.splitter = &splitter;
  src.exclude_ids = cb::LoadEvalDocIds({dir / "eval_manifest.jsonl"}, &medical);
  cb::BudgetReport tr;
  auto transfer = cb::BuildTransferCorpus(cb::TransferKind::kMedicalMonolingual, src, kStreamTokens, 5, tok, &tr);

  std::set<std::string> kid;
  for (const auto& d : knowledge) kid.insert(d.id);
  if (kid.size() != knowledge.size()) o.Fail("C_K ids are not distinct");

  const auto mix = cb::MixCorpus(knowledge, transfer, 42);
  cb::WriteMix(dir / "corpus.txt", dir / "manifest.csv", mix);
  size_t manifest_sum = 0;
  for (const auto& row : mix.manifest) manifest_sum += row.token_count;
  // Manifest as written on disk.
  size_t csv_sum = 0, csv_rows = 0;
  {
    std::istringstream in(cb::ReadFile(dir / "manifest.csv"));
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<std::string> cols;
      std::stringstream ls(line);
      for (std::string c; std::getline(ls, c, ',');) cols.push_back(c);
      csv_sum += std::stoull(cols.at(3));
      ++csv_rows;
    }
  }
  size_t retokenized = 0;
  const auto lines = cb::ReadMixedCorpus(dir / "corpus.txt");
  for (const auto& l : lines) retokenized += tok.CountTokens(l);
  if (lines.size() != mix.manifest.size() || csv_rows != lines.size()) o.Fail("document counts disagree");
  if (manifest_sum != retokenized || csv_sum != retokenized || mix.total_tokens != retokenized)
    o.Fail("manifest " + std::to_string(csv_sum) + " vs output " + std::to_string(retokenized) + " tokens");
  if (kr.total_tokens > kStreamTokens || tr.total_tokens > kStreamTokens) o.Fail("a stream exceeds its budget");

  const auto again = cb::MixCorpus(knowledge, transfer, 42);
  const auto other = cb::MixCorpus(knowledge, transfer, 43);
  std::vector<std::string> order, order2, order3;
  for (const auto& r : mix.manifest) order.push_back(r.doc_id);
  for (const auto& r : again.manifest) order2.push_back(r.doc_id);
  for (const auto& r : other.manifest) order3.push_back(r.doc_id);
  if (order != order2) o.Fail("permutation not stable under the seed");
  if (order == order3) o.Fail("permutation ignores the seed");

  size_t leaked = 0;
  for (const auto& r : mix.manifest)
    if (eval_ids.count(r.doc_id)) ++leaked;
  if (leaked) o.Fail(std::to_string(leaked) + " evaluation documents in the mix");
  if (tr.contamination_removed == 0) o.Fail("no evaluation document was ever a candidate");

  o.detail = std::to_string(mix.knowledge_tokens) + " + " + std::to_string(mix.transfer_tokens) + " tokens, manifest sum " +
             std::to_string(csv_sum) + " = re-tokenized " + std::to_string(retokenized) + "; " +
             std::to_string(tr.contamination_removed) + " eval documents filtered, 0 leaked";
  return o;
}

// ---------------------------------------------------------------------------
// 9. Token attribution on a hand table.

// Word tagger with hand-assigned tags.
class HandTagger : public cb::nlp::WordTagger {
 public:
  cb::nlp::TagResult TagWords(std::string_view text, std::string_view) const override {
    static const std::map<std::string, std::vector<std::pair<std::string, std::string>>> kWords = {
        {"EGFRは肺癌で12発現する。",
         {{"EGFR", "PROPN"}, {"は", "ADP"}, {"肺癌", "NOUN"}, {"で", "ADP"}, {"12", "NUM"}, {"発現", "NOUN"},
          {"する", "VERB"}, {"。", "PUNCT"}}},
        {"lung cancer", {{"lung", "NOUN"}, {"cancer", "NOUN"}}}};
    cb::nlp::TagResult r;
    size_t cursor = 0;
    for (const auto& [w, pos] : kWords.at(std::string(text))) {
      const size_t at = text.find(w, cursor);
      r.tokens.push_back({w, std::nullopt, pos, std::make_pair(at, at + w.size())});
      cursor = at + w.size();
    }
    return r;
  }
};

// Returns the hand table row of its checkpoint for whichever document it is
// asked about.
class TableScorer : public cb::ScoringBackend {
 public:
  explicit TableScorer(std::map<std::vector<int32_t>, std::vector<double>> rows) : rows_(std::move(rows)) {}
  cb::ScoreResponse Score(const cb::ScoreRequest& req) override {
    return cb::ScoreResponse::FromNlls(rows_.at(req.target_tokens));
  }

 private:
  std::map<std::vector<int32_t>, std::vector<double>> rows_;
};

Outcome CheckAttribution() {
  Outcome o;
  const cb::Tokenizer tok = cb::Tokenizer::FromPieces(
      {"<unk>", "EGFR", "は", "肺", "癌", "で", "1", "2", "発現", "する", "。", "lung", "▁cancer"});
  const std::string doc1 = "EGFRは肺癌で12発現する。", doc2 = "lung cancer";
  const auto ids1 = tok.Encode(doc1), ids2 = tok.Encode(doc2);
  // Expected tokenization: EGFR は 肺 癌 で 1 2 発現 する 。 | lung ▁cancer
  if (ids1 != std::vector<int32_t>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10} || ids2 != std::vector<int32_t>{11, 12}) {
    o.Fail("unexpected tokenization of the hand documents");
    return o;
  }
  // Per-token nll, two checkpoints. Dyadic values keep every sum exact.
  const std::vector<double> c0d1 = {1.0, 0.5, 2.0, 3.0, 0.25, 4.0, 2.0, 1.5, 0.75, 0.125}, c0d2 = {2.0, 3.0};
  const std::vector<double> c1d1 = {0.5, 0.5, 1.0, 1.0, 0.25, 2.0, 1.0, 1.0, 0.5, 0.125}, c1d2 = {1.0, 1.5};
  cb::Gateway gw;
  gw.AddScorer("t0", std::make_shared<TableScorer>(std::map<std::vector<int32_t>, std::vector<double>>{{ids1, c0d1}, {ids2, c0d2}}));
  gw.AddScorer("t1", std::make_shared<TableScorer>(std::map<std::vector<int32_t>, std::vector<double>>{{ids1, c1d1}, {ids2, c1d2}}));
  const cb::CheckpointRegistry ckpts{{{"c0", "t0"}, {"c1", "t1"}}};
  const std::vector<cb::AttributionDoc> docs = {{"d1", "ja", doc1}, {"d2", "en", doc2}};
  const HandTagger tagger;

  // Hand computation (group: token count, mean at c0, mean at c1).
  struct Want {
    size_t n;
    double c0, c1;
  };
  const std::map<std::string, Want> by_script = {
      {"EN", {3, (1.0 + 2.0 + 3.0) / 3, (0.5 + 1.0 + 1.5) / 3}},                         // EGFR, lung, cancer
      {"JA", {6, 8.0 / 6, 4.25 / 6}},                                                    // は 肺 癌 で 発現 する
      {"NUM", {2, 3.0, 1.5}},                                                            // 1 2
      {"X", {1, 0.125, 0.125}}};                                                         // 。
  const std::map<std::string, Want> by_pos = {
      {"PROPN", {1, 1.0, 0.5}},      {"ADP", {2, 0.375, 0.375}}, {"NOUN", {5, 11.5 / 5, 5.5 / 5}},
      {"NUM", {2, 3.0, 1.5}},        {"VERB", {1, 0.75, 0.5}},   {"PUNCT", {1, 0.125, 0.125}}};

  size_t groups = 0;
  for (auto [grouping, want] : {std::make_pair(cb::Grouping::kLanguage, &by_script), std::make_pair(cb::Grouping::kPos, &by_pos)}) {
    const auto run = cb::AttributeDocuments(docs, grouping, tok, ckpts, gw, &tagger);
    if (run.curves.size() != want->size()) o.Fail("group count " + std::to_string(run.curves.size()));
    for (const auto& c : run.curves) {
      ++groups;
      auto it = want->find(c.group);
      if (it == want->end()) {
        o.Fail("unexpected group " + c.group);
        continue;
      }
      if (c.token_count != it->second.n || c.means.size() != 2 || c.means[0] != it->second.c0 ||
          c.means[1] != it->second.c1)
        o.Fail(c.group + " means differ from the hand table");
    }
  }
  // EGFR inside Japanese text, with the shipped vocabulary.
  const cb::Tokenizer builtin = cb::Tokenizer::Builtin();
  const std::string ja = "EGFRは非小細胞肺癌で高発現している。";
  const auto enc = builtin.Tokenize(ja);
  const auto groups_builtin = cb::LanguageGroups(enc.tokens);
  for (size_t i = 0; i < enc.tokens.size(); ++i) {
    const auto& [b, e] = *enc.tokens[i].offset;
    if (e <= 4 && groups_builtin[i] != "EN") o.Fail("EGFR piece '" + enc.tokens[i].surface + "' grouped " + groups_builtin[i]);
    if (b >= 4 && groups_builtin[i] == "EN") o.Fail("Japanese piece grouped EN");
  }
  if (cb::LanguageGroup("EGFR") != "EN") o.Fail("\"EGFR\" is not EN");
  o.detail = std::to_string(groups) + " group curves equal the hand table exactly; EGFR in Japanese text -> EN";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"metric-oracle-equivalence", CheckOracle},
      {"loss-shielding-invariants", CheckLossShielding},
      {"transition-partition", CheckTransitions},
      {"perturbation-properties", CheckPerturbations},
      {"onset-detection", CheckOnset},
      {"pipeline-determinism", CheckDeterminism},
      {"dataset-schema-validity", CheckSchema},
      {"recipe-accounting", CheckRecipe},
      {"token-attribution", CheckAttribution},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o.Fail(std::string("exception: ") + e.what());
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << (i + 1) << "] " << criteria[i].name << ": " << o.detail << "\n";
    for (const auto& f : o.failures) std::cout << "      " << f << "\n";
    std::cout.flush();
    if (!o.pass) ++failed;
  }
  fs::remove_all(fs::temp_directory_path() / ("clozebench_acceptance_" + std::to_string(::getpid())));
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
