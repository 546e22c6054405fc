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

#include "clozebench/mock_backends.h"

#include <algorithm>
#include <cmath>

#include "clozebench/embedded.h"
#include "clozebench/error.h"
#include "clozebench/prompts.h"
#include "clozebench/rng.h"
#include "clozebench/text.h"

namespace clozebench {
namespace {

uint64_t SplitMix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string Lower(std::string_view s) { return text::ToLowerAscii(s); }

bool ContainsFolded(std::string_view hay, std::string_view needle) {
  return !needle.empty() && Lower(hay).find(Lower(needle)) != std::string::npos;
}

std::string StripTerminal(std::string s) {
  for (std::string_view t : {"。", "．", "？", "！", ".", "?", "!"}) {
    if (text::EndsWith(s, t)) {
      s.resize(s.size() - t.size());
      break;
    }
  }
  return std::string(text::Trim(s));
}

bool IsQuestion(std::string_view s) {
  s = text::Trim(s);
  return text::EndsWith(s, "?") || text::EndsWith(s, "？") || text::EndsWith(s, "か");
}

// Category nouns used when turning a cloze into a question.
std::string CategoryNoun(std::string_view label, std::string_view lang) {
  static const std::map<std::string, std::pair<std::string, std::string>, std::less<>> kNouns = {
      {"Chemical", {"substance", "物質"}},     {"Gene", {"gene or protein", "遺伝子・タンパク質"}},
      {"Disease", {"disease", "疾患"}},        {"Anatomy", {"organ", "臓器"}},
      {"Physiology", {"physiological measure", "生理指標"}},
      {"Organism", {"organism", "病原体"}},     {"Cell", {"cell type", "細胞"}}};
  auto it = kNouns.find(label);
  if (it == kNouns.end()) return lang == "ja" ? "もの" : "entity";
  return lang == "ja" ? it->second.second : it->second.first;
}

bool Hedged(std::string_view sentence, std::string_view lang) {
  static const char* kEn[] = {"may ", "might ", "could ", "aim of", "possibly", "suggest"};
  static const char* kJa[] = {"可能性", "目的", "検討", "と考えられる", "示唆"};
  const std::string low = Lower(sentence);
  if (lang == "ja") {
    for (const char* c : kJa)
      if (low.find(c) != std::string::npos) return true;
    return false;
  }
  for (const char* c : kEn)
    if (low.find(c) != std::string::npos) return true;
  return false;
}

std::string Capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

std::string LowerFirst(std::string s) {
  // Leave acronyms (two leading capitals) alone.
  if (s.size() > 1 && s[0] >= 'A' && s[0] <= 'Z' && !(s[1] >= 'A' && s[1] <= 'Z'))
    s[0] = static_cast<char>(s[0] - 'A' + 'a');
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------

ConstantScorer::ConstantScorer(double logprob) : logprob_(logprob) {
  if (!(logprob <= 0.0) || !std::isfinite(logprob)) {
    throw ValidationError("constant scorer logprob must be finite and <= 0");
  }
}

ScoreResponse ConstantScorer::Score(const ScoreRequest& request) {
  return ScoreResponse::FromNlls(std::vector<double>(request.target_tokens.size(), -logprob_));
}

// ---------------------------------------------------------------------------

BigramScorer::BigramScorer(uint64_t seed, size_t vocab_size) : seed_(seed), vocab_size_(vocab_size) {
  if (vocab_size == 0) throw ValidationError("bigram scorer needs a non-empty vocabulary");
}

double BigramScorer::Weight(int32_t prev, int32_t next) const {
  const uint64_t h = SplitMix(seed_ ^ SplitMix(static_cast<uint64_t>(prev + 1) * 0x100000001b3ULL +
                                               static_cast<uint64_t>(next)));
  const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
  // Spread of roughly two orders of magnitude keeps options distinguishable.
  return std::exp(4.0 * u);
}

double BigramScorer::RowSum(int32_t prev) const {
  {
    std::lock_guard lock(mu_);
    if (auto it = row_sums_.find(prev); it != row_sums_.end()) return it->second;
  }
  double sum = 0.0;
  for (size_t j = 0; j < vocab_size_; ++j) sum += Weight(prev, static_cast<int32_t>(j));
  std::lock_guard lock(mu_);
  row_sums_.emplace(prev, sum);
  return sum;
}

double BigramScorer::TransitionProbability(int32_t prev, int32_t next) const {
  if (next < 0 || static_cast<size_t>(next) >= vocab_size_ ||
      (prev != kStart && (prev < 0 || static_cast<size_t>(prev) >= vocab_size_))) {
    throw BackendError("token id outside the bigram vocabulary");
  }
  return Weight(prev, next) / RowSum(prev);
}

ScoreResponse BigramScorer::Score(const ScoreRequest& request) {
  int32_t prev = request.context_tokens.empty() ? kStart : request.context_tokens.back();
  for (int32_t id : request.context_tokens) {
    if (id < 0 || static_cast<size_t>(id) >= vocab_size_) throw BackendError("context id out of range");
  }
  std::vector<double> nlls;
  nlls.reserve(request.target_tokens.size());
  for (int32_t id : request.target_tokens) {
    nlls.push_back(-std::log(TransitionProbability(prev, id)));
    prev = id;
  }
  return ScoreResponse::FromNlls(std::move(nlls));
}

// ---------------------------------------------------------------------------

PipelineMock::PipelineMock(Options options) : options_(std::move(options)) {
  lexicon_ = std::make_unique<nlp::LexiconRecognizer>(
      options_.lexicon_path.empty()
          ? nlp::LexiconRecognizer::FromTsv(EmbeddedFile("nlp/biomed_lexicon.tsv"))
          : nlp::LexiconRecognizer::FromFile(options_.lexicon_path));
}

double PipelineMock::Unit(std::string_view key) const {
  return static_cast<double>(SplitMix(Fnv1a64(key) ^ SplitMix(options_.seed)) >> 11) * 0x1.0p-53;
}

std::string PipelineMock::LabelOf(std::string_view surface, std::string_view lang) const {
  for (const auto& e : lexicon_->Recognize(surface, lang).entities) {
    if (e.start == 0 && e.end == surface.size()) return e.label;
  }
  for (const auto& entry : lexicon_->entries()) {
    if (Lower(entry.surface) == Lower(surface)) return entry.label;
  }
  return {};
}

Completion PipelineMock::Judge(const Json& input) const {
  const std::string sentence = input.at("sentence").get<std::string>();
  const std::string lang = input.value("lang", "en");
  auto entities = lexicon_->Recognize(sentence, lang).entities;

  Json triple = nullptr;
  std::string reason;
  bool fact = false;
  if (entities.size() < 2) {
    reason = "Fewer than two domain entities are mentioned.";
  } else if (Hedged(sentence, lang)) {
    reason = "The statement is hedged or describes the study rather than a fact.";
  } else {
    const auto& subj = entities.front();
    const auto* obj = &entities.back();
    for (auto it = entities.rbegin(); it != entities.rend(); ++it) {
      if (Lower(it->surface) != Lower(subj.surface)) {
        obj = &*it;
        break;
      }
    }
    if (Lower(obj->surface) == Lower(subj.surface) || obj->start < subj.end) {
      reason = "No two distinct entities are related.";
    } else {
      std::string relation(text::Trim(std::string_view(sentence).substr(subj.end, obj->start - subj.end)));
      if (relation.empty()) relation = lang == "ja" ? "関連" : "is related to";
      triple = {{"subject", subj.surface}, {"relation", relation}, {"object", obj->surface}};
      reason = "States a verifiable relation between two domain entities.";
      fact = true;
    }
  }
  const double u = Unit("judge|" + sentence);
  const double conf = fact ? 0.72 + 0.26 * u : 0.02 + 0.28 * u;
  const bool yes = conf > 0.5;
  if (!yes) triple = nullptr;

  Json tail = {{"triple", triple}, {"reason", reason}};
  std::string rest = tail.dump();  // {"reason":...,"triple":...}
  rest = "\", " + rest.substr(1);

  Completion c;
  const std::string head = "{\"factuality\": \"";
  const std::string answer = yes ? "yes" : "no";
  c.text = head + answer + rest;
  c.tokens.push_back({head, 0.0, {}});
  const double lp_yes = std::log(conf), lp_no = std::log1p(-conf);
  GeneratedToken ans{answer, yes ? lp_yes : lp_no, {}};
  ans.top = yes ? std::vector<TopLogprob>{{"yes", lp_yes}, {"no", lp_no}}
                : std::vector<TopLogprob>{{"no", lp_no}, {"yes", lp_yes}};
  c.tokens.push_back(std::move(ans));
  c.tokens.push_back({rest, 0.0, {}});
  return c;
}

std::string PipelineMock::Craft(const Json& input) const {
  const std::string sentence = input.at("sentence").get<std::string>();
  const std::string lang = input.value("lang", "en");
  const Json& triple = input.at("triple");
  const std::string object = triple.at("object").get<std::string>();

  std::string cloze = sentence;
  const size_t pos = cloze.rfind(object);
  if (pos != std::string::npos) cloze.replace(pos, object.size(), "[BLANK]");

  const std::string noun = CategoryNoun(LabelOf(object, lang), lang);
  std::string question = StripTerminal(cloze);
  if (lang == "ja") {
    question = text::ReplaceAll(question, "[BLANK]", "どの" + noun) + "か？";
  } else {
    question = Capitalize(text::ReplaceAll(question, "[BLANK]", "which " + noun)) + "?";
  }
  return Json{{"cloze", cloze}, {"paraphrase", question}}.dump();
}

std::string PipelineMock::Distractors(const Json& input) const {
  const std::string answer = input.at("answer").get<std::string>();
  const std::string cloze = input.value("cloze", "");
  const std::string lang = input.value("lang", "en");
  std::vector<std::string> avoid;
  if (input.contains("avoid")) avoid = input.at("avoid").get<std::vector<std::string>>();
  const std::string label = LabelOf(answer, lang);

  std::vector<std::pair<double, std::string>> ranked;
  std::set<std::string> seen{Lower(answer)};
  for (const auto& e : lexicon_->entries()) {
    if (!label.empty() && e.label != label) continue;
    if (!e.lang.empty() && e.lang != lang) continue;
    const std::string folded = Lower(e.surface);
    if (seen.count(folded) || ContainsFolded(cloze, e.surface) || ContainsFolded(answer, e.surface) ||
        ContainsFolded(e.surface, answer))
      continue;
    if (std::any_of(avoid.begin(), avoid.end(), [&](const std::string& a) { return Lower(a) == folded; }))
      continue;
    seen.insert(folded);
    ranked.emplace_back(Unit("distractor|" + answer + "|" + e.surface), e.surface);
  }
  std::sort(ranked.begin(), ranked.end());

  // Greedy pick that keeps the option-length spread within 3x.
  auto len = [](const std::string& s) { return static_cast<double>(text::CodepointLength(s)); };
  std::vector<std::string> picked;
  double lo = len(answer), hi = len(answer);
  for (const auto& [_, cand] : ranked) {
    if (picked.size() == 3) break;
    const double l = len(cand);
    if (std::max(hi, l) / std::min(lo, l) > 3.0) continue;
    picked.push_back(cand);
    lo = std::min(lo, l);
    hi = std::max(hi, l);
  }
  for (const auto& [_, cand] : ranked) {
    if (picked.size() == 3) break;
    if (std::find(picked.begin(), picked.end(), cand) == picked.end()) picked.push_back(cand);
  }
  return Json{{"distractors", picked}}.dump();
}

std::string PipelineMock::Review(const Json& input) const {
  const std::string sentence = input.at("sentence").get<std::string>();
  const std::string cloze = input.at("cloze").get<std::string>();
  const std::string paraphrase = input.at("paraphrase").get<std::string>();
  const auto options = input.at("options").get<std::vector<std::string>>();
  const size_t answer_index = input.at("answer_index").get<size_t>();
  const Json& triple = input.at("triple");
  const std::string subject = triple.at("subject").get<std::string>();
  const std::string object = triple.at("object").get<std::string>();
  if (answer_index >= options.size()) throw BackendError("answer_index out of range");
  const std::string& answer = options[answer_index];

  std::vector<std::string> reasons;
  std::string cloze_v = "pass", para_v = "pass", opt_v = "pass";
  if (text::CountOccurrences(cloze, "[BLANK]") != 1) {
    cloze_v = "fail";
    reasons.push_back("clarity: the query must contain exactly one blank");
  } else if (text::ReplaceAll(cloze, "[BLANK]", answer) != sentence) {
    cloze_v = "fail";
    reasons.push_back("fidelity: the filled query does not reproduce the source sentence");
  }
  if (paraphrase.find("[BLANK]") != std::string::npos || !IsQuestion(paraphrase)) {
    para_v = "fail";
    reasons.push_back("equivalence: the paraphrase is not a question asking for the blank");
  } else if (!ContainsFolded(paraphrase, subject)) {
    para_v = "fail";
    reasons.push_back("self-containment: the question omits the subject needed to identify the answer");
  }
  if (answer != object || !ContainsFolded(sentence, answer)) {
    opt_v = "fail";
    reasons.push_back("correctness: the marked answer is not the object stated in the sentence");
  } else {
    std::set<std::string> folded;
    bool ok = true;
    for (const auto& o : options) ok = ok && !text::Trim(o).empty() && folded.insert(Lower(o)).second;
    for (size_t i = 0; i < options.size() && ok; ++i) {
      if (i != answer_index && ContainsFolded(sentence, options[i])) ok = false;
    }
    if (!ok) {
      opt_v = "fail";
      reasons.push_back("plausibility: a distractor duplicates the answer or is stated in the sentence");
    }
  }
  std::string supported = "no";
  if (input.contains("paired_document") && input.at("paired_document").is_object()) {
    const std::string other = input.at("paired_document").value("abstract", "");
    if (ContainsFolded(other, object) || ContainsFolded(other, subject)) supported = "yes";
  }
  return Json{{"cloze", cloze_v},
              {"paraphrase", para_v},
              {"options", opt_v},
              {"interlingual_supported", supported},
              {"reasons", reasons}}
      .dump();
}

std::string PipelineMock::QaPairs(const Json& input, size_t k) const {
  const std::string lang = input.value("lang", "en");
  const std::string title = input.value("title", "");
  const auto sentences = nlp::RuleSentenceSplitter().Split(input.at("abstract").get<std::string>(), lang).sentences;
  Json pairs = Json::array();
  for (const auto& s : sentences) {
    if (pairs.size() == k) break;
    const auto ents = lexicon_->Recognize(s, lang).entities;
    const std::string topic = ents.empty() ? title : ents.front().surface;
    const std::string q = lang == "ja" ? topic + "について何が報告されているか？"
                                       : "What does the study report about " + topic + "?";
    pairs.push_back({{"question", q}, {"answer", s}});
  }
  return Json{{"pairs", pairs}}.dump();
}

std::string PipelineMock::Rewrite(const std::string& kind, const Json& input) const {
  const std::string s = input.at("sentence").get<std::string>();
  const std::string lang = input.value("lang", "en");
  auto lexical = [&](std::string t) {
    static const std::vector<std::pair<std::string, std::string>> kEn = {
        {"increases", "raises"}, {"reduces", "lowers"},      {"causes", "leads to"},
        {"inhibits", "suppresses"}, {"promotes", "enhances"}, {"controlled", "regulated"},
        {"highly", "strongly"},   {"major", "principal"},    {"produce", "generate"}};
    static const std::vector<std::pair<std::string, std::string>> kJa = {
        {"高める", "上昇させる"}, {"低下させる", "減少させる"}, {"引き起こす", "もたらす"},
        {"阻害する", "抑制する"}, {"促進する", "亢進させる"},   {"制御", "調節"}};
    const std::string before = t;
    for (const auto& [a, b] : lang == "ja" ? kJa : kEn) t = text::ReplaceAll(t, a, b);
    if (t == before) t = (lang == "ja" ? "なお、" : "Notably, ") + (lang == "ja" ? t : LowerFirst(t));
    return t;
  };
  auto syntactic = [&](const std::string& t) {
    return lang == "ja" ? "すなわち、" + t : "In other words, " + LowerFirst(t);
  };
  std::string out;
  if (kind == "syntax") out = syntactic(s);
  else if (kind == "lexicon") out = lexical(s);
  else if (kind == "semantic") out = syntactic(lexical(s));
  else out = "[" + input.value("target_lang", lang == "ja" ? "en" : "ja") + "] " + s;
  return Json{{"rewrite", out}}.dump();
}

Completion PipelineMock::Generate(const GenerationRequest& request) {
  const auto parsed = ParseRenderedPrompt(request.prompt);
  if (!parsed) throw BackendError("pipeline mock: prompt is not a rendered pipeline template");
  const auto& [task, input] = *parsed;
  try {
    if (task == "fact_judge") return Judge(input);
    Completion c;
    if (task == "craft_queries") c.text = Craft(input);
    else if (task == "distractors") c.text = Distractors(input);
    else if (task == "quality_filter") c.text = Review(input);
    else if (task == "qa_pairs") c.text = QaPairs(input, input.value("k", size_t{5}));
    else if (text::StartsWith(task, "rewrite_")) c.text = Rewrite(task.substr(8), input);
    else throw BackendError("pipeline mock: unsupported task '" + task + "'");
    return c;
  } catch (const Json::exception& e) {
    throw BackendError("pipeline mock: bad input for task '" + task + "': " + e.what());
  }
}

// ---------------------------------------------------------------------------

Completion CompletionFromJson(const Json& reply) {
  Completion c;
  if (reply.is_string()) {
    c.text = reply.get<std::string>();
    return c;
  }
  c.text = reply.at("text").get<std::string>();
  if (reply.contains("tokens")) {
    for (const auto& t : reply.at("tokens")) {
      GeneratedToken g{t.at("text").get<std::string>(), t.value("logprob", 0.0), {}};
      if (t.contains("top")) {
        for (const auto& a : t.at("top")) g.top.push_back({a.at("token").get<std::string>(), a.at("logprob").get<double>()});
      }
      c.tokens.push_back(std::move(g));
    }
  }
  return c;
}

CannedGenerator::CannedGenerator(const Json& spec) {
  try {
    supports_logprobs_ = spec.value("supports_logprobs", false);
    if (spec.contains("by_hash"))
      for (const auto& [k, v] : spec.at("by_hash").items()) by_hash_[k] = CompletionFromJson(v);
    if (spec.contains("by_sentence"))
      for (const auto& [k, v] : spec.at("by_sentence").items()) by_sentence_[k] = CompletionFromJson(v);
    if (spec.contains("queue"))
      for (const auto& v : spec.at("queue")) queue_.push_back(CompletionFromJson(v));
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("canned replies: ") + e.what());
  }
}

std::shared_ptr<CannedGenerator> CannedGenerator::FromFile(const std::string& path) {
  return std::make_shared<CannedGenerator>(ReadJsonFile(path));
}

std::string CannedGenerator::PromptHash(std::string_view prompt) { return HexDigest(Fnv1a64(prompt)); }

Completion CannedGenerator::Generate(const GenerationRequest& request) {
  if (auto it = by_hash_.find(PromptHash(request.prompt)); it != by_hash_.end()) return it->second;
  if (!by_sentence_.empty()) {
    if (auto parsed = ParseRenderedPrompt(request.prompt); parsed && parsed->second.contains("sentence")) {
      const auto& s = parsed->second.at("sentence");
      if (s.is_string()) {
        if (auto it = by_sentence_.find(s.get<std::string>()); it != by_sentence_.end()) return it->second;
      }
    }
  }
  std::lock_guard lock(mu_);
  if (queue_.empty()) throw BackendError("canned generator has no reply for this prompt");
  Completion c = std::move(queue_.front());
  queue_.pop_front();
  return c;
}

}  // namespace clozebench
