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

#include "clozebench/mc_eval.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "clozebench/error.h"
#include "clozebench/text.h"

namespace clozebench {

std::string ModeName(EvalMode mode) {
  switch (mode) {
    case EvalMode::kCloze: return "cloze";
    case EvalMode::kParaphrase: return "paraphrase";
    case EvalMode::kInterlingual: return "interlingual";
  }
  return "cloze";
}

EvalMode ParseMode(const std::string& name) {
  if (name == "cloze") return EvalMode::kCloze;
  if (name == "paraphrase") return EvalMode::kParaphrase;
  if (name == "interlingual") return EvalMode::kInterlingual;
  throw ValidationError("unknown mode '" + name + "' (expected cloze, paraphrase or interlingual)");
}

Json OptionScore::ToJson() const {
  return {{"option_index", option_index}, {"mean_nll", mean_nll}, {"token_count", token_count}};
}

OptionScore OptionScore::FromJson(const Json& j) {
  return {j.at("option_index").get<size_t>(), j.at("mean_nll").get<double>(), j.at("token_count").get<size_t>()};
}

std::vector<double> InstanceResult::Losses() const {
  std::vector<double> out;
  out.reserve(scores.size());
  for (const auto& s : scores) out.push_back(s.mean_nll);
  return out;
}

Json InstanceResult::ToJson() const {
  Json j = {{"instance_id", instance_id}, {"checkpoint_id", checkpoint_id}, {"lang", lang},
            {"mode", mode},               {"scored", scored},               {"answer_index", answer_index}};
  if (!scored) {
    j["error"] = error;
    return j;
  }
  Json s = Json::array();
  for (const auto& o : scores) s.push_back(o.ToJson());
  j["scores"] = s;
  j["predicted_index"] = predicted_index;
  j["tie"] = tie;
  j["correct"] = correct;
  j["correct_loss"] = correct_loss;
  j["loss_ratio"] = ratio_defined ? Json(loss_ratio) : Json(nullptr);
  return j;
}

InstanceResult InstanceResult::FromJson(const Json& j) {
  InstanceResult r;
  r.instance_id = j.at("instance_id").get<std::string>();
  r.checkpoint_id = j.at("checkpoint_id").get<std::string>();
  r.lang = j.value("lang", "");
  r.mode = j.value("mode", "");
  r.scored = j.at("scored").get<bool>();
  r.answer_index = j.at("answer_index").get<size_t>();
  if (!r.scored) {
    r.error = j.value("error", "");
    return r;
  }
  for (const auto& s : j.at("scores")) r.scores.push_back(OptionScore::FromJson(s));
  Finalize(r);
  return r;
}

Argmin PredictArgmin(std::span<const double> losses) {
  if (losses.empty()) throw ValidationError("argmin of an empty loss list");
  Argmin a;
  for (size_t i = 1; i < losses.size(); ++i) {
    if (losses[i] < losses[a.index]) a.index = i;
  }
  for (size_t i = 0; i < losses.size(); ++i) {
    if (i != a.index && losses[i] == losses[a.index]) a.tie = true;
  }
  return a;
}

std::optional<double> LossRatio(std::span<const double> losses, size_t correct) {
  if (correct >= losses.size()) return std::nullopt;
  double sum = 0.0;
  for (double l : losses) {
    if (!std::isfinite(l) || l <= 0.0) return std::nullopt;
    sum += l;
  }
  return losses[correct] / sum;
}

void Finalize(InstanceResult& r) {
  const auto losses = r.Losses();
  const Argmin a = PredictArgmin(losses);
  r.predicted_index = a.index;
  r.tie = a.tie;
  r.correct = a.index == r.answer_index;
  r.correct_loss = r.answer_index < losses.size() ? losses[r.answer_index] : 0.0;
  const auto ratio = LossRatio(losses, r.answer_index);
  r.ratio_defined = ratio.has_value();
  r.loss_ratio = ratio.value_or(std::numeric_limits<double>::quiet_NaN());
}

std::string OptionSeparator(const std::string& lang) {
  return lang == "ja" || lang == "zh" ? "" : " ";
}

ScoreRequest BuildClozeRequest(const Tokenizer& tok, const std::string& cloze, const std::string& option) {
  const size_t at = cloze.find(kBlank);
  if (at == std::string::npos || cloze.find(kBlank, at + 1) != std::string::npos) {
    throw ValidationError("cloze query must contain exactly one [BLANK]");
  }
  std::string context = cloze.substr(0, at);
  std::string target = option + cloze.substr(at + kBlank.size());
  if (!context.empty() && context.back() == ' ') {
    context.pop_back();
    target.insert(target.begin(), ' ');
  }
  ScoreRequest req{tok.Encode(context), tok.Encode(target)};
  if (req.target_tokens.empty()) throw ValidationError("cloze target tokenizes to nothing");
  return req;
}

ScoreRequest BuildParaphraseRequest(const Tokenizer& tok, const std::string& question, const std::string& option,
                                    const std::string& lang) {
  if (text::Trim(question).empty()) throw ValidationError("empty paraphrase question");
  ScoreRequest req{tok.Encode(question), tok.Encode(OptionSeparator(lang) + option)};
  if (req.target_tokens.empty()) throw ValidationError("option tokenizes to nothing");
  return req;
}

void EvalRun::ThrowIfFailed() const {
  if (failures.empty()) return;
  std::string msg = "evaluation failed:";
  for (const auto& f : failures) msg += "\n  " + f;
  throw RuntimeFailure(msg);
}

EvalRun EvaluateDataset(const std::vector<EvalInstance>& dataset, const CheckpointRegistry& checkpoints,
                        Gateway& gateway, const Tokenizer& tokenizer, const EvalOptions& options) {
  checkpoints.Validate(gateway);
  if (options.max_unscored_fraction < 0 || options.max_unscored_fraction > 1) {
    throw ValidationError("max_unscored_fraction must lie in [0, 1]");
  }
  if (options.mode == EvalMode::kInterlingual && options.languages.empty()) {
    throw ValidationError("interlingual mode needs the query language(s) to evaluate");
  }
  std::vector<const EvalInstance*> selected;
  for (const auto& inst : dataset) {
    if (!options.languages.empty() && !options.languages.count(inst.lang)) continue;
    if (options.mode == EvalMode::kInterlingual && !options.instance_ids.empty() &&
        !options.instance_ids.count(inst.id)) {
      continue;
    }
    selected.push_back(&inst);
  }
  std::sort(selected.begin(), selected.end(), [](auto* a, auto* b) { return a->id < b->id; });
  const std::string mode = ModeName(options.mode);

  // Tokenization is checkpoint-independent: build every request once.
  std::vector<ScoreRequest> requests;
  std::vector<std::string> build_error(selected.size());
  requests.reserve(selected.size() * 4);
  for (size_t i = 0; i < selected.size(); ++i) {
    const EvalInstance& inst = *selected[i];
    try {
      if (inst.options.size() != 4) throw ValidationError("instance does not have 4 options");
      for (const auto& opt : inst.options) {
        requests.push_back(options.mode == EvalMode::kCloze
                               ? BuildClozeRequest(tokenizer, inst.cloze_query, opt)
                               : BuildParaphraseRequest(tokenizer, inst.paraphrase_query, opt, inst.lang));
      }
    } catch (const ValidationError& e) {
      build_error[i] = e.what();
      requests.resize(i * 4);
      requests.resize(i * 4 + 4, ScoreRequest{{}, {}});
    }
  }

  EvalRun run;
  std::vector<std::vector<InstanceResult>> by_instance(selected.size());
  std::vector<std::string> order;
  for (const auto& ckpt : checkpoints.checkpoints) {
    order.push_back(ckpt.id);
    // Only well-formed requests go to the backend.
    std::vector<size_t> live;
    std::vector<ScoreRequest> batch;
    for (size_t i = 0; i < selected.size(); ++i) {
      if (!build_error[i].empty()) continue;
      live.push_back(i);
      for (size_t k = 0; k < 4; ++k) batch.push_back(requests[i * 4 + k]);
    }
    const auto responses = gateway.ScoreMany(ckpt.backend, batch);
    std::map<size_t, size_t> slot;
    for (size_t j = 0; j < live.size(); ++j) slot[live[j]] = j;

    size_t unscored = 0;
    for (size_t i = 0; i < selected.size(); ++i) {
      const EvalInstance& inst = *selected[i];
      InstanceResult r;
      r.instance_id = inst.id;
      r.checkpoint_id = ckpt.id;
      r.lang = inst.lang;
      r.mode = mode;
      r.answer_index = inst.answer_index;
      if (!build_error[i].empty()) {
        r.error = "tokenization: " + build_error[i];
      } else {
        const size_t base = slot.at(i) * 4;
        for (size_t k = 0; k < 4; ++k) {
          const auto& resp = responses[base + k];
          if (!resp) {
            r.error = "backend failure on option " + std::to_string(k);
            r.scores.clear();
            break;
          }
          r.scores.push_back({k, resp->mean_nll, resp->token_nlls.size()});
        }
        r.scored = r.scores.size() == 4;
      }
      if (r.scored) {
        Finalize(r);
      } else {
        ++unscored;
      }
      by_instance[i].push_back(std::move(r));
    }
    if (!selected.empty() &&
        static_cast<double>(unscored) > options.max_unscored_fraction * static_cast<double>(selected.size())) {
      run.failures.push_back("checkpoint " + ckpt.id + ": " + std::to_string(unscored) + " of " +
                             std::to_string(selected.size()) + " instances unscored (limit " +
                             FormatDouble(options.max_unscored_fraction * 100) + "%)");
    }
  }
  for (auto& v : by_instance)
    for (auto& r : v) run.results.push_back(std::move(r));
  run.accuracy = ComputeAccuracy(run.results, order);
  if (options.throw_on_failure) run.ThrowIfFailed();
  return run;
}

std::vector<AccuracyRow> ComputeAccuracy(const std::vector<InstanceResult>& results,
                                         const std::vector<std::string>& checkpoint_order) {
  struct Acc {
    size_t n = 0, correct = 0, ties = 0, unscored = 0;
    std::string mode;
  };
  std::map<std::string, std::map<std::string, Acc>> acc;  // checkpoint -> lang -> counts
  for (const auto& r : results) {
    for (const std::string& lang : {r.lang, std::string("all")}) {
      Acc& a = acc[r.checkpoint_id][lang];
      a.mode = r.mode;
      if (!r.scored) {
        ++a.unscored;
        continue;
      }
      ++a.n;
      a.correct += r.correct;
      a.ties += r.tie;
    }
  }
  std::vector<AccuracyRow> rows;
  auto emit = [&](const std::string& ckpt) {
    for (const auto& [lang, a] : acc[ckpt]) {
      rows.push_back({ckpt, a.mode, lang, a.n ? static_cast<double>(a.correct) / static_cast<double>(a.n) : 0.0,
                      a.n, a.ties, a.unscored});
    }
  };
  for (const auto& c : checkpoint_order)
    if (acc.count(c)) emit(c);
  for (const auto& [c, _] : acc) {
    if (std::find(checkpoint_order.begin(), checkpoint_order.end(), c) == checkpoint_order.end()) emit(c);
  }
  return rows;
}

std::string AccuracyCsv(const std::vector<AccuracyRow>& rows) {
  std::string out = CsvRow({"checkpoint_id", "mode", "lang", "accuracy", "n", "ties", "unscored"});
  for (const auto& r : rows) {
    out += CsvRow({r.checkpoint_id, r.mode, r.lang, FormatDouble(r.accuracy), std::to_string(r.n),
                   std::to_string(r.ties), std::to_string(r.unscored)});
  }
  return out;
}

void WriteResults(const std::filesystem::path& path, const std::vector<InstanceResult>& results) {
  std::vector<Json> records;
  records.reserve(results.size());
  for (const auto& r : results) records.push_back(r.ToJson());
  WriteJsonLines(path, records);
}

std::vector<InstanceResult> ReadResults(const std::filesystem::path& path) {
  std::vector<InstanceResult> out;
  ReadJsonLines(path, [&](const Json& j, size_t line) {
    try {
      out.push_back(InstanceResult::FromJson(j));
    } catch (const Json::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
  });
  return out;
}

}  // namespace clozebench
