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

#include "clozebench/dynamics.h"

#include <algorithm>
#include <set>

#include "clozebench/error.h"

namespace clozebench {

std::vector<double> Trajectory::CorrectLosses() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.correct_loss);
  return out;
}

std::vector<std::string> CheckpointOrder(const std::vector<InstanceResult>& results) {
  std::vector<std::string> order;
  std::set<std::string> seen;
  for (const auto& r : results)
    if (seen.insert(r.checkpoint_id).second) order.push_back(r.checkpoint_id);
  return order;
}

TrajectorySet BuildTrajectories(const std::vector<InstanceResult>& results,
                                const std::vector<std::string>& checkpoint_order) {
  std::map<std::string, size_t> pos;
  for (size_t i = 0; i < checkpoint_order.size(); ++i) {
    if (!pos.emplace(checkpoint_order[i], i).second) {
      throw ValidationError("duplicate checkpoint '" + checkpoint_order[i] + "' in order");
    }
  }
  std::map<std::string, std::vector<const InstanceResult*>> by_id;
  for (const auto& r : results) {
    auto it = pos.find(r.checkpoint_id);
    if (it == pos.end()) throw ValidationError("result for unknown checkpoint '" + r.checkpoint_id + "'");
    auto& slots = by_id[r.instance_id];
    slots.resize(checkpoint_order.size(), nullptr);
    if (slots[it->second]) {
      throw ValidationError("duplicate result for (" + r.instance_id + ", " + r.checkpoint_id + ")");
    }
    slots[it->second] = &r;
  }
  TrajectorySet set;
  set.checkpoints = checkpoint_order;
  for (const auto& [id, slots] : by_id) {
    const bool complete = std::all_of(slots.begin(), slots.end(), [](auto* p) { return p && p->scored; });
    if (!complete) {
      set.excluded.push_back(id);
      continue;
    }
    Trajectory t{id, slots.front()->lang, {}};
    for (const auto* p : slots) t.points.push_back(*p);
    set.trajectories.push_back(std::move(t));
  }
  return set;
}

std::string TransitionName(Transition t) {
  switch (t) {
    case Transition::kRetained: return "Retained";
    case Transition::kAcquired: return "Acquired";
    case Transition::kForgotten: return "Forgotten";
    case Transition::kUnacquired: return "Unacquired";
  }
  return "";
}

Transition ClassifyTransition(bool pre_correct, bool post_correct) {
  if (pre_correct) return post_correct ? Transition::kRetained : Transition::kForgotten;
  return post_correct ? Transition::kAcquired : Transition::kUnacquired;
}

Transition ClassifyTransition(const InstanceResult& pre, const InstanceResult& post) {
  if (pre.instance_id != post.instance_id) throw ValidationError("transition across different instances");
  if (!pre.scored || !post.scored) throw ValidationError("transition needs scored results");
  return ClassifyTransition(pre.correct, post.correct);
}

void TransitionCounts::Add(Transition t) {
  switch (t) {
    case Transition::kRetained: ++retained; break;
    case Transition::kAcquired: ++acquired; break;
    case Transition::kForgotten: ++forgotten; break;
    case Transition::kUnacquired: ++unacquired; break;
  }
}

std::map<std::string, TransitionCounts> CountTransitions(const TrajectorySet& set, size_t pre, size_t post) {
  if (pre >= post || post >= set.checkpoints.size()) {
    throw ValidationError("transition checkpoints must satisfy pre < post < " + std::to_string(set.checkpoints.size()));
  }
  std::map<std::string, TransitionCounts> out;
  out["all"];
  for (const auto& t : set.trajectories) {
    const Transition tr = ClassifyTransition(t.points[pre], t.points[post]);
    out[t.lang].Add(tr);
    out["all"].Add(tr);
  }
  return out;
}

Onset DetectOnset(std::span<const double> losses) {
  if (losses.empty()) throw ValidationError("onset of an empty trajectory");
  Onset o;
  for (size_t i = 1; i < losses.size(); ++i)
    if (losses[i] < losses[o.index]) o.index = i;
  o.at_end = o.index + 1 == losses.size();
  return o;
}

std::string PatternName(Pattern p) {
  switch (p) {
    case Pattern::kStableGain: return "StableGain";
    case Pattern::kLossShielding: return "LossShielding";
    case Pattern::kUnstable: return "Unstable";
  }
  return "";
}

PatternResult ClassifyPattern(const Trajectory& traj) {
  if (traj.points.empty() || !traj.points.back().correct) {
    throw ValidationError("pattern labels apply only to instances correct at the final checkpoint");
  }
  PatternResult r;
  const auto losses = traj.CorrectLosses();
  r.onset = DetectOnset(losses).index;
  if (traj.points.size() < 3) {
    r.insufficient = true;
    return r;
  }
  const double initial = losses.front(), final = losses.back();
  auto argmin_from = [&](size_t from) {
    for (size_t t = from; t < traj.points.size(); ++t)
      if (!traj.points[t].correct) return false;
    return true;
  };
  if (final < initial) {
    r.label = argmin_from(r.onset) ? Pattern::kStableGain : Pattern::kUnstable;
    return r;
  }
  size_t first = 0;
  while (!traj.points[first].correct) ++first;  // terminates: final point is correct
  r.label = argmin_from(first) ? Pattern::kLossShielding : Pattern::kUnstable;
  return r;
}

std::map<std::string, PatternCounts> CountPatterns(const TrajectorySet& set) {
  std::map<std::string, PatternCounts> out;
  out["all"];
  for (const auto& t : set.trajectories) {
    if (!t.points.back().correct) continue;
    const PatternResult p = ClassifyPattern(t);
    for (const std::string& g : {t.lang, std::string("all")}) {
      PatternCounts& c = out[g];
      if (p.insufficient) ++c.insufficient;
      switch (p.label) {
        case Pattern::kStableGain: ++c.stable_gain; break;
        case Pattern::kLossShielding: ++c.loss_shielding; break;
        case Pattern::kUnstable: ++c.unstable; break;
      }
    }
  }
  return out;
}

std::string SeriesCsv(const std::vector<SeriesRow>& rows) {
  std::string out = CsvRow({"checkpoint", "metric", "group", "value"});
  for (const auto& r : rows) out += CsvRow({r.checkpoint, r.metric, r.group, FormatDouble(r.value)});
  return out;
}

std::vector<SeriesRow> LossSeries(const TrajectorySet& set) {
  std::set<std::string> groups{"all"};
  for (const auto& t : set.trajectories) groups.insert(t.lang);
  std::vector<SeriesRow> rows;
  for (size_t c = 0; c < set.checkpoints.size(); ++c) {
    for (const auto& g : groups) {
      size_t n = 0, correct = 0, ratio_n = 0;
      double closs = 0, dloss = 0, ratio = 0;
      for (const auto& t : set.trajectories) {
        if (g != "all" && t.lang != g) continue;
        const InstanceResult& r = t.points[c];
        ++n;
        correct += r.correct;
        closs += r.correct_loss;
        double d = 0;
        for (const auto& s : r.scores)
          if (s.option_index != r.answer_index) d += s.mean_nll;
        dloss += d / static_cast<double>(r.scores.size() - 1);
        if (r.ratio_defined) {
          ratio += r.loss_ratio;
          ++ratio_n;
        }
      }
      if (n == 0) continue;
      const double dn = static_cast<double>(n);
      const std::string& ck = set.checkpoints[c];
      rows.push_back({ck, "accuracy", g, static_cast<double>(correct) / dn});
      rows.push_back({ck, "correct_loss", g, closs / dn});
      rows.push_back({ck, "distractor_loss", g, dloss / dn});
      if (ratio_n) rows.push_back({ck, "loss_ratio", g, ratio / static_cast<double>(ratio_n)});
    }
  }
  return rows;
}

}  // namespace clozebench
