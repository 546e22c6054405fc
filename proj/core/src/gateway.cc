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

#include "clozebench/gateway.h"

#include <cmath>
#include <numeric>
#include <thread>

#include "clozebench/error.h"
#include "clozebench/text.h"

namespace clozebench {

ScoreResponse ScoreResponse::FromNlls(std::vector<double> nlls) {
  ScoreResponse r;
  r.mean_nll = nlls.empty() ? 0.0 : std::accumulate(nlls.begin(), nlls.end(), 0.0) / nlls.size();
  r.token_nlls = std::move(nlls);
  return r;
}

void ValidateScoreResponse(const ScoreRequest& request, const ScoreResponse& response) {
  if (response.token_nlls.size() != request.target_tokens.size()) {
    throw BackendError("score response has " + std::to_string(response.token_nlls.size()) +
                       " nlls for " + std::to_string(request.target_tokens.size()) + " target tokens");
  }
  double sum = 0.0;
  for (double v : response.token_nlls) {
    if (!std::isfinite(v) || v < 0.0) throw BackendError("score response holds an invalid nll");
    sum += v;
  }
  const double mean = response.token_nlls.empty() ? 0.0 : sum / response.token_nlls.size();
  if (std::fabs(mean - response.mean_nll) > 1e-12) {
    throw BackendError("score response mean_nll disagrees with its token nlls");
  }
}

void Gateway::AddScorer(const std::string& name, std::shared_ptr<ScoringBackend> backend,
                        size_t max_in_flight) {
  scorers_[name] = {std::move(backend), std::make_unique<InFlightLimiter>(max_in_flight),
                    max_in_flight};
}

void Gateway::AddGenerator(const std::string& name, std::shared_ptr<GenerationBackend> backend,
                           size_t max_in_flight) {
  generators_[name] = {std::move(backend), std::make_unique<InFlightLimiter>(max_in_flight),
                       max_in_flight};
}

bool Gateway::SupportsLogprobs(const std::string& generator) const {
  auto it = generators_.find(generator);
  return it != generators_.end() && it->second.backend->SupportsLogprobs();
}

size_t Gateway::MaxInFlight(const std::string& name) const {
  if (auto it = scorers_.find(name); it != scorers_.end()) return it->second.max_in_flight;
  if (auto it = generators_.find(name); it != generators_.end()) return it->second.max_in_flight;
  throw ValidationError("unknown backend '" + name + "'");
}

template <typename Fn>
auto Gateway::WithRetry(const std::string& what, Fn&& fn) -> decltype(fn()) {
  ++requests_;
  std::string last;
  for (int attempt = 0; attempt <= retry_.retries; ++attempt) {
    if (attempt > 0) {
      ++retries_;
      std::this_thread::sleep_for(retry_.initial_backoff * (1 << (attempt - 1)));
    }
    try {
      return fn();
    } catch (const BackendError& e) {
      last = e.what();
    }
  }
  ++failures_;
  throw BackendError(what + ": " + last);
}

ScoreResponse Gateway::Score(const std::string& backend, const ScoreRequest& request) {
  auto it = scorers_.find(backend);
  if (it == scorers_.end()) throw ValidationError("unknown scoring backend '" + backend + "'");
  if (request.target_tokens.empty()) throw ValidationError("score request has no target tokens");
  auto& entry = it->second;
  return WithRetry("scoring on " + backend, [&] {
    InFlightLimiter::Slot slot(*entry.limiter);
    ScoreResponse r = entry.backend->Score(request);
    ValidateScoreResponse(request, r);
    return r;
  });
}

std::vector<std::optional<ScoreResponse>> Gateway::ScoreMany(const std::string& backend,
                                                             std::span<const ScoreRequest> requests) {
  std::vector<std::optional<ScoreResponse>> out(requests.size());
  ParallelFor(requests.size(), MaxInFlight(backend), [&](size_t i) {
    try {
      out[i] = Score(backend, requests[i]);
    } catch (const BackendError&) {
      out[i] = std::nullopt;
    }
  });
  return out;
}

Completion Gateway::Generate(const std::string& backend, const GenerationRequest& request) {
  auto it = generators_.find(backend);
  if (it == generators_.end()) throw ValidationError("unknown generation backend '" + backend + "'");
  auto& entry = it->second;
  return WithRetry("generation on " + backend, [&] {
    InFlightLimiter::Slot slot(*entry.limiter);
    return entry.backend->Generate(request);
  });
}

GatewayStats Gateway::stats() const {
  return {requests_.load(), retries_.load(), failures_.load()};
}

namespace {

std::string StripToken(std::string_view t) {
  std::string s(text::Trim(t));
  while (!s.empty() && (s.front() == '"' || s.front() == '\'')) s.erase(s.begin());
  while (!s.empty() && (s.back() == '"' || s.back() == '\'' || s.back() == ',')) s.pop_back();
  return text::ToLowerAscii(s);
}

}  // namespace

YesConfidence YesConfidenceFromCompletion(const Completion& completion, std::string_view field) {
  YesConfidence out;
  if (completion.tokens.empty()) {
    out.located = false;
    out.truncated = true;
    return out;
  }
  // Character offsets of each token in the concatenated stream.
  std::string stream;
  std::vector<size_t> starts;
  for (const auto& t : completion.tokens) {
    starts.push_back(stream.size());
    stream += t.text;
  }
  const std::string key = "\"" + std::string(field) + "\"";
  size_t pos = stream.find(key);
  if (pos == std::string::npos) {
    out.located = false;
    out.truncated = true;
    return out;
  }
  pos = stream.find(':', pos + key.size());
  if (pos == std::string::npos) {
    out.located = false;
    out.truncated = true;
    return out;
  }
  ++pos;
  while (pos < stream.size() && (stream[pos] == ' ' || stream[pos] == '"' || stream[pos] == '\n' ||
                                 stream[pos] == '\t'))
    ++pos;
  if (pos >= stream.size()) {
    out.located = false;
    out.truncated = true;
    return out;
  }
  // Token covering the first answer character.
  size_t ti = 0;
  while (ti + 1 < starts.size() && starts[ti + 1] <= pos) ++ti;
  const GeneratedToken& tok = completion.tokens[ti];
  if (StripToken(tok.text) == "yes") {
    out.value = std::exp(tok.logprob);
    return out;
  }
  for (const auto& alt : tok.top) {
    if (StripToken(alt.token) == "yes") {
      out.value = std::exp(alt.logprob);
      return out;
    }
  }
  out.value = 0.0;
  out.truncated = true;
  return out;
}

YesConfidence ReadYesConfidence(Gateway& gateway, const std::string& backend,
                                const std::string& prompt) {
  if (!gateway.SupportsLogprobs(backend)) {
    throw CapabilityError("backend '" + backend + "' does not return token logprobs");
  }
  GenerationRequest req;
  req.prompt = prompt;
  req.top_logprobs = 5;
  return YesConfidenceFromCompletion(gateway.Generate(backend, req));
}

}  // namespace clozebench
