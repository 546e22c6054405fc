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

// Uniform access to scoring backends (per-token log-probabilities of a
// target continuation) and generation backends (text completion with
// optional token log-probabilities). Losses are in nats.

#ifndef CLOZEBENCH_GATEWAY_H_
#define CLOZEBENCH_GATEWAY_H_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clozebench/parallel.h"

namespace clozebench {

struct ScoreRequest {
  std::vector<int32_t> context_tokens;  // may be empty: score from sequence start
  std::vector<int32_t> target_tokens;   // non-empty
};

struct ScoreResponse {
  std::vector<double> token_nlls;  // -log p(s_t | c, s_<t), one per target token
  double mean_nll = 0.0;

  static ScoreResponse FromNlls(std::vector<double> nlls);
};

struct TopLogprob {
  std::string token;
  double logprob = 0.0;
};

struct GeneratedToken {
  std::string text;
  double logprob = 0.0;
  std::vector<TopLogprob> top;
};

struct Completion {
  std::string text;
  std::vector<GeneratedToken> tokens;  // empty when the backend gives no logprobs
};

struct GenerationRequest {
  std::string prompt;
  int max_tokens = 1024;
  double temperature = 0.0;
  int top_logprobs = 0;  // 0: no logprobs requested
  std::optional<uint64_t> seed;
};

class ScoringBackend {
 public:
  virtual ~ScoringBackend() = default;
  virtual ScoreResponse Score(const ScoreRequest& request) = 0;
};

class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;
  virtual Completion Generate(const GenerationRequest& request) = 0;
  virtual bool SupportsLogprobs() const { return false; }
};

// Checks the ScoreResponse invariants against its request: one finite,
// non-negative nll per target token and mean_nll equal to their mean within
// 1e-12. Throws BackendError.
void ValidateScoreResponse(const ScoreRequest& request, const ScoreResponse& response);

struct RetryPolicy {
  int retries = 1;
  std::chrono::milliseconds initial_backoff{200};
};

struct GatewayStats {
  size_t requests = 0;
  size_t retries = 0;
  size_t failures = 0;
};

// Registry of named backends with per-backend in-flight bounds and the
// retry policy. Thread-safe after registration.
class Gateway {
 public:
  explicit Gateway(RetryPolicy retry = {}) : retry_(retry) {}

  void AddScorer(const std::string& name, std::shared_ptr<ScoringBackend> backend,
                 size_t max_in_flight = 8);
  void AddGenerator(const std::string& name, std::shared_ptr<GenerationBackend> backend,
                    size_t max_in_flight = 8);

  bool HasScorer(const std::string& name) const { return scorers_.count(name) > 0; }
  bool HasGenerator(const std::string& name) const { return generators_.count(name) > 0; }
  bool SupportsLogprobs(const std::string& generator) const;
  size_t MaxInFlight(const std::string& name) const;

  // Throws BackendError once retries are exhausted or the response violates
  // its invariants.
  ScoreResponse Score(const std::string& backend, const ScoreRequest& request);

  // Scores every request with at most max_in_flight concurrent calls.
  // Results are index-aligned with `requests`; failures are nullopt.
  std::vector<std::optional<ScoreResponse>> ScoreMany(const std::string& backend,
                                                      std::span<const ScoreRequest> requests);

  Completion Generate(const std::string& backend, const GenerationRequest& request);

  GatewayStats stats() const;

 private:
  template <typename Backend>
  struct Entry {
    std::shared_ptr<Backend> backend;
    std::unique_ptr<InFlightLimiter> limiter;
    size_t max_in_flight = 8;
  };

  template <typename Fn>
  auto WithRetry(const std::string& what, Fn&& fn) -> decltype(fn());

  RetryPolicy retry_;
  std::map<std::string, Entry<ScoringBackend>> scorers_;
  std::map<std::string, Entry<GenerationBackend>> generators_;
  std::atomic<size_t> requests_{0}, retries_{0}, failures_{0};
};

// Reads p("yes") at the position of the first answer token of the
// "factuality" field. When the yes token is missing from the returned
// alternatives the confidence is 0 and `truncated` is set; when the field
// cannot be located `located` is false.
struct YesConfidence {
  double value = 0.0;
  bool truncated = false;
  bool located = true;
};

YesConfidence YesConfidenceFromCompletion(const Completion& completion,
                                          std::string_view field = "factuality");

// Generates with logprobs and reads the yes-confidence. Throws
// CapabilityError when the backend cannot return logprobs.
YesConfidence ReadYesConfidence(Gateway& gateway, const std::string& backend,
                                const std::string& prompt);

}  // namespace clozebench

#endif  // CLOZEBENCH_GATEWAY_H_
