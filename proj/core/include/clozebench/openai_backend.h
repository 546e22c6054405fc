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

// Client for OpenAI-compatible inference servers (vLLM, llama.cpp server,
// hosted APIs). Scoring posts token ids to /v1/completions with echo=true
// and max_tokens=0 and slices the echoed logprobs at the context/target
// boundary, so no retokenization happens on either side.

#ifndef CLOZEBENCH_OPENAI_BACKEND_H_
#define CLOZEBENCH_OPENAI_BACKEND_H_

#include <chrono>
#include <optional>
#include <string>

#include "clozebench/gateway.h"
#include "clozebench/jsonl.h"

namespace clozebench {

struct OpenAiConfig {
  std::string base_url;  // scheme://host[:port][/prefix]
  std::string model;
  std::string api_key_env;  // name of the env var holding the key; may be empty
  std::string endpoint = "completions";  // generation endpoint: completions | chat
  std::chrono::seconds timeout{120};
  // Prepended to scoring prompts so the first context or target token has a
  // conditional logprob. Without it an empty-context request cannot be scored.
  std::optional<int32_t> bos_token_id;
};

class OpenAiBackend : public ScoringBackend, public GenerationBackend {
 public:
  explicit OpenAiBackend(OpenAiConfig config);

  ScoreResponse Score(const ScoreRequest& request) override;
  Completion Generate(const GenerationRequest& request) override;
  bool SupportsLogprobs() const override { return true; }

  // Exposed for tests.
  static ScoreResponse ParseEchoLogprobs(const Json& body, size_t target_count);
  static Completion ParseCompletion(const Json& body, bool chat);

 private:
  Json PostJson(const std::string& path, const Json& body) const;

  OpenAiConfig config_;
  std::string origin_;
  std::string prefix_;
};

}  // namespace clozebench

#endif  // CLOZEBENCH_OPENAI_BACKEND_H_
