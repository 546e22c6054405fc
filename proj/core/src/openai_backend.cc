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

#include "clozebench/openai_backend.h"

#include <cstdlib>

#include "clozebench/error.h"
#include "clozebench/text.h"
#include "httplib.h"

namespace clozebench {

OpenAiBackend::OpenAiBackend(OpenAiConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) throw ValidationError("openai-compatible backend needs a base_url");
  if (config_.endpoint != "completions" && config_.endpoint != "chat") {
    throw ValidationError("endpoint must be 'completions' or 'chat', got '" + config_.endpoint + "'");
  }
  // Split "http://host:port/prefix" into origin and path prefix.
  const size_t scheme = config_.base_url.find("://");
  const size_t path = config_.base_url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  origin_ = config_.base_url.substr(0, path);
  prefix_ = path == std::string::npos ? "" : config_.base_url.substr(path);
  while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  if (!text::EndsWith(prefix_, "/v1")) prefix_ += "/v1";
}

Json OpenAiBackend::PostJson(const std::string& path, const Json& body) const {
  httplib::Client cli(origin_);
  cli.set_connection_timeout(config_.timeout.count(), 0);
  cli.set_read_timeout(config_.timeout.count(), 0);
  cli.set_write_timeout(config_.timeout.count(), 0);
  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      throw ValidationError("environment variable " + config_.api_key_env + " is not set");
    }
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  auto res = cli.Post(prefix_ + path, headers, body.dump(), "application/json");
  if (!res) throw BackendError(origin_ + prefix_ + path + ": " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw BackendError(origin_ + prefix_ + path + " returned HTTP " + std::to_string(res->status) + ": " +
                       res->body.substr(0, 200));
  }
  try {
    return Json::parse(res->body);
  } catch (const Json::parse_error& e) {
    throw BackendError(std::string("malformed JSON from backend: ") + e.what());
  }
}

ScoreResponse OpenAiBackend::ParseEchoLogprobs(const Json& body, size_t target_count) {
  try {
    const Json& lps = body.at("choices").at(0).at("logprobs").at("token_logprobs");
    if (lps.size() < target_count) throw BackendError("echoed logprobs shorter than the target");
    std::vector<double> nlls;
    nlls.reserve(target_count);
    for (size_t i = lps.size() - target_count; i < lps.size(); ++i) {
      if (lps[i].is_null()) {
        throw BackendError("target token has no conditional logprob; set bos_token_id for this backend");
      }
      nlls.push_back(-lps[i].get<double>());
    }
    return ScoreResponse::FromNlls(std::move(nlls));
  } catch (const Json::exception& e) {
    throw BackendError(std::string("bad completions response: ") + e.what());
  }
}

ScoreResponse OpenAiBackend::Score(const ScoreRequest& request) {
  std::vector<int32_t> prompt;
  if (config_.bos_token_id) prompt.push_back(*config_.bos_token_id);
  prompt.insert(prompt.end(), request.context_tokens.begin(), request.context_tokens.end());
  prompt.insert(prompt.end(), request.target_tokens.begin(), request.target_tokens.end());
  const Json body = {{"model", config_.model}, {"prompt", prompt}, {"max_tokens", 0},
                     {"echo", true},          {"logprobs", 1},      {"temperature", 0}};
  return ParseEchoLogprobs(PostJson("/completions", body), request.target_tokens.size());
}

Completion OpenAiBackend::ParseCompletion(const Json& body, bool chat) {
  Completion c;
  try {
    const Json& choice = body.at("choices").at(0);
    if (chat) {
      c.text = choice.at("message").at("content").get<std::string>();
      if (choice.contains("logprobs") && choice.at("logprobs").is_object() &&
          choice.at("logprobs").contains("content") && choice.at("logprobs").at("content").is_array()) {
        for (const auto& t : choice.at("logprobs").at("content")) {
          GeneratedToken g{t.at("token").get<std::string>(), t.at("logprob").get<double>(), {}};
          if (t.contains("top_logprobs"))
            for (const auto& a : t.at("top_logprobs"))
              g.top.push_back({a.at("token").get<std::string>(), a.at("logprob").get<double>()});
          c.tokens.push_back(std::move(g));
        }
      }
      return c;
    }
    c.text = choice.at("text").get<std::string>();
    if (choice.contains("logprobs") && choice.at("logprobs").is_object()) {
      const Json& lp = choice.at("logprobs");
      const auto& toks = lp.at("tokens");
      const auto& vals = lp.at("token_logprobs");
      for (size_t i = 0; i < toks.size(); ++i) {
        GeneratedToken g{toks[i].get<std::string>(), vals[i].is_null() ? 0.0 : vals[i].get<double>(), {}};
        if (lp.contains("top_logprobs") && lp.at("top_logprobs").is_array() && i < lp.at("top_logprobs").size() &&
            lp.at("top_logprobs")[i].is_object()) {
          for (const auto& [tok, v] : lp.at("top_logprobs")[i].items()) g.top.push_back({tok, v.get<double>()});
          std::stable_sort(g.top.begin(), g.top.end(),
                           [](const TopLogprob& a, const TopLogprob& b) { return a.logprob > b.logprob; });
        }
        c.tokens.push_back(std::move(g));
      }
    }
  } catch (const Json::exception& e) {
    throw BackendError(std::string("bad generation response: ") + e.what());
  }
  return c;
}

Completion OpenAiBackend::Generate(const GenerationRequest& request) {
  const bool chat = config_.endpoint == "chat";
  Json body = {{"model", config_.model}, {"max_tokens", request.max_tokens}, {"temperature", request.temperature}};
  if (request.seed) body["seed"] = *request.seed;
  if (chat) {
    body["messages"] = Json::array({{{"role", "user"}, {"content", request.prompt}}});
    if (request.top_logprobs > 0) {
      body["logprobs"] = true;
      body["top_logprobs"] = request.top_logprobs;
    }
  } else {
    body["prompt"] = request.prompt;
    if (request.top_logprobs > 0) body["logprobs"] = request.top_logprobs;
  }
  return ParseCompletion(PostJson(chat ? "/chat/completions" : "/completions", body), chat);
}

}  // namespace clozebench
