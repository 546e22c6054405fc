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

#include "clozebench/registry.h"

#include <set>

#include "clozebench/error.h"
#include "clozebench/mock_backends.h"
#include "clozebench/openai_backend.h"

namespace clozebench {
namespace {

std::string Resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return p;
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? p : (base / path).string();
}

}  // namespace

BackendRegistry BackendRegistry::FromJson(const Json& j, std::filesystem::path base_dir) {
  BackendRegistry reg;
  reg.base_dir = std::move(base_dir);
  try {
    for (const auto& [name, b] : j.at("backends").items()) {
      BackendSpec s;
      s.name = name;
      s.kind = b.at("kind").get<std::string>();
      if (s.kind != "openai-compatible" && s.kind != "mock") {
        throw ValidationError("backend '" + name + "': unknown kind '" + s.kind + "'");
      }
      s.base_url = b.value("base_url", "");
      s.model = b.value("model", "");
      s.api_key_env = b.value("api_key_env", "");
      s.endpoint = b.value("endpoint", "completions");
      s.max_in_flight = b.value("max_in_flight", size_t{8});
      s.timeout_s = b.value("timeout_s", 120);
      if (b.contains("bos_token_id") && !b.at("bos_token_id").is_null()) s.bos_token_id = b.at("bos_token_id").get<int32_t>();
      if (s.kind == "mock") {
        s.mock = b.at("mock");
        const std::string type = s.mock.at("type").get<std::string>();
        if (type != "constant" && type != "bigram" && type != "pipeline" && type != "canned") {
          throw ValidationError("backend '" + name + "': unknown mock type '" + type + "'");
        }
      } else if (s.base_url.empty()) {
        throw ValidationError("backend '" + name + "' needs a base_url");
      }
      if (s.max_in_flight == 0) throw ValidationError("backend '" + name + "': max_in_flight must be positive");
      reg.backends[name] = std::move(s);
    }
    if (j.contains("roles")) {
      const Json& r = j.at("roles");
      reg.roles.judges = r.value("judges", std::vector<std::string>{});
      reg.roles.generator = r.value("generator", "");
      reg.roles.filter = r.value("filter", "");
      reg.roles.rewriter = r.value("rewriter", "");
    }
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("backend registry: ") + e.what());
  }
  return reg;
}

BackendRegistry BackendRegistry::BuiltinMock() {
  Json j = {{"backends", Json::object()}};
  auto add = [&](const std::string& name, Json mock) {
    j["backends"][name] = {{"kind", "mock"}, {"max_in_flight", 8}, {"mock", std::move(mock)}};
  };
  add("judge-a", {{"type", "pipeline"}, {"seed", 11}});
  add("judge-b", {{"type", "pipeline"}, {"seed", 12}});
  add("judge-c", {{"type", "pipeline"}, {"seed", 13}});
  add("generator", {{"type", "pipeline"}, {"seed", 21}});
  add("filter", {{"type", "pipeline"}, {"seed", 31}});
  add("rewriter", {{"type", "pipeline"}, {"seed", 41}});
  add("constant", {{"type", "constant"}, {"logprob", -1.0}});
  for (int i = 0; i < 4; ++i) add("ckpt-" + std::to_string(i), {{"type", "bigram"}, {"seed", 100 + i}});
  j["roles"] = {{"judges", {"judge-a", "judge-b", "judge-c"}},
                {"generator", "generator"},
                {"filter", "filter"},
                {"rewriter", "rewriter"}};
  return FromJson(j);
}

BackendRegistry BackendRegistry::Load(const std::string& spec) {
  if (spec == "mock") return BuiltinMock();
  const std::filesystem::path p(spec);
  if (!std::filesystem::is_regular_file(p)) throw ValidationError("backend registry not found: " + spec);
  return FromJson(ReadJsonFile(p), p.parent_path());
}

void BackendRegistry::Populate(Gateway& gateway, size_t vocab_size) const {
  for (const auto& [name, s] : backends) {
    if (s.kind == "openai-compatible") {
      OpenAiConfig cfg{s.base_url, s.model, s.api_key_env, s.endpoint,
                       std::chrono::seconds(s.timeout_s), s.bos_token_id};
      auto backend = std::make_shared<OpenAiBackend>(cfg);
      gateway.AddScorer(name, backend, s.max_in_flight);
      gateway.AddGenerator(name, backend, s.max_in_flight);
      continue;
    }
    const std::string type = s.mock.at("type").get<std::string>();
    if (type == "constant") {
      gateway.AddScorer(name, std::make_shared<ConstantScorer>(s.mock.value("logprob", -1.0)), s.max_in_flight);
    } else if (type == "bigram") {
      const size_t v = s.mock.value("vocab_size", size_t{0});
      gateway.AddScorer(name, std::make_shared<BigramScorer>(s.mock.value("seed", uint64_t{0}), v ? v : vocab_size),
                        s.max_in_flight);
    } else if (type == "pipeline") {
      PipelineMock::Options o{s.mock.value("seed", uint64_t{0}), Resolve(base_dir, s.mock.value("lexicon", ""))};
      gateway.AddGenerator(name, std::make_shared<PipelineMock>(o), s.max_in_flight);
    } else {
      std::shared_ptr<CannedGenerator> g;
      if (s.mock.contains("file")) g = CannedGenerator::FromFile(Resolve(base_dir, s.mock.at("file").get<std::string>()));
      else g = std::make_shared<CannedGenerator>(s.mock.value("replies", Json::object()));
      gateway.AddGenerator(name, g, s.max_in_flight);
    }
  }
}

CheckpointRegistry CheckpointRegistry::FromJson(const Json& j) {
  CheckpointRegistry reg;
  try {
    for (const auto& c : j.at("checkpoints")) {
      reg.checkpoints.push_back({c.at("id").get<std::string>(), c.at("backend").get<std::string>()});
    }
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("checkpoint registry: ") + e.what());
  }
  return reg;
}

CheckpointRegistry CheckpointRegistry::BuiltinMock() {
  CheckpointRegistry reg;
  for (int i = 0; i < 4; ++i) reg.checkpoints.push_back({"ckpt-" + std::to_string(i), "ckpt-" + std::to_string(i)});
  return reg;
}

CheckpointRegistry CheckpointRegistry::Load(const std::string& spec) {
  if (spec == "mock") return BuiltinMock();
  if (!std::filesystem::is_regular_file(spec)) throw ValidationError("checkpoint registry not found: " + spec);
  return FromJson(ReadJsonFile(spec));
}

void CheckpointRegistry::Validate(const Gateway& gateway) const {
  if (checkpoints.empty()) throw ValidationError("checkpoint registry is empty");
  std::set<std::string> ids;
  for (const auto& c : checkpoints) {
    if (!ids.insert(c.id).second) throw ValidationError("duplicate checkpoint id '" + c.id + "'");
    if (!gateway.HasScorer(c.backend)) {
      throw ValidationError("checkpoint '" + c.id + "' uses unknown scoring backend '" + c.backend + "'");
    }
  }
}

}  // namespace clozebench
