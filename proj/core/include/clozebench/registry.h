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

// Backend and checkpoint registries.
//
//   {"backends": {
//      "<name>": {"kind": "openai-compatible", "base_url": ..., "model": ...,
//                 "api_key_env": ..., "max_in_flight": 8, "timeout_s": 120,
//                 "endpoint": "completions"|"chat", "bos_token_id": 1},
//      "<name>": {"kind": "mock", "max_in_flight": 8,
//                 "mock": {"type": "constant", "logprob": -1.0}
//                       | {"type": "bigram", "seed": 7, "vocab_size": 0}
//                       | {"type": "pipeline", "seed": 11, "lexicon": "path"}
//                       | {"type": "canned", "file": "path"} | {"type": "canned", "replies": {...}}}},
//    "roles": {"judges": [...], "generator": ..., "filter": ..., "rewriter": ...}}
//
//   {"checkpoints": [{"id": "step-1000", "backend": "<name>"}, ...]}
//
// The literal "mock" selects built-in registries that need no files.

#ifndef CLOZEBENCH_REGISTRY_H_
#define CLOZEBENCH_REGISTRY_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clozebench/gateway.h"
#include "clozebench/jsonl.h"

namespace clozebench {

struct BackendSpec {
  std::string name;
  std::string kind;  // openai-compatible | mock
  std::string base_url;
  std::string model;
  std::string api_key_env;
  std::string endpoint = "completions";
  size_t max_in_flight = 8;
  int timeout_s = 120;
  std::optional<int32_t> bos_token_id;
  Json mock;  // mock settings
};

struct PipelineRoles {
  std::vector<std::string> judges;
  std::string generator;
  std::string filter;
  std::string rewriter;
};

struct BackendRegistry {
  std::map<std::string, BackendSpec> backends;
  PipelineRoles roles;
  std::filesystem::path base_dir;  // for relative paths inside mock specs

  static BackendRegistry FromJson(const Json& j, std::filesystem::path base_dir = {});
  static BackendRegistry BuiltinMock();
  static BackendRegistry Load(const std::string& spec);

  // Instantiates every backend into `gateway`. `vocab_size` sizes bigram
  // mocks that do not fix it themselves.
  void Populate(Gateway& gateway, size_t vocab_size) const;
};

struct Checkpoint {
  std::string id;
  std::string backend;
};

struct CheckpointRegistry {
  std::vector<Checkpoint> checkpoints;

  static CheckpointRegistry FromJson(const Json& j);
  static CheckpointRegistry BuiltinMock();
  static CheckpointRegistry Load(const std::string& spec);

  // Throws if empty, ids repeat, or a backend is not a scorer in `gateway`.
  void Validate(const Gateway& gateway) const;
};

}  // namespace clozebench

#endif  // CLOZEBENCH_REGISTRY_H_
