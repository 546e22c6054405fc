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

// Versioned prompt templates. Each template starts with "### task: <name>"
// and carries the unit's input as a JSON object between "### input" and
// "### end input"; {{input}} and {{k}}-style slots are substituted.

#ifndef CLOZEBENCH_PROMPTS_H_
#define CLOZEBENCH_PROMPTS_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "clozebench/jsonl.h"

namespace clozebench {

struct PromptTemplate {
  std::string task;
  std::string text;
  std::string hash;  // fnv1a64 of the template text
};

class PromptLibrary {
 public:
  // Templates shipped in data/prompts.
  static PromptLibrary Builtin();
  // Builtin, overridden by any <task>.txt found in `dir`.
  static PromptLibrary WithOverrides(const std::filesystem::path& dir);

  const PromptTemplate& Get(const std::string& task) const;

  std::string Render(const std::string& task, const Json& input,
                     const std::map<std::string, std::string>& slots = {}) const;

  // task -> hash, for provenance records.
  Json Hashes() const;

 private:
  void Put(const std::string& task, std::string text);
  std::map<std::string, PromptTemplate> templates_;
};

// Recovers (task, input) from a rendered prompt; nullopt when the prompt
// was not produced by PromptLibrary::Render.
std::optional<std::pair<std::string, Json>> ParseRenderedPrompt(std::string_view prompt);

}  // namespace clozebench

#endif  // CLOZEBENCH_PROMPTS_H_
