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

#include "clozebench/prompts.h"

#include "clozebench/embedded.h"
#include "clozebench/error.h"
#include "clozebench/rng.h"
#include "clozebench/text.h"

namespace clozebench {
namespace {

constexpr std::string_view kTaskPrefix = "### task: ";
constexpr std::string_view kInputBegin = "### input\n";
constexpr std::string_view kInputEnd = "\n### end input";

}  // namespace

void PromptLibrary::Put(const std::string& task, std::string text) {
  if (!text::StartsWith(text, kTaskPrefix)) {
    throw ValidationError("prompt template '" + task + "' must start with '### task: '");
  }
  if (text.find("{{input}}") == std::string::npos) {
    throw ValidationError("prompt template '" + task + "' lacks an {{input}} slot");
  }
  const std::string hash = HexDigest(Fnv1a64(text));
  templates_[task] = {task, std::move(text), hash};
}

PromptLibrary PromptLibrary::Builtin() {
  PromptLibrary lib;
  for (const auto& name : EmbeddedFileNames()) {
    if (!text::StartsWith(name, "prompts/") || !text::EndsWith(name, ".txt")) continue;
    const std::string task = name.substr(8, name.size() - 12);
    lib.Put(task, std::string(EmbeddedFile(name)));
  }
  return lib;
}

PromptLibrary PromptLibrary::WithOverrides(const std::filesystem::path& dir) {
  PromptLibrary lib = Builtin();
  if (!std::filesystem::is_directory(dir)) throw ValidationError("prompt directory not found: " + dir.string());
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".txt") continue;
    lib.Put(entry.path().stem().string(), ReadFile(entry.path()));
  }
  return lib;
}

const PromptTemplate& PromptLibrary::Get(const std::string& task) const {
  auto it = templates_.find(task);
  if (it == templates_.end()) throw ValidationError("no prompt template for task '" + task + "'");
  return it->second;
}

std::string PromptLibrary::Render(const std::string& task, const Json& input,
                                  const std::map<std::string, std::string>& slots) const {
  std::string out = Get(task).text;
  for (const auto& [k, v] : slots) out = text::ReplaceAll(out, "{{" + k + "}}", v);
  return text::ReplaceAll(out, "{{input}}", CanonicalDump(input));
}

Json PromptLibrary::Hashes() const {
  Json j = Json::object();
  for (const auto& [task, t] : templates_) j[task] = t.hash;
  return j;
}

std::optional<std::pair<std::string, Json>> ParseRenderedPrompt(std::string_view prompt) {
  if (!text::StartsWith(prompt, kTaskPrefix)) return std::nullopt;
  const size_t eol = prompt.find('\n');
  if (eol == std::string_view::npos) return std::nullopt;
  std::string task(text::Trim(prompt.substr(kTaskPrefix.size(), eol - kTaskPrefix.size())));
  const size_t begin = prompt.find(kInputBegin);
  if (begin == std::string_view::npos) return std::nullopt;
  const size_t start = begin + kInputBegin.size();
  const size_t end = prompt.find(kInputEnd, start);
  if (end == std::string_view::npos) return std::nullopt;
  try {
    return std::make_pair(task, Json::parse(prompt.substr(start, end - start)));
  } catch (const Json::parse_error&) {
    return std::nullopt;
  }
}

}  // namespace clozebench
