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

#include "clozebench/embedded.h"

#include <utility>

#include "clozebench/error.h"

namespace clozebench {
namespace internal {
extern const std::pair<std::string_view, std::string_view> kEmbeddedFiles[];
extern const int kEmbeddedFileCount;
}  // namespace internal

std::string_view EmbeddedFile(std::string_view relative_path) {
  for (int i = 0; i < internal::kEmbeddedFileCount; ++i) {
    if (internal::kEmbeddedFiles[i].first == relative_path) return internal::kEmbeddedFiles[i].second;
  }
  throw ValidationError("no embedded data file " + std::string(relative_path));
}

bool HasEmbeddedFile(std::string_view relative_path) {
  for (int i = 0; i < internal::kEmbeddedFileCount; ++i) {
    if (internal::kEmbeddedFiles[i].first == relative_path) return true;
  }
  return false;
}

std::vector<std::string> EmbeddedFileNames() {
  std::vector<std::string> names;
  for (int i = 0; i < internal::kEmbeddedFileCount; ++i) {
    names.emplace_back(internal::kEmbeddedFiles[i].first);
  }
  return names;
}

}  // namespace clozebench
