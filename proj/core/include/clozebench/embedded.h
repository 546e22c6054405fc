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

#ifndef CLOZEBENCH_EMBEDDED_H_
#define CLOZEBENCH_EMBEDDED_H_

#include <string>
#include <string_view>
#include <vector>

namespace clozebench {

// Data files compiled in from data/ (prompts/, templates/, nlp/). Paths are
// relative to data/, e.g. "prompts/fact_judge.en.txt".
std::string_view EmbeddedFile(std::string_view relative_path);
bool HasEmbeddedFile(std::string_view relative_path);
std::vector<std::string> EmbeddedFileNames();

}  // namespace clozebench

#endif  // CLOZEBENCH_EMBEDDED_H_
