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

#ifndef CLOZEBENCH_JSONL_H_
#define CLOZEBENCH_JSONL_H_

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace clozebench {

using Json = nlohmann::json;

// Calls `fn(record, line_number)` for every non-blank line. Parse errors are
// reported as ValidationError naming the file and 1-based line.
void ReadJsonLines(const std::filesystem::path& path,
                   const std::function<void(const Json&, size_t)>& fn);

// Canonical single-line form: sorted keys, UTF-8 passed through.
std::string CanonicalDump(const Json& j);

void WriteJsonLines(const std::filesystem::path& path, const std::vector<Json>& records);

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view contents);

Json ReadJsonFile(const std::filesystem::path& path);

// Minimal CSV writer; fields containing separators or quotes are quoted.
std::string CsvEscape(std::string_view field);
std::string CsvRow(const std::vector<std::string>& fields);

// Shortest round-trip decimal form of a double.
std::string FormatDouble(double v);

}  // namespace clozebench

#endif  // CLOZEBENCH_JSONL_H_
