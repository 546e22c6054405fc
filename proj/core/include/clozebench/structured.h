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

#ifndef CLOZEBENCH_STRUCTURED_H_
#define CLOZEBENCH_STRUCTURED_H_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "clozebench/gateway.h"
#include "clozebench/jsonl.h"

namespace clozebench {

struct FieldSpec {
  enum class Type { kString, kBool, kNumber, kObject, kArray, kYesNo };

  std::string name;
  Type type = Type::kString;
  bool required = true;
  bool nullable = false;
};

using Schema = std::vector<FieldSpec>;

// Extracts the first balanced JSON object from `text` (models often wrap it
// in prose or code fences) and checks it against `schema`. Returns the
// record or sets `error`.
std::optional<Json> ParseStructured(const std::string& text, const Schema& schema, std::string* error);

struct StructuredResult {
  std::optional<Json> record;
  std::vector<std::string> raw;  // every raw reply, for audit
  std::optional<Completion> completion;  // the reply that parsed
  std::string error;
  int attempts = 0;

  bool ok() const { return record.has_value(); }
};

// Semantic check applied after schema validation; returns an error message
// or "" when the record is acceptable.
using RecordValidator = std::function<std::string(const Json&)>;

// Generates and parses, re-prompting with the error when the reply does not
// parse or validate. `max_attempts` counts the first call.
StructuredResult GenerateStructured(Gateway& gateway, const std::string& backend,
                                    const std::string& prompt, const Schema& schema,
                                    int max_attempts = 2, int top_logprobs = 0,
                                    const RecordValidator& validate = nullptr);

}  // namespace clozebench

#endif  // CLOZEBENCH_STRUCTURED_H_
