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

#include "clozebench/structured.h"

#include "clozebench/error.h"
#include "clozebench/text.h"

namespace clozebench {
namespace {

// Byte range of the first balanced {...} block, honoring JSON strings.
std::optional<std::pair<size_t, size_t>> FindObject(const std::string& s, size_t from) {
  const size_t open = s.find('{', from);
  if (open == std::string::npos) return std::nullopt;
  int depth = 0;
  bool in_string = false, escaped = false;
  for (size_t i = open; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (escaped) escaped = false;
      else if (c == '\\') escaped = true;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{') ++depth;
    else if (c == '}' && --depth == 0) return std::make_pair(open, i + 1);
  }
  return std::nullopt;
}

bool TypeMatches(const Json& v, FieldSpec::Type type) {
  switch (type) {
    case FieldSpec::Type::kString: return v.is_string();
    case FieldSpec::Type::kBool: return v.is_boolean();
    case FieldSpec::Type::kNumber: return v.is_number();
    case FieldSpec::Type::kObject: return v.is_object();
    case FieldSpec::Type::kArray: return v.is_array();
    case FieldSpec::Type::kYesNo: {
      if (!v.is_string()) return false;
      const std::string s = text::ToLowerAscii(text::Trim(v.get<std::string>()));
      return s == "yes" || s == "no";
    }
  }
  return false;
}

std::string Validate(const Json& j, const Schema& schema) {
  for (const auto& f : schema) {
    if (!j.contains(f.name)) {
      if (f.required) return "missing field '" + f.name + "'";
      continue;
    }
    const Json& v = j[f.name];
    if (v.is_null()) {
      if (!f.nullable) return "field '" + f.name + "' is null";
      continue;
    }
    if (!TypeMatches(v, f.type)) return "field '" + f.name + "' has the wrong type";
  }
  return {};
}

}  // namespace

std::optional<Json> ParseStructured(const std::string& text, const Schema& schema, std::string* error) {
  std::string last_error = "no JSON object in reply";
  size_t from = 0;
  while (auto span = FindObject(text, from)) {
    Json j;
    try {
      j = Json::parse(text.substr(span->first, span->second - span->first));
    } catch (const Json::parse_error& e) {
      last_error = std::string("malformed JSON: ") + e.what();
      from = span->first + 1;
      continue;
    }
    const std::string problem = Validate(j, schema);
    if (problem.empty()) return j;
    last_error = problem;
    from = span->first + 1;
  }
  if (error) *error = last_error;
  return std::nullopt;
}

StructuredResult GenerateStructured(Gateway& gateway, const std::string& backend,
                                    const std::string& prompt, const Schema& schema,
                                    int max_attempts, int top_logprobs,
                                    const RecordValidator& validate) {
  if (schema.empty()) throw ValidationError("structured generation needs a non-empty schema");
  StructuredResult result;
  std::string current = prompt;
  for (int attempt = 0; attempt < std::max(1, max_attempts); ++attempt) {
    ++result.attempts;
    GenerationRequest req;
    req.prompt = current;
    req.top_logprobs = top_logprobs;
    Completion c;
    try {
      c = gateway.Generate(backend, req);
    } catch (const BackendError& e) {
      result.error = e.what();
      continue;
    }
    result.raw.push_back(c.text);
    std::string error;
    auto rec = ParseStructured(c.text, schema, &error);
    if (rec && validate) {
      error = validate(*rec);
      if (!error.empty()) rec.reset();
    }
    if (rec) {
      result.record = std::move(rec);
      result.completion = std::move(c);
      result.error.clear();
      return result;
    }
    result.error = error;
    current = prompt + "\n\nYour previous reply could not be used (" + error +
              "). Reply again with only the JSON object.";
  }
  return result;
}

}  // namespace clozebench
