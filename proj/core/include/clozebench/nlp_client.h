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

// Client for the NLP service wire protocol (HTTP + JSON):
//
//   POST /ner      {"text", "lang"} -> {"entities": [{"surface","label","start","end"}]}
//   POST /pos      {"text", "lang"} -> {"tokens":   [{"surface","pos","start","end"}]}
//   POST /split    {"text", "lang"} -> {"sentences": ["..."]}
//   POST /romanize {"text"}         -> {"text": "..."}
//   GET  /health                    -> {"capabilities": ["ner:en", ...], "models": {...}}
//
// Offsets on the wire are Unicode codepoint indexes (what a Python service
// naturally produces); the client converts them to byte offsets.

#ifndef CLOZEBENCH_NLP_CLIENT_H_
#define CLOZEBENCH_NLP_CLIENT_H_

#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include "clozebench/jsonl.h"
#include "clozebench/nlp.h"
#include "clozebench/parallel.h"

namespace clozebench::nlp {

struct ServiceConfig {
  std::string base_url;  // e.g. http://127.0.0.1:8090
  std::chrono::milliseconds timeout{30000};
  size_t max_in_flight = 8;
  int retries = 1;
};

class NlpServiceClient : public EntityRecognizer,
                         public SentenceSplitter,
                         public WordTagger,
                         public Romanizer {
 public:
  explicit NlpServiceClient(ServiceConfig config);

  // Capability strings such as "ner:en", "pos:ja", "split:en", "romanize".
  std::vector<std::string> Health() const;

  EntityResult Recognize(std::string_view text, std::string_view lang) const override;
  SplitResult Split(std::string_view text, std::string_view lang) const override;
  TagResult TagWords(std::string_view text, std::string_view lang) const override;
  RomanizeResult Romanize(std::string_view text) const override;

  // Raw POST returning the parsed body; throws BackendError.
  Json Post(const std::string& path, const Json& body) const;

 private:
  ServiceConfig config_;
  mutable InFlightLimiter limiter_;
};

// Each wrapper calls the primary adapter and, on BackendError, answers with
// the built-in fallback (result flagged fallback=true plus a warning).
class FallbackRecognizer : public EntityRecognizer {
 public:
  FallbackRecognizer(std::shared_ptr<const EntityRecognizer> primary,
                     std::shared_ptr<const EntityRecognizer> fallback)
      : primary_(std::move(primary)), fallback_(std::move(fallback)) {}
  EntityResult Recognize(std::string_view text, std::string_view lang) const override;

 private:
  std::shared_ptr<const EntityRecognizer> primary_, fallback_;
};

class FallbackSplitter : public SentenceSplitter {
 public:
  FallbackSplitter(std::shared_ptr<const SentenceSplitter> primary,
                   std::shared_ptr<const SentenceSplitter> fallback)
      : primary_(std::move(primary)), fallback_(std::move(fallback)) {}
  SplitResult Split(std::string_view text, std::string_view lang) const override;

 private:
  std::shared_ptr<const SentenceSplitter> primary_, fallback_;
};

class FallbackTagger : public WordTagger {
 public:
  FallbackTagger(std::shared_ptr<const WordTagger> primary,
                 std::shared_ptr<const WordTagger> fallback)
      : primary_(std::move(primary)), fallback_(std::move(fallback)) {}
  TagResult TagWords(std::string_view text, std::string_view lang) const override;

 private:
  std::shared_ptr<const WordTagger> primary_, fallback_;
};

class FallbackRomanizer : public Romanizer {
 public:
  FallbackRomanizer(std::shared_ptr<const Romanizer> primary,
                    std::shared_ptr<const Romanizer> fallback)
      : primary_(std::move(primary)), fallback_(std::move(fallback)) {}
  RomanizeResult Romanize(std::string_view text) const override;

 private:
  std::shared_ptr<const Romanizer> primary_, fallback_;
};

// The adapter set used by the pipeline.
struct NlpAdapters {
  std::shared_ptr<const SentenceSplitter> splitter;
  std::shared_ptr<const EntityRecognizer> ner;
  std::shared_ptr<const WordTagger> tagger;
  std::shared_ptr<const Romanizer> romanizer;
};

struct NlpConfig {
  std::string service_url;   // empty: built-in adapters only
  std::string lexicon_path;  // NER lexicon; empty uses the shipped biomedical lexicon
  std::string pos_lexicon_path;
};

NlpAdapters MakeNlpAdapters(const NlpConfig& config);

}  // namespace clozebench::nlp

#endif  // CLOZEBENCH_NLP_CLIENT_H_
