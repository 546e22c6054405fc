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

#include "clozebench/nlp_client.h"

#include <thread>

#include "clozebench/embedded.h"
#include "clozebench/error.h"
#include "clozebench/text.h"
#include "httplib.h"

namespace clozebench::nlp {
namespace {

std::pair<size_t, size_t> ToByteSpan(std::string_view s, const Json& item) {
  const size_t start = text::ByteOffsetOfCodepoint(s, item.at("start").get<size_t>());
  const size_t end = text::ByteOffsetOfCodepoint(s, item.at("end").get<size_t>());
  if (start > end || end > s.size()) throw BackendError("span outside text");
  return {start, end};
}

}  // namespace

NlpServiceClient::NlpServiceClient(ServiceConfig config)
    : config_(std::move(config)), limiter_(config_.max_in_flight) {}

Json NlpServiceClient::Post(const std::string& path, const Json& body) const {
  InFlightLimiter::Slot slot(limiter_);
  std::string last_error;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(100 << attempt));
    httplib::Client cli(config_.base_url);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    cli.set_connection_timeout(secs.count(), 0);
    cli.set_read_timeout(secs.count(), 0);
    auto res = cli.Post(path, body.dump(), "application/json");
    if (!res) {
      last_error = "request to " + config_.base_url + path + " failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = config_.base_url + path + " returned HTTP " + std::to_string(res->status);
      if (res->status >= 400 && res->status < 500) break;
      continue;
    }
    try {
      return Json::parse(res->body);
    } catch (const Json::parse_error& e) {
      last_error = config_.base_url + path + ": malformed JSON: " + e.what();
    }
  }
  throw BackendError(last_error);
}

std::vector<std::string> NlpServiceClient::Health() const {
  httplib::Client cli(config_.base_url);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  cli.set_connection_timeout(secs.count(), 0);
  cli.set_read_timeout(secs.count(), 0);
  auto res = cli.Get("/health");
  if (!res || res->status != 200) throw BackendError("NLP service health check failed");
  try {
    return Json::parse(res->body).at("capabilities").get<std::vector<std::string>>();
  } catch (const Json::exception& e) {
    throw BackendError(std::string("bad /health response: ") + e.what());
  }
}

EntityResult NlpServiceClient::Recognize(std::string_view s, std::string_view lang) const {
  EntityResult result;
  if (s.empty()) return result;
  const Json body = Post("/ner", {{"text", s}, {"lang", lang}});
  try {
    for (const auto& e : body.at("entities")) {
      const auto [start, end] = ToByteSpan(s, e);
      result.entities.push_back({std::string(s.substr(start, end - start)),
                                 e.at("label").get<std::string>(), start, end});
    }
  } catch (const Json::exception& e) {
    throw BackendError(std::string("bad /ner response: ") + e.what());
  }
  return result;
}

SplitResult NlpServiceClient::Split(std::string_view s, std::string_view lang) const {
  SplitResult result;
  const Json body = Post("/split", {{"text", s}, {"lang", lang}});
  try {
    for (const auto& sent : body.at("sentences")) {
      const auto t = text::Trim(sent.get<std::string>());
      if (!t.empty()) result.sentences.emplace_back(t);
    }
  } catch (const Json::exception& e) {
    throw BackendError(std::string("bad /split response: ") + e.what());
  }
  return result;
}

TagResult NlpServiceClient::TagWords(std::string_view s, std::string_view lang) const {
  TagResult result;
  if (s.empty()) return result;
  const Json body = Post("/pos", {{"text", s}, {"lang", lang}});
  try {
    for (const auto& t : body.at("tokens")) {
      const auto span = ToByteSpan(s, t);
      std::string pos = t.at("pos").get<std::string>();
      if (!IsValidPosTag(pos)) pos = "X";
      result.tokens.push_back({std::string(s.substr(span.first, span.second - span.first)),
                               std::nullopt, pos, span});
    }
  } catch (const Json::exception& e) {
    throw BackendError(std::string("bad /pos response: ") + e.what());
  }
  return result;
}

RomanizeResult NlpServiceClient::Romanize(std::string_view s) const {
  RomanizeResult result;
  if (s.empty()) return result;
  const Json body = Post("/romanize", {{"text", s}});
  try {
    result.text = body.at("text").get<std::string>();
  } catch (const Json::exception& e) {
    throw BackendError(std::string("bad /romanize response: ") + e.what());
  }
  return result;
}

EntityResult FallbackRecognizer::Recognize(std::string_view s, std::string_view lang) const {
  if (primary_) {
    try {
      return primary_->Recognize(s, lang);
    } catch (const BackendError& e) {
      EntityResult r = fallback_->Recognize(s, lang);
      r.fallback = true;
      r.warning = e.what();
      return r;
    }
  }
  EntityResult r = fallback_->Recognize(s, lang);
  r.fallback = true;
  return r;
}

SplitResult FallbackSplitter::Split(std::string_view s, std::string_view lang) const {
  if (primary_) {
    try {
      return primary_->Split(s, lang);
    } catch (const BackendError& e) {
      SplitResult r = fallback_->Split(s, lang);
      r.fallback = true;
      r.warning = e.what();
      return r;
    }
  }
  SplitResult r = fallback_->Split(s, lang);
  r.fallback = true;
  return r;
}

TagResult FallbackTagger::TagWords(std::string_view s, std::string_view lang) const {
  if (primary_) {
    try {
      return primary_->TagWords(s, lang);
    } catch (const BackendError& e) {
      TagResult r = fallback_->TagWords(s, lang);
      r.fallback = true;
      r.warning = e.what();
      return r;
    }
  }
  TagResult r = fallback_->TagWords(s, lang);
  r.fallback = true;
  return r;
}

RomanizeResult FallbackRomanizer::Romanize(std::string_view s) const {
  if (primary_) {
    try {
      return primary_->Romanize(s);
    } catch (const BackendError& e) {
      RomanizeResult r = fallback_->Romanize(s);
      r.fallback = true;
      r.warning = e.what();
      return r;
    }
  }
  RomanizeResult r = fallback_->Romanize(s);
  r.fallback = true;
  return r;
}

NlpAdapters MakeNlpAdapters(const NlpConfig& config) {
  std::shared_ptr<const NlpServiceClient> remote;
  if (!config.service_url.empty()) {
    remote = std::make_shared<NlpServiceClient>(ServiceConfig{config.service_url});
  }
  auto lexicon = std::make_shared<LexiconRecognizer>(
      config.lexicon_path.empty()
          ? LexiconRecognizer::FromTsv(EmbeddedFile("nlp/biomed_lexicon.tsv"))
          : LexiconRecognizer::FromFile(config.lexicon_path));
  auto tagger = std::make_shared<RuleWordTagger>(
      config.pos_lexicon_path.empty() ? RuleWordTagger()
                                      : RuleWordTagger::FromTsv(ReadFile(config.pos_lexicon_path)));
  NlpAdapters a;
  a.splitter = std::make_shared<FallbackSplitter>(remote, std::make_shared<RuleSentenceSplitter>());
  a.ner = std::make_shared<FallbackRecognizer>(remote, lexicon);
  a.tagger = std::make_shared<FallbackTagger>(remote, tagger);
  a.romanizer = std::make_shared<FallbackRomanizer>(remote, std::make_shared<KanaRomanizer>());
  return a;
}

}  // namespace clozebench::nlp
