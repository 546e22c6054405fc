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

#include "clozebench/tokenizer.h"

#include <algorithm>

#include "clozebench/embedded.h"
#include "clozebench/error.h"
#include "clozebench/jsonl.h"
#include "clozebench/rng.h"
#include "clozebench/text.h"

namespace clozebench {
namespace {

constexpr std::string_view kSpaceMarker = "\xE2\x96\x81";  // ▁
constexpr std::string_view kReplacement = "\xEF\xBF\xBD";  // U+FFFD

bool IsSpecialPiece(std::string_view p) {
  return p.size() >= 3 && p.front() == '<' && p.back() == '>' &&
         p.find('<', 1) == std::string_view::npos;
}

}  // namespace

std::vector<int32_t> Tokenizer::Encoding::ids() const {
  std::vector<int32_t> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(*t.id);
  return out;
}

Tokenizer Tokenizer::FromVocabFile(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw ValidationError("unknown vocabulary file " + path.string());
  }
  return FromVocabText(ReadFile(path));
}

Tokenizer Tokenizer::FromVocabText(std::string_view contents) {
  std::vector<std::string> pieces;
  for (auto& line : text::SplitLines(contents)) {
    const size_t tab = line.find('\t');
    if (tab != std::string::npos) line.resize(tab);
    pieces.push_back(std::move(line));
  }
  return FromPieces(std::move(pieces));
}

Tokenizer Tokenizer::Builtin() { return FromVocabText(EmbeddedFile("vocab/base.vocab")); }

Tokenizer Tokenizer::Load(const std::string& spec) {
  if (spec.empty() || spec == "builtin") return Builtin();
  return FromVocabFile(spec);
}

Tokenizer Tokenizer::FromPieces(std::vector<std::string> pieces) {
  Tokenizer tok;
  tok.pieces_ = std::move(pieces);
  tok.surfaces_.reserve(tok.pieces_.size());
  for (size_t i = 0; i < tok.pieces_.size(); ++i) {
    const std::string& p = tok.pieces_[i];
    const auto id = static_cast<int32_t>(i);
    if (p.empty()) throw ValidationError("vocabulary line " + std::to_string(i + 1) + " is empty");
    if (IsSpecialPiece(p)) {
      tok.specials_.insert(id);
      tok.surfaces_.emplace_back();
      if (p == "<unk>") tok.unk_id_ = id;
      continue;
    }
    std::string surface = text::ReplaceAll(p, kSpaceMarker, " ");
    // First occurrence wins for duplicate pieces.
    if (tok.by_surface_.emplace(surface, id).second) {
      tok.regular_ids_.push_back(id);
      tok.max_piece_bytes_ = std::max(tok.max_piece_bytes_, surface.size());
    }
    tok.surfaces_.push_back(std::move(surface));
  }
  if (tok.unk_id_ < 0) throw ValidationError("vocabulary lacks an <unk> piece");
  return tok;
}

Tokenizer::Encoding Tokenizer::Tokenize(std::string_view s) const {
  Encoding enc;
  const auto cps = text::Codepoints(s);
  size_t i = 0;
  while (i < cps.size()) {
    const size_t begin = cps[i].begin;
    // Longest piece starting here, ending on a codepoint boundary.
    size_t best_j = 0;
    int32_t best_id = unk_id_;
    for (size_t j = i + 1; j <= cps.size() && cps[j - 1].end - begin <= max_piece_bytes_; ++j) {
      auto it = by_surface_.find(std::string(s.substr(begin, cps[j - 1].end - begin)));
      if (it != by_surface_.end()) {
        best_j = j;
        best_id = it->second;
      }
    }
    if (best_j == 0) {
      best_j = i + 1;
      ++enc.unknown_count;
    }
    const size_t end = cps[best_j - 1].end;
    enc.tokens.push_back({std::string(s.substr(begin, end - begin)), best_id, std::nullopt, std::make_pair(begin, end)});
    i = best_j;
  }
  return enc;
}

std::vector<int32_t> Tokenizer::Encode(std::string_view s) const {
  return Tokenize(s).ids();
}

std::string Tokenizer::Detokenize(std::span<const nlp::Token> tokens) {
  std::string out;
  for (const auto& t : tokens) out += t.surface;
  return out;
}

std::string Tokenizer::Decode(std::span<const int32_t> ids) const {
  std::string out;
  for (int32_t id : ids) {
    if (id < 0 || static_cast<size_t>(id) >= pieces_.size()) {
      throw ValidationError("token id " + std::to_string(id) + " outside vocabulary");
    }
    if (id == unk_id_) out += kReplacement;
    else out += surfaces_[id];
  }
  return out;
}

std::string Tokenizer::Normalize(std::string_view s) const { return Decode(Encode(s)); }

std::string Tokenizer::Fingerprint() const {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& p : pieces_) {
    h = Fnv1a64(p, h);
    h = Fnv1a64("\n", h);
  }
  return HexDigest(h);
}

}  // namespace clozebench
