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

#ifndef CLOZEBENCH_TOKENIZER_H_
#define CLOZEBENCH_TOKENIZER_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "clozebench/nlp.h"

namespace clozebench {

// Greedy longest-match tokenizer over a model vocabulary file.
//
// Vocabulary file: one piece per line, the line index is the token id. A tab
// ends the piece (sentencepiece ".vocab" files carry a score column). "▁"
// stands for a space. Pieces of the form <...> are special tokens and never
// match text; <unk> is required.
//
// Matching is greedy on codepoint boundaries: at each position the longest
// piece wins. A codepoint that starts no piece becomes one <unk>.
class Tokenizer {
 public:
  struct Encoding {
    std::vector<nlp::Token> tokens;  // id, surface and byte offset set
    size_t unknown_count = 0;

    std::vector<int32_t> ids() const;
  };

  static Tokenizer FromVocabFile(const std::filesystem::path& path);
  static Tokenizer FromPieces(std::vector<std::string> pieces);
  static Tokenizer FromVocabText(std::string_view contents);
  // The vocabulary shipped in data/vocab/base.vocab.
  static Tokenizer Builtin();
  // "builtin" or a vocabulary file path.
  static Tokenizer Load(const std::string& spec);

  Encoding Tokenize(std::string_view text) const;
  std::vector<int32_t> Encode(std::string_view text) const;
  size_t CountTokens(std::string_view text) const { return Encode(text).size(); }

  // Concatenation of token surfaces; exact inverse of Tokenize.
  static std::string Detokenize(std::span<const nlp::Token> tokens);

  // Id-only inverse; <unk> renders as U+FFFD, other specials as "".
  std::string Decode(std::span<const int32_t> ids) const;

  // Decode(Encode(text)): unmatched codepoints become U+FFFD.
  std::string Normalize(std::string_view text) const;

  size_t vocab_size() const { return pieces_.size(); }
  int32_t unk_id() const { return unk_id_; }
  bool IsSpecial(int32_t id) const { return specials_.count(id) > 0; }
  // Piece text with "▁" rendered as a space.
  const std::string& Surface(int32_t id) const { return surfaces_.at(id); }
  const std::vector<int32_t>& regular_ids() const { return regular_ids_; }
  // Fingerprint of the vocabulary, recorded in run metadata.
  std::string Fingerprint() const;

 private:
  Tokenizer() = default;

  std::vector<std::string> pieces_;
  std::vector<std::string> surfaces_;
  std::unordered_map<std::string, int32_t> by_surface_;
  std::unordered_set<int32_t> specials_;
  std::vector<int32_t> regular_ids_;
  size_t max_piece_bytes_ = 0;
  int32_t unk_id_ = -1;
};

}  // namespace clozebench

#endif  // CLOZEBENCH_TOKENIZER_H_
