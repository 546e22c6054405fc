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

#include <algorithm>

#include "clozebench/embedded.h"
#include "clozebench/error.h"
#include "clozebench/jsonl.h"
#include "clozebench/nlp.h"
#include "clozebench/text.h"

namespace clozebench::nlp {

WordNet WordNet::FromTsv(std::string_view contents) {
  WordNet wn;
  size_t line_no = 0;
  for (const auto& line : text::SplitLines(contents)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const size_t t1 = line.find('\t');
    const size_t t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) {
      throw ValidationError("wordnet line " + std::to_string(line_no) +
                            ": expected synset<TAB>lemma<TAB>lang");
    }
    std::string synset = line.substr(0, t1);
    std::string lemma(text::Trim(std::string_view(line).substr(t1 + 1, t2 - t1 - 1)));
    std::string lang = NormalizeLangCode(std::string_view(line).substr(t2 + 1));
    if (synset.empty() || lemma.empty() || lang.empty()) continue;
    auto& syns = wn.synsets_of_[{lemma, lang}];
    if (std::find(syns.begin(), syns.end(), synset) == syns.end()) {
      syns.push_back(synset);
      wn.members_[synset].emplace_back(lemma, lang);
      ++wn.entry_count_;
    }
  }
  return wn;
}

WordNet WordNet::FromFile(const std::string& path) {
  return FromTsv(ReadFile(path));
}

WordNet WordNet::Builtin() { return FromTsv(EmbeddedFile("nlp/wordnet_sample.tsv")); }

std::vector<std::string> WordNet::LookupSynonyms(std::string_view lemma,
                                                 std::string_view source_lang,
                                                 std::string_view target_lang) const {
  std::vector<std::string> out;
  const std::string src = NormalizeLangCode(source_lang);
  const std::string tgt = NormalizeLangCode(target_lang);
  auto it = synsets_of_.find({std::string(lemma), src});
  if (it == synsets_of_.end()) return out;
  for (const auto& synset : it->second) {
    for (const auto& [member, lang] : members_.at(synset)) {
      if (lang == tgt && member != lemma) out.push_back(member);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace clozebench::nlp
