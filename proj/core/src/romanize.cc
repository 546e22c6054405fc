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

#include <map>
#include <string>

#include "clozebench/nlp.h"
#include "clozebench/text.h"

namespace clozebench::nlp {
namespace {

const std::map<char32_t, std::string_view>& KanaTable() {
  static const auto* table = new std::map<char32_t, std::string_view>{
      {U'あ', "a"},   {U'い', "i"},   {U'う', "u"},   {U'え', "e"},  {U'お', "o"},
      {U'か', "ka"},  {U'き', "ki"},  {U'く', "ku"},  {U'け', "ke"}, {U'こ', "ko"},
      {U'が', "ga"},  {U'ぎ', "gi"},  {U'ぐ', "gu"},  {U'げ', "ge"}, {U'ご', "go"},
      {U'さ', "sa"},  {U'し', "shi"}, {U'す', "su"},  {U'せ', "se"}, {U'そ', "so"},
      {U'ざ', "za"},  {U'じ', "ji"},  {U'ず', "zu"},  {U'ぜ', "ze"}, {U'ぞ', "zo"},
      {U'た', "ta"},  {U'ち', "chi"}, {U'つ', "tsu"}, {U'て', "te"}, {U'と', "to"},
      {U'だ', "da"},  {U'ぢ', "ji"},  {U'づ', "zu"},  {U'で', "de"}, {U'ど', "do"},
      {U'な', "na"},  {U'に', "ni"},  {U'ぬ', "nu"},  {U'ね', "ne"}, {U'の', "no"},
      {U'は', "ha"},  {U'ひ', "hi"},  {U'ふ', "fu"},  {U'へ', "he"}, {U'ほ', "ho"},
      {U'ば', "ba"},  {U'び', "bi"},  {U'ぶ', "bu"},  {U'べ', "be"}, {U'ぼ', "bo"},
      {U'ぱ', "pa"},  {U'ぴ', "pi"},  {U'ぷ', "pu"},  {U'ぺ', "pe"}, {U'ぽ', "po"},
      {U'ま', "ma"},  {U'み', "mi"},  {U'む', "mu"},  {U'め', "me"}, {U'も', "mo"},
      {U'や', "ya"},  {U'ゆ', "yu"},  {U'よ', "yo"},
      {U'ら', "ra"},  {U'り', "ri"},  {U'る', "ru"},  {U'れ', "re"}, {U'ろ', "ro"},
      {U'わ', "wa"},  {U'ゐ', "i"},   {U'ゑ', "e"},   {U'を', "o"},  {U'ん', "n"},
      {U'ゔ', "vu"},
      {U'ぁ', "a"},   {U'ぃ', "i"},   {U'ぅ', "u"},   {U'ぇ', "e"},  {U'ぉ', "o"},
      {U'ゃ', "ya"},  {U'ゅ', "yu"},  {U'ょ', "yo"},  {U'ゎ', "wa"},
  };
  return *table;
}

// Foreign-sound combinations written with a small vowel.
const std::map<std::u32string, std::string_view>& SmallVowelCombos() {
  static const auto* table = new std::map<std::u32string, std::string_view>{
      {U"ふぁ", "fa"}, {U"ふぃ", "fi"}, {U"ふぇ", "fe"}, {U"ふぉ", "fo"},
      {U"てぃ", "ti"}, {U"でぃ", "di"}, {U"とぅ", "tu"}, {U"どぅ", "du"},
      {U"うぃ", "wi"}, {U"うぇ", "we"}, {U"うぉ", "wo"},
      {U"ゔぁ", "va"}, {U"ゔぃ", "vi"}, {U"ゔぇ", "ve"}, {U"ゔぉ", "vo"},
      {U"しぇ", "she"}, {U"じぇ", "je"}, {U"ちぇ", "che"}, {U"つぁ", "tsa"},
      {U"つぃ", "tsi"}, {U"つぇ", "tse"}, {U"つぉ", "tso"}, {U"いぇ", "ye"},
  };
  return *table;
}

char32_t ToHiragana(char32_t cp) {
  if (cp >= 0x30A1 && cp <= 0x30F6) return cp - 0x60;
  return cp;
}

bool IsSmallY(char32_t cp) { return cp == U'ゃ' || cp == U'ゅ' || cp == U'ょ'; }

std::string Digraph(std::string_view base, char32_t small) {
  std::string stem(base.substr(0, base.size() - 1));  // drop the trailing 'i'
  const char vowel = small == U'ゃ' ? 'a' : small == U'ゅ' ? 'u' : 'o';
  if (stem == "sh" || stem == "ch" || stem == "j") return stem + vowel;
  return stem + 'y' + vowel;
}

std::string PunctuationToAscii(char32_t cp) {
  switch (cp) {
    case U'。': case U'．': return ".";
    case U'、': case U'，': return ",";
    case U'「': case U'」': case U'『': case U'』': return "\"";
    case U'・': return " ";
    case 0x3000: return " ";
    case U'〜': case U'～': return "~";
    default: break;
  }
  if (cp >= 0xFF01 && cp <= 0xFF5E) return text::EncodeUtf8(cp - 0xFEE0);
  return {};
}

}  // namespace

RomanizeResult KanaRomanizer::Romanize(std::string_view s) const {
  RomanizeResult result;
  result.fallback = true;
  std::u32string cps;
  for (const auto& cp : text::Codepoints(s)) cps.push_back(ToHiragana(cp.cp));

  const auto& table = KanaTable();
  const auto& combos = SmallVowelCombos();
  bool geminate = false;
  char last_vowel = 0;
  auto emit = [&](std::string syllable) {
    if (geminate && !syllable.empty()) {
      if (syllable.rfind("ch", 0) == 0) syllable = "t" + syllable;
      else if (syllable[0] != 'a' && syllable[0] != 'i' && syllable[0] != 'u' &&
               syllable[0] != 'e' && syllable[0] != 'o' && syllable[0] != 'n')
        syllable = syllable[0] + syllable;
    }
    geminate = false;
    if (!syllable.empty()) {
      const char v = syllable.back();
      last_vowel = (v == 'a' || v == 'i' || v == 'u' || v == 'e' || v == 'o') ? v : 0;
    }
    result.text += syllable;
  };

  for (size_t i = 0; i < cps.size(); ++i) {
    const char32_t cp = cps[i];
    if (cp == U'っ') {
      geminate = true;
      continue;
    }
    if (cp == U'ー') {
      if (last_vowel) result.text.push_back(last_vowel);
      continue;
    }
    auto it = table.find(cp);
    if (it != table.end()) {
      if (i + 1 < cps.size()) {
        auto combo = combos.find(std::u32string{cp, cps[i + 1]});
        if (combo != combos.end()) {
          emit(std::string(combo->second));
          ++i;
          continue;
        }
        const std::string_view base = it->second;
        if (IsSmallY(cps[i + 1]) && base.size() >= 2 && base.back() == 'i') {
          emit(Digraph(base, cps[i + 1]));
          ++i;
          continue;
        }
      }
      emit(std::string(it->second));
      continue;
    }
    geminate = false;
    last_vowel = 0;
    if (cp < 0x80) {
      text::AppendUtf8(result.text, cp);
      continue;
    }
    if (auto p = PunctuationToAscii(cp); !p.empty()) {
      result.text += p;
      continue;
    }
    // Kanji and anything else the kana table cannot convert.
    text::AppendUtf8(result.text, cp);
    result.has_unconverted = true;
  }
  if (result.has_unconverted) result.warning = "unconverted non-kana characters passed through";
  return result;
}

}  // namespace clozebench::nlp
