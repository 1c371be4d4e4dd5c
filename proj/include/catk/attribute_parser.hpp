// Copyright 2026 The CATK Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "catk/error.hpp"

// Splits caption-style sentences into editable "adjective-noun" attributes.
// The pass is a single left-to-right scan that buffers adjective/noun words
// and flushes the buffer at attribute boundaries:
//   * a comma always ends the current attribute;
//   * "has" / "with" end it (they introduce a new clause);
//   * "and" ends it only when the buffer already holds a noun and the next
//     content word is an adjective ("grey head and wings" stays together,
//     "...wings and has white eyes" splits);
//   * adjectives and nouns are appended to the buffer;
//   * end of input flushes whatever remains.
// A flush emits the buffer unless it is empty or the lone word "bird",
// which names the subject rather than an editable attribute.

namespace catk {

enum class PosTag { NN, NNS, JJ, CC, Other };

inline std::string to_string(PosTag tag) {
  switch (tag) {
    case PosTag::NN: return "NN";
    case PosTag::NNS: return "NNS";
    case PosTag::JJ: return "JJ";
    case PosTag::CC: return "CC";
    case PosTag::Other: return "OTHER";
  }
  return "OTHER";
}

inline std::optional<PosTag> tag_from_string(std::string_view s) {
  if (s == "NN") return PosTag::NN;
  if (s == "NNS") return PosTag::NNS;
  if (s == "JJ") return PosTag::JJ;
  if (s == "CC") return PosTag::CC;
  if (s == "OTHER") return PosTag::Other;
  return std::nullopt;
}

/// One lowercased word with surrounding punctuation stripped. The comma
/// flag records that the original text had a comma right after this word.
struct Token {
  std::string text;
  bool comma_boundary = false;
};

struct TaggedToken {
  Token token;
  PosTag tag = PosTag::Other;
};

/// An ordered word list naming one editable attribute.
struct Attribute {
  std::vector<std::string> words;

  std::string joined() const {
    std::string out;
    for (const auto& w : words) {
      if (!out.empty()) out += ' ';
      out += w;
    }
    return out;
  }
};

/// Word -> tag mapping loaded from a "word<TAB>TAG" file. Lookups fall back
/// to a plural rule (trailing "s" over a known NN stem gives NNS) and then
/// to the default tag, NN.
class Lexicon {
 public:
  Lexicon() = default;

  static Lexicon load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open for reading");
    Lexicon lex;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
        throw IoError(path, "line " + std::to_string(lineno) +
                                ": expected \"word<TAB>TAG\"");
      std::string word = line.substr(0, tab);
      for (char& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      const auto tag = tag_from_string(line.substr(tab + 1));
      if (!tag)
        throw IoError(path, "line " + std::to_string(lineno) +
                                ": unknown tag \"" + line.substr(tab + 1) +
                                "\"");
      lex.entries_[std::move(word)] = *tag;
    }
    return lex;
  }

  void add(std::string word, PosTag tag) { entries_[std::move(word)] = tag; }
  std::size_t size() const { return entries_.size(); }
  PosTag default_tag() const { return PosTag::NN; }

  PosTag tag_of(const std::string& word) const {
    if (auto it = entries_.find(word); it != entries_.end()) return it->second;
    if (word.size() > 1 && word.back() == 's') {
      const std::string stem = word.substr(0, word.size() - 1);
      if (auto it = entries_.find(stem);
          it != entries_.end() && it->second == PosTag::NN)
        return PosTag::NNS;
    }
    return default_tag();
  }

 private:
  std::unordered_map<std::string, PosTag> entries_;
};

namespace detail {

inline bool is_word_char(unsigned char c) { return std::isalnum(c) != 0; }

// Words that mark attribute boundaries or carry no attribute content; they
// are never buffered into an attribute.
inline bool is_stop_word(const std::string& w) {
  return w == "has" || w == "with" || w == "and" || w == "is";
}

}  // namespace detail

/// Lowercases and splits a sentence into tokens, recording commas as
/// boundary flags on the preceding token and dropping other punctuation.
/// Total: any text maps to a (possibly empty) token sequence.
inline std::vector<Token> tokenize(const std::string& sentence) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  const std::size_t n = sentence.size();
  while (i < n) {
    while (i < n && std::isspace(static_cast<unsigned char>(sentence[i]))) ++i;
    if (i >= n) break;
    std::size_t end = i;
    while (end < n && !std::isspace(static_cast<unsigned char>(sentence[end])))
      ++end;

    std::size_t first = i, last = end;  // [first, last) is the word core
    while (first < last &&
           !detail::is_word_char(static_cast<unsigned char>(sentence[first])))
      ++first;
    while (last > first &&
           !detail::is_word_char(static_cast<unsigned char>(sentence[last - 1])))
      --last;

    bool comma_before = false, comma_after = false;
    for (std::size_t k = i; k < first; ++k)
      if (sentence[k] == ',') comma_before = true;
    for (std::size_t k = last; k < end; ++k)
      if (sentence[k] == ',') comma_after = true;

    if (comma_before && !tokens.empty()) tokens.back().comma_boundary = true;
    if (first < last) {
      std::string text;
      text.reserve(last - first);
      for (std::size_t k = first; k < last; ++k)
        text.push_back(static_cast<char>(
            std::tolower(static_cast<unsigned char>(sentence[k]))));
      tokens.push_back(Token{std::move(text), comma_after});
    } else if (comma_after && !tokens.empty()) {
      tokens.back().comma_boundary = true;
    }
    i = end;
  }
  return tokens;
}

inline std::vector<TaggedToken> pos_tag(const std::vector<Token>& tokens,
                                        const Lexicon& lexicon) {
  std::vector<TaggedToken> out;
  out.reserve(tokens.size());
  for (const Token& t : tokens) out.push_back({t, lexicon.tag_of(t.text)});
  return out;
}

/// Parses pre-tagged "word_TAG" tokens, bypassing the lexicon. The tag is
/// taken from the last underscore; tags outside {NN, NNS, JJ, CC} map to
/// OTHER so external tagsets degrade gracefully. Commas attached to the
/// word part keep their boundary meaning.
inline std::vector<TaggedToken> parse_pretagged(const std::string& line) {
  std::vector<TaggedToken> out;
  std::istringstream words(line);
  std::string raw;
  while (words >> raw) {
    const auto underscore = raw.rfind('_');
    std::string word_part = raw;
    std::string tag_part;
    if (underscore != std::string::npos && underscore + 1 < raw.size()) {
      word_part = raw.substr(0, underscore);
      tag_part = raw.substr(underscore + 1);
      while (!tag_part.empty() &&
             !std::isalnum(static_cast<unsigned char>(tag_part.back()))) {
        if (tag_part.back() == ',') word_part += ',';
        tag_part.pop_back();
      }
    }
    const auto tokens = tokenize(word_part);
    for (std::size_t k = 0; k < tokens.size(); ++k) {
      const PosTag tag =
          tag_from_string(tag_part).value_or(PosTag::Other);
      out.push_back({tokens[k], tag});
    }
    if (tokens.empty() && !out.empty() && word_part.find(',') != std::string::npos)
      out.back().token.comma_boundary = true;
  }
  return out;
}

/// Splits a tagged sentence into editable attributes with the flush rules
/// described at the top of this header. Deterministic, single pass, output
/// in sentence order.
inline std::vector<Attribute> parse_attributes(
    const std::vector<TaggedToken>& tagged) {
  std::vector<Attribute> out;
  std::vector<std::string> buffer;
  bool noun_seen = false;
  bool adjective_seen = false;
  bool non_bird_seen = false;

  // A buffer of nothing but the subject word "bird" names no editable
  // attribute and is dropped.
  auto flush = [&] {
    if (!buffer.empty() && (non_bird_seen || adjective_seen))
      out.push_back(Attribute{buffer});
    buffer.clear();
    noun_seen = false;
    adjective_seen = false;
    non_bird_seen = false;
  };

  auto next_content_is_adjective = [&](std::size_t i) {
    for (std::size_t j = i + 1; j < tagged.size(); ++j) {
      if (tagged[j].tag == PosTag::Other) continue;
      if (detail::is_stop_word(tagged[j].token.text)) continue;
      return tagged[j].tag == PosTag::JJ;
    }
    return false;
  };

  for (std::size_t i = 0; i < tagged.size(); ++i) {
    const std::string& word = tagged[i].token.text;
    const PosTag tag = tagged[i].tag;

    if (word == "has" || word == "with") {
      flush();
    } else if (word == "and") {
      // Splitting here would strand a trailing adjective ("grey head and
      // wings" must stay one attribute), so only flush noun-complete
      // buffers that are followed by a fresh adjective.
      if (noun_seen && next_content_is_adjective(i)) flush();
    } else if (!detail::is_stop_word(word) &&
               (tag == PosTag::JJ || tag == PosTag::NN || tag == PosTag::NNS)) {
      buffer.push_back(word);
      if (tag == PosTag::JJ) adjective_seen = true;
      else noun_seen = true;
      if (word != "bird") non_bird_seen = true;
    }
    if (tagged[i].token.comma_boundary) flush();
  }
  flush();
  return out;
}

}  // namespace catk
