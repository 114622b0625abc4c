// Copyright 2026 The Polysub Authors.
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

#ifndef POLYSUB_CORE_HPP_
#define POLYSUB_CORE_HPP_

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "polysub/error.hpp"

namespace polysub {

// Coarse part-of-speech classes. Only used to filter substitute candidates.
enum class PosTag : std::uint8_t { kNoun, kVerb, kAdj, kAdv, kOther };

inline std::string_view pos_name(PosTag tag) {
  switch (tag) {
    case PosTag::kNoun: return "noun";
    case PosTag::kVerb: return "verb";
    case PosTag::kAdj: return "adj";
    case PosTag::kAdv: return "adv";
    case PosTag::kOther: return "other";
  }
  return "other";
}

inline std::optional<PosTag> parse_pos(std::string_view name) {
  if (name == "noun") return PosTag::kNoun;
  if (name == "verb") return PosTag::kVerb;
  if (name == "adj") return PosTag::kAdj;
  if (name == "adv") return PosTag::kAdv;
  if (name == "other") return PosTag::kOther;
  return std::nullopt;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

// Reads every line of a text file, stripping a trailing '\r'.
inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace detail

// Word -> most frequent tag lookup. File format: `word<TAB>tag` per line;
// blank lines and lines starting with '#' are ignored.
class PosLexicon {
 public:
  PosLexicon() = default;

  static PosLexicon parse(std::string_view text, std::string_view origin) {
    PosLexicon lex;
    std::size_t line_no = 0;
    for (std::string_view line : detail::split(text, '\n')) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (detail::trim(line).empty() || line.front() == '#') continue;
      const auto fields = detail::split(line, '\t');
      const auto tag = fields.size() == 2 ? parse_pos(detail::trim(fields[1]))
                                          : std::nullopt;
      if (!tag) {
        throw Error(ErrorCode::kParse, std::string(origin) + ":" +
                                           std::to_string(line_no) +
                                           ": expected word<TAB>tag");
      }
      lex.add(detail::to_lower(detail::trim(fields[0])), *tag);
    }
    return lex;
  }

  static PosLexicon load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str(), path);
  }

  // The lexicon shipped with the library (see builtin_pos_lexicon()).
  static const PosLexicon& builtin();

  // Later entries for the same word override earlier ones.
  void add(std::string word, PosTag tag) { tags_[std::move(word)] = tag; }

  PosTag tag(const std::string& word) const {
    const auto it = tags_.find(word);
    return it == tags_.end() ? PosTag::kOther : it->second;
  }

  bool contains(const std::string& word) const { return tags_.count(word) > 0; }
  std::size_t size() const { return tags_.size(); }

 private:
  std::unordered_map<std::string, PosTag> tags_;
};

// A tokenized sentence: the unit of attack.
struct TokenSeq {
  std::vector<std::string> tokens;
  std::vector<PosTag> pos_tags;
  std::string raw;

  std::size_t size() const { return tokens.size(); }
  bool operator==(const TokenSeq&) const = default;
};

// Separator placed between premise and hypothesis of sentence-pair examples.
inline constexpr std::string_view kPairSeparator = "</s>";

// Splits on whitespace, strips leading and trailing ASCII punctuation from
// each piece (internal hyphens and apostrophes survive) and lowercases. The
// pair separator token is kept verbatim. Throws EmptyInput if nothing is left.
inline TokenSeq tokenize(std::string_view raw, const PosLexicon& lexicon) {
  TokenSeq seq;
  seq.raw = std::string(raw);
  const auto is_punct = [](char c) {
    return std::ispunct(static_cast<unsigned char>(c)) != 0;
  };
  std::size_t i = 0;
  while (i < raw.size()) {
    while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) {
      ++i;
    }
    std::size_t j = i;
    while (j < raw.size() && !std::isspace(static_cast<unsigned char>(raw[j]))) {
      ++j;
    }
    std::string_view piece = raw.substr(i, j - i);
    i = j;
    if (piece.empty()) continue;
    if (piece == kPairSeparator) {
      seq.tokens.emplace_back(piece);
      seq.pos_tags.push_back(PosTag::kOther);
      continue;
    }
    while (!piece.empty() && is_punct(piece.front())) piece.remove_prefix(1);
    while (!piece.empty() && is_punct(piece.back())) piece.remove_suffix(1);
    if (piece.empty()) continue;
    std::string token = detail::to_lower(piece);
    seq.pos_tags.push_back(lexicon.tag(token));
    seq.tokens.push_back(std::move(token));
  }
  if (seq.tokens.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no tokens in input");
  }
  return seq;
}

inline TokenSeq tokenize(std::string_view raw) {
  return tokenize(raw, PosLexicon::builtin());
}

inline std::string detokenize(const TokenSeq& seq) {
  std::string out;
  for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += seq.tokens[i];
  }
  return out;
}

// Fraction of positions whose tokens differ.
inline double modification_rate(const TokenSeq& original,
                                const TokenSeq& modified) {
  if (original.size() != modified.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "sequences have " + std::to_string(original.size()) + " and " +
                    std::to_string(modified.size()) + " tokens");
  }
  if (original.size() == 0) return 0.0;
  std::size_t changed = 0;
  for (std::size_t i = 0; i < original.size(); ++i) {
    if (original.tokens[i] != modified.tokens[i]) ++changed;
  }
  return static_cast<double>(changed) / static_cast<double>(original.size());
}

struct LabeledExample {
  TokenSeq text;
  int label = 0;
  // Attackable positions are [attack_begin, attack_end). Sentence pairs
  // restrict this to one side of the separator.
  std::size_t attack_begin = 0;
  std::size_t attack_end = static_cast<std::size_t>(-1);

  bool attackable(std::size_t position) const {
    return position >= attack_begin && position < attack_end;
  }
};

struct AttackConfig {
  double delta = 0.25;
  double gamma = 0.4;
  double lr_p = 0.2;
  double lr_q = 0.5;
  double fail_reward = -1.0;
  std::int64_t max_queries = 1000;
  double prob_floor = 1e-4;
  std::uint64_t seed = 0;
  // Reward against the previous step's score instead of the original's.
  bool incremental_reward = false;
  // Hard stop on sampling rounds; guards against loops where every episode
  // is answered from the victim cache and no budget is consumed.
  std::int64_t max_episodes = 20000;
  // Pre-training of the transferable policy.
  double lr_theta = 1e-7;
  double lr_qw = 0.3;
  int pretrain_epochs = 1;

  // Throws InvalidArgument naming the offending field. max_sentence_length
  // bounds prob_floor so that a floored vector can still sum to one.
  void validate(std::size_t max_sentence_length = 100) const {
    const auto fail = [](const std::string& what) {
      throw Error(ErrorCode::kInvalidArgument, what);
    };
    if (!(delta > 0.0 && delta <= 1.0)) fail("delta must be in (0, 1]");
    if (!(gamma >= 0.0 && gamma <= 1.0)) fail("gamma must be in [0, 1]");
    if (!(lr_p > 0.0)) fail("lr_p must be positive");
    if (!(lr_q > 0.0)) fail("lr_q must be positive");
    if (!(fail_reward < 0.0)) fail("fail_reward must be negative");
    if (max_queries < 1) fail("max_queries must be >= 1");
    if (!(prob_floor > 0.0 &&
          prob_floor * static_cast<double>(max_sentence_length) < 1.0)) {
      fail("prob_floor must be in (0, 1/max sentence length)");
    }
    if (max_episodes < 1) fail("max_episodes must be >= 1");
    if (!(lr_theta > 0.0)) fail("lr_theta must be positive");
    if (!(lr_qw > 0.0)) fail("lr_qw must be positive");
    if (pretrain_epochs < 0) fail("pretrain_epochs must be >= 0");
  }
};

enum class AttackStatus { kSuccess, kBudgetExhausted, kNoCandidates };

inline std::string_view status_name(AttackStatus s) {
  switch (s) {
    case AttackStatus::kSuccess: return "success";
    case AttackStatus::kBudgetExhausted: return "budget_exhausted";
    case AttackStatus::kNoCandidates: return "no_candidates";
  }
  return "unknown";
}

struct Substitution {
  std::size_t position = 0;
  std::string original;
  std::string substitute;
  bool operator==(const Substitution&) const = default;
};

struct AttackResult {
  AttackStatus status = AttackStatus::kBudgetExhausted;
  std::optional<TokenSeq> adversarial;  // present iff status == kSuccess
  std::int64_t queries_used = 0;
  std::int64_t episodes = 0;
  std::vector<Substitution> substitutions;
  double modification_rate = 0.0;

  bool success() const { return status == AttackStatus::kSuccess; }
  bool operator==(const AttackResult&) const = default;
};

// Number of positions one episode may modify: floor(delta * m) clamped to
// [1, available].
inline std::size_t episode_length(double delta, std::size_t m,
                                  std::size_t available) {
  auto t = static_cast<std::size_t>(delta * static_cast<double>(m) + 1e-9);
  t = std::max<std::size_t>(t, 1);
  return std::min(t, available);
}

}  // namespace polysub

#include "polysub/pos_lexicon_data.hpp"

#endif  // POLYSUB_CORE_HPP_
