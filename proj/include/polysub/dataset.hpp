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

#ifndef POLYSUB_DATASET_HPP_
#define POLYSUB_DATASET_HPP_

#include <charconv>
#include <fstream>
#include <string>
#include <vector>

#include "polysub/core.hpp"

namespace polysub {

// Which side of a sentence pair the attacker may perturb.
enum class PairSide { kHypothesis, kPremise, kBoth };

inline std::optional<PairSide> parse_pair_side(std::string_view name) {
  if (name == "hypothesis") return PairSide::kHypothesis;
  if (name == "premise") return PairSide::kPremise;
  if (name == "both") return PairSide::kBoth;
  return std::nullopt;
}

// Parses one `label<TAB>text` or `label<TAB>premise<TAB>hypothesis` line.
inline LabeledExample parse_example(std::string_view line,
                                    const PosLexicon& lexicon,
                                    PairSide side = PairSide::kHypothesis) {
  const auto fields = detail::split(line, '\t');
  if (fields.size() != 2 && fields.size() != 3) {
    throw Error(ErrorCode::kParse, "expected 2 or 3 tab-separated fields");
  }
  LabeledExample ex;
  const std::string_view label_field = detail::trim(fields[0]);
  const auto [ptr, ec] = std::from_chars(
      label_field.data(), label_field.data() + label_field.size(), ex.label);
  if (ec != std::errc() || ptr != label_field.data() + label_field.size() ||
      ex.label < 0) {
    throw Error(ErrorCode::kParse,
                "bad label '" + std::string(label_field) + "'");
  }
  if (fields.size() == 2) {
    ex.text = tokenize(fields[1], lexicon);
    return ex;
  }
  const TokenSeq premise = tokenize(fields[1], lexicon);
  // Both sides must be nonempty on their own.
  tokenize(fields[2], lexicon);
  std::string joined = std::string(fields[1]) + " " +
                       std::string(kPairSeparator) + " " +
                       std::string(fields[2]);
  ex.text = tokenize(joined, lexicon);
  switch (side) {
    case PairSide::kHypothesis:
      ex.attack_begin = premise.size() + 1;
      break;
    case PairSide::kPremise:
      ex.attack_end = premise.size();
      break;
    case PairSide::kBoth:
      break;
  }
  return ex;
}

// Loads a UTF-8 TSV dataset. If num_classes > 0, labels are checked against
// it. Blank lines are skipped; any other malformed line is a ParseError
// carrying the line number.
inline std::vector<LabeledExample> load_dataset(
    const std::string& path, const PosLexicon& lexicon, int num_classes = 0,
    PairSide side = PairSide::kHypothesis) {
  std::vector<LabeledExample> out;
  std::size_t line_no = 0;
  for (const std::string& line : detail::read_lines(path)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    try {
      out.push_back(parse_example(line, lexicon, side));
    } catch (const Error& e) {
      throw Error(e.code(), path + ":" + std::to_string(line_no) + ": " +
                                e.what());
    }
    if (num_classes > 0 && out.back().label >= num_classes) {
      throw Error(ErrorCode::kInvalidArgument,
                  path + ":" + std::to_string(line_no) + ": label " +
                      std::to_string(out.back().label) + " >= class count " +
                      std::to_string(num_classes));
    }
  }
  return out;
}

// Text fields of one dataset line: the detokenized sentence, or premise and
// hypothesis separated by a tab when the sequence holds the pair separator.
inline std::string format_text(const TokenSeq& seq) {
  std::string out;
  for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
    if (seq.tokens[i] == kPairSeparator) {
      out.push_back('\t');
      continue;
    }
    if (i > 0 && seq.tokens[i - 1] != kPairSeparator) out.push_back(' ');
    out += seq.tokens[i];
  }
  return out;
}

inline void save_dataset(const std::string& path,
                         const std::vector<LabeledExample>& examples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  for (const LabeledExample& ex : examples) {
    out << ex.label << '\t' << format_text(ex.text) << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

}  // namespace polysub

#endif  // POLYSUB_DATASET_HPP_
