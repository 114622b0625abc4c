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

#ifndef POLYSUB_SUBSTITUTES_HPP_
#define POLYSUB_SUBSTITUTES_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "polysub/core.hpp"
#include "polysub/embeddings.hpp"

namespace polysub {

// Per-position ordered candidate lists for one sentence. Lists hold distinct
// words, never the original token; an empty list masks the position.
struct CandidateSet {
  std::vector<std::vector<std::string>> lists;

  std::size_t size() const { return lists.size(); }
  std::size_t count(std::size_t i) const { return lists[i].size(); }
  const std::vector<std::string>& at(std::size_t i) const { return lists[i]; }

  std::size_t positions_with_candidates() const {
    return static_cast<std::size_t>(std::count_if(
        lists.begin(), lists.end(), [](const auto& l) { return !l.empty(); }));
  }
  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& l : lists) n += l.size();
    return n;
  }
  bool operator==(const CandidateSet&) const = default;
};

// Source of legal replacement words. Implementations are immutable after
// construction and safe to query concurrently.
class CandidateProvider {
 public:
  virtual ~CandidateProvider() = default;

  virtual std::string name() const = 0;

  // Raw nominations for one word; may contain the word itself or duplicates,
  // which candidates() removes.
  virtual std::vector<std::string> nominate(const std::string& word,
                                            PosTag pos) const = 0;

  // Candidate lists for every position of the original sentence.
  CandidateSet candidates(const TokenSeq& seq) const {
    CandidateSet set;
    set.lists.reserve(seq.size());
    for (std::size_t i = 0; i < seq.size(); ++i) {
      set.lists.push_back(clean(seq.tokens[i], nominate(seq.tokens[i],
                                                        seq.pos_tags[i])));
    }
    return set;
  }

  // Same as candidates(seq) with positions outside the example's attackable
  // range and the pair separator emptied.
  CandidateSet candidates(const LabeledExample& ex) const {
    CandidateSet set = candidates(ex.text);
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (!ex.attackable(i) || ex.text.tokens[i] == kPairSeparator) {
        set.lists[i].clear();
      }
    }
    return set;
  }

 protected:
  static std::vector<std::string> clean(const std::string& word,
                                        std::vector<std::string> raw) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (std::string& c : raw) {
      if (c == word || c.empty() || c == kPairSeparator) continue;
      if (seen.insert(c).second) out.push_back(std::move(c));
    }
    return out;
  }
};

// k nearest neighbours under Euclidean distance between L2-normalized
// vectors, limited to max_dist. Ties are broken lexicographically.
class EmbeddingProvider : public CandidateProvider {
 public:
  static constexpr std::size_t kDefaultK = 8;
  static constexpr double kDefaultMaxDist = 0.5;

  EmbeddingProvider() = default;

  EmbeddingProvider(std::shared_ptr<const EmbeddingTable> table, std::size_t k,
                    double max_dist)
      : table_(std::move(table)), k_(k), max_dist_(max_dist) {
    if (k_ < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
    if (!table_ || !table_->loaded()) return;
    const std::size_t d = table_->dim();
    normalized_.resize(table_->size() * d);
    for (std::size_t i = 0; i < table_->size(); ++i) {
      const auto row = table_->row(i);
      double norm = 0.0;
      for (double v : row) norm += v * v;
      norm = std::sqrt(norm);
      for (std::size_t j = 0; j < d; ++j) {
        normalized_[i * d + j] = norm > 0.0 ? row[j] / norm : 0.0;
      }
    }
  }

  std::string name() const override { return "embedding"; }

  std::vector<std::string> nominate(const std::string& word,
                                    PosTag /*pos*/) const override {
    return neighbours(word);
  }

  // (distance, word) pairs for the nominated neighbours, ascending.
  std::vector<std::pair<double, std::string>> neighbours_with_distance(
      const std::string& word) const {
    if (!table_ || !table_->loaded()) {
      throw Error(ErrorCode::kEmbeddingsNotLoaded,
                  "embedding provider has no table");
    }
    const std::ptrdiff_t self = table_->find(word);
    if (self < 0) return {};
    const std::size_t d = table_->dim();
    const double* q = normalized_.data() + static_cast<std::size_t>(self) * d;
    std::vector<std::pair<double, std::string>> hits;
    for (std::size_t i = 0; i < table_->size(); ++i) {
      if (static_cast<std::ptrdiff_t>(i) == self) continue;
      const double* r = normalized_.data() + i * d;
      double sq = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = q[j] - r[j];
        sq += diff * diff;
      }
      const double dist = std::sqrt(sq);
      if (dist <= max_dist_) hits.emplace_back(dist, table_->word(i));
    }
    const std::size_t keep = std::min(k_, hits.size());
    std::partial_sort(hits.begin(), hits.begin() + keep, hits.end());
    hits.resize(keep);
    return hits;
  }

  std::vector<std::string> neighbours(const std::string& word) const {
    std::vector<std::string> out;
    for (auto& [dist, w] : neighbours_with_distance(word)) {
      out.push_back(std::move(w));
    }
    return out;
  }

  const EmbeddingTable* table() const { return table_.get(); }

 private:
  std::shared_ptr<const EmbeddingTable> table_;
  std::size_t k_ = kDefaultK;
  double max_dist_ = kDefaultMaxDist;
  std::vector<double> normalized_;
};

namespace detail {

using WordPosKey = std::pair<std::string, PosTag>;

}  // namespace detail

// Synonym lexicon: `word<TAB>pos<TAB>comma-separated-synonyms`. Repeated
// word+pos lines append to the list.
class SynonymProvider : public CandidateProvider {
 public:
  SynonymProvider() = default;

  static SynonymProvider parse(const std::vector<std::string>& lines,
                               const std::string& origin) {
    SynonymProvider provider;
    std::size_t line_no = 0;
    for (const std::string& line : lines) {
      ++line_no;
      if (detail::trim(line).empty() || line.front() == '#') continue;
      const auto fields = detail::split(line, '\t');
      const auto pos =
          fields.size() == 3 ? parse_pos(detail::trim(fields[1])) : std::nullopt;
      if (!pos) {
        throw Error(ErrorCode::kParse,
                    origin + ":" + std::to_string(line_no) +
                        ": expected word<TAB>pos<TAB>synonyms");
      }
      auto& list = provider.entries_[{detail::to_lower(detail::trim(fields[0])),
                                      *pos}];
      for (std::string_view syn : detail::split(fields[2], ',')) {
        syn = detail::trim(syn);
        if (!syn.empty()) list.push_back(detail::to_lower(syn));
      }
    }
    provider.loaded_ = true;
    return provider;
  }

  static SynonymProvider load(const std::string& path) {
    return parse(detail::read_lines(path), path);
  }

  std::string name() const override { return "synonym"; }

  std::vector<std::string> nominate(const std::string& word,
                                    PosTag pos) const override {
    if (!loaded_) {
      throw Error(ErrorCode::kLexiconNotLoaded, "synonym lexicon not loaded");
    }
    if (pos == PosTag::kOther) return {};
    const auto it = entries_.find({word, pos});
    return it == entries_.end() ? std::vector<std::string>{} : it->second;
  }

 private:
  bool loaded_ = false;
  std::map<detail::WordPosKey, std::vector<std::string>> entries_;
};

// Sememe dictionary: `word<TAB>pos<TAB>comma-separated-sememe-ids`, one line
// per sense. Two words are interchangeable when they share a POS and one of
// their sememe sets is identical.
class SememeProvider : public CandidateProvider {
 public:
  using SememeSet = std::set<std::string>;

  SememeProvider() = default;

  static SememeProvider parse(const std::vector<std::string>& lines,
                              const std::string& origin) {
    SememeProvider provider;
    std::size_t line_no = 0;
    for (const std::string& line : lines) {
      ++line_no;
      if (detail::trim(line).empty() || line.front() == '#') continue;
      const auto fields = detail::split(line, '\t');
      const auto pos =
          fields.size() == 3 ? parse_pos(detail::trim(fields[1])) : std::nullopt;
      if (!pos) {
        throw Error(ErrorCode::kParse,
                    origin + ":" + std::to_string(line_no) +
                        ": expected word<TAB>pos<TAB>sememes");
      }
      SememeSet sememes;
      for (std::string_view id : detail::split(fields[2], ',')) {
        id = detail::trim(id);
        if (!id.empty()) sememes.emplace(id);
      }
      if (sememes.empty()) continue;
      const std::string word = detail::to_lower(detail::trim(fields[0]));
      provider.senses_[{word, *pos}].insert(sememes);
      provider.by_sense_[{*pos, sememes}].insert(word);
    }
    provider.loaded_ = true;
    return provider;
  }

  static SememeProvider load(const std::string& path) {
    return parse(detail::read_lines(path), path);
  }

  std::string name() const override { return "sememe"; }

  std::vector<std::string> nominate(const std::string& word,
                                    PosTag pos) const override {
    if (!loaded_) {
      throw Error(ErrorCode::kDictionaryNotLoaded,
                  "sememe dictionary not loaded");
    }
    const auto it = senses_.find({word, pos});
    if (it == senses_.end()) return {};
    std::set<std::string> words;
    for (const SememeSet& sense : it->second) {
      const auto& peers = by_sense_.at({pos, sense});
      words.insert(peers.begin(), peers.end());
    }
    words.erase(word);
    return {words.begin(), words.end()};
  }

 private:
  bool loaded_ = false;
  std::map<detail::WordPosKey, std::set<SememeSet>> senses_;
  std::map<std::pair<PosTag, SememeSet>, std::set<std::string>> by_sense_;
};

}  // namespace polysub

#endif  // POLYSUB_SUBSTITUTES_HPP_
