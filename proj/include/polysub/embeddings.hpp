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

#ifndef POLYSUB_EMBEDDINGS_HPP_
#define POLYSUB_EMBEDDINGS_HPP_

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "polysub/core.hpp"

namespace polysub {

// Dense word vectors stored row-major. File format: `word v1 v2 ... vd`,
// single-space separated, fixed d per file.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;

  static EmbeddingTable load(const std::string& path) {
    EmbeddingTable table;
    std::size_t line_no = 0;
    for (const std::string& line : detail::read_lines(path)) {
      ++line_no;
      if (detail::trim(line).empty()) continue;
      const auto fields = detail::split(detail::trim(line), ' ');
      if (fields.size() < 2) {
        throw Error(ErrorCode::kParse,
                    path + ":" + std::to_string(line_no) + ": no vector");
      }
      std::vector<double> vec;
      vec.reserve(fields.size() - 1);
      for (std::size_t i = 1; i < fields.size(); ++i) {
        const std::string field(fields[i]);
        char* end = nullptr;
        const double v = std::strtod(field.c_str(), &end);
        if (field.empty() || end != field.c_str() + field.size()) {
          throw Error(ErrorCode::kParse, path + ":" + std::to_string(line_no) +
                                             ": bad number '" + field + "'");
        }
        vec.push_back(v);
      }
      if (table.dim_ != 0 && vec.size() != table.dim_) {
        throw Error(ErrorCode::kParse,
                    path + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(table.dim_) + " components");
      }
      table.add(std::string(fields[0]), vec);
    }
    return table;
  }

  // Adds or replaces a word. The first insertion fixes the dimension.
  void add(const std::string& word, std::span<const double> vec) {
    if (dim_ == 0) dim_ = vec.size();
    if (vec.size() != dim_ || dim_ == 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "vector for '" + word + "' has wrong dimension");
    }
    const auto it = index_.find(word);
    if (it != index_.end()) {
      std::copy(vec.begin(), vec.end(), data_.begin() + it->second * dim_);
      return;
    }
    index_.emplace(word, words_.size());
    words_.push_back(word);
    data_.insert(data_.end(), vec.begin(), vec.end());
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
    out.precision(17);
    for (std::size_t i = 0; i < words_.size(); ++i) {
      out << words_[i];
      for (double v : row(i)) out << ' ' << v;
      out << '\n';
    }
  }

  bool loaded() const { return !words_.empty(); }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  const std::string& word(std::size_t i) const { return words_[i]; }

  // Row index of word, or -1 when out of vocabulary.
  std::ptrdiff_t find(const std::string& word) const {
    const auto it = index_.find(word);
    return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
  }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }

  // Empty span for out-of-vocabulary words.
  std::span<const double> lookup(const std::string& word) const {
    const std::ptrdiff_t i = find(word);
    return i < 0 ? std::span<const double>{} : row(static_cast<std::size_t>(i));
  }

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> data_;
};

}  // namespace polysub

#endif  // POLYSUB_EMBEDDINGS_HPP_
