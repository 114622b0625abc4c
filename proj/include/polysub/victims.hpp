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

#ifndef POLYSUB_VICTIMS_HPP_
#define POLYSUB_VICTIMS_HPP_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "polysub/core.hpp"
#include "polysub/embeddings.hpp"
#include "polysub/rng.hpp"

namespace polysub {

enum class VictimMode { kScore, kDecision };

inline std::string_view mode_name(VictimMode m) {
  return m == VictimMode::kScore ? "score" : "decision";
}

inline std::optional<VictimMode> parse_mode(std::string_view name) {
  if (name == "score") return VictimMode::kScore;
  if (name == "decision") return VictimMode::kDecision;
  return std::nullopt;
}

// Lowest index wins ties.
inline int argmax(std::span<const double> v) {
  int best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

// A classifier reachable only through predictions. One call with B texts is
// B model invocations. Implementations must be safe for concurrent calls.
class VictimModel {
 public:
  virtual ~VictimModel() = default;

  virtual VictimMode mode() const = 0;
  virtual int num_classes() const = 0;

  // Score-mode models only.
  virtual std::vector<std::vector<double>> predict_scores(
      std::span<const TokenSeq> texts) const {
    (void)texts;
    throw Error(ErrorCode::kModeMismatch, "model does not expose scores");
  }

  // Default: argmax over predict_scores.
  virtual std::vector<int> predict_labels(std::span<const TokenSeq> texts) const {
    std::vector<int> labels;
    for (const auto& row : predict_scores(texts)) labels.push_back(argmax(row));
    return labels;
  }
};

// Query front end for one attack: counts model invocations, enforces the
// query budget and memoizes answers by text. Cache hits are free.
class VictimHandle {
 public:
  static constexpr std::int64_t kUnlimited =
      std::numeric_limits<std::int64_t>::max();

  explicit VictimHandle(std::shared_ptr<const VictimModel> model,
                        bool cache = true, std::int64_t budget = kUnlimited)
      : model_(std::move(model)), cache_enabled_(cache), budget_(budget) {
    if (!model_) throw Error(ErrorCode::kInvalidArgument, "null victim model");
  }

  VictimHandle(const VictimHandle&) = delete;
  VictimHandle& operator=(const VictimHandle&) = delete;

  VictimMode mode() const { return model_->mode(); }
  int num_classes() const { return model_->num_classes(); }
  std::int64_t queries() const { return queries_.load(); }
  std::int64_t budget() const { return budget_.load(); }
  void set_budget(std::int64_t budget) { budget_.store(budget); }
  bool cache_enabled() const { return cache_enabled_; }
  const VictimModel& model() const { return *model_; }
  std::shared_ptr<const VictimModel> model_ptr() const { return model_; }

  std::vector<double> query_scores(const TokenSeq& text) {
    return std::move(query_scores(std::span<const TokenSeq>(&text, 1))[0]);
  }

  std::vector<std::vector<double>> query_scores(std::span<const TokenSeq> texts) {
    if (mode() != VictimMode::kScore) {
      throw Error(ErrorCode::kModeMismatch, "victim is decision-only");
    }
    return resolve(texts, [](const Entry& e) { return e.scores; });
  }

  int query_decision(const TokenSeq& text) {
    return query_decision(std::span<const TokenSeq>(&text, 1))[0];
  }

  std::vector<int> query_decision(std::span<const TokenSeq> texts) {
    return resolve(texts, [](const Entry& e) { return e.label; });
  }

 private:
  struct Entry {
    std::vector<double> scores;  // empty for decision-mode victims
    int label = 0;
  };

  template <typename Project>
  auto resolve(std::span<const TokenSeq> texts, Project project)
      -> std::vector<decltype(project(std::declval<const Entry&>()))> {
    std::vector<std::string> keys;
    keys.reserve(texts.size());
    for (const TokenSeq& t : texts) keys.push_back(detokenize(t));

    std::vector<decltype(project(std::declval<const Entry&>()))> out(
        texts.size());
    std::lock_guard<std::mutex> lock(mu_);
    // Misses are deduplicated within the batch when caching is on.
    std::vector<std::size_t> miss;
    std::vector<std::ptrdiff_t> slot(texts.size(), -1);
    std::unordered_map<std::string, std::size_t> pending;
    for (std::size_t i = 0; i < texts.size(); ++i) {
      if (cache_enabled_ && cache_.count(keys[i])) continue;
      if (cache_enabled_ && !pending.emplace(keys[i], i).second) continue;
      slot[i] = static_cast<std::ptrdiff_t>(miss.size());
      miss.push_back(i);
    }
    const auto needed = static_cast<std::int64_t>(miss.size());
    if (needed > 0 && queries_.load() > budget_.load() - needed) {
      throw BudgetExceeded("query budget of " + std::to_string(budget_.load()) +
                           " exhausted");
    }
    std::vector<Entry> fresh(miss.size());
    if (!miss.empty()) {
      std::vector<TokenSeq> batch;
      batch.reserve(miss.size());
      for (std::size_t i : miss) batch.push_back(texts[i]);
      if (model_->mode() == VictimMode::kScore) {
        auto scores = model_->predict_scores(batch);
        check_batch(scores.size(), batch.size());
        for (std::size_t j = 0; j < scores.size(); ++j) {
          check_scores(scores[j]);
          fresh[j].label = argmax(scores[j]);
          fresh[j].scores = std::move(scores[j]);
        }
      } else {
        const auto labels = model_->predict_labels(batch);
        check_batch(labels.size(), batch.size());
        for (std::size_t j = 0; j < labels.size(); ++j) {
          if (labels[j] < 0 || labels[j] >= num_classes()) {
            throw Error(ErrorCode::kRemoteError,
                        "label " + std::to_string(labels[j]) + " out of range");
          }
          fresh[j].label = labels[j];
        }
      }
      queries_.fetch_add(needed);
    }
    for (std::size_t i = 0; i < texts.size(); ++i) {
      if (slot[i] >= 0) out[i] = project(fresh[static_cast<std::size_t>(slot[i])]);
    }
    if (cache_enabled_) {
      for (std::size_t j = 0; j < miss.size(); ++j) {
        cache_.emplace(keys[miss[j]], std::move(fresh[j]));
      }
      for (std::size_t i = 0; i < texts.size(); ++i) {
        if (slot[i] < 0) out[i] = project(cache_.at(keys[i]));
      }
    }
    return out;
  }

  void check_scores(const std::vector<double>& row) const {
    double sum = 0.0;
    bool ok = row.size() == static_cast<std::size_t>(num_classes());
    for (double p : row) {
      ok = ok && p >= 0.0 && std::isfinite(p);
      sum += p;
    }
    if (!ok || std::abs(sum - 1.0) > 1e-6) {
      throw Error(ErrorCode::kRemoteError, "victim returned an invalid score row");
    }
  }

  static void check_batch(std::size_t got, std::size_t want) {
    if (got != want) {
      throw Error(ErrorCode::kRemoteError,
                  "victim returned " + std::to_string(got) + " answers for " +
                      std::to_string(want) + " texts");
    }
  }

  std::shared_ptr<const VictimModel> model_;
  bool cache_enabled_;
  std::atomic<std::int64_t> budget_;
  std::atomic<std::int64_t> queries_{0};
  std::mutex mu_;
  std::unordered_map<std::string, Entry> cache_;
};

// Decorator counting every underlying invocation; used to audit accounting.
class CountingVictim : public VictimModel {
 public:
  explicit CountingVictim(std::shared_ptr<const VictimModel> inner)
      : inner_(std::move(inner)) {}

  VictimMode mode() const override { return inner_->mode(); }
  int num_classes() const override { return inner_->num_classes(); }

  std::vector<std::vector<double>> predict_scores(
      std::span<const TokenSeq> texts) const override {
    calls_.fetch_add(static_cast<std::int64_t>(texts.size()));
    return inner_->predict_scores(texts);
  }
  std::vector<int> predict_labels(std::span<const TokenSeq> texts) const override {
    calls_.fetch_add(static_cast<std::int64_t>(texts.size()));
    return inner_->predict_labels(texts);
  }

  std::int64_t calls() const { return calls_.load(); }
  void reset() { calls_.store(0); }

 private:
  std::shared_ptr<const VictimModel> inner_;
  mutable std::atomic<std::int64_t> calls_{0};
};

// Multinomial logistic regression over mean-pooled word embeddings.
// Out-of-vocabulary tokens are ignored; a sentence with no known token pools
// to the zero vector.
class ToyVictim : public VictimModel {
 public:
  ToyVictim(std::shared_ptr<const EmbeddingTable> embeddings, int num_classes,
            VictimMode mode = VictimMode::kScore)
      : embeddings_(std::move(embeddings)),
        num_classes_(num_classes),
        mode_(mode) {
    if (!embeddings_ || !embeddings_->loaded()) {
      throw Error(ErrorCode::kEmbeddingsNotLoaded, "toy victim needs embeddings");
    }
    if (num_classes_ < 2) {
      throw Error(ErrorCode::kInvalidArgument, "need at least 2 classes");
    }
    weights_.assign(static_cast<std::size_t>(num_classes_) * dim(), 0.0);
    bias_.assign(static_cast<std::size_t>(num_classes_), 0.0);
  }

  VictimMode mode() const override { return mode_; }
  int num_classes() const override { return num_classes_; }
  std::size_t dim() const { return embeddings_->dim(); }

  // Same weights, different exposure.
  std::shared_ptr<ToyVictim> with_mode(VictimMode mode) const {
    auto copy = std::make_shared<ToyVictim>(*this);
    copy->mode_ = mode;
    return copy;
  }

  std::vector<double> features(const TokenSeq& text) const {
    std::vector<double> f(dim(), 0.0);
    std::size_t known = 0;
    for (const std::string& tok : text.tokens) {
      const auto row = embeddings_->lookup(tok);
      if (row.empty()) continue;
      ++known;
      for (std::size_t j = 0; j < f.size(); ++j) f[j] += row[j];
    }
    if (known > 0) {
      for (double& v : f) v /= static_cast<double>(known);
    }
    return f;
  }

  std::vector<double> scores_from_features(std::span<const double> f) const {
    std::vector<double> logits(bias_);
    for (std::size_t c = 0; c < logits.size(); ++c) {
      const double* w = weights_.data() + c * dim();
      for (std::size_t j = 0; j < f.size(); ++j) logits[c] += w[j] * f[j];
    }
    const double top = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double& l : logits) {
      l = std::exp(l - top);
      sum += l;
    }
    for (double& l : logits) l /= sum;
    return logits;
  }

  std::vector<double> scores(const TokenSeq& text) const {
    return scores_from_features(features(text));
  }

  std::vector<std::vector<double>> predict_scores(
      std::span<const TokenSeq> texts) const override {
    if (mode_ != VictimMode::kScore) {
      throw Error(ErrorCode::kModeMismatch, "victim is decision-only");
    }
    std::vector<std::vector<double>> out;
    out.reserve(texts.size());
    for (const TokenSeq& t : texts) out.push_back(scores(t));
    return out;
  }

  std::vector<int> predict_labels(std::span<const TokenSeq> texts) const override {
    std::vector<int> out;
    out.reserve(texts.size());
    for (const TokenSeq& t : texts) out.push_back(argmax(scores(t)));
    return out;
  }

  double accuracy(const std::vector<LabeledExample>& data) const {
    if (data.empty()) return 0.0;
    std::size_t correct = 0;
    for (const auto& ex : data) {
      if (argmax(scores(ex.text)) == ex.label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
  }

  // Row-major num_classes x dim.
  std::vector<double>& weights() { return weights_; }
  const std::vector<double>& weights() const { return weights_; }
  std::vector<double>& bias() { return bias_; }
  const std::vector<double>& bias() const { return bias_; }
  const EmbeddingTable& embeddings() const { return *embeddings_; }

  // {"embedding_dim", "classes", "weights": [[...] per class], "bias"}.
  nlohmann::json to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (int c = 0; c < num_classes_; ++c) {
      const auto begin = weights_.begin() + static_cast<std::ptrdiff_t>(c * dim());
      rows.push_back(std::vector<double>(
          begin, begin + static_cast<std::ptrdiff_t>(dim())));
    }
    return {{"embedding_dim", dim()},
            {"classes", num_classes_},
            {"weights", rows},
            {"bias", bias_}};
  }

  static std::shared_ptr<ToyVictim> from_json(
      const nlohmann::json& j, std::shared_ptr<const EmbeddingTable> embeddings,
      VictimMode mode = VictimMode::kScore) {
    try {
      const auto d = j.at("embedding_dim").get<std::size_t>();
      const int classes = j.at("classes").get<int>();
      if (!embeddings || embeddings->dim() != d) {
        throw Error(ErrorCode::kInvalidArgument,
                    "embedding dimension does not match weights file");
      }
      auto victim = std::make_shared<ToyVictim>(embeddings, classes, mode);
      const auto& rows = j.at("weights");
      const auto bias = j.at("bias").get<std::vector<double>>();
      if (rows.size() != static_cast<std::size_t>(classes) ||
          bias.size() != static_cast<std::size_t>(classes)) {
        throw Error(ErrorCode::kParse, "weights/bias do not match class count");
      }
      for (int c = 0; c < classes; ++c) {
        const auto row = rows[static_cast<std::size_t>(c)].get<std::vector<double>>();
        if (row.size() != d) throw Error(ErrorCode::kParse, "bad weight row");
        std::copy(row.begin(), row.end(),
                  victim->weights_.begin() + static_cast<std::ptrdiff_t>(c * d));
      }
      victim->bias_ = bias;
      return victim;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParse, std::string("toy weights: ") + e.what());
    }
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
    out << to_json().dump(2) << '\n';
  }

  static std::shared_ptr<ToyVictim> load(
      const std::string& path, std::shared_ptr<const EmbeddingTable> embeddings,
      VictimMode mode = VictimMode::kScore) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParse, path + ": " + e.what());
    }
    return from_json(j, std::move(embeddings), mode);
  }

 private:
  std::shared_ptr<const EmbeddingTable> embeddings_;
  int num_classes_;
  VictimMode mode_;
  std::vector<double> weights_;
  std::vector<double> bias_;
};

struct ToyTrainOptions {
  int num_classes = 2;
  int epochs = 30;
  double lr = 0.5;
  std::size_t batch_size = 16;
  std::uint64_t seed = 0;
};

// Mini-batch gradient descent on softmax cross-entropy from all-zero
// weights. Deterministic given options.seed.
inline std::shared_ptr<ToyVictim> train_toy_victim(
    const std::vector<LabeledExample>& dataset,
    std::shared_ptr<const EmbeddingTable> embeddings,
    const ToyTrainOptions& options) {
  if (dataset.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "no training examples");
  }
  for (const auto& ex : dataset) {
    if (ex.label < 0 || ex.label >= options.num_classes) {
      throw Error(ErrorCode::kInvalidArgument,
                  "label " + std::to_string(ex.label) + " outside [0, " +
                      std::to_string(options.num_classes) + ")");
    }
  }
  if (options.epochs < 0 || !(options.lr > 0.0) || options.batch_size == 0) {
    throw Error(ErrorCode::kInvalidArgument, "bad training options");
  }
  auto victim = std::make_shared<ToyVictim>(embeddings, options.num_classes);
  const std::size_t d = victim->dim();
  const auto classes = static_cast<std::size_t>(options.num_classes);

  std::vector<std::vector<double>> feats;
  feats.reserve(dataset.size());
  for (const auto& ex : dataset) feats.push_back(victim->features(ex.text));

  std::vector<std::size_t> order(dataset.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(options.seed);
  std::vector<double> grad_w(classes * d);
  std::vector<double> grad_b(classes);
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size();
         start += options.batch_size) {
      const std::size_t end = std::min(order.size(), start + options.batch_size);
      std::fill(grad_w.begin(), grad_w.end(), 0.0);
      std::fill(grad_b.begin(), grad_b.end(), 0.0);
      for (std::size_t k = start; k < end; ++k) {
        const auto& f = feats[order[k]];
        auto p = victim->scores_from_features(f);
        p[static_cast<std::size_t>(dataset[order[k]].label)] -= 1.0;
        for (std::size_t c = 0; c < classes; ++c) {
          grad_b[c] += p[c];
          for (std::size_t j = 0; j < d; ++j) grad_w[c * d + j] += p[c] * f[j];
        }
      }
      const double scale = options.lr / static_cast<double>(end - start);
      for (std::size_t i = 0; i < grad_w.size(); ++i) {
        victim->weights()[i] -= scale * grad_w[i];
      }
      for (std::size_t c = 0; c < classes; ++c) {
        victim->bias()[c] -= scale * grad_b[c];
      }
    }
  }
  return victim;
}

}  // namespace polysub

#endif  // POLYSUB_VICTIMS_HPP_
