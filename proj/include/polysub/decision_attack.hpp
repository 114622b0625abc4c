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

#ifndef POLYSUB_DECISION_ATTACK_HPP_
#define POLYSUB_DECISION_ATTACK_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "polysub/core.hpp"
#include "polysub/embeddings.hpp"
#include "polysub/policy.hpp"
#include "polysub/rng.hpp"
#include "polysub/score_attack.hpp"
#include "polysub/substitutes.hpp"
#include "polysub/victims.hpp"

namespace polysub {

// Frozen per-token representation feeding the key-word regressor.
class TokenEncoder {
 public:
  virtual ~TokenEncoder() = default;
  virtual std::size_t dim() const = 0;
  // Row-major seq.size() x dim() matrix.
  virtual std::vector<double> encode(const TokenSeq& seq) const = 0;
  // {"kind": ..., ...}; must be accepted by encoder_from_json().
  virtual nlohmann::json to_json() const = 0;
};

// Contextless lookup into a static embedding table; unknown tokens encode to
// the zero vector.
class StaticEmbeddingEncoder : public TokenEncoder {
 public:
  static constexpr std::string_view kKind = "static_embedding";

  explicit StaticEmbeddingEncoder(std::shared_ptr<const EmbeddingTable> table)
      : table_(std::move(table)) {
    if (!table_ || !table_->loaded()) {
      throw Error(ErrorCode::kEmbeddingsNotLoaded, "encoder needs embeddings");
    }
  }

  std::size_t dim() const override { return table_->dim(); }

  std::vector<double> encode(const TokenSeq& seq) const override {
    const std::size_t d = dim();
    std::vector<double> out(seq.size() * d, 0.0);
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const auto row = table_->lookup(seq.tokens[i]);
      std::copy(row.begin(), row.end(), out.begin() + static_cast<std::ptrdiff_t>(i * d));
    }
    return out;
  }

  nlohmann::json to_json() const override {
    nlohmann::json vectors = nlohmann::json::object();
    for (std::size_t i = 0; i < table_->size(); ++i) {
      const auto row = table_->row(i);
      vectors[table_->word(i)] = std::vector<double>(row.begin(), row.end());
    }
    return {{"kind", kKind}, {"dim", dim()}, {"vectors", vectors}};
  }

  const EmbeddingTable& table() const { return *table_; }

 private:
  std::shared_ptr<const EmbeddingTable> table_;
};

inline std::shared_ptr<const TokenEncoder> encoder_from_json(
    const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind != StaticEmbeddingEncoder::kKind) {
    throw Error(ErrorCode::kParse, "unknown encoder kind '" + kind + "'");
  }
  auto table = std::make_shared<EmbeddingTable>();
  for (const auto& [word, vec] : j.at("vectors").items()) {
    table->add(word, vec.get<std::vector<double>>());
  }
  if (table->dim() != j.at("dim").get<std::size_t>()) {
    throw Error(ErrorCode::kParse, "encoder dimension mismatch");
  }
  return std::make_shared<StaticEmbeddingEncoder>(std::move(table));
}

// Two dense layers, d -> 32 (tanh) -> 1. w1 is stored d x 32 and w2 32 x 1,
// both row-major.
struct KeywordMlp {
  static constexpr std::size_t kHidden = 32;

  std::size_t input_dim = 0;
  std::vector<double> w1;  // input_dim * kHidden
  std::vector<double> b1;  // kHidden
  std::vector<double> w2;  // kHidden
  double b2 = 0.0;

  static KeywordMlp zeros(std::size_t d) {
    KeywordMlp mlp;
    mlp.input_dim = d;
    mlp.w1.assign(d * kHidden, 0.0);
    mlp.b1.assign(kHidden, 0.0);
    mlp.w2.assign(kHidden, 0.0);
    return mlp;
  }

  // First layer U(-1/sqrt(d), 1/sqrt(d)); second layer zero so that the
  // initial key-word distribution is uniform.
  static KeywordMlp initialize(std::size_t d, Rng& rng) {
    KeywordMlp mlp = zeros(d);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (double& w : mlp.w1) w = rng.uniform(-scale, scale);
    return mlp;
  }

  // Hidden activations for one token (span of input_dim values).
  std::array<double, kHidden> hidden(const double* x) const {
    std::array<double, kHidden> h{};
    for (std::size_t k = 0; k < kHidden; ++k) h[k] = b1[k];
    for (std::size_t i = 0; i < input_dim; ++i) {
      const double xi = x[i];
      if (xi == 0.0) continue;
      const double* row = w1.data() + i * kHidden;
      for (std::size_t k = 0; k < kHidden; ++k) h[k] += xi * row[k];
    }
    for (double& v : h) v = std::tanh(v);
    return h;
  }

  double output(const std::array<double, kHidden>& h) const {
    double out = b2;
    for (std::size_t k = 0; k < kHidden; ++k) out += w2[k] * h[k];
    return out;
  }

  // Flat view over all parameters, in the order w1, b1, w2, b2.
  std::size_t parameter_count() const { return w1.size() + b1.size() + w2.size() + 1; }
  double& parameter(std::size_t i) { return parameter_ref(*this, i); }
  double parameter(std::size_t i) const { return parameter_ref(*this, i); }

  bool operator==(const KeywordMlp&) const = default;

 private:
  template <typename Self>
  static std::conditional_t<std::is_const_v<Self>, const double&, double&>
  parameter_ref(Self& self, std::size_t i) {
    if (i < self.w1.size()) return self.w1[i];
    i -= self.w1.size();
    if (i < self.b1.size()) return self.b1[i];
    i -= self.b1.size();
    if (i < self.w2.size()) return self.w2[i];
    return self.b2;
  }
};

// Transferable policy: p^x = masked_softmax(mlp(encoder(x))) and a global
// substitute distribution per vocabulary word.
struct PretrainedPolicy {
  struct VocabEntry {
    std::string word;
    PosTag pos = PosTag::kOther;
    std::vector<std::string> candidates;
    std::vector<double> q;
    bool operator==(const VocabEntry&) const = default;
  };

  static constexpr int kVersion = 1;

  std::shared_ptr<const TokenEncoder> encoder;
  KeywordMlp mlp;
  std::vector<VocabEntry> vocab;

  void reindex() {
    index_.clear();
    for (std::size_t i = 0; i < vocab.size(); ++i) index_[vocab[i].word] = i;
  }
  const VocabEntry* entry(const std::string& word) const {
    const auto it = index_.find(word);
    return it == index_.end() ? nullptr : &vocab[it->second];
  }
  VocabEntry* entry(const std::string& word) {
    const auto it = index_.find(word);
    return it == index_.end() ? nullptr : &vocab[it->second];
  }

  nlohmann::json to_json() const {
    nlohmann::json mlp_json;
    nlohmann::json w1 = nlohmann::json::array();
    for (std::size_t i = 0; i < mlp.input_dim; ++i) {
      const auto begin = mlp.w1.begin() + static_cast<std::ptrdiff_t>(i * KeywordMlp::kHidden);
      w1.push_back(std::vector<double>(begin, begin + KeywordMlp::kHidden));
    }
    nlohmann::json w2 = nlohmann::json::array();
    for (double v : mlp.w2) w2.push_back(std::vector<double>{v});
    mlp_json["w1"] = w1;
    mlp_json["b1"] = mlp.b1;
    mlp_json["w2"] = w2;
    mlp_json["b2"] = std::vector<double>{mlp.b2};
    nlohmann::json words = nlohmann::json::array();
    for (const VocabEntry& e : vocab) {
      words.push_back({{"word", e.word},
                       {"pos", pos_name(e.pos)},
                       {"candidates", e.candidates},
                       {"q", e.q}});
    }
    return {{"version", kVersion},
            {"encoder_spec", encoder->to_json()},
            {"d", mlp.input_dim},
            {"mlp", mlp_json},
            {"vocab", words}};
  }

  static PretrainedPolicy from_json(const nlohmann::json& j) {
    try {
      if (j.at("version").get<int>() != kVersion) {
        throw Error(ErrorCode::kParse, "unsupported snapshot version");
      }
      PretrainedPolicy pp;
      pp.encoder = encoder_from_json(j.at("encoder_spec"));
      const auto d = j.at("d").get<std::size_t>();
      if (pp.encoder->dim() != d) {
        throw Error(ErrorCode::kParse, "encoder dimension differs from d");
      }
      pp.mlp = KeywordMlp::zeros(d);
      const auto& m = j.at("mlp");
      const auto w1 = m.at("w1").get<std::vector<std::vector<double>>>();
      const auto w2 = m.at("w2").get<std::vector<std::vector<double>>>();
      const auto b1 = m.at("b1").get<std::vector<double>>();
      const auto b2 = m.at("b2").get<std::vector<double>>();
      if (w1.size() != d || w2.size() != KeywordMlp::kHidden ||
          b1.size() != KeywordMlp::kHidden || b2.size() != 1) {
        throw Error(ErrorCode::kParse, "mlp layer shapes must be dx32 and 32x1");
      }
      for (std::size_t i = 0; i < d; ++i) {
        if (w1[i].size() != KeywordMlp::kHidden) {
          throw Error(ErrorCode::kParse, "mlp w1 row has wrong width");
        }
        std::copy(w1[i].begin(), w1[i].end(),
                  pp.mlp.w1.begin() + static_cast<std::ptrdiff_t>(i * KeywordMlp::kHidden));
      }
      for (std::size_t k = 0; k < KeywordMlp::kHidden; ++k) {
        if (w2[k].size() != 1) throw Error(ErrorCode::kParse, "mlp w2 must be 32x1");
        pp.mlp.w2[k] = w2[k][0];
      }
      pp.mlp.b1 = b1;
      pp.mlp.b2 = b2[0];
      for (const auto& e : j.at("vocab")) {
        VocabEntry entry;
        entry.word = e.at("word").get<std::string>();
        const auto pos = parse_pos(e.at("pos").get<std::string>());
        if (!pos) throw Error(ErrorCode::kParse, "bad pos in vocab");
        entry.pos = *pos;
        entry.candidates = e.at("candidates").get<std::vector<std::string>>();
        entry.q = e.at("q").get<std::vector<double>>();
        if (entry.q.size() != entry.candidates.size()) {
          throw Error(ErrorCode::kParse, "q length differs from candidate count");
        }
        pp.vocab.push_back(std::move(entry));
      }
      pp.reindex();
      return pp;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParse, std::string("policy snapshot: ") + e.what());
    }
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
    out << to_json().dump() << '\n';
    if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
  }

  static PretrainedPolicy load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParse, path + ": " + e.what());
    }
    return from_json(j);
  }

 private:
  std::unordered_map<std::string, std::size_t> index_;
};

// Builds V from the words of a corpus. Each word is tagged with its most
// frequent tag in the corpus (ties to the earlier tag in PosTag order) and
// gets the provider's nominations under that tag; words without candidates
// are left out. q starts uniform.
inline std::vector<PretrainedPolicy::VocabEntry> build_vocabulary(
    const std::vector<LabeledExample>& corpus, const CandidateProvider& provider) {
  std::map<std::string, std::array<std::size_t, 5>> tag_counts;
  for (const auto& ex : corpus) {
    for (std::size_t i = 0; i < ex.text.size(); ++i) {
      if (ex.text.tokens[i] == kPairSeparator) continue;
      tag_counts[ex.text.tokens[i]][static_cast<std::size_t>(ex.text.pos_tags[i])]++;
    }
  }
  std::vector<PretrainedPolicy::VocabEntry> vocab;
  for (const auto& [word, counts] : tag_counts) {
    const auto best = static_cast<std::size_t>(
        std::max_element(counts.begin(), counts.end()) - counts.begin());
    TokenSeq probe;
    probe.tokens = {word};
    probe.pos_tags = {static_cast<PosTag>(best)};
    auto lists = provider.candidates(probe);
    if (lists.at(0).empty()) continue;
    PretrainedPolicy::VocabEntry e;
    e.word = word;
    e.pos = probe.pos_tags[0];
    e.candidates = std::move(lists.lists[0]);
    e.q.assign(e.candidates.size(), 1.0 / static_cast<double>(e.candidates.size()));
    vocab.push_back(std::move(e));
  }
  return vocab;
}

inline PretrainedPolicy make_pretrained_policy(
    std::shared_ptr<const TokenEncoder> encoder,
    std::vector<PretrainedPolicy::VocabEntry> vocab, std::uint64_t seed) {
  PretrainedPolicy pp;
  Rng rng(seed);
  pp.mlp = KeywordMlp::initialize(encoder->dim(), rng);
  pp.encoder = std::move(encoder);
  pp.vocab = std::move(vocab);
  pp.reindex();
  return pp;
}

namespace detail {

struct KeywordForward {
  std::vector<double> inputs;                                    // m x d
  std::vector<std::array<double, KeywordMlp::kHidden>> hidden;   // m rows
  std::vector<double> logits;                                    // m
};

inline KeywordForward keyword_forward(const PretrainedPolicy& pp,
                                      const TokenSeq& seq,
                                      const std::vector<bool>& mask) {
  KeywordForward f;
  f.inputs = pp.encoder->encode(seq);
  const std::size_t d = pp.encoder->dim();
  f.hidden.resize(seq.size());
  f.logits.assign(seq.size(), 0.0);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (!mask[i]) continue;
    f.hidden[i] = pp.mlp.hidden(f.inputs.data() + i * d);
    f.logits[i] = pp.mlp.output(f.hidden[i]);
  }
  return f;
}

inline std::vector<double> masked_softmax(const std::vector<double>& logits,
                                          const std::vector<bool>& mask) {
  std::vector<double> p(logits.size(), 0.0);
  double top = -HUGE_VAL;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (mask[i]) top = std::max(top, logits[i]);
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (!mask[i]) continue;
    p[i] = std::exp(logits[i] - top);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

inline std::vector<bool> candidate_mask(const CandidateSet& cands) {
  std::vector<bool> mask(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) mask[i] = cands.count(i) > 0;
  return mask;
}

}  // namespace detail

// p^x for one sentence: per-token MLP score, softmax over positions that have
// candidates; masked positions get exactly zero.
inline std::vector<double> predict_keyword_probs(const PretrainedPolicy& pp,
                                                 const TokenSeq& seq,
                                                 const CandidateSet& cands) {
  const auto mask = detail::candidate_mask(cands);
  if (std::none_of(mask.begin(), mask.end(), [](bool b) { return b; })) {
    throw Error(ErrorCode::kNoCandidates, "no position has candidates");
  }
  return detail::masked_softmax(detail::keyword_forward(pp, seq, mask).logits,
                                mask);
}

// Distribution over one position's candidates read from the global table:
// candidates missing from the word's global list weigh 1/|list|; words
// outside V get a uniform distribution.
inline std::vector<double> restricted_q(const PretrainedPolicy& pp,
                                        const std::string& word,
                                        const std::vector<std::string>& cands) {
  std::vector<double> q(cands.size(), 1.0);
  if (const auto* e = pp.entry(word)) {
    const double fallback = 1.0 / static_cast<double>(e->candidates.size());
    for (std::size_t k = 0; k < cands.size(); ++k) {
      const auto it = std::find(e->candidates.begin(), e->candidates.end(), cands[k]);
      q[k] = it == e->candidates.end()
                 ? fallback
                 : e->q[static_cast<std::size_t>(it - e->candidates.begin())];
    }
  }
  double sum = 0.0;
  for (double v : q) sum += v;
  for (double& v : q) v /= sum;
  return q;
}

// Per-instance policy seeded from a pre-trained snapshot.
inline AttackPolicy transfer_policy(const PretrainedPolicy& pp,
                                    const TokenSeq& seq,
                                    const CandidateSet& cands) {
  AttackPolicy policy;
  policy.mask = detail::candidate_mask(cands);
  policy.p = predict_keyword_probs(pp, seq, cands);
  policy.q.resize(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (policy.mask[i]) policy.q[i] = restricted_q(pp, seq.tokens[i], cands.at(i));
  }
  return policy;
}

// Key-word part of log pi for a trace under the snapshot:
// sum_t log softmax_{R_t}(logits)[a_t].
inline double keyword_log_prob(const PretrainedPolicy& pp, const TokenSeq& seq,
                               const CandidateSet& cands,
                               const EpisodeTrace& trace) {
  const auto mask = detail::candidate_mask(cands);
  const auto f = detail::keyword_forward(pp, seq, mask);
  double lp = 0.0;
  for (const EpisodeStep& step : trace.steps) {
    double top = -HUGE_VAL;
    for (std::size_t j : step.remaining) top = std::max(top, f.logits[j]);
    double z = 0.0;
    for (std::size_t j : step.remaining) z += std::exp(f.logits[j] - top);
    lp += f.logits[step.action.position] - top - std::log(z);
  }
  return lp;
}

// Gradient of sum_t G_t log pi_t (key-word part) with respect to the MLP
// parameters, back-propagated through the masked softmax over each R_t.
inline KeywordMlp keyword_gradient(const PretrainedPolicy& pp,
                                   const TokenSeq& seq,
                                   const CandidateSet& cands,
                                   const EpisodeTrace& trace,
                                   std::span<const double> g) {
  const auto mask = detail::candidate_mask(cands);
  const auto f = detail::keyword_forward(pp, seq, mask);
  std::vector<double> dlogit(seq.size(), 0.0);
  for (std::size_t t = 0; t < trace.length(); ++t) {
    const EpisodeStep& step = trace.steps[t];
    double top = -HUGE_VAL;
    for (std::size_t j : step.remaining) top = std::max(top, f.logits[j]);
    double z = 0.0;
    for (std::size_t j : step.remaining) z += std::exp(f.logits[j] - top);
    for (std::size_t j : step.remaining) {
      dlogit[j] -= g[t] * std::exp(f.logits[j] - top) / z;
    }
    dlogit[step.action.position] += g[t];
  }
  const std::size_t d = pp.mlp.input_dim;
  constexpr std::size_t H = KeywordMlp::kHidden;
  KeywordMlp grad = KeywordMlp::zeros(d);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (!mask[i] || dlogit[i] == 0.0) continue;
    const double dl = dlogit[i];
    grad.b2 += dl;
    const auto& h = f.hidden[i];
    const double* x = f.inputs.data() + i * d;
    for (std::size_t k = 0; k < H; ++k) {
      grad.w2[k] += dl * h[k];
      const double dpre = dl * pp.mlp.w2[k] * (1.0 - h[k] * h[k]);
      if (dpre == 0.0) continue;
      grad.b1[k] += dpre;
      for (std::size_t r = 0; r < d; ++r) grad.w1[r * H + k] += dpre * x[r];
    }
  }
  return grad;
}

namespace detail {

// Moves the touched global rows along the substitute part of the policy
// gradient. The step is taken in the instance's restricted view and written
// back with the view's total weight preserved.
inline void update_global_q(PretrainedPolicy& pp, const TokenSeq& seq,
                            const CandidateSet& cands, const EpisodeTrace& trace,
                            std::span<const double> g, double lr,
                            double floor) {
  for (std::size_t t = 0; t < trace.length(); ++t) {
    const Action& a = trace.steps[t].action;
    auto* e = pp.entry(seq.tokens[a.position]);
    if (!e || g[t] == 0.0) continue;
    const auto& list = cands.at(a.position);
    const double fallback = 1.0 / static_cast<double>(e->candidates.size());
    std::vector<std::ptrdiff_t> where(list.size(), -1);
    std::vector<double> w(list.size());
    double total = 0.0;
    for (std::size_t k = 0; k < list.size(); ++k) {
      const auto it = std::find(e->candidates.begin(), e->candidates.end(), list[k]);
      if (it != e->candidates.end()) where[k] = it - e->candidates.begin();
      w[k] = where[k] >= 0 ? e->q[static_cast<std::size_t>(where[k])] : fallback;
      total += w[k];
    }
    std::vector<double> view(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) view[k] = w[k] / total;
    const std::vector<double> before(view);
    for (std::size_t k = 0; k < view.size(); ++k) {
      view[k] += lr * g[t] * ((k == a.candidate ? 1.0 / before[k] : 0.0) - 1.0);
    }
    project_to_floored_simplex(view, nullptr, floor);
    for (std::size_t k = 0; k < view.size(); ++k) {
      if (where[k] >= 0) e->q[static_cast<std::size_t>(where[k])] = view[k] * total;
    }
    project_to_floored_simplex(e->q, nullptr, floor);
  }
}

}  // namespace detail

struct PretrainStats {
  std::size_t instances = 0;
  std::size_t skipped_misclassified = 0;
  std::size_t successes = 0;
  std::int64_t episodes = 0;
  std::int64_t queries = 0;
};

// Trains the snapshot by running the score-based loop against a virtual
// victim with p^x from the MLP and q from the global table. Each episode that
// fails updates the MLP (lr_theta) and the touched global rows (lr_qw);
// a successful episode ends the instance without an update. The virtual
// victim is queried without a cache, so every episode is charged against
// max_queries even when the sharpening policy keeps drawing the same texts.
inline PretrainStats pretrain(PretrainedPolicy& pp,
                              const std::vector<LabeledExample>& corpus,
                              std::shared_ptr<const VictimModel> virtual_victim,
                              const CandidateProvider& provider,
                              const AttackConfig& cfg) {
  cfg.validate();
  if (virtual_victim->mode() != VictimMode::kScore) {
    throw Error(ErrorCode::kModeMismatch, "virtual victim must expose scores");
  }
  PretrainStats stats;
  Rng rng(cfg.seed);
  for (int epoch = 0; epoch < cfg.pretrain_epochs; ++epoch) {
    for (const LabeledExample& ex : corpus) {
      const CandidateSet cands = provider.candidates(ex);
      if (cands.positions_with_candidates() == 0) continue;
      ++stats.instances;
      VictimHandle victim(virtual_victim, false, cfg.max_queries);
      try {
        const auto scores = victim.query_scores(ex.text);
        if (argmax(scores) != ex.label) {
          ++stats.skipped_misclassified;
          stats.queries += victim.queries();
          continue;
        }
        const double base = scores[static_cast<std::size_t>(ex.label)];
        for (std::int64_t episode = 0; episode < cfg.max_episodes; ++episode) {
          ++stats.episodes;
          const AttackPolicy policy = transfer_policy(pp, ex.text, cands);
          const auto plan = sample_episode(policy, cfg.delta, rng);
          const auto outcome = episode_rewards(
              victim, ex.text, ex.label, base, policy, plan, cands,
              cfg.incremental_reward ? RewardKind::kScoreIncremental
                                     : RewardKind::kScoreDrop,
              cfg.fail_reward);
          if (outcome.success) {
            ++stats.successes;
            break;
          }
          const auto g = returns(outcome.trace, cfg.gamma);
          const KeywordMlp grad = keyword_gradient(pp, ex.text, cands, outcome.trace, g);
          for (std::size_t i = 0; i < grad.parameter_count(); ++i) {
            pp.mlp.parameter(i) += cfg.lr_theta * grad.parameter(i);
          }
          detail::update_global_q(pp, ex.text, cands, outcome.trace, g,
                                  cfg.lr_qw, cfg.prob_floor);
        }
      } catch (const BudgetExceeded&) {
      }
      stats.queries += victim.queries();
    }
  }
  return stats;
}

// Decision-based attack: constant failure reward, starting either from the
// uniform policy or from a pre-trained snapshot. After seeding, p and q are
// plain per-instance vectors; the snapshot itself is never modified.
inline AttackResult attack_decision(VictimHandle& victim,
                                    const LabeledExample& ex,
                                    const CandidateSet& cands,
                                    const AttackConfig& cfg,
                                    const PretrainedPolicy* init = nullptr) {
  return detail::run_policy_attack(
      victim, ex, cands, cfg, RewardKind::kConstantFailure, [&] {
        return init ? transfer_policy(*init, ex.text, cands) : init_policy(cands);
      });
}

}  // namespace polysub

#endif  // POLYSUB_DECISION_ATTACK_HPP_
