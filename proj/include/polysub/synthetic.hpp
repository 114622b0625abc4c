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

#ifndef POLYSUB_SYNTHETIC_HPP_
#define POLYSUB_SYNTHETIC_HPP_

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "polysub/core.hpp"
#include "polysub/dataset.hpp"
#include "polysub/embeddings.hpp"
#include "polysub/error.hpp"
#include "polysub/rng.hpp"

// Generated two-class corpus for desk-scale experiments.
//
// Every content word belongs to a group of near-synonyms that share a base
// vector. Sentiment groups carry the label along a "semantic" direction;
// within a group, members also differ along a "surface" direction. Training
// sentences prefer surface variants that agree with the label, so a victim
// fitted on them leans on the surface cue, which a same-group substitution
// can flip without touching the group (the meaning). Neutral groups carry no
// label signal, and filler words have no neighbours at all.
namespace polysub {

struct SyntheticOptions {
  std::size_t dim = 64;
  std::size_t sentiment_groups = 150;  // per polarity
  std::size_t neutral_groups = 100;
  std::size_t group_size = 9;
  std::size_t fillers = 300;
  double semantic_scale = 0.05;
  double surface_scale = 0.3;
  double neutral_surface_scale = 0.05;
  double noise = 0.01;
  double surface_bias = 1.0;
  std::size_t min_length = 10;
  std::size_t max_length = 30;
  std::size_t min_sentiment_words = 1;
  std::size_t max_sentiment_words = 2;
  // Chance that a sentence with two or more label words also carries one
  // word of the other polarity.
  double contrary_rate = 0.2;
  double neutral_share = 0.9;
  std::size_t train_size = 1500;
  std::size_t test_size = 600;
  std::size_t aux_size = 1000;
  std::uint64_t seed = 0;

  void validate() const {
    if (dim < 4 || group_size < 2 || sentiment_groups == 0 ||
        min_length == 0 || min_length > max_length ||
        min_sentiment_words == 0 || min_sentiment_words > max_sentiment_words ||
        max_sentiment_words + 1 > min_length ||
        !(contrary_rate >= 0.0 && contrary_rate <= 1.0) ||
        !(surface_bias >= 0.0 && surface_bias <= 1.0) ||
        !(neutral_share >= 0.0 && neutral_share <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "bad synthetic corpus options");
    }
  }
};

struct SyntheticGroup {
  int polarity = 0;  // +1 positive, -1 negative, 0 neutral
  PosTag pos = PosTag::kOther;
  std::vector<std::string> words;  // ordered by surface value, low to high
};

struct SyntheticCorpus {
  std::shared_ptr<EmbeddingTable> embeddings;
  PosLexicon lexicon;
  std::vector<SyntheticGroup> groups;
  std::vector<std::string> fillers;
  std::vector<LabeledExample> train;  // fits the victim
  std::vector<LabeledExample> test;   // attacked
  std::vector<LabeledExample> aux;    // fits a stand-in victim

  // `word<TAB>pos<TAB>group-mates` lines.
  std::vector<std::string> synonym_lines() const;
  // `word<TAB>pos<TAB>sememes` lines, one sense per word.
  std::vector<std::string> sememe_lines() const;
};

namespace detail {

inline std::string pseudo_word(std::size_t index) {
  static constexpr const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m",
                                            "n", "p", "r", "s", "t", "v", "z"};
  static constexpr const char* kVowels[] = {"a", "e", "i", "o", "u"};
  std::string out;
  do {
    out += kOnsets[index % 14];
    index /= 14;
    out += kVowels[index % 5];
    index /= 5;
  } while (index > 0);
  return out;
}

inline std::vector<double> random_unit(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  double norm = 0.0;
  for (double& x : v) {
    x = rng.normal();
    norm += x * x;
  }
  for (double& x : v) x /= std::sqrt(norm);
  return v;
}

// Removes the components along the given unit directions.
inline void orthogonalize(std::vector<double>& v,
                          const std::vector<std::vector<double>>& dirs) {
  for (const auto& d : dirs) {
    double dot = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) dot += v[i] * d[i];
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= dot * d[i];
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  for (double& x : v) x /= std::sqrt(norm);
}

}  // namespace detail

inline SyntheticCorpus generate_synthetic_corpus(const SyntheticOptions& opt) {
  opt.validate();
  Rng rng(opt.seed);
  SyntheticCorpus corpus;
  corpus.embeddings = std::make_shared<EmbeddingTable>();

  const auto semantic = detail::random_unit(rng, opt.dim);
  auto surface = detail::random_unit(rng, opt.dim);
  detail::orthogonalize(surface, {semantic});

  std::size_t next_name = 0;
  const auto fresh_name = [&] {
    return detail::pseudo_word(next_name++ * 7 + 3);
  };
  static constexpr PosTag kNeutralTags[] = {PosTag::kNoun, PosTag::kVerb,
                                            PosTag::kAdv};
  const std::size_t total_groups = 2 * opt.sentiment_groups + opt.neutral_groups;
  for (std::size_t g = 0; g < total_groups; ++g) {
    SyntheticGroup group;
    if (g < 2 * opt.sentiment_groups) {
      group.polarity = g % 2 == 0 ? 1 : -1;
      group.pos = PosTag::kAdj;
    } else {
      group.pos = kNeutralTags[g % 3];
    }
    auto base = detail::random_unit(rng, opt.dim);
    detail::orthogonalize(base, {semantic, surface});
    for (std::size_t j = 0; j < opt.group_size; ++j) {
      const double c =
          (-1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(opt.group_size - 1)) *
          (group.polarity != 0 ? opt.surface_scale : opt.neutral_surface_scale);
      std::vector<double> v(opt.dim);
      for (std::size_t i = 0; i < opt.dim; ++i) {
        v[i] = base[i] + group.polarity * opt.semantic_scale * semantic[i] +
               c * surface[i] + opt.noise * rng.normal();
      }
      const std::string word = fresh_name();
      corpus.embeddings->add(word, v);
      corpus.lexicon.add(word, group.pos);
      group.words.push_back(word);
    }
    corpus.groups.push_back(std::move(group));
  }
  for (std::size_t f = 0; f < opt.fillers; ++f) {
    const std::string word = fresh_name();
    auto v = detail::random_unit(rng, opt.dim);
    detail::orthogonalize(v, {semantic, surface});
    corpus.embeddings->add(word, v);
    corpus.lexicon.add(word, PosTag::kOther);
    corpus.fillers.push_back(word);
  }

  std::vector<std::size_t> positive, negative, neutral;
  for (std::size_t g = 0; g < corpus.groups.size(); ++g) {
    const int pol = corpus.groups[g].polarity;
    (pol > 0 ? positive : pol < 0 ? negative : neutral).push_back(g);
  }
  const std::size_t half = opt.group_size / 2;

  // Surface variant for a sentiment word: with probability surface_bias from
  // the half that agrees with its polarity, otherwise any member.
  const auto sentiment_word = [&](std::size_t g) {
    const auto& words = corpus.groups[g].words;
    if (rng.uniform() < opt.surface_bias) {
      const std::size_t k = rng.below(words.size() - half);
      return corpus.groups[g].polarity > 0 ? words[half + k]
                                           : words[words.size() - 1 - half - k];
    }
    return words[rng.below(words.size())];
  };

  const auto make_sentence = [&](int label) {
    const auto& own = label == 1 ? positive : negative;
    const auto& other = label == 1 ? negative : positive;
    const std::size_t length =
        opt.min_length + rng.below(opt.max_length - opt.min_length + 1);
    const std::size_t n_own =
        opt.min_sentiment_words +
        rng.below(opt.max_sentiment_words - opt.min_sentiment_words + 1);
    const std::size_t n_other = n_own >= 2 && rng.uniform() < opt.contrary_rate;
    std::vector<std::string> tokens;
    for (std::size_t i = 0; i < n_own; ++i) {
      tokens.push_back(sentiment_word(own[rng.below(own.size())]));
    }
    for (std::size_t i = 0; i < n_other; ++i) {
      tokens.push_back(sentiment_word(other[rng.below(other.size())]));
    }
    while (tokens.size() < length) {
      if (!neutral.empty() && rng.uniform() < opt.neutral_share) {
        const auto& words = corpus.groups[neutral[rng.below(neutral.size())]].words;
        tokens.push_back(words[rng.below(words.size())]);
      } else {
        tokens.push_back(corpus.fillers[rng.below(corpus.fillers.size())]);
      }
    }
    rng.shuffle(std::span<std::string>(tokens));
    LabeledExample ex;
    for (const auto& t : tokens) ex.text.pos_tags.push_back(corpus.lexicon.tag(t));
    ex.text.tokens = std::move(tokens);
    ex.text.raw = detokenize(ex.text);
    ex.label = label;
    return ex;
  };

  const auto make_split = [&](std::size_t n) {
    std::vector<LabeledExample> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(make_sentence(static_cast<int>(i % 2)));
    return out;
  };
  corpus.train = make_split(opt.train_size);
  corpus.test = make_split(opt.test_size);
  corpus.aux = make_split(opt.aux_size);
  return corpus;
}

inline std::vector<std::string> SyntheticCorpus::synonym_lines() const {
  std::vector<std::string> out;
  for (const auto& g : groups) {
    for (const auto& w : g.words) {
      std::string line = w + "\t" + std::string(pos_name(g.pos)) + "\t";
      bool first = true;
      for (const auto& mate : g.words) {
        if (mate == w) continue;
        if (!first) line += ",";
        line += mate;
        first = false;
      }
      out.push_back(std::move(line));
    }
  }
  return out;
}

inline std::vector<std::string> SyntheticCorpus::sememe_lines() const {
  std::vector<std::string> out;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& g = groups[gi];
    const std::string polarity =
        g.polarity > 0 ? "positive" : g.polarity < 0 ? "negative" : "neutral";
    for (const auto& w : g.words) {
      out.push_back(w + "\t" + std::string(pos_name(g.pos)) + "\tconcept" +
                    std::to_string(gi) + "," + polarity);
    }
  }
  return out;
}

// Writes embeddings.txt, pos_lexicon.tsv, synonyms.tsv, sememes.tsv and the
// train/test/aux splits into `dir` (created if missing).
inline void write_synthetic_corpus(const SyntheticCorpus& corpus,
                                   const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir + ": " + ec.message());
  const auto path = [&](const char* name) { return (fs::path(dir) / name).string(); };
  const auto write_lines = [&](const char* name, const std::vector<std::string>& lines) {
    std::ofstream out(path(name), std::ios::binary);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + path(name));
    for (const auto& l : lines) out << l << '\n';
  };
  corpus.embeddings->save(path("embeddings.txt"));
  std::vector<std::string> lexicon;
  for (const auto& g : corpus.groups) {
    for (const auto& w : g.words) lexicon.push_back(w + "\t" + std::string(pos_name(g.pos)));
  }
  for (const auto& w : corpus.fillers) lexicon.push_back(w + "\tother");
  write_lines("pos_lexicon.tsv", lexicon);
  write_lines("synonyms.tsv", corpus.synonym_lines());
  write_lines("sememes.tsv", corpus.sememe_lines());
  save_dataset(path("train.tsv"), corpus.train);
  save_dataset(path("test.tsv"), corpus.test);
  save_dataset(path("aux.tsv"), corpus.aux);
}

}  // namespace polysub

#endif  // POLYSUB_SYNTHETIC_HPP_
