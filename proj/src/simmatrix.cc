// Copyright 2026 The Allusion Authors
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

#include "allusion/simmatrix.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "allusion/corpus.h"

namespace allusion {

void SynonymLexicon::add(const std::string& term, std::span<const std::string> synonyms) {
  auto& own = sets_[term];
  own.insert(term);
  for (const auto& s : synonyms) {
    if (s.empty()) continue;
    own.insert(s);
    auto& other = sets_[s];
    other.insert(s);
    other.insert(term);
  }
}

const std::set<std::string>* SynonymLexicon::synonyms(const std::string& term) const {
  auto it = sets_.find(term);
  return it == sets_.end() ? nullptr : &it->second;
}

SynonymLexicon parse_synonym_lexicon(std::istream& in, const std::string& name,
                                     bool lowercase) {
  SynonymLexicon lexicon;
  std::string line;
  std::size_t line_no = 0;
  auto norm = [&](std::string s) { return lowercase ? normalize_term(s) : s; };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw ParseError(name, line_no, "expected 'lemma<TAB>syn1,syn2,...'");
    }
    std::vector<std::string> synonyms;
    std::stringstream rest(line.substr(tab + 1));
    std::string syn;
    while (std::getline(rest, syn, ',')) {
      if (!syn.empty()) synonyms.push_back(norm(syn));
    }
    lexicon.add(norm(line.substr(0, tab)), synonyms);
  }
  return lexicon;
}

SynonymLexicon load_synonym_lexicon(const std::filesystem::path& path, bool lowercase) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_synonym_lexicon(in, path.filename().string(), lowercase);
}

namespace {

class IdentitySimilarity final : public SimilarityMatrix {
 public:
  explicit IdentitySimilarity(std::size_t n) : n_(n) {}
  std::size_t dimension() const override { return n_; }

 protected:
  double off_diagonal(TermId, TermId) const override { return 0.0; }

 private:
  std::size_t n_;
};

class EmbeddingSimilarity final : public SimilarityMatrix {
 public:
  EmbeddingSimilarity(const EmbeddingTable& table, const Vocabulary& vocab)
      : dim_(table.dim()), present_(vocab.size(), false), unit_(vocab.size() * table.dim()) {
    for (TermId id = 0; id < vocab.size(); ++id) {
      auto v = table.find(vocab.term(id));
      if (v.empty()) continue;
      double ss = 0.0;
      for (double x : v) ss += x * x;
      if (ss == 0.0) continue;
      const double inv = 1.0 / std::sqrt(ss);
      for (std::size_t d = 0; d < dim_; ++d) unit_[id * dim_ + d] = v[d] * inv;
      present_[id] = true;
    }
  }
  std::size_t dimension() const override { return present_.size(); }

 protected:
  double off_diagonal(TermId lo, TermId hi) const override {
    if (!present_[lo] || !present_[hi]) return 0.0;
    const double* a = unit_.data() + lo * dim_;
    const double* b = unit_.data() + hi * dim_;
    double dot = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) dot += a[d] * b[d];
    return std::clamp(dot, 0.0, 1.0);
  }

 private:
  std::size_t dim_;
  std::vector<bool> present_;
  std::vector<double> unit_;
};

class SynonymSimilarity final : public SimilarityMatrix {
 public:
  SynonymSimilarity(const SynonymLexicon& lexicon, const Vocabulary& vocab,
                    SynonymScoring scoring)
      : scoring_(scoring), sets_(vocab.size()) {
    std::unordered_map<std::string, std::uint32_t> interned;
    auto intern = [&](const std::string& s) {
      return interned.try_emplace(s, static_cast<std::uint32_t>(interned.size()))
          .first->second;
    };
    for (TermId id = 0; id < vocab.size(); ++id) {
      const std::string& term = vocab.term(id);
      if (const auto* syn = lexicon.synonyms(term)) {
        for (const auto& s : *syn) sets_[id].push_back(intern(s));
      } else {
        sets_[id].push_back(intern(term));
      }
      std::sort(sets_[id].begin(), sets_[id].end());
    }
  }
  std::size_t dimension() const override { return sets_.size(); }

 protected:
  double off_diagonal(TermId lo, TermId hi) const override {
    const auto& a = sets_[lo];
    const auto& b = sets_[hi];
    std::size_t shared = 0;
    for (auto i = a.begin(), j = b.begin(); i != a.end() && j != b.end();) {
      if (*i < *j) {
        ++i;
      } else if (*j < *i) {
        ++j;
      } else {
        ++shared;
        ++i;
        ++j;
      }
    }
    if (shared == 0) return 0.0;
    if (scoring_ == SynonymScoring::kJaccard) {
      return static_cast<double>(shared) / static_cast<double>(a.size() + b.size() - shared);
    }
    return 1.0 / static_cast<double>(shared);
  }

 private:
  SynonymScoring scoring_;
  std::vector<std::vector<std::uint32_t>> sets_;
};

// SplitMix64 finalizer, used as a counter-based generator keyed by the pair.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double unit_uniform(std::uint64_t bits) {
  // 53 random mantissa bits, shifted into (0, 1].
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

class RandomSimilarity final : public SimilarityMatrix {
 public:
  RandomSimilarity(std::size_t n, std::uint64_t seed, double mean, double sd)
      : n_(n), seed_(seed), mean_(mean), sd_(sd) {}
  std::size_t dimension() const override { return n_; }

 protected:
  double off_diagonal(TermId lo, TermId hi) const override {
    const std::uint64_t key =
        mix64(seed_ ^ mix64((static_cast<std::uint64_t>(lo) << 32) | hi));
    const double u1 = unit_uniform(mix64(key));
    const double u2 = unit_uniform(mix64(key + 1));
    const double z =
        std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    return std::clamp(mean_ + sd_ * z, 0.0, 1.0);
  }

 private:
  std::size_t n_;
  std::uint64_t seed_;
  double mean_;
  double sd_;
};

class PoweredSimilarity final : public SimilarityMatrix {
 public:
  PoweredSimilarity(SimilarityPtr base, unsigned exponent)
      : base_(std::move(base)), exponent_(exponent) {}
  std::size_t dimension() const override { return base_->dimension(); }

 protected:
  double off_diagonal(TermId lo, TermId hi) const override {
    const double s = (*base_)(lo, hi);
    double out = 1.0;
    for (unsigned k = 0; k < exponent_; ++k) out *= s;
    return out;
  }

 private:
  SimilarityPtr base_;
  unsigned exponent_;
};

class ExplicitSimilarity final : public SimilarityMatrix {
 public:
  ExplicitSimilarity(std::size_t n, std::map<std::pair<TermId, TermId>, double> entries)
      : n_(n), entries_(std::move(entries)) {}
  std::size_t dimension() const override { return n_; }

 protected:
  double off_diagonal(TermId lo, TermId hi) const override {
    auto it = entries_.find({lo, hi});
    return it == entries_.end() ? 0.0 : it->second;
  }

 private:
  std::size_t n_;
  std::map<std::pair<TermId, TermId>, double> entries_;
};

}  // namespace

SimilarityPtr identity_matrix(std::size_t dimension) {
  return std::make_shared<IdentitySimilarity>(dimension);
}

SimilarityPtr embedding_matrix(const EmbeddingTable& table, const Vocabulary& vocab) {
  return std::make_shared<EmbeddingSimilarity>(table, vocab);
}

SimilarityPtr wordnet_matrix(const SynonymLexicon& lexicon, const Vocabulary& vocab,
                             SynonymScoring scoring) {
  return std::make_shared<SynonymSimilarity>(lexicon, vocab, scoring);
}

SimilarityPtr random_matrix(std::size_t dimension, std::uint64_t seed, double mean, double sd) {
  return std::make_shared<RandomSimilarity>(dimension, seed, mean, sd);
}

SimilarityPtr power_boost(SimilarityPtr base, unsigned exponent) {
  if (exponent == 0) throw std::invalid_argument("power boost exponent must be >= 1");
  if (exponent == 1) return base;
  return std::make_shared<PoweredSimilarity>(std::move(base), exponent);
}

SimilarityPtr explicit_matrix(std::size_t dimension,
                              std::span<const std::tuple<TermId, TermId, double>> entries) {
  std::map<std::pair<TermId, TermId>, double> stored;
  for (const auto& [i, j, s] : entries) {
    if (i == j) throw std::invalid_argument("explicit similarity: diagonal entry given");
    if (i >= dimension || j >= dimension) {
      throw std::invalid_argument("explicit similarity: term id out of range");
    }
    if (!(s >= 0.0 && s <= 1.0)) {
      throw std::invalid_argument("explicit similarity: entry outside [0, 1]");
    }
    auto key = std::minmax(i, j);
    auto [it, fresh] = stored.emplace(key, s);
    if (!fresh && it->second != s) {
      throw std::invalid_argument("explicit similarity: asymmetric entries");
    }
  }
  std::erase_if(stored, [](const auto& kv) { return kv.second == 0.0; });
  return std::make_shared<ExplicitSimilarity>(dimension, std::move(stored));
}

std::map<std::pair<TermId, TermId>, double> materialize(const SimilarityMatrix& matrix,
                                                        std::span<const TermId> terms) {
  std::vector<TermId> sorted(terms.begin(), terms.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::map<std::pair<TermId, TermId>, double> out;
  for (std::size_t a = 0; a < sorted.size(); ++a) {
    for (std::size_t b = a + 1; b < sorted.size(); ++b) {
      const double s = matrix(sorted[a], sorted[b]);
      if (s != 0.0) out.emplace(std::pair{sorted[a], sorted[b]}, s);
    }
  }
  return out;
}

void check_similarity_invariants(const SimilarityMatrix& matrix,
                                 std::span<const TermId> terms) {
  for (TermId i : terms) {
    if (matrix(i, i) != 1.0) throw std::logic_error("similarity diagonal is not 1");
    for (TermId j : terms) {
      const double s = matrix(i, j);
      if (!(s >= 0.0 && s <= 1.0)) throw std::logic_error("similarity outside [0, 1]");
      if (s != matrix(j, i)) throw std::logic_error("similarity is asymmetric");
    }
  }
}

}  // namespace allusion
