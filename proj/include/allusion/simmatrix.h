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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "allusion/embeddings.h"
#include "allusion/vectorize.h"

namespace allusion {

// Symmetric term-by-term similarity with unit diagonal and entries in [0, 1].
// Entries are computed on demand from immutable state, so concurrent lookups
// are safe and a V x V matrix is never materialized.
class SimilarityMatrix {
 public:
  virtual ~SimilarityMatrix() = default;

  double operator()(TermId i, TermId j) const {
    if (i == j) return 1.0;
    return i < j ? off_diagonal(i, j) : off_diagonal(j, i);
  }
  // Number of terms the matrix is defined over.
  virtual std::size_t dimension() const = 0;

 protected:
  // Called with lo < hi.
  virtual double off_diagonal(TermId lo, TermId hi) const = 0;
};

using SimilarityPtr = std::shared_ptr<const SimilarityMatrix>;

// term -> synonym set T_i. After normalization every term belongs to its own
// set and membership is symmetric.
class SynonymLexicon {
 public:
  void add(const std::string& term, std::span<const std::string> synonyms);
  const std::set<std::string>* synonyms(const std::string& term) const;
  std::size_t size() const { return sets_.size(); }

 private:
  std::map<std::string, std::set<std::string>> sets_;
};

// Lines of "lemma<TAB>syn1,syn2,...".
SynonymLexicon parse_synonym_lexicon(std::istream& in, const std::string& name = "<lexicon>",
                                     bool lowercase = true);
SynonymLexicon load_synonym_lexicon(const std::filesystem::path& path, bool lowercase = true);

enum class SynonymScoring {
  kInverseIntersection,  // 1 / |T_i ∩ T_j|
  kJaccard,              // |T_i ∩ T_j| / |T_i ∪ T_j| (alternative, off by default)
};

SimilarityPtr identity_matrix(std::size_t dimension);

// max(0, cos) of the word vectors; 0 when either term has no vector.
SimilarityPtr embedding_matrix(const EmbeddingTable& table, const Vocabulary& vocab);

SimilarityPtr wordnet_matrix(const SynonymLexicon& lexicon, const Vocabulary& vocab,
                             SynonymScoring scoring = SynonymScoring::kInverseIntersection);

// Off-diagonal entries ~ N(mean, sd) clamped to [0, 1], one draw per
// unordered pair, reproducible from the seed.
SimilarityPtr random_matrix(std::size_t dimension, std::uint64_t seed, double mean = 0.5,
                            double sd = 0.05);

// Elementwise power of the off-diagonal entries.
SimilarityPtr power_boost(SimilarityPtr base, unsigned exponent);

// Sparse explicit matrix. Entries are (i, j, s_ij) with i != j; the mirror
// entry is implied. Throws std::invalid_argument on out-of-range values or
// conflicting mirrored entries.
SimilarityPtr explicit_matrix(std::size_t dimension,
                              std::span<const std::tuple<TermId, TermId, double>> entries);

// Nonzero upper-triangle entries restricted to `terms`.
std::map<std::pair<TermId, TermId>, double> materialize(const SimilarityMatrix& matrix,
                                                        std::span<const TermId> terms);

// Throws std::logic_error if the matrix is asymmetric, has a non-unit
// diagonal, or an entry outside [0, 1] on the given terms.
void check_similarity_invariants(const SimilarityMatrix& matrix,
                                 std::span<const TermId> terms);

}  // namespace allusion
