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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "allusion/corpus.h"
#include "allusion/embeddings.h"
#include "allusion/simmatrix.h"
#include "allusion/transport.h"
#include "allusion/vectorize.h"

namespace allusion {

enum class ModelKind {
  kBow,
  kTfidf,
  kTesserae,
  kEmbBow,
  kEmbTfidf,
  kWmd,
  kScEmb,
  kScWn,
  kScRnd,
  kTesseraeWmd,
};

std::string_view to_string(ModelKind kind);
// Throws ValidationError naming every valid model.
ModelKind parse_model_kind(std::string_view name);
std::span<const ModelKind> all_model_kinds();

bool uses_embeddings(ModelKind kind);
bool is_soft_cosine(ModelKind kind);
bool is_stochastic(ModelKind kind);

enum class GroundCost { kCosine, kEuclidean };

// Relative term frequencies over one collection in one view.
class FrequencyTable {
 public:
  FrequencyTable() = default;
  static FrequencyTable from_collection(const Collection& collection, TextView view);
  // Explicit frequencies (used by fixtures and tests).
  static FrequencyTable from_values(std::unordered_map<std::string, double> values);

  // 0 for unseen terms.
  double frequency(const std::string& term) const;

 private:
  std::unordered_map<std::string, double> values_;
};

// Token distance between the two lowest-frequency shared terms of `doc`.
// Equally rare candidates are resolved by taking the largest distance, and
// repeated terms by their farthest pair of occurrences. 0 when fewer than two
// shared terms occur in the document.
std::size_t rare_word_distance(std::span<const std::string> doc,
                               std::span<const std::string> shared_terms,
                               const FrequencyTable& freq);

// ln( sum_{w in shared} (1/f(w,s) + 1/f(w,t)) / (d_s + d_t) ), or nullopt when
// the texts share fewer than two distinct terms.
std::optional<double> score_tesserae(std::span<const std::string> query,
                                     std::span<const std::string> candidate,
                                     const FrequencyTable& query_freq,
                                     const FrequencyTable& candidate_freq);

double score_bow(std::span<const std::string> query, std::span<const std::string> candidate,
                 const Vocabulary& vocab);
double score_tfidf(std::span<const std::string> query, std::span<const std::string> candidate,
                   const Vocabulary& vocab);

enum class SentenceWeighting { kUniform, kTfidf };

// Cosine of the composed sentence embeddings; 0 if either side is all-OOV.
// `vocab` supplies idf weights for kTfidf.
double score_sentemb(std::span<const std::string> query,
                     std::span<const std::string> candidate, const EmbeddingTable& table,
                     SentenceWeighting weighting, const Vocabulary* vocab = nullptr);

// Builds the per-occurrence idf weight function for tfidf sentence embeddings.
TermWeight idf_weights(const Vocabulary& vocab);

double ground_distance(std::span<const double> a, std::span<const double> b, GroundCost cost);

struct TermFlow {
  std::string source;
  std::string target;
  double mass = 0.0;
};

struct WmdResult {
  double distance = 0.0;
  std::vector<TermFlow> flow;  // filled when requested
};

// Word Mover's Distance between L1-normalized histograms of in-table terms.
// nullopt when either side has no in-table term.
std::optional<WmdResult> wmd(std::span<const std::string> query,
                             std::span<const std::string> candidate,
                             const EmbeddingTable& table,
                             GroundCost cost = GroundCost::kCosine, bool with_flow = false);

// sum_ij S_ij a_i b_j
double soft_dot(const SparseVector& a, const SparseVector& b, const SimilarityMatrix& sim);

struct SoftCosine {
  double value = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
  bool degenerate = false;  // non-finite or zero denominator, value forced to 0
};

// Self terms are clamped at 0 before the square root.
SoftCosine soft_cosine_terms(const SparseVector& s, const SparseVector& t,
                             const SimilarityMatrix& sim);
double soft_cosine(const SparseVector& s, const SparseVector& t, const SimilarityMatrix& sim);

}  // namespace allusion
