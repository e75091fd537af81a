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

#include <atomic>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "allusion/corpus.h"
#include "allusion/embeddings.h"
#include "allusion/models.h"
#include "allusion/simmatrix.h"
#include "allusion/vectorize.h"

namespace allusion {

// Serial loops are the reference implementation; parallel ones split the
// candidate loop across OpenMP threads and must produce identical scores.
enum class Execution { kSerial, kParallel };

struct RankEntry {
  std::string candidate_id;
  std::optional<double> score;  // nullopt: undefined / incomparable
};

struct Ranking {
  std::string query_id;
  std::vector<RankEntry> entries;
  std::size_t rank_of_relevant = 0;  // 1-based
};

struct ModelResources {
  const Collection* source = nullptr;
  const Collection* target = nullptr;
  TextView view = TextView::kLemma;
  // Shared term space over source and target in `view`.
  const Vocabulary* vocab = nullptr;
  const EmbeddingTable* embeddings = nullptr;
  // Term similarity for soft cosine models, already power-boosted.
  SimilarityPtr similarity;
  GroundCost ground_cost = GroundCost::kCosine;
};

// A configured retrieval model over one target collection. Candidate
// representations are precomputed at construction; scoring is const and
// safe to call concurrently.
class RetrievalModel {
 public:
  RetrievalModel(ModelKind kind, ModelResources resources);

  ModelKind kind() const { return kind_; }
  TextView view() const { return resources_.view; }
  const ModelResources& resources() const { return resources_; }
  // WMD ranks ascending (distance); every other single model descending.
  bool higher_is_better() const { return kind_ != ModelKind::kWmd; }

  // One score per target document, in collection order. Not available for
  // t+wmd, whose ordering depends on the relevant document.
  std::vector<std::optional<double>> score_all(std::span<const std::string> query,
                                               Execution execution = Execution::kParallel) const;

  Ranking rank(const QueryInstance& query, Execution execution = Execution::kParallel) const;
  Ranking rank_text(const std::string& query_id, std::span<const std::string> query,
                    const std::string& relevant_id,
                    Execution execution = Execution::kParallel) const;

  // Soft cosine evaluations whose denominator was zero or non-finite.
  std::size_t degenerate_scores() const { return degenerate_.load(); }

 private:
  struct Candidate {
    const std::vector<std::string>* text = nullptr;
    SparseVector vector;       // bow or tfidf
    double self_norm = 0.0;    // sqrt(max(0, sum S_ij t_i t_j)) or plain norm
    std::vector<double> sentence;
    bool sentence_zero = false;
  };

  std::optional<double> score_one(const Candidate& c, std::span<const std::string> query,
                                  const SparseVector& qvec, double qnorm,
                                  const std::vector<double>& qsentence, bool qzero,
                                  ModelKind as) const;
  std::vector<std::optional<double>> score_as(std::span<const std::string> query,
                                              ModelKind as, Execution execution) const;

  ModelKind kind_;
  ModelResources resources_;
  std::vector<Candidate> candidates_;
  FrequencyTable source_freq_;
  FrequencyTable target_freq_;
  TermWeight idf_;
  mutable std::atomic<std::size_t> degenerate_{0};
};

// Orders candidates: defined scores first (descending, or ascending when
// `higher_is_better` is false), undefined last; ties and undefined entries by
// ascending candidate id.
Ranking make_ranking(const std::string& query_id, const Collection& target,
                     std::span<const std::optional<double>> scores, bool higher_is_better,
                     const std::string& relevant_id);

}  // namespace allusion
