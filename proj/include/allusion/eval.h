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
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "allusion/corpus.h"
#include "allusion/models.h"
#include "allusion/retrieval.h"
#include "allusion/vectorize.h"

namespace allusion {

// Mean reciprocal rank scaled to [0, 100]. Ranks are 1-based; throws
// ValidationError for an empty set or a zero rank.
double mrr(std::span<const std::size_t> ranks);

// Percentage of queries whose relevant document is within the first k.
double precision_at_k(std::span<const std::size_t> ranks, std::size_t k);

std::vector<std::size_t> relevant_ranks(std::span<const Ranking> rankings);

struct EvalReport {
  std::string model;
  TextView view = TextView::kLemma;
  std::string segmentation = "manual";
  double mrr = 0.0;
  std::vector<std::pair<std::size_t, double>> precision;  // (k, P@k), ascending k
  std::vector<std::pair<std::string, std::size_t>> ranks; // (query id, rank)
  std::size_t query_count = 0;

  double precision_at(std::size_t k) const;
};

// Ranks every non-discarded query and aggregates MRR and P@k.
EvalReport evaluate(const RetrievalModel& model, std::span<const QueryInstance> queries,
                    std::span<const std::size_t> ks,
                    Execution execution = Execution::kParallel);

// Comparison table: rows are (metric, view), columns are models. Cells that
// were not evaluated are left blank.
void write_report_csv(std::ostream& out, std::span<const EvalReport> reports,
                      std::span<const std::size_t> ks);
// One JSON object per (model, view, query).
void write_rank_dump(std::ostream& out, std::span<const EvalReport> reports);

class UnsupportedModelError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

enum class Side { kQuery, kCandidate };
std::string_view to_string(Side side);

struct TermContribution {
  Side side = Side::kQuery;
  std::size_t position = 0;
  std::string term;
  double contribution = 0.0;
};

struct Explanation {
  double score = 0.0;
  std::vector<TermContribution> terms;
};

// Splits a bilinear score (bow, tfidf or soft cosine) into per-token
// contributions. The contribution of term i on the query side is
// sum_j S_ij s_i t_j / denominator, shared equally by its occurrences, so each
// side sums to the score. `sim` is required for soft cosine models and
// ignored otherwise.
Explanation explain(std::span<const std::string> query, std::span<const std::string> candidate,
                    const Vocabulary& vocab, ModelKind kind,
                    const SimilarityMatrix* sim = nullptr);

void write_explanation_csv(std::ostream& out, const Explanation& explanation);

}  // namespace allusion
