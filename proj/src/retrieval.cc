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

#include "allusion/retrieval.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "allusion/corpus_stats.h"

namespace allusion {

RetrievalModel::RetrievalModel(ModelKind kind, ModelResources resources)
    : kind_(kind), resources_(std::move(resources)) {
  if (resources_.source == nullptr || resources_.target == nullptr ||
      resources_.vocab == nullptr) {
    throw std::invalid_argument("retrieval model needs source, target and vocabulary");
  }
  if (uses_embeddings(kind_) && resources_.embeddings == nullptr) {
    throw ValidationError(std::string(to_string(kind_)) + " needs an embedding table");
  }
  if (is_soft_cosine(kind_) && resources_.similarity == nullptr) {
    throw ValidationError(std::string(to_string(kind_)) + " needs a similarity matrix");
  }
  const Vocabulary& vocab = *resources_.vocab;
  idf_ = idf_weights(vocab);
  if (kind_ == ModelKind::kTesserae || kind_ == ModelKind::kTesseraeWmd) {
    source_freq_ = FrequencyTable::from_collection(*resources_.source, resources_.view);
    target_freq_ = FrequencyTable::from_collection(*resources_.target, resources_.view);
  }

  const Collection& target = *resources_.target;
  candidates_.resize(target.size());
  const auto n = static_cast<std::ptrdiff_t>(target.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    Candidate& c = candidates_[static_cast<std::size_t>(i)];
    c.text = &target[static_cast<std::size_t>(i)].text(resources_.view);
    switch (kind_) {
      case ModelKind::kBow:
        c.vector = bow(*c.text, vocab).vector;
        c.self_norm = c.vector.norm();
        break;
      case ModelKind::kTfidf:
        c.vector = tfidf(*c.text, vocab);
        c.self_norm = c.vector.norm();
        break;
      case ModelKind::kScEmb:
      case ModelKind::kScWn:
      case ModelKind::kScRnd:
        c.vector = tfidf(*c.text, vocab);
        c.self_norm =
            std::sqrt(std::max(0.0, soft_dot(c.vector, c.vector, *resources_.similarity)));
        break;
      case ModelKind::kEmbBow:
      case ModelKind::kEmbTfidf: {
        auto e = sentence_embedding(*c.text, *resources_.embeddings,
                                    kind_ == ModelKind::kEmbTfidf ? idf_ : TermWeight{});
        c.sentence = std::move(e.vector);
        c.sentence_zero = e.zero;
        break;
      }
      default:
        break;
    }
  }
}

std::optional<double> RetrievalModel::score_one(const Candidate& c,
                                                std::span<const std::string> query,
                                                const SparseVector& qvec, double qnorm,
                                                const std::vector<double>& qsentence,
                                                bool qzero, ModelKind as) const {
  switch (as) {
    case ModelKind::kBow:
    case ModelKind::kTfidf: {
      if (qvec.empty() || c.vector.empty()) return 0.0;
      const double denom = qnorm * c.self_norm;
      return denom > 0.0 ? qvec.dot(c.vector) / denom : 0.0;
    }
    case ModelKind::kScEmb:
    case ModelKind::kScWn:
    case ModelKind::kScRnd: {
      if (qvec.empty() || c.vector.empty()) return 0.0;
      const double numerator = soft_dot(qvec, c.vector, *resources_.similarity);
      const double denom = qnorm * c.self_norm;
      if (!(denom > 0.0) || !std::isfinite(denom) || !std::isfinite(numerator)) {
        ++degenerate_;
        return 0.0;
      }
      return numerator / denom;
    }
    case ModelKind::kEmbBow:
    case ModelKind::kEmbTfidf:
      if (qzero || c.sentence_zero) return 0.0;
      return dense_cosine(qsentence, c.sentence);
    case ModelKind::kTesserae:
      return score_tesserae(query, *c.text, source_freq_, target_freq_);
    case ModelKind::kWmd: {
      auto result = wmd(query, *c.text, *resources_.embeddings, resources_.ground_cost);
      if (!result) return std::nullopt;
      return result->distance;
    }
    case ModelKind::kTesseraeWmd:
      break;
  }
  throw std::logic_error("score_one: unsupported model");
}

std::vector<std::optional<double>> RetrievalModel::score_as(std::span<const std::string> query,
                                                            ModelKind as,
                                                            Execution execution) const {
  const Vocabulary& vocab = *resources_.vocab;
  SparseVector qvec;
  double qnorm = 0.0;
  std::vector<double> qsentence;
  bool qzero = true;
  switch (as) {
    case ModelKind::kBow:
      qvec = bow(query, vocab).vector;
      qnorm = qvec.norm();
      break;
    case ModelKind::kTfidf:
      qvec = tfidf(query, vocab);
      qnorm = qvec.norm();
      break;
    case ModelKind::kScEmb:
    case ModelKind::kScWn:
    case ModelKind::kScRnd:
      qvec = tfidf(query, vocab);
      qnorm = std::sqrt(std::max(0.0, soft_dot(qvec, qvec, *resources_.similarity)));
      break;
    case ModelKind::kEmbBow:
    case ModelKind::kEmbTfidf: {
      auto e = sentence_embedding(query, *resources_.embeddings,
                                  as == ModelKind::kEmbTfidf ? idf_ : TermWeight{});
      qsentence = std::move(e.vector);
      qzero = e.zero;
      break;
    }
    default:
      break;
  }

  std::vector<std::optional<double>> scores(candidates_.size());
  const auto n = static_cast<std::ptrdiff_t>(candidates_.size());
  if (execution == Execution::kSerial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      scores[i] = score_one(candidates_[i], query, qvec, qnorm, qsentence, qzero, as);
    }
  } else {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      scores[i] = score_one(candidates_[i], query, qvec, qnorm, qsentence, qzero, as);
    }
  }
  return scores;
}

std::vector<std::optional<double>> RetrievalModel::score_all(std::span<const std::string> query,
                                                             Execution execution) const {
  if (kind_ == ModelKind::kTesseraeWmd) {
    throw std::logic_error("t+wmd scores depend on the relevant document; use rank()");
  }
  return score_as(query, kind_, execution);
}

Ranking RetrievalModel::rank(const QueryInstance& query, Execution execution) const {
  const auto text = query_text(query, *resources_.source, resources_.view);
  return rank_text(query.id, text, query.relevant_doc, execution);
}

namespace {

// tier, then key (ascending), then candidate id.
struct SortKey {
  int tier;
  double key;
  std::size_t index;
};

Ranking ranking_from_keys(const std::string& query_id, const Collection& target,
                          std::vector<SortKey> keys,
                          std::span<const std::optional<double>> reported,
                          const std::string& relevant_id) {
  const auto relevant = target.index_of(relevant_id);
  if (!relevant) {
    throw ValidationError("query '" + query_id + "': relevant document '" + relevant_id +
                          "' not in target collection");
  }
  std::sort(keys.begin(), keys.end(), [&](const SortKey& a, const SortKey& b) {
    if (a.tier != b.tier) return a.tier < b.tier;
    if (a.key != b.key) return a.key < b.key;
    return target[a.index].id < target[b.index].id;
  });
  Ranking out;
  out.query_id = query_id;
  out.entries.reserve(keys.size());
  for (std::size_t r = 0; r < keys.size(); ++r) {
    const std::size_t i = keys[r].index;
    out.entries.push_back({target[i].id, reported[i]});
    if (i == *relevant) out.rank_of_relevant = r + 1;
  }
  return out;
}

}  // namespace

Ranking make_ranking(const std::string& query_id, const Collection& target,
                     std::span<const std::optional<double>> scores, bool higher_is_better,
                     const std::string& relevant_id) {
  if (scores.size() != target.size()) {
    throw std::invalid_argument("make_ranking: one score per candidate required");
  }
  std::vector<SortKey> keys(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] && !std::isnan(*scores[i])) {
      keys[i] = {0, higher_is_better ? -*scores[i] : *scores[i], i};
    } else {
      keys[i] = {1, 0.0, i};
    }
  }
  return ranking_from_keys(query_id, target, std::move(keys), scores, relevant_id);
}

Ranking RetrievalModel::rank_text(const std::string& query_id,
                                  std::span<const std::string> query,
                                  const std::string& relevant_id, Execution execution) const {
  if (query.empty()) {
    throw ValidationError("query '" + query_id + "' is empty in the " +
                          std::string(to_string(resources_.view)) + " view");
  }
  const Collection& target = *resources_.target;
  if (kind_ != ModelKind::kTesseraeWmd) {
    const auto scores = score_as(query, kind_, execution);
    return make_ranking(query_id, target, scores, higher_is_better(), relevant_id);
  }

  const Document* relevant = target.find(relevant_id);
  if (relevant == nullptr) {
    throw ValidationError("query '" + query_id + "': relevant document '" + relevant_id +
                          "' not in target collection");
  }
  const auto distances = score_as(query, ModelKind::kWmd, execution);
  // Oracle on lexical overlap with the relevant document decides whether the
  // lexical model is trusted for this query.
  if (shared_term_count(query, relevant->text(resources_.view)) < 2) {
    return make_ranking(query_id, target, distances, false, relevant_id);
  }
  const auto lexical = score_as(query, ModelKind::kTesserae, execution);
  std::vector<SortKey> keys(target.size());
  std::vector<std::optional<double>> reported(target.size());
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (lexical[i]) {
      keys[i] = {0, -*lexical[i], i};
      reported[i] = lexical[i];
    } else if (distances[i]) {
      keys[i] = {1, *distances[i], i};
      reported[i] = distances[i];
    } else {
      keys[i] = {2, 0.0, i};
    }
  }
  return ranking_from_keys(query_id, target, std::move(keys), reported, relevant_id);
}

}  // namespace allusion
