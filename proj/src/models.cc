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

#include "allusion/models.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace allusion {

namespace {

constexpr std::array<ModelKind, 10> kAllModels = {
    ModelKind::kBow,    ModelKind::kTfidf, ModelKind::kTesserae, ModelKind::kEmbBow,
    ModelKind::kEmbTfidf, ModelKind::kWmd, ModelKind::kScWn,     ModelKind::kScEmb,
    ModelKind::kScRnd,  ModelKind::kTesseraeWmd,
};

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kBow: return "bow";
    case ModelKind::kTfidf: return "tfidf";
    case ModelKind::kTesserae: return "tesserae";
    case ModelKind::kEmbBow: return "emb-bow";
    case ModelKind::kEmbTfidf: return "emb-tfidf";
    case ModelKind::kWmd: return "wmd";
    case ModelKind::kScEmb: return "sc-emb";
    case ModelKind::kScWn: return "sc-wn";
    case ModelKind::kScRnd: return "sc-rnd";
    case ModelKind::kTesseraeWmd: return "t+wmd";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view name) {
  for (ModelKind kind : kAllModels) {
    if (to_string(kind) == name) return kind;
  }
  std::string valid;
  for (ModelKind kind : kAllModels) {
    if (!valid.empty()) valid += ", ";
    valid += to_string(kind);
  }
  throw ValidationError("unknown model '" + std::string(name) + "' (valid: " + valid + ")");
}

std::span<const ModelKind> all_model_kinds() { return kAllModels; }

bool uses_embeddings(ModelKind kind) {
  return kind == ModelKind::kEmbBow || kind == ModelKind::kEmbTfidf ||
         kind == ModelKind::kWmd || kind == ModelKind::kScEmb ||
         kind == ModelKind::kTesseraeWmd;
}

bool is_soft_cosine(ModelKind kind) {
  return kind == ModelKind::kScEmb || kind == ModelKind::kScWn || kind == ModelKind::kScRnd;
}

bool is_stochastic(ModelKind kind) { return kind == ModelKind::kScRnd; }

FrequencyTable FrequencyTable::from_collection(const Collection& collection, TextView view) {
  std::unordered_map<std::string, std::size_t> counts;
  std::size_t total = 0;
  for (const Document& doc : collection) {
    for (const auto& t : doc.text(view)) {
      ++counts[t];
      ++total;
    }
  }
  FrequencyTable table;
  table.values_.reserve(counts.size());
  for (const auto& [term, count] : counts) {
    table.values_.emplace(term, static_cast<double>(count) / static_cast<double>(total));
  }
  return table;
}

FrequencyTable FrequencyTable::from_values(std::unordered_map<std::string, double> values) {
  FrequencyTable table;
  table.values_ = std::move(values);
  return table;
}

double FrequencyTable::frequency(const std::string& term) const {
  auto it = values_.find(term);
  return it == values_.end() ? 0.0 : it->second;
}

std::size_t rare_word_distance(std::span<const std::string> doc,
                               std::span<const std::string> shared_terms,
                               const FrequencyTable& freq) {
  // term -> (first position, last position)
  std::map<std::string, std::pair<std::size_t, std::size_t>> extent;
  std::set<std::string> wanted(shared_terms.begin(), shared_terms.end());
  for (std::size_t p = 0; p < doc.size(); ++p) {
    if (!wanted.contains(doc[p])) continue;
    auto [it, fresh] = extent.try_emplace(doc[p], p, p);
    if (!fresh) it->second.second = p;
  }
  if (extent.size() < 2) return 0;

  std::vector<std::pair<double, std::string>> ranked;
  for (const auto& [term, _] : extent) ranked.emplace_back(freq.frequency(term), term);
  std::sort(ranked.begin(), ranked.end());

  auto distance = [&](const std::string& a, const std::string& b) {
    const auto [a_first, a_last] = extent.at(a);
    const auto [b_first, b_last] = extent.at(b);
    const auto far1 = a_last > b_first ? a_last - b_first : b_first - a_last;
    const auto far2 = b_last > a_first ? b_last - a_first : a_first - b_last;
    return std::max(far1, far2);
  };

  const double rarest = ranked[0].first;
  std::vector<std::string> first_tier, second_tier;
  for (const auto& [f, term] : ranked) {
    if (f == rarest) first_tier.push_back(term);
  }
  std::size_t best = 0;
  if (first_tier.size() >= 2) {
    for (std::size_t a = 0; a < first_tier.size(); ++a) {
      for (std::size_t b = a + 1; b < first_tier.size(); ++b) {
        best = std::max(best, distance(first_tier[a], first_tier[b]));
      }
    }
    return best;
  }
  const double runner_up = ranked[1].first;
  for (const auto& [f, term] : ranked) {
    if (f == runner_up) best = std::max(best, distance(first_tier[0], term));
  }
  return best;
}

std::optional<double> score_tesserae(std::span<const std::string> query,
                                     std::span<const std::string> candidate,
                                     const FrequencyTable& query_freq,
                                     const FrequencyTable& candidate_freq) {
  const std::set<std::string> q(query.begin(), query.end());
  std::vector<std::string> shared;
  for (const auto& t : std::set<std::string>(candidate.begin(), candidate.end())) {
    if (q.contains(t)) shared.push_back(t);
  }
  if (shared.size() < 2) return std::nullopt;

  double inverse_sum = 0.0;
  for (const auto& w : shared) {
    const double fq = query_freq.frequency(w);
    const double fc = candidate_freq.frequency(w);
    if (fq <= 0.0 || fc <= 0.0) return std::nullopt;
    inverse_sum += 1.0 / fq + 1.0 / fc;
  }
  const std::size_t spread = rare_word_distance(query, shared, query_freq) +
                             rare_word_distance(candidate, shared, candidate_freq);
  if (spread == 0) return std::nullopt;
  return std::log(inverse_sum / static_cast<double>(spread));
}

double score_bow(std::span<const std::string> query, std::span<const std::string> candidate,
                 const Vocabulary& vocab) {
  return cosine(bow(query, vocab).vector, bow(candidate, vocab).vector);
}

double score_tfidf(std::span<const std::string> query, std::span<const std::string> candidate,
                   const Vocabulary& vocab) {
  return cosine(tfidf(query, vocab), tfidf(candidate, vocab));
}

TermWeight idf_weights(const Vocabulary& vocab) {
  return [&vocab](std::string_view term) {
    auto id = vocab.id(term);
    return id ? vocab.idf(*id) : 0.0;
  };
}

double score_sentemb(std::span<const std::string> query,
                     std::span<const std::string> candidate, const EmbeddingTable& table,
                     SentenceWeighting weighting, const Vocabulary* vocab) {
  TermWeight weights;
  if (weighting == SentenceWeighting::kTfidf) {
    if (vocab == nullptr) throw std::invalid_argument("tfidf weighting needs a vocabulary");
    weights = idf_weights(*vocab);
  }
  const auto a = sentence_embedding(query, table, weights);
  const auto b = sentence_embedding(candidate, table, weights);
  if (a.zero || b.zero) return 0.0;
  return dense_cosine(a.vector, b.vector);
}

double ground_distance(std::span<const double> a, std::span<const double> b, GroundCost cost) {
  if (cost == GroundCost::kEuclidean) {
    double ss = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) ss += (a[d] - b[d]) * (a[d] - b[d]);
    return std::sqrt(ss);
  }
  return std::max(0.0, 1.0 - dense_cosine(a, b));
}

namespace {

struct Histogram {
  std::vector<std::string> terms;
  std::vector<double> mass;
};

Histogram in_table_histogram(std::span<const std::string> text, const EmbeddingTable& table) {
  std::map<std::string, double> counts;
  double total = 0.0;
  for (const auto& t : text) {
    if (!table.contains(t)) continue;
    counts[t] += 1.0;
    total += 1.0;
  }
  Histogram h;
  for (const auto& [term, c] : counts) {
    h.terms.push_back(term);
    h.mass.push_back(c / total);
  }
  return h;
}

}  // namespace

std::optional<WmdResult> wmd(std::span<const std::string> query,
                             std::span<const std::string> candidate,
                             const EmbeddingTable& table, GroundCost cost, bool with_flow) {
  const Histogram a = in_table_histogram(query, table);
  const Histogram b = in_table_histogram(candidate, table);
  if (a.terms.empty() || b.terms.empty()) return std::nullopt;
  std::vector<double> costs(a.terms.size() * b.terms.size());
  for (std::size_t i = 0; i < a.terms.size(); ++i) {
    for (std::size_t j = 0; j < b.terms.size(); ++j) {
      costs[i * b.terms.size() + j] =
          a.terms[i] == b.terms[j]
              ? 0.0
              : ground_distance(table.at(a.terms[i]), table.at(b.terms[j]), cost);
    }
  }
  const TransportPlan plan = solve_transport(a.mass, b.mass, costs);
  WmdResult out;
  out.distance = plan.cost;
  if (with_flow) {
    for (const auto& f : plan.flows) {
      out.flow.push_back({a.terms[f.source], b.terms[f.target], f.mass});
    }
  }
  return out;
}

double soft_dot(const SparseVector& a, const SparseVector& b, const SimilarityMatrix& sim) {
  double sum = 0.0;
  for (const auto& [i, ai] : a) {
    for (const auto& [j, bj] : b) sum += sim(i, j) * ai * bj;
  }
  return sum;
}

SoftCosine soft_cosine_terms(const SparseVector& s, const SparseVector& t,
                             const SimilarityMatrix& sim) {
  SoftCosine out;
  if (s.empty() || t.empty()) return out;
  out.numerator = soft_dot(s, t, sim);
  const double ss = std::max(0.0, soft_dot(s, s, sim));
  const double tt = std::max(0.0, soft_dot(t, t, sim));
  out.denominator = std::sqrt(ss) * std::sqrt(tt);
  if (!(out.denominator > 0.0) || !std::isfinite(out.denominator) ||
      !std::isfinite(out.numerator)) {
    out.degenerate = true;
    return out;
  }
  out.value = out.numerator / out.denominator;
  return out;
}

double soft_cosine(const SparseVector& s, const SparseVector& t, const SimilarityMatrix& sim) {
  return soft_cosine_terms(s, t, sim).value;
}

}  // namespace allusion
