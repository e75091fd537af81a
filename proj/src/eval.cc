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

#include "allusion/eval.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>

namespace allusion {

double mrr(std::span<const std::size_t> ranks) {
  if (ranks.empty()) throw ValidationError("MRR of an empty ranking set");
  double sum = 0.0;
  for (std::size_t r : ranks) {
    if (r == 0) throw ValidationError("ranks are 1-based");
    sum += 1.0 / static_cast<double>(r);
  }
  return 100.0 * sum / static_cast<double>(ranks.size());
}

double precision_at_k(std::span<const std::size_t> ranks, std::size_t k) {
  if (k == 0) throw ValidationError("precision@k needs k >= 1");
  if (ranks.empty()) throw ValidationError("precision@k of an empty ranking set");
  const auto hits = std::count_if(ranks.begin(), ranks.end(),
                                  [k](std::size_t r) { return r >= 1 && r <= k; });
  return 100.0 * static_cast<double>(hits) / static_cast<double>(ranks.size());
}

std::vector<std::size_t> relevant_ranks(std::span<const Ranking> rankings) {
  std::vector<std::size_t> out;
  out.reserve(rankings.size());
  for (const auto& r : rankings) out.push_back(r.rank_of_relevant);
  return out;
}

double EvalReport::precision_at(std::size_t k) const {
  for (const auto& [kk, p] : precision) {
    if (kk == k) return p;
  }
  throw std::out_of_range("precision@" + std::to_string(k) + " not evaluated");
}

EvalReport evaluate(const RetrievalModel& model, std::span<const QueryInstance> queries,
                    std::span<const std::size_t> ks, Execution execution) {
  EvalReport report;
  report.model = std::string(to_string(model.kind()));
  report.view = model.view();
  std::vector<std::size_t> ranks;
  for (const auto& q : queries) {
    if (q.discarded) continue;
    const Ranking ranking = model.rank(q, execution);
    ranks.push_back(ranking.rank_of_relevant);
    report.ranks.emplace_back(q.id, ranking.rank_of_relevant);
  }
  report.query_count = ranks.size();
  report.mrr = mrr(ranks);
  std::vector<std::size_t> sorted_ks(ks.begin(), ks.end());
  std::sort(sorted_ks.begin(), sorted_ks.end());
  sorted_ks.erase(std::unique(sorted_ks.begin(), sorted_ks.end()), sorted_ks.end());
  for (std::size_t k : sorted_ks) report.precision.emplace_back(k, precision_at_k(ranks, k));
  return report;
}

namespace {

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

void write_report_csv(std::ostream& out, std::span<const EvalReport> reports,
                      std::span<const std::size_t> ks) {
  std::vector<std::string> models;
  std::vector<TextView> views;
  std::map<std::pair<std::string, TextView>, const EvalReport*> cells;
  for (const auto& r : reports) {
    if (std::find(models.begin(), models.end(), r.model) == models.end()) {
      models.push_back(r.model);
    }
    if (std::find(views.begin(), views.end(), r.view) == views.end()) views.push_back(r.view);
    cells[{r.model, r.view}] = &r;
  }
  std::sort(views.begin(), views.end());

  out << "metric,view";
  for (const auto& m : models) out << ',' << m;
  out << '\n';
  auto row = [&](const std::string& metric, TextView view, auto value) {
    out << metric << ',' << to_string(view);
    for (const auto& m : models) {
      out << ',';
      auto it = cells.find({m, view});
      if (it != cells.end()) out << fixed(value(*it->second));
    }
    out << '\n';
  };
  for (TextView view : views) row("MRR", view, [](const EvalReport& r) { return r.mrr; });
  std::vector<std::size_t> sorted_ks(ks.begin(), ks.end());
  std::sort(sorted_ks.begin(), sorted_ks.end());
  sorted_ks.erase(std::unique(sorted_ks.begin(), sorted_ks.end()), sorted_ks.end());
  for (std::size_t k : sorted_ks) {
    for (TextView view : views) {
      row("P@" + std::to_string(k), view,
          [k](const EvalReport& r) { return r.precision_at(k); });
    }
  }
}

void write_rank_dump(std::ostream& out, std::span<const EvalReport> reports) {
  for (const auto& r : reports) {
    for (const auto& [query_id, rank] : r.ranks) {
      nlohmann::json record = {{"model", r.model},
                               {"view", std::string(to_string(r.view))},
                               {"segmentation", r.segmentation},
                               {"query_id", query_id},
                               {"rank", rank}};
      out << record.dump() << '\n';
    }
  }
}

std::string_view to_string(Side side) {
  return side == Side::kQuery ? "query" : "candidate";
}

Explanation explain(std::span<const std::string> query, std::span<const std::string> candidate,
                    const Vocabulary& vocab, ModelKind kind, const SimilarityMatrix* sim) {
  SparseVector s, t;
  SimilarityPtr identity;
  switch (kind) {
    case ModelKind::kBow:
      s = bow(query, vocab).vector;
      t = bow(candidate, vocab).vector;
      break;
    case ModelKind::kTfidf:
      s = tfidf(query, vocab);
      t = tfidf(candidate, vocab);
      break;
    case ModelKind::kScEmb:
    case ModelKind::kScWn:
    case ModelKind::kScRnd:
      if (sim == nullptr) throw ValidationError("soft cosine explanation needs a matrix");
      s = tfidf(query, vocab);
      t = tfidf(candidate, vocab);
      break;
    default:
      throw UnsupportedModelError("explain: model '" + std::string(to_string(kind)) +
                                  "' is not a decomposable bilinear score (use bow, tfidf, "
                                  "sc-emb, sc-wn or sc-rnd)");
  }
  if (!is_soft_cosine(kind)) {
    identity = identity_matrix(vocab.size());
    sim = identity.get();
  }

  Explanation out;
  const SoftCosine sc = soft_cosine_terms(s, t, *sim);
  out.score = sc.value;
  std::map<TermId, double> query_share, candidate_share;
  if (!sc.degenerate && sc.denominator > 0.0) {
    for (const auto& [i, si] : s) {
      for (const auto& [j, tj] : t) {
        const double part = (*sim)(i, j) * si * tj / sc.denominator;
        query_share[i] += part;
        candidate_share[j] += part;
      }
    }
  }

  auto emit = [&](Side side, std::span<const std::string> text,
                  const std::map<TermId, double>& share) {
    std::map<TermId, std::size_t> occurrences;
    std::vector<std::optional<TermId>> ids;
    for (const auto& token : text) {
      ids.push_back(vocab.id(token));
      if (ids.back()) ++occurrences[*ids.back()];
    }
    for (std::size_t p = 0; p < text.size(); ++p) {
      double c = 0.0;
      if (ids[p]) {
        auto it = share.find(*ids[p]);
        if (it != share.end()) {
          c = it->second / static_cast<double>(occurrences[*ids[p]]);
        }
      }
      out.terms.push_back({side, p, text[p], c});
    }
  };
  emit(Side::kQuery, query, query_share);
  emit(Side::kCandidate, candidate, candidate_share);
  return out;
}

void write_explanation_csv(std::ostream& out, const Explanation& explanation) {
  out << "side,position,term,contribution\n";
  char buf[40];
  for (const auto& t : explanation.terms) {
    std::snprintf(buf, sizeof buf, "%.17g", t.contribution);
    out << to_string(t.side) << ',' << t.position << ',' << t.term << ',' << buf << '\n';
  }
}

}  // namespace allusion
