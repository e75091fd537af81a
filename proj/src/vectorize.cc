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

#include "allusion/vectorize.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace allusion {

std::optional<TermId> Vocabulary::id(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary build_vocabulary(std::span<const Collection* const> collections, TextView view,
                            IdfScope scope) {
  std::size_t total_docs = 0;
  for (const Collection* c : collections) total_docs += c->size();
  if (collections.empty() || total_docs == 0) {
    throw ValidationError("vocabulary needs at least one non-empty collection");
  }

  Vocabulary vocab;
  std::unordered_set<TermId> seen_in_doc;
  for (std::size_t ci = 0; ci < collections.size(); ++ci) {
    const bool counts_df =
        scope == IdfScope::kAllCollections || ci + 1 == collections.size();
    if (counts_df) vocab.documents_ += collections[ci]->size();
    for (const Document& doc : *collections[ci]) {
      seen_in_doc.clear();
      for (const std::string& term : doc.text(view)) {
        auto [it, fresh] =
            vocab.index_.try_emplace(term, static_cast<TermId>(vocab.terms_.size()));
        if (fresh) {
          vocab.terms_.push_back(term);
          vocab.df_.push_back(0);
          vocab.cf_.push_back(0);
        }
        const TermId id = it->second;
        if (!counts_df) continue;
        ++vocab.cf_[id];
        if (seen_in_doc.insert(id).second) ++vocab.df_[id];
      }
    }
  }
  vocab.idf_.resize(vocab.terms_.size());
  const auto n = static_cast<double>(vocab.documents_);
  for (std::size_t i = 0; i < vocab.terms_.size(); ++i) {
    vocab.idf_[i] = std::log(n / (1.0 + static_cast<double>(vocab.df_[i])));
  }
  return vocab;
}

double idf(std::string_view term, const Vocabulary& vocab) {
  auto id = vocab.id(term);
  if (!id) throw std::out_of_range("term not in vocabulary: " + std::string(term));
  return vocab.idf(*id);
}

SparseVector SparseVector::from_entries(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.first < b.first; });
  SparseVector out;
  out.entries_.reserve(entries.size());
  for (const auto& [id, w] : entries) {
    if (!out.entries_.empty() && out.entries_.back().first == id) {
      out.entries_.back().second += w;
    } else {
      out.entries_.emplace_back(id, w);
    }
  }
  std::erase_if(out.entries_, [](const Entry& e) { return e.second == 0.0; });
  return out;
}

double SparseVector::weight(TermId id) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                             [](const Entry& e, TermId t) { return e.first < t; });
  return it != entries_.end() && it->first == id ? it->second : 0.0;
}

double SparseVector::dot(const SparseVector& other) const {
  double sum = 0.0;
  auto a = entries_.begin();
  auto b = other.entries_.begin();
  while (a != entries_.end() && b != other.entries_.end()) {
    if (a->first < b->first) {
      ++a;
    } else if (b->first < a->first) {
      ++b;
    } else {
      sum += a->second * b->second;
      ++a;
      ++b;
    }
  }
  return sum;
}

double SparseVector::norm() const {
  double ss = 0.0;
  for (const auto& e : entries_) ss += e.second * e.second;
  return std::sqrt(ss);
}

SparseVector SparseVector::scaled(double factor) const {
  std::vector<Entry> out = entries_;
  for (auto& e : out) e.second *= factor;
  return from_entries(std::move(out));
}

Vectorized bow(std::span<const std::string> tokens, const Vocabulary& vocab) {
  Vectorized out;
  out.total = tokens.size();
  std::vector<SparseVector::Entry> entries;
  entries.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (auto id = vocab.id(t)) {
      entries.emplace_back(*id, 1.0);
    } else {
      ++out.oov;
    }
  }
  out.vector = SparseVector::from_entries(std::move(entries));
  return out;
}

SparseVector tfidf(const SparseVector& counts, const Vocabulary& vocab) {
  std::vector<SparseVector::Entry> entries;
  entries.reserve(counts.size());
  for (const auto& [id, tf] : counts) entries.emplace_back(id, tf * vocab.idf(id));
  return SparseVector::from_entries(std::move(entries));
}

SparseVector tfidf(std::span<const std::string> tokens, const Vocabulary& vocab) {
  return tfidf(bow(tokens, vocab).vector, vocab);
}

double cosine(const SparseVector& u, const SparseVector& v) {
  if (u.empty() || v.empty()) return 0.0;
  const double denom = u.norm() * v.norm();
  return denom > 0.0 ? u.dot(v) / denom : 0.0;
}

}  // namespace allusion
