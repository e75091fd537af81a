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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "allusion/corpus.h"

namespace allusion {

using TermId = std::uint32_t;

// Which collections contribute document frequencies. Every collection always
// contributes terms.
enum class IdfScope { kAllCollections, kLastCollection };

// Frozen term space shared by query and candidate vectors.
class Vocabulary {
 public:
  std::size_t size() const { return terms_.size(); }
  std::optional<TermId> id(std::string_view term) const;
  const std::string& term(TermId id) const { return terms_[id]; }

  std::size_t document_frequency(TermId id) const { return df_[id]; }
  std::size_t collection_frequency(TermId id) const { return cf_[id]; }
  std::size_t document_count() const { return documents_; }

  // ln(|D| / (1 + df)); negative for terms in nearly every document.
  double idf(TermId id) const { return idf_[id]; }

  friend Vocabulary build_vocabulary(std::span<const Collection* const> collections,
                                     TextView view, IdfScope scope);

 private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, TermId> index_;
  std::vector<std::size_t> df_;
  std::vector<std::size_t> cf_;
  std::vector<double> idf_;
  std::size_t documents_ = 0;
};

Vocabulary build_vocabulary(std::span<const Collection* const> collections, TextView view,
                            IdfScope scope = IdfScope::kAllCollections);

// Throws std::out_of_range for unknown terms.
double idf(std::string_view term, const Vocabulary& vocab);

// (term, weight) pairs in strictly increasing term order, no zero weights.
class SparseVector {
 public:
  using Entry = std::pair<TermId, double>;

  SparseVector() = default;
  // Sorts, merges duplicate terms by summation, and drops zero weights.
  static SparseVector from_entries(std::vector<Entry> entries);

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  double weight(TermId id) const;
  double dot(const SparseVector& other) const;
  double norm() const;
  SparseVector scaled(double factor) const;

 private:
  std::vector<Entry> entries_;
};

struct Vectorized {
  SparseVector vector;
  std::size_t oov = 0;    // tokens dropped as out-of-vocabulary
  std::size_t total = 0;  // tokens seen
};

Vectorized bow(std::span<const std::string> tokens, const Vocabulary& vocab);
SparseVector tfidf(std::span<const std::string> tokens, const Vocabulary& vocab);
// Reweights raw counts by idf.
SparseVector tfidf(const SparseVector& counts, const Vocabulary& vocab);

// 0 when either vector is empty.
double cosine(const SparseVector& u, const SparseVector& v);

}  // namespace allusion
