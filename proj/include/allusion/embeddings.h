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
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace allusion {

// Static word-vector table; every stored vector has length dim().
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return terms_.size(); }
  bool contains(std::string_view term) const;

  // Empty span when the term is not stored.
  std::span<const double> find(std::string_view term) const;
  // Throws std::out_of_range when the term is not stored.
  std::span<const double> at(std::string_view term) const;

  // Returns false (and keeps the existing vector) for a repeated term.
  bool add(std::string term, std::span<const double> vector);

  const std::vector<std::string>& terms() const { return terms_; }

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> terms_;
  std::vector<double> values_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct EmbeddingLoadOptions {
  std::optional<std::size_t> limit;
  // When set, only these terms are kept.
  const std::unordered_set<std::string>* restrict_to = nullptr;
  bool lowercase = true;
};

// Word-vector text format: "<count> <dim>" header, then "<term> v1 ... v_dim".
EmbeddingTable parse_embeddings(std::istream& in, const EmbeddingLoadOptions& options = {},
                                const std::string& name = "<embeddings>");
EmbeddingTable load_embeddings(const std::filesystem::path& path,
                               const EmbeddingLoadOptions& options = {});

using TermWeight = std::function<double(std::string_view)>;

struct SentenceEmbedding {
  std::vector<double> vector;
  bool zero = false;       // no in-table token, or weights summing to zero
  std::size_t oov = 0;
};

// Mean (or weighted mean when `weights` is set) of the embeddings of every
// in-table token occurrence.
SentenceEmbedding sentence_embedding(std::span<const std::string> tokens,
                                     const EmbeddingTable& table,
                                     const TermWeight& weights = {});

double dense_cosine(std::span<const double> u, std::span<const double> v);

// Cosine of the two word vectors; throws std::out_of_range for OOV terms.
double word_similarity(std::string_view a, std::string_view b, const EmbeddingTable& table);

}  // namespace allusion
