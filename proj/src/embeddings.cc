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

#include "allusion/embeddings.h"

#include <charconv>
#include <cstdlib>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "allusion/corpus.h"

namespace allusion {

bool EmbeddingTable::contains(std::string_view term) const {
  return index_.contains(std::string(term));
}

std::span<const double> EmbeddingTable::find(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return {};
  return {values_.data() + it->second * dim_, dim_};
}

std::span<const double> EmbeddingTable::at(std::string_view term) const {
  auto v = find(term);
  if (v.empty()) throw std::out_of_range("no embedding for '" + std::string(term) + "'");
  return v;
}

bool EmbeddingTable::add(std::string term, std::span<const double> vector) {
  if (vector.size() != dim_) {
    throw std::invalid_argument("embedding for '" + term + "' has length " +
                                std::to_string(vector.size()) + ", expected " +
                                std::to_string(dim_));
  }
  auto [it, fresh] = index_.try_emplace(term, terms_.size());
  if (!fresh) return false;
  terms_.push_back(std::move(term));
  values_.insert(values_.end(), vector.begin(), vector.end());
  return true;
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_size(std::string_view s, std::size_t& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

}  // namespace

EmbeddingTable parse_embeddings(std::istream& in, const EmbeddingLoadOptions& options,
                                const std::string& name) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t count = 0, dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (fields.size() != 2 || !parse_size(fields[0], count) || !parse_size(fields[1], dim) ||
        dim == 0) {
      throw ParseError(name, line_no, "missing '<count> <dim>' header");
    }
    break;
  }
  if (dim == 0) throw ParseError(name, line_no, "missing '<count> <dim>' header");

  EmbeddingTable table(dim);
  std::vector<double> values(dim);
  while (std::getline(in, line)) {
    ++line_no;
    if (options.limit && table.size() >= *options.limit) break;
    auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (fields.size() != dim + 1) {
      throw ParseError(name, line_no,
                       "expected " + std::to_string(dim) + " values, found " +
                           std::to_string(fields.size() - 1));
    }
    std::string term =
        options.lowercase ? normalize_term(fields[0]) : std::string(fields[0]);
    if (options.restrict_to != nullptr && !options.restrict_to->contains(term)) continue;
    for (std::size_t d = 0; d < dim; ++d) {
      // std::from_chars for double is unavailable on older libstdc++.
      const std::string field(fields[d + 1]);
      char* end = nullptr;
      values[d] = std::strtod(field.c_str(), &end);
      if (end != field.c_str() + field.size() || !std::isfinite(values[d])) {
        throw ParseError(name, line_no, "bad number '" + field + "'");
      }
    }
    table.add(std::move(term), values);
  }
  return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path,
                               const EmbeddingLoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_embeddings(in, options, path.filename().string());
}

SentenceEmbedding sentence_embedding(std::span<const std::string> tokens,
                                     const EmbeddingTable& table, const TermWeight& weights) {
  SentenceEmbedding out;
  out.vector.assign(table.dim(), 0.0);
  double total = 0.0;
  for (const auto& t : tokens) {
    auto v = table.find(t);
    if (v.empty()) {
      ++out.oov;
      continue;
    }
    const double w = weights ? weights(t) : 1.0;
    total += w;
    for (std::size_t d = 0; d < v.size(); ++d) out.vector[d] += w * v[d];
  }
  if (total == 0.0) {
    out.vector.assign(table.dim(), 0.0);
    out.zero = true;
    return out;
  }
  for (double& x : out.vector) x /= total;
  return out;
}

double dense_cosine(std::span<const double> u, std::span<const double> v) {
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t d = 0; d < u.size(); ++d) {
    dot += u[d] * v[d];
    uu += u[d] * u[d];
    vv += v[d] * v[d];
  }
  const double denom = std::sqrt(uu) * std::sqrt(vv);
  return denom > 0.0 ? dot / denom : 0.0;
}

double word_similarity(std::string_view a, std::string_view b, const EmbeddingTable& table) {
  return dense_cosine(table.at(a), table.at(b));
}

}  // namespace allusion
