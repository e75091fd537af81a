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
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace allusion {

// Raised when an input file cannot be parsed. Carries the 1-based line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Raised when well-formed input violates a data invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TextView { kToken, kLemma };

std::string_view to_string(TextView view);
TextView parse_text_view(std::string_view name);

// Half-open, zero-based token interval [start, end).
struct Interval {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end > start ? end - start : 0; }
  bool empty() const { return end <= start; }
  bool contains(const Interval& other) const {
    return start <= other.start && other.end <= end;
  }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct Document {
  std::string id;
  std::vector<std::string> tokens;
  std::vector<std::string> lemmas;

  const std::vector<std::string>& text(TextView view) const {
    return view == TextView::kToken ? tokens : lemmas;
  }
  std::size_t size() const { return tokens.size(); }
};

// An immutable, validated sequence of documents with an id index.
class Collection {
 public:
  Collection() = default;
  // Throws ValidationError on duplicate ids or malformed documents.
  Collection(std::string name, std::vector<Document> documents);

  const std::string& name() const { return name_; }
  const std::vector<Document>& documents() const { return documents_; }
  std::size_t size() const { return documents_.size(); }
  bool empty() const { return documents_.empty(); }
  const Document& operator[](std::size_t i) const { return documents_[i]; }

  std::optional<std::size_t> index_of(std::string_view id) const;
  const Document* find(std::string_view id) const;
  // Throws ValidationError when the id is unknown.
  const Document& at(std::string_view id) const;

  auto begin() const { return documents_.begin(); }
  auto end() const { return documents_.end(); }

 private:
  std::string name_;
  std::vector<Document> documents_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct QueryInstance {
  std::string id;
  std::string source_doc;
  Interval anchor;
  Interval span;
  std::string relevant_doc;
  bool discarded = false;
};

struct LoadOptions {
  // Locale-independent lowercasing of tokens and lemmas.
  bool lowercase = true;
};

// Lowercases ASCII and the Latin-1 / Latin Extended-A uppercase letters.
std::string normalize_term(std::string_view term);

Collection parse_collection(std::istream& in, std::string name,
                            const LoadOptions& options = {});
Collection load_collection(const std::filesystem::path& path,
                           const LoadOptions& options = {});
void write_collection(std::ostream& out, const Collection& collection);

std::vector<QueryInstance> parse_queries(std::istream& in,
                                         const Collection& source,
                                         const Collection& target,
                                         const std::string& name = "<queries>");
std::vector<QueryInstance> load_queries(const std::filesystem::path& path,
                                        const Collection& source,
                                        const Collection& target);
void write_queries(std::ostream& out, std::span<const QueryInstance> queries);

// Checks every QueryInstance invariant against the two collections.
void validate_query(const QueryInstance& query, const Collection& source,
                    const Collection& target);

std::vector<QueryInstance> active_queries(std::span<const QueryInstance> queries);

// The token or lemma subsequence covered by the query span.
std::vector<std::string> query_text(const QueryInstance& query,
                                    const Collection& source, TextView view);

}  // namespace allusion
