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

#include "allusion/corpus.h"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace allusion {

using nlohmann::json;

ParseError::ParseError(const std::string& source, std::size_t line,
                       const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + what),
      line_(line) {}

std::string_view to_string(TextView view) {
  return view == TextView::kToken ? "token" : "lemma";
}

TextView parse_text_view(std::string_view name) {
  if (name == "token") return TextView::kToken;
  if (name == "lemma") return TextView::kLemma;
  throw ValidationError("unknown view '" + std::string(name) +
                        "' (valid: token, lemma)");
}

Collection::Collection(std::string name, std::vector<Document> documents)
    : name_(std::move(name)), documents_(std::move(documents)) {
  index_.reserve(documents_.size());
  for (std::size_t i = 0; i < documents_.size(); ++i) {
    const Document& doc = documents_[i];
    if (doc.tokens.empty()) {
      throw ValidationError(name_ + ": document '" + doc.id + "' is empty");
    }
    if (doc.tokens.size() != doc.lemmas.size()) {
      throw ValidationError(name_ + ": document '" + doc.id + "' has " +
                            std::to_string(doc.tokens.size()) + " tokens but " +
                            std::to_string(doc.lemmas.size()) + " lemmas");
    }
    if (!index_.emplace(doc.id, i).second) {
      throw ValidationError(name_ + ": duplicate document id '" + doc.id +
                            "' at position " + std::to_string(i));
    }
  }
}

std::optional<std::size_t> Collection::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const Document* Collection::find(std::string_view id) const {
  auto i = index_of(id);
  return i ? &documents_[*i] : nullptr;
}

const Document& Collection::at(std::string_view id) const {
  const Document* doc = find(id);
  if (doc == nullptr) {
    throw ValidationError(name_ + ": unknown document id '" + std::string(id) + "'");
  }
  return *doc;
}

std::string normalize_term(std::string_view term) {
  std::string out;
  out.reserve(term.size());
  for (std::size_t i = 0; i < term.size(); ++i) {
    auto c = static_cast<unsigned char>(term[i]);
    if (c >= 'A' && c <= 'Z') {
      out.push_back(static_cast<char>(c + ('a' - 'A')));
      continue;
    }
    // Two-byte UTF-8 sequences: U+00C0..U+00DE (minus U+00D7) map to +0x20,
    // U+0100..U+017F alternate upper/lower on even/odd code points.
    if ((c == 0xC3 || c == 0xC4 || c == 0xC5) && i + 1 < term.size()) {
      auto c2 = static_cast<unsigned char>(term[i + 1]);
      unsigned cp = ((c & 0x1Fu) << 6) | (c2 & 0x3Fu);
      if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) {
        cp += 0x20;
      } else if (cp >= 0x100 && cp <= 0x17F && cp % 2 == 0 && cp != 0x130 &&
                 cp != 0x138) {
        cp += 1;
      }
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
      ++i;
      continue;
    }
    out.push_back(static_cast<char>(c));
  }
  return out;
}

namespace {

std::vector<std::string> string_array(const json& record, const char* field,
                                      const std::string& source, std::size_t line) {
  auto it = record.find(field);
  if (it == record.end() || !it->is_array()) {
    throw ParseError(source, line, std::string("missing string array '") + field + "'");
  }
  std::vector<std::string> out;
  out.reserve(it->size());
  for (const auto& v : *it) {
    if (!v.is_string()) {
      throw ParseError(source, line, std::string("non-string entry in '") + field + "'");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::string string_field(const json& record, const char* field,
                         const std::string& source, std::size_t line) {
  auto it = record.find(field);
  if (it == record.end() || !it->is_string()) {
    throw ParseError(source, line, std::string("missing string field '") + field + "'");
  }
  return it->get<std::string>();
}

std::size_t offset_field(const json& record, const char* field,
                         const std::string& source, std::size_t line) {
  auto it = record.find(field);
  if (it == record.end() || !it->is_number_integer()) {
    throw ParseError(source, line, std::string("missing integer field '") + field + "'");
  }
  auto value = it->get<long long>();
  if (value < 0) {
    throw ParseError(source, line, std::string("negative offset '") + field + "'");
  }
  return static_cast<std::size_t>(value);
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

json parse_line(const std::string& text, const std::string& source, std::size_t line) {
  json record;
  try {
    record = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source, line, std::string("malformed record: ") + e.what());
  }
  if (!record.is_object()) throw ParseError(source, line, "record is not an object");
  return record;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

}  // namespace

Collection parse_collection(std::istream& in, std::string name,
                            const LoadOptions& options) {
  std::vector<Document> docs;
  std::unordered_map<std::string, std::size_t> seen;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (blank(text)) continue;
    json record = parse_line(text, name, line);
    Document doc;
    doc.id = string_field(record, "id", name, line);
    doc.tokens = string_array(record, "tokens", name, line);
    doc.lemmas = string_array(record, "lemmas", name, line);
    if (auto [it, fresh] = seen.emplace(doc.id, line); !fresh) {
      throw ValidationError(name + ":" + std::to_string(line) + ": duplicate id '" +
                            doc.id + "' (first seen on line " +
                            std::to_string(it->second) + ")");
    }
    if (doc.tokens.size() != doc.lemmas.size()) {
      throw ValidationError(name + ":" + std::to_string(line) + ": document '" +
                            doc.id + "' has " + std::to_string(doc.tokens.size()) +
                            " tokens but " + std::to_string(doc.lemmas.size()) +
                            " lemmas");
    }
    if (options.lowercase) {
      for (auto& t : doc.tokens) t = normalize_term(t);
      for (auto& l : doc.lemmas) l = normalize_term(l);
    }
    docs.push_back(std::move(doc));
  }
  return Collection(std::move(name), std::move(docs));
}

Collection load_collection(const std::filesystem::path& path, const LoadOptions& options) {
  auto in = open_input(path);
  return parse_collection(in, path.filename().string(), options);
}

void write_collection(std::ostream& out, const Collection& collection) {
  for (const Document& doc : collection) {
    json record = {{"id", doc.id}, {"tokens", doc.tokens}, {"lemmas", doc.lemmas}};
    out << record.dump() << '\n';
  }
}

void validate_query(const QueryInstance& q, const Collection& source,
                    const Collection& target) {
  const Document* doc = source.find(q.source_doc);
  if (doc == nullptr) {
    throw ValidationError("query '" + q.id + "': unknown source document '" +
                          q.source_doc + "'");
  }
  auto describe = [](const Interval& iv) {
    return "[" + std::to_string(iv.start) + "," + std::to_string(iv.end) + ")";
  };
  if (q.span.empty()) {
    throw ValidationError("query '" + q.id + "': empty span " + describe(q.span));
  }
  if (q.anchor.empty()) {
    throw ValidationError("query '" + q.id + "': empty anchor " + describe(q.anchor));
  }
  if (q.span.end > doc->size()) {
    throw ValidationError("query '" + q.id + "': span " + describe(q.span) +
                          " outside document of length " + std::to_string(doc->size()));
  }
  if (!q.span.contains(q.anchor)) {
    throw ValidationError("query '" + q.id + "': anchor " + describe(q.anchor) +
                          " not inside span " + describe(q.span));
  }
  if (target.find(q.relevant_doc) == nullptr) {
    throw ValidationError("query '" + q.id + "': unknown relevant document '" +
                          q.relevant_doc + "'");
  }
}

std::vector<QueryInstance> parse_queries(std::istream& in, const Collection& source,
                                         const Collection& target,
                                         const std::string& name) {
  std::vector<QueryInstance> queries;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (blank(text)) continue;
    json record = parse_line(text, name, line);
    QueryInstance q;
    q.id = string_field(record, "id", name, line);
    q.source_doc = string_field(record, "source_doc", name, line);
    q.anchor = {offset_field(record, "anchor_start", name, line),
                offset_field(record, "anchor_end", name, line)};
    q.span = {offset_field(record, "span_start", name, line),
              offset_field(record, "span_end", name, line)};
    q.relevant_doc = string_field(record, "relevant_doc", name, line);
    if (auto it = record.find("discarded"); it != record.end()) {
      if (!it->is_boolean()) throw ParseError(name, line, "'discarded' must be boolean");
      q.discarded = it->get<bool>();
    }
    try {
      validate_query(q, source, target);
    } catch (const ValidationError& e) {
      throw ValidationError(name + ":" + std::to_string(line) + ": " + e.what());
    }
    queries.push_back(std::move(q));
  }
  return queries;
}

std::vector<QueryInstance> load_queries(const std::filesystem::path& path,
                                        const Collection& source,
                                        const Collection& target) {
  auto in = open_input(path);
  return parse_queries(in, source, target, path.filename().string());
}

void write_queries(std::ostream& out, std::span<const QueryInstance> queries) {
  for (const QueryInstance& q : queries) {
    json record = {{"id", q.id},
                   {"source_doc", q.source_doc},
                   {"anchor_start", q.anchor.start},
                   {"anchor_end", q.anchor.end},
                   {"span_start", q.span.start},
                   {"span_end", q.span.end},
                   {"relevant_doc", q.relevant_doc}};
    if (q.discarded) record["discarded"] = true;
    out << record.dump() << '\n';
  }
}

std::vector<QueryInstance> active_queries(std::span<const QueryInstance> queries) {
  std::vector<QueryInstance> out;
  for (const auto& q : queries) {
    if (!q.discarded) out.push_back(q);
  }
  return out;
}

std::vector<std::string> query_text(const QueryInstance& query, const Collection& source,
                                    TextView view) {
  const auto& seq = source.at(query.source_doc).text(view);
  if (query.span.end > seq.size() || query.span.empty()) {
    throw ValidationError("query '" + query.id + "': span outside source document");
  }
  return {seq.begin() + static_cast<std::ptrdiff_t>(query.span.start),
          seq.begin() + static_cast<std::ptrdiff_t>(query.span.end)};
}

}  // namespace allusion
