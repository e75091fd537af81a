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

#include "allusion/corpus_stats.h"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

namespace allusion {

namespace {

std::set<std::string> term_set(std::span<const std::string> bag) {
  return {bag.begin(), bag.end()};
}

std::vector<std::string> without(std::span<const std::string> bag,
                                 const std::unordered_set<std::string>* stopwords) {
  std::vector<std::string> out;
  for (const auto& t : bag) {
    if (stopwords == nullptr || !stopwords->contains(t)) out.push_back(t);
  }
  return out;
}

}  // namespace

std::size_t shared_term_count(std::span<const std::string> a,
                              std::span<const std::string> b) {
  auto sa = term_set(a);
  auto sb = term_set(b);
  std::size_t shared = 0;
  for (const auto& t : sa) shared += sb.count(t);
  return shared;
}

double jaccard(std::span<const std::string> a, std::span<const std::string> b) {
  auto sa = term_set(a);
  auto sb = term_set(b);
  std::size_t shared = 0;
  for (const auto& t : sa) shared += sb.count(t);
  std::size_t united = sa.size() + sb.size() - shared;
  return united == 0 ? 0.0 : static_cast<double>(shared) / static_cast<double>(united);
}

QueryInstance window_segment(const QueryInstance& query, const Collection& source,
                             std::size_t n) {
  if (n == 0) throw ValidationError("window size must be positive");
  const std::size_t length = source.at(query.source_doc).size();
  QueryInstance out = query;
  out.span.start = query.anchor.start > n ? query.anchor.start - n : 0;
  out.span.end = std::min(length, query.anchor.end + n);
  return out;
}

MeanSd mean_sd(std::span<const double> values) {
  MeanSd out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.sd = std::sqrt(ss / static_cast<double>(values.size()));
  return out;
}

DatasetStats dataset_stats(std::span<const QueryInstance> queries,
                           const Collection& source, const Collection& target,
                           TextView view,
                           const std::unordered_set<std::string>* stopwords) {
  DatasetStats stats;
  stats.view = view;
  std::vector<double> jac, qlen, rlen;
  for (const QueryInstance& q : queries) {
    if (q.discarded) continue;
    auto query = without(query_text(q, source, view), stopwords);
    auto ref = without(target.at(q.relevant_doc).text(view), stopwords);
    InstanceStats row;
    row.query_id = q.id;
    row.jaccard = jaccard(query, ref);
    row.query_length = query.size();
    row.reference_length = ref.size();
    row.shared_terms = shared_term_count(query, ref);
    jac.push_back(row.jaccard);
    qlen.push_back(static_cast<double>(row.query_length));
    rlen.push_back(static_cast<double>(row.reference_length));
    ++stats.overlap_histogram[row.shared_terms];
    stats.rows.push_back(std::move(row));
  }
  stats.jaccard = mean_sd(jac);
  stats.query_length = mean_sd(qlen);
  stats.reference_length = mean_sd(rlen);
  return stats;
}

void write_stats_csv(std::ostream& out, const DatasetStats& stats) {
  out << "query_id,view,jaccard,query_length,reference_length,shared_terms\n";
  auto old_precision = out.precision(10);
  for (const auto& row : stats.rows) {
    out << row.query_id << ',' << to_string(stats.view) << ',' << row.jaccard << ','
        << row.query_length << ',' << row.reference_length << ',' << row.shared_terms
        << '\n';
  }
  out.precision(old_precision);
}

void write_stats_summary_csv(std::ostream& out, std::span<const DatasetStats> stats) {
  out << "view,instances,jaccard_mean,jaccard_sd,query_length_mean,query_length_sd,"
         "reference_length_mean,reference_length_sd\n";
  auto old_precision = out.precision(10);
  for (const auto& s : stats) {
    out << to_string(s.view) << ',' << s.rows.size() << ',' << s.jaccard.mean << ','
        << s.jaccard.sd << ',' << s.query_length.mean << ',' << s.query_length.sd << ','
        << s.reference_length.mean << ',' << s.reference_length.sd << '\n';
  }
  out.precision(old_precision);
}

void write_histogram_csv(std::ostream& out, const DatasetStats& stats) {
  out << "bin,count\n";
  for (const auto& [bin, count] : stats.overlap_histogram) {
    out << bin << ',' << count << '\n';
  }
}

}  // namespace allusion
