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
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "allusion/corpus.h"

namespace allusion {

// Intersection over union of the two term sets (duplicates ignored).
// Two empty inputs give 0.
double jaccard(std::span<const std::string> a, std::span<const std::string> b);

// Number of distinct terms the two bags share.
std::size_t shared_term_count(std::span<const std::string> a,
                              std::span<const std::string> b);

// Replaces the span with n tokens on each side of the anchor, clipped to the
// source document.
QueryInstance window_segment(const QueryInstance& query, const Collection& source,
                             std::size_t n);

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  // population standard deviation
};

struct InstanceStats {
  std::string query_id;
  double jaccard = 0.0;
  std::size_t query_length = 0;
  std::size_t reference_length = 0;
  std::size_t shared_terms = 0;
};

struct DatasetStats {
  TextView view = TextView::kToken;
  std::vector<InstanceStats> rows;
  MeanSd jaccard;
  MeanSd query_length;
  MeanSd reference_length;
  // shared distinct term count -> number of instances
  std::map<std::size_t, std::size_t> overlap_histogram;
};

MeanSd mean_sd(std::span<const double> values);

// Statistics over active queries only. Terms in `stopwords` are removed from
// both sides before comparison when the set is given.
DatasetStats dataset_stats(std::span<const QueryInstance> queries,
                           const Collection& source, const Collection& target,
                           TextView view,
                           const std::unordered_set<std::string>* stopwords = nullptr);

void write_stats_csv(std::ostream& out, const DatasetStats& stats);
void write_stats_summary_csv(std::ostream& out, std::span<const DatasetStats> stats);
void write_histogram_csv(std::ostream& out, const DatasetStats& stats);

}  // namespace allusion
