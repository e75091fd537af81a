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
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "allusion/corpus.h"

namespace allusion {

// Span-overlap agreement between annotators and its chance-corrected kappa.
//
// Two spans s and t agree on A = lcs(s, t) tokens and disagree on
// D = |s| + |t| - 2A tokens; their overlap is O = A / (A + D). Expected
// overlap pools A and D over every unordered annotator pair of every item,
// and kappa = (O_o - O_e) / (1 - O_e) where O_o is the mean pairwise overlap.

struct SpanAnnotation {
  std::string item_id;
  std::string annotator_id;
  Interval span;
};

// Raised when expected overlap is 1 and kappa is undefined.
class DegenerateAgreementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Longest common contiguous run of two intervals, i.e. their intersection.
std::size_t lcs(const Interval& s, const Interval& t);

struct Overlap {
  double value = 0.0;
  std::size_t agreement = 0;     // A
  std::size_t disagreement = 0;  // D
};

// Requires both spans non-empty.
Overlap overlap(const Interval& s, const Interval& t);

struct PairOverlap {
  std::string item_id;
  std::string annotator_a;
  std::string annotator_b;
  Overlap overlap;
};

struct ExpectedOverlap {
  double mean_agreement = 0.0;     // A_e
  double mean_disagreement = 0.0;  // D_e
  double value = 0.0;              // O_e
  std::size_t pairs = 0;
};

// Every item must carry exactly one annotation from each of k >= 2
// annotators. Pairs are formed within items, in item order of first
// appearance and lexicographic annotator order.
std::vector<PairOverlap> pairwise_overlaps(std::span<const SpanAnnotation> annotations);

ExpectedOverlap expected_overlap(std::span<const SpanAnnotation> annotations);

struct AgreementReport {
  double observed_overlap = 0.0;  // O_o
  double expected_overlap = 0.0;  // O_e
  double kappa = 0.0;
  double mean_agreement = 0.0;
  double mean_disagreement = 0.0;
  std::size_t items = 0;       // N
  std::size_t annotators = 0;  // k
  std::size_t perfect_pairs = 0;
  double perfect_fraction = 0.0;
  std::vector<PairOverlap> pairs;
};

// Throws DegenerateAgreementError when O_e == 1.
AgreementReport kappa(std::span<const SpanAnnotation> annotations);

struct OverlapHistogram {
  std::vector<double> upper_edges;  // right-closed bins over [0, 1]
  std::vector<std::size_t> counts;
  std::vector<double> cumulative;   // fraction of pairs with O <= upper edge
  double exact_one_fraction = 0.0;
};

// Bin i covers (i/bins, (i+1)/bins]; the first bin also holds O = 0.
OverlapHistogram overlap_histogram(std::span<const SpanAnnotation> annotations,
                                   std::size_t bins);

std::vector<SpanAnnotation> parse_annotations(std::istream& in,
                                              const std::string& name = "<annotations>");
std::vector<SpanAnnotation> load_annotations(const std::filesystem::path& path);

nlohmann::json to_json(const AgreementReport& report, bool include_pairs = true);
void write_histogram_csv(std::ostream& out, const OverlapHistogram& histogram);

}  // namespace allusion
