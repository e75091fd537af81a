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

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "allusion/agreement.h"
#include "oracles/agreement_oracle.h"

namespace allusion {
namespace {

SpanAnnotation ann(const std::string& item, const std::string& who, std::size_t s,
                   std::size_t e) {
  return SpanAnnotation{item, who, Interval{s, e}};
}

TEST(Lcs, Examples) {
  EXPECT_EQ(lcs({2, 6}, {4, 9}), 2u);
  EXPECT_EQ(lcs({3, 10}, {3, 10}), 7u);
  EXPECT_EQ(lcs({0, 2}, {5, 9}), 0u);
  EXPECT_EQ(lcs({0, 2}, {2, 4}), 0u);
}

TEST(Overlap, Examples) {
  const Overlap o = overlap({2, 6}, {4, 9});
  EXPECT_EQ(o.agreement, 2u);
  EXPECT_EQ(o.disagreement, 5u);
  EXPECT_DOUBLE_EQ(o.value, 2.0 / 7.0);
  const Overlap same = overlap({1, 4}, {1, 4});
  EXPECT_EQ(same.value, 1.0);
  EXPECT_EQ(same.disagreement, 0u);
  EXPECT_EQ(overlap({0, 2}, {5, 9}).value, 0.0);
  EXPECT_THROW(overlap({3, 3}, {1, 4}), ValidationError);
}

TEST(Overlap, IdentitiesOnRandomSpans) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> pos(0, 40), len(1, 15);
  for (int i = 0; i < 10000; ++i) {
    const std::size_t a = pos(rng), b = pos(rng);
    const Interval s{a, a + len(rng)}, t{b, b + len(rng)};
    const Overlap st = overlap(s, t), ts = overlap(t, s);
    EXPECT_EQ(st.value, ts.value);
    const double lc = static_cast<double>(lcs(s, t));
    const double eq1 = lc / (static_cast<double>(s.length() + t.length()) - lc);
    const double eq2 = static_cast<double>(st.agreement) /
                       static_cast<double>(st.agreement + st.disagreement);
    EXPECT_NEAR(st.value, eq1, 1e-12);
    EXPECT_NEAR(st.value, eq2, 1e-12);
    EXPECT_GE(st.value, 0.0);
    EXPECT_LE(st.value, 1.0);
    EXPECT_EQ(st.value == 1.0, s == t);
  }
}

TEST(ExpectedOverlap, HandAggregation) {
  // (A, D) = (2, 5) and (4, 0)
  const std::vector<SpanAnnotation> anns = {ann("i1", "x", 2, 6), ann("i1", "y", 4, 9),
                                            ann("i2", "x", 0, 4), ann("i2", "y", 0, 4)};
  const ExpectedOverlap e = expected_overlap(anns);
  EXPECT_EQ(e.pairs, 2u);
  EXPECT_DOUBLE_EQ(e.mean_agreement, 3.0);
  EXPECT_DOUBLE_EQ(e.mean_disagreement, 2.5);
  EXPECT_DOUBLE_EQ(e.value, 6.0 / 11.0);
}

TEST(ExpectedOverlap, DisjointPairGivesZero) {
  const std::vector<SpanAnnotation> anns = {ann("i", "x", 0, 4), ann("i", "y", 4, 8)};
  const ExpectedOverlap e = expected_overlap(anns);
  EXPECT_EQ(e.mean_agreement, 0.0);
  EXPECT_EQ(e.mean_disagreement, 8.0);
  EXPECT_EQ(e.value, 0.0);
}

TEST(ExpectedOverlap, MissingAnnotatorListsItems) {
  const std::vector<SpanAnnotation> anns = {ann("i1", "x", 0, 2), ann("i1", "y", 0, 2),
                                            ann("i2", "x", 0, 2), ann("i3", "y", 0, 2)};
  try {
    expected_overlap(anns);
    FAIL();
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("i2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("i3"), std::string::npos) << msg;
  }
}

TEST(ExpectedOverlap, RejectsBadPanels) {
  EXPECT_THROW(expected_overlap({}), ValidationError);
  const std::vector<SpanAnnotation> single = {ann("i1", "x", 0, 2)};
  EXPECT_THROW(expected_overlap(single), ValidationError);
  const std::vector<SpanAnnotation> dup = {ann("i1", "x", 0, 2), ann("i1", "x", 1, 2),
                                           ann("i1", "y", 0, 2)};
  EXPECT_THROW(expected_overlap(dup), ValidationError);
}

TEST(Kappa, PerfectAgreementIsDegenerate) {
  const std::vector<SpanAnnotation> anns = {ann("i1", "x", 0, 3), ann("i1", "y", 0, 3),
                                            ann("i2", "x", 5, 6), ann("i2", "y", 5, 6)};
  EXPECT_THROW(kappa(anns), DegenerateAgreementError);
}

TEST(Kappa, ChanceLevelGivesZero) {
  // One item: O_o = O_e for a single pair.
  const std::vector<SpanAnnotation> anns = {ann("i", "x", 0, 4), ann("i", "y", 2, 7)};
  const AgreementReport r = kappa(anns);
  EXPECT_NEAR(r.kappa, 0.0, 1e-15);
}

TEST(Kappa, MatchesLiteralOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<SpanAnnotation> anns;
    std::vector<oracle::Span> spans;
    for (int item = 0; item < 5; ++item) {
      const std::size_t anchor = 5 + rng() % 10;
      for (const char* who : {"a", "b", "c"}) {
        const std::size_t s = anchor - rng() % 4, e = anchor + 1 + rng() % 4;
        anns.push_back(ann("i" + std::to_string(item), who, s, e));
        spans.push_back({"i" + std::to_string(item), who, s, e});
      }
    }
    const auto expected = oracle::agreement(spans);
    if (expected.expected == 1.0) continue;
    const AgreementReport r = kappa(anns);
    EXPECT_EQ(r.pairs.size(), 5u * 3u);
    EXPECT_NEAR(r.observed_overlap, expected.observed, 1e-12);
    EXPECT_NEAR(r.expected_overlap, expected.expected, 1e-12);
    EXPECT_NEAR(r.kappa, expected.kappa, 1e-12);
    EXPECT_DOUBLE_EQ(r.kappa, (r.observed_overlap - r.expected_overlap) /
                                  (1.0 - r.expected_overlap));
    EXPECT_LE(r.kappa, 1.0);
  }
}

TEST(Kappa, AnchorContainmentBoundsLcs) {
  std::mt19937_64 rng(9);
  std::vector<SpanAnnotation> anns;
  for (int item = 0; item < 200; ++item) {
    const std::size_t anchor = 10;
    for (const char* who : {"a", "b", "c", "d"}) {
      anns.push_back(ann(std::to_string(item), who, anchor - rng() % 6, anchor + 2 + rng() % 6));
    }
  }
  for (const auto& p : pairwise_overlaps(anns)) EXPECT_GE(p.overlap.agreement, 2u);
}

TEST(Kappa, IndependentRandomSpansNearZero) {
  std::mt19937_64 rng(21);
  std::vector<SpanAnnotation> anns;
  for (int item = 0; item < 10000; ++item) {
    const std::size_t anchor = 20;
    for (const char* who : {"a", "b", "c"}) {
      anns.push_back(ann(std::to_string(item), who, anchor - rng() % 8, anchor + 1 + rng() % 8));
    }
  }
  const AgreementReport r = kappa(anns);
  EXPECT_LT(std::abs(r.kappa), 0.1) << r.kappa;
  EXPECT_EQ(r.items, 10000u);
  EXPECT_EQ(r.annotators, 3u);
  EXPECT_EQ(r.pairs.size(), 30000u);
}

TEST(Histogram, Binning) {
  // pairs: (x,y) 0.5, (x,z) 0.5, (y,z) 1.0
  const std::vector<SpanAnnotation> anns = {ann("i", "x", 0, 2), ann("i", "y", 0, 1),
                                            ann("i", "z", 0, 1)};
  const auto h = overlap_histogram(anns, 2);
  EXPECT_EQ(h.counts, (std::vector<std::size_t>{2, 1}));
  EXPECT_DOUBLE_EQ(h.cumulative.back(), 1.0);
  EXPECT_NEAR(h.exact_one_fraction, 1.0 / 3.0, 1e-15);
}

TEST(Histogram, AllPerfect) {
  const std::vector<SpanAnnotation> anns = {ann("i", "x", 0, 2), ann("i", "y", 0, 2)};
  const auto h = overlap_histogram(anns, 10);
  EXPECT_EQ(h.counts.back(), 1u);
  EXPECT_EQ(h.cumulative[8], 0.0);
  EXPECT_EQ(h.cumulative[9], 1.0);
  EXPECT_THROW(overlap_histogram({}, 10), ValidationError);
}

TEST(AnnotationParse, ReadsRecords) {
  std::istringstream in(
      R"({"item_id":"i1","annotator_id":"a","span_start":1,"span_end":3})"
      "\n\n"
      R"({"item_id":"i1","annotator_id":"b","span_start":2,"span_end":3})"
      "\n");
  const auto anns = parse_annotations(in);
  ASSERT_EQ(anns.size(), 2u);
  EXPECT_EQ(anns[1].span, (Interval{2, 3}));
  std::istringstream bad(R"({"item_id":"i1","annotator_id":"a","span_start":3,"span_end":3})");
  EXPECT_THROW(parse_annotations(bad), std::runtime_error);
}

TEST(AgreementJson, HasReportFields) {
  const std::vector<SpanAnnotation> anns = {ann("i", "x", 0, 4), ann("i", "y", 2, 7),
                                            ann("j", "x", 1, 2), ann("j", "y", 1, 2)};
  const auto j = to_json(kappa(anns));
  for (const char* key : {"observed_overlap", "expected_overlap", "kappa", "items",
                          "annotators", "pairs"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_FALSE(to_json(kappa(anns), false).contains("pairs"));
}

}  // namespace
}  // namespace allusion
