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

#include "allusion/agreement.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <unordered_map>

namespace allusion {

std::size_t lcs(const Interval& s, const Interval& t) {
  const std::size_t lo = std::max(s.start, t.start);
  const std::size_t hi = std::min(s.end, t.end);
  return hi > lo ? hi - lo : 0;
}

Overlap overlap(const Interval& s, const Interval& t) {
  if (s.empty() || t.empty()) throw ValidationError("overlap of an empty span");
  Overlap out;
  out.agreement = lcs(s, t);
  out.disagreement = s.length() + t.length() - 2 * out.agreement;
  out.value = static_cast<double>(out.agreement) /
              static_cast<double>(out.agreement + out.disagreement);
  return out;
}

namespace {

struct Panel {
  std::vector<std::string> items;  // first-appearance order
  std::vector<std::string> annotators;
  // item -> annotator -> span
  std::unordered_map<std::string, std::map<std::string, Interval>> spans;
};

Panel build_panel(std::span<const SpanAnnotation> annotations) {
  if (annotations.empty()) throw ValidationError("no annotations");
  Panel panel;
  std::set<std::string> annotators;
  for (const auto& a : annotations) {
    if (a.span.empty()) {
      throw ValidationError("item '" + a.item_id + "', annotator '" + a.annotator_id +
                            "': empty span");
    }
    auto [it, fresh] = panel.spans.try_emplace(a.item_id);
    if (fresh) panel.items.push_back(a.item_id);
    if (!it->second.emplace(a.annotator_id, a.span).second) {
      throw ValidationError("item '" + a.item_id + "' annotated twice by '" +
                            a.annotator_id + "'");
    }
    annotators.insert(a.annotator_id);
  }
  panel.annotators.assign(annotators.begin(), annotators.end());
  if (panel.annotators.size() < 2) {
    throw ValidationError("agreement needs at least 2 annotators");
  }
  std::string incomplete;
  for (const auto& item : panel.items) {
    if (panel.spans[item].size() != panel.annotators.size()) {
      if (!incomplete.empty()) incomplete += ", ";
      incomplete += item;
    }
  }
  if (!incomplete.empty()) {
    throw ValidationError("items missing an annotator: " + incomplete);
  }
  return panel;
}

}  // namespace

std::vector<PairOverlap> pairwise_overlaps(std::span<const SpanAnnotation> annotations) {
  const Panel panel = build_panel(annotations);
  const std::size_t k = panel.annotators.size();
  std::vector<PairOverlap> pairs;
  pairs.reserve(panel.items.size() * k * (k - 1) / 2);
  for (const auto& item : panel.items) {
    const auto& spans = panel.spans.at(item);
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = a + 1; b < k; ++b) {
        const auto& name_a = panel.annotators[a];
        const auto& name_b = panel.annotators[b];
        pairs.push_back({item, name_a, name_b, overlap(spans.at(name_a), spans.at(name_b))});
      }
    }
  }
  return pairs;
}

namespace {

ExpectedOverlap pool(std::span<const PairOverlap> pairs) {
  ExpectedOverlap out;
  out.pairs = pairs.size();
  double a = 0.0, d = 0.0;
  for (const auto& p : pairs) {
    a += static_cast<double>(p.overlap.agreement);
    d += static_cast<double>(p.overlap.disagreement);
  }
  out.mean_agreement = a / static_cast<double>(pairs.size());
  out.mean_disagreement = d / static_cast<double>(pairs.size());
  out.value = out.mean_agreement / (out.mean_agreement + out.mean_disagreement);
  return out;
}

}  // namespace

ExpectedOverlap expected_overlap(std::span<const SpanAnnotation> annotations) {
  return pool(pairwise_overlaps(annotations));
}

AgreementReport kappa(std::span<const SpanAnnotation> annotations) {
  AgreementReport report;
  report.pairs = pairwise_overlaps(annotations);
  const ExpectedOverlap expected = pool(report.pairs);

  std::set<std::string> items, annotators;
  double observed = 0.0;
  for (const auto& p : report.pairs) {
    observed += p.overlap.value;
    if (p.overlap.disagreement == 0) ++report.perfect_pairs;
    items.insert(p.item_id);
    annotators.insert(p.annotator_a);
    annotators.insert(p.annotator_b);
  }
  const auto n_pairs = static_cast<double>(report.pairs.size());
  report.observed_overlap = observed / n_pairs;
  report.expected_overlap = expected.value;
  report.mean_agreement = expected.mean_agreement;
  report.mean_disagreement = expected.mean_disagreement;
  report.items = items.size();
  report.annotators = annotators.size();
  report.perfect_fraction = static_cast<double>(report.perfect_pairs) / n_pairs;
  if (expected.mean_disagreement == 0.0) {
    throw DegenerateAgreementError(
        "expected overlap is 1 (all annotators agree everywhere); kappa undefined");
  }
  report.kappa = (report.observed_overlap - report.expected_overlap) /
                 (1.0 - report.expected_overlap);
  return report;
}

OverlapHistogram overlap_histogram(std::span<const SpanAnnotation> annotations,
                                   std::size_t bins) {
  if (bins == 0) throw ValidationError("histogram needs at least one bin");
  const auto pairs = pairwise_overlaps(annotations);
  OverlapHistogram out;
  out.counts.assign(bins, 0);
  for (std::size_t i = 0; i < bins; ++i) {
    out.upper_edges.push_back(static_cast<double>(i + 1) / static_cast<double>(bins));
  }
  std::size_t exact_one = 0;
  for (const auto& p : pairs) {
    const double scaled = p.overlap.value * static_cast<double>(bins);
    auto bin = static_cast<long long>(std::ceil(scaled - 1e-9)) - 1;
    bin = std::clamp<long long>(bin, 0, static_cast<long long>(bins) - 1);
    ++out.counts[static_cast<std::size_t>(bin)];
    if (p.overlap.disagreement == 0) ++exact_one;
  }
  const auto total = static_cast<double>(pairs.size());
  std::size_t running = 0;
  for (std::size_t c : out.counts) {
    running += c;
    out.cumulative.push_back(static_cast<double>(running) / total);
  }
  out.exact_one_fraction = static_cast<double>(exact_one) / total;
  return out;
}

std::vector<SpanAnnotation> parse_annotations(std::istream& in, const std::string& name) {
  std::vector<SpanAnnotation> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(name, line, std::string("malformed record: ") + e.what());
    }
    try {
      SpanAnnotation a;
      a.item_id = record.at("item_id").get<std::string>();
      a.annotator_id = record.at("annotator_id").get<std::string>();
      const auto start = record.at("span_start").get<long long>();
      const auto end = record.at("span_end").get<long long>();
      if (start < 0 || end < 0) throw ParseError(name, line, "negative offset");
      a.span = {static_cast<std::size_t>(start), static_cast<std::size_t>(end)};
      if (a.span.empty()) {
        throw ValidationError(name + ":" + std::to_string(line) + ": empty span");
      }
      out.push_back(std::move(a));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(name, line, std::string("bad annotation record: ") + e.what());
    }
  }
  return out;
}

std::vector<SpanAnnotation> load_annotations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_annotations(in, path.filename().string());
}

nlohmann::json to_json(const AgreementReport& report, bool include_pairs) {
  nlohmann::json out = {
      {"observed_overlap", report.observed_overlap},
      {"expected_overlap", report.expected_overlap},
      {"kappa", report.kappa},
      {"mean_agreement", report.mean_agreement},
      {"mean_disagreement", report.mean_disagreement},
      {"items", report.items},
      {"annotators", report.annotators},
      {"pair_count", report.pairs.size()},
      {"perfect_pairs", report.perfect_pairs},
      {"perfect_fraction", report.perfect_fraction},
  };
  if (include_pairs) {
    auto& pairs = out["pairs"] = nlohmann::json::array();
    for (const auto& p : report.pairs) {
      pairs.push_back({{"item_id", p.item_id},
                       {"annotator_a", p.annotator_a},
                       {"annotator_b", p.annotator_b},
                       {"agreement", p.overlap.agreement},
                       {"disagreement", p.overlap.disagreement},
                       {"overlap", p.overlap.value}});
    }
  }
  return out;
}

void write_histogram_csv(std::ostream& out, const OverlapHistogram& histogram) {
  out << "bin,count,cumulative\n";
  auto old_precision = out.precision(10);
  for (std::size_t i = 0; i < histogram.counts.size(); ++i) {
    out << histogram.upper_edges[i] << ',' << histogram.counts[i] << ','
        << histogram.cumulative[i] << '\n';
  }
  out.precision(old_precision);
}

}  // namespace allusion
