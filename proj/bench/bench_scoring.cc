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

// Serial reference loops against the OpenMP candidate loop, per model, over
// every active toy query in the lemma view.

#include <benchmark/benchmark.h>

#include <memory>

#include "allusion/workbench.h"
#include "toy_fixture.h"

namespace {

using namespace allusion;

struct Setup {
  Setup() : bench(toy().source, toy().target, &toy().embeddings, &toy().lexicon, options()) {
    for (const auto& q : active_queries(toy().queries)) {
      texts.push_back(query_text(q, toy().source, TextView::kLemma));
    }
  }

  static const testing::Toy& toy() { return testing::toy(); }
  static WorkbenchOptions options() {
    WorkbenchOptions o;
    o.seed = 1;
    return o;
  }

  Workbench bench;
  std::vector<std::vector<std::string>> texts;
};

Setup& setup() {
  static Setup s;
  return s;
}

void BM_Score(benchmark::State& state, ModelKind kind, Execution execution) {
  Setup& s = setup();
  const auto model = s.bench.model(kind, TextView::kLemma);
  for (auto _ : state) {
    for (const auto& text : s.texts) {
      auto scores = model->score_all(text, execution);
      benchmark::DoNotOptimize(scores.data());
    }
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(s.texts.size()) *
                          static_cast<int64_t>(s.bench.target().size()));
}

#define SCORING_PAIR(name, kind)                                                         \
  BENCHMARK_CAPTURE(BM_Score, name##_serial, kind, Execution::kSerial)                  \
      ->Unit(benchmark::kMillisecond);                                                   \
  BENCHMARK_CAPTURE(BM_Score, name##_parallel, kind, Execution::kParallel)              \
      ->Unit(benchmark::kMillisecond)

SCORING_PAIR(tfidf, ModelKind::kTfidf);
SCORING_PAIR(tesserae, ModelKind::kTesserae);
SCORING_PAIR(emb_tfidf, ModelKind::kEmbTfidf);
SCORING_PAIR(wmd, ModelKind::kWmd);
SCORING_PAIR(sc_emb, ModelKind::kScEmb);
SCORING_PAIR(sc_wn, ModelKind::kScWn);

}  // namespace

BENCHMARK_MAIN();
