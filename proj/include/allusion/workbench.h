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

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "allusion/corpus.h"
#include "allusion/embeddings.h"
#include "allusion/eval.h"
#include "allusion/models.h"
#include "allusion/retrieval.h"
#include "allusion/simmatrix.h"
#include "allusion/vectorize.h"

namespace allusion {

struct WorkbenchOptions {
  unsigned sim_power = 5;
  std::optional<std::uint64_t> seed;  // required for sc-rnd
  GroundCost ground_cost = GroundCost::kCosine;
  IdfScope idf_scope = IdfScope::kAllCollections;
  SynonymScoring synonym_scoring = SynonymScoring::kInverseIntersection;
};

// Owns the per-view vocabularies and similarity matrices for one
// (source, target) pair and builds configured models on demand. Not
// thread-safe; the models it returns are.
class Workbench {
 public:
  Workbench(const Collection& source, const Collection& target,
            const EmbeddingTable* embeddings = nullptr, const SynonymLexicon* lexicon = nullptr,
            WorkbenchOptions options = {});

  const Collection& source() const { return source_; }
  const Collection& target() const { return target_; }
  const WorkbenchOptions& options() const { return options_; }

  const Vocabulary& vocabulary(TextView view);
  // Power-boosted term similarity backing a soft cosine model.
  SimilarityPtr similarity(ModelKind kind, TextView view);
  std::unique_ptr<RetrievalModel> model(ModelKind kind, TextView view);

 private:
  const Collection& source_;
  const Collection& target_;
  const EmbeddingTable* embeddings_;
  const SynonymLexicon* lexicon_;
  WorkbenchOptions options_;
  std::map<TextView, Vocabulary> vocabularies_;
  std::map<std::pair<ModelKind, TextView>, SimilarityPtr> similarities_;
};

// One report per (model, view), models outermost, in the given order.
std::vector<EvalReport> compare(Workbench& bench, std::span<const ModelKind> models,
                                std::span<const QueryInstance> queries,
                                std::span<const TextView> views,
                                std::span<const std::size_t> ks,
                                Execution execution = Execution::kParallel,
                                const std::string& segmentation = "manual");

}  // namespace allusion
