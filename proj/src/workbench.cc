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

#include "allusion/workbench.h"

namespace allusion {

Workbench::Workbench(const Collection& source, const Collection& target,
                     const EmbeddingTable* embeddings, const SynonymLexicon* lexicon,
                     WorkbenchOptions options)
    : source_(source),
      target_(target),
      embeddings_(embeddings),
      lexicon_(lexicon),
      options_(options) {
  if (options_.sim_power == 0) throw ValidationError("sim-power must be >= 1");
}

const Vocabulary& Workbench::vocabulary(TextView view) {
  auto it = vocabularies_.find(view);
  if (it == vocabularies_.end()) {
    const Collection* both[] = {&source_, &target_};
    it = vocabularies_.emplace(view, build_vocabulary(both, view, options_.idf_scope)).first;
  }
  return it->second;
}

SimilarityPtr Workbench::similarity(ModelKind kind, TextView view) {
  if (!is_soft_cosine(kind)) return nullptr;
  const auto key = std::make_pair(kind, view);
  if (auto it = similarities_.find(key); it != similarities_.end()) return it->second;

  const Vocabulary& vocab = vocabulary(view);
  SimilarityPtr base;
  switch (kind) {
    case ModelKind::kScEmb:
      if (embeddings_ == nullptr) throw ValidationError("sc-emb needs an embedding table");
      base = embedding_matrix(*embeddings_, vocab);
      break;
    case ModelKind::kScWn:
      if (lexicon_ == nullptr) throw ValidationError("sc-wn needs a synonym lexicon");
      base = wordnet_matrix(*lexicon_, vocab, options_.synonym_scoring);
      break;
    default:
      if (!options_.seed) throw ValidationError("sc-rnd needs a seed");
      base = random_matrix(vocab.size(), *options_.seed);
      break;
  }
  auto boosted = power_boost(std::move(base), options_.sim_power);
  similarities_.emplace(key, boosted);
  return boosted;
}

std::unique_ptr<RetrievalModel> Workbench::model(ModelKind kind, TextView view) {
  ModelResources r;
  r.source = &source_;
  r.target = &target_;
  r.view = view;
  r.vocab = &vocabulary(view);
  r.embeddings = embeddings_;
  r.similarity = similarity(kind, view);
  r.ground_cost = options_.ground_cost;
  return std::make_unique<RetrievalModel>(kind, std::move(r));
}

std::vector<EvalReport> compare(Workbench& bench, std::span<const ModelKind> models,
                                std::span<const QueryInstance> queries,
                                std::span<const TextView> views,
                                std::span<const std::size_t> ks, Execution execution,
                                const std::string& segmentation) {
  std::vector<EvalReport> out;
  for (ModelKind kind : models) {
    for (TextView view : views) {
      const auto model = bench.model(kind, view);
      out.push_back(evaluate(*model, queries, ks, execution));
      out.back().segmentation = segmentation;
    }
  }
  return out;
}

}  // namespace allusion
