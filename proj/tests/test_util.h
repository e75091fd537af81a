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

#include <sstream>
#include <string>
#include <vector>

#include "allusion/corpus.h"

namespace allusion::testing {

inline std::vector<std::string> words(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

// Lemmas default to the tokens.
inline Document doc(const std::string& id, const std::string& tokens,
                    const std::string& lemmas = "") {
  return Document{id, words(tokens), words(lemmas.empty() ? tokens : lemmas)};
}

inline QueryInstance query(const std::string& id, const std::string& source_doc,
                           Interval anchor, Interval span, const std::string& relevant,
                           bool discarded = false) {
  return QueryInstance{id, source_doc, anchor, span, relevant, discarded};
}

}  // namespace allusion::testing
