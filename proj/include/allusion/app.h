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
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "allusion/corpus.h"
#include "allusion/models.h"
#include "allusion/retrieval.h"
#include "allusion/simmatrix.h"
#include "allusion/vectorize.h"

namespace allusion {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr std::string_view kConfigEnv = "ALLUSION_CONFIG";

enum class Subcommand { kIngest, kStats, kAgreement, kSegment, kRetrieve, kEvaluate, kExplain };
std::string_view to_string(Subcommand command);
Subcommand parse_subcommand(std::string_view name);

// Query span source: the annotated span, or n tokens either side of the anchor.
struct Segmentation {
  std::size_t window = 0;  // 0 = manual

  bool manual() const { return window == 0; }
  std::string name() const;  // "manual" or "window3"
  static Segmentation parse(std::string_view text);  // "manual" | "window:N"
  friend bool operator==(const Segmentation&, const Segmentation&) = default;
};

std::vector<QueryInstance> segment(std::span<const QueryInstance> queries,
                                   const Collection& source, const Segmentation& mode);

// Raw configuration: flat key -> value. Path values are absolute.
using ConfigValues = std::map<std::string, std::string>;

// Every problem found while validating a configuration, reported at once.
class ConfigError : public ValidationError {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

// Flat "key = value" lines; '#' starts a comment. Relative paths resolve
// against `base`.
ConfigValues parse_config(std::istream& in, const std::filesystem::path& base,
                          const std::string& name = "<config>");
ConfigValues load_config(const std::filesystem::path& path);
bool is_path_key(std::string_view key);
const std::vector<std::string>& config_keys();

struct RunConfig {
  std::filesystem::path source;
  std::filesystem::path target;
  std::filesystem::path queries;
  std::filesystem::path annotations;
  std::filesystem::path embeddings;
  std::filesystem::path synonyms;
  std::filesystem::path stopwords;  // stats only
  std::filesystem::path output = "out";

  std::vector<ModelKind> models;
  std::vector<TextView> views{TextView::kLemma};
  unsigned sim_power = 5;
  std::optional<std::uint64_t> seed;
  std::vector<std::size_t> ks{10, 20};
  std::vector<Segmentation> segmentations{Segmentation{}};
  std::size_t top = 10;
  GroundCost ground_cost = GroundCost::kCosine;
  IdfScope idf_scope = IdfScope::kAllCollections;
  SynonymScoring synonym_scoring = SynonymScoring::kInverseIntersection;
  std::size_t bins = 10;
  bool lowercase = true;
  bool restrict_embeddings = true;
  Execution execution = Execution::kParallel;
  std::string query;      // explain: query instance id
  std::string candidate;  // explain: target document id

  ConfigValues values;  // canonical form, recorded in the manifest
};

// Typed, validated configuration for one subcommand. Throws ConfigError
// listing every problem.
RunConfig resolve_config(const ConfigValues& values, Subcommand command);

// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(std::string_view bytes);
// Hash of the canonical "key=value" lines, excluding the output directory.
std::string config_hash(const ConfigValues& values);

// Runs one subcommand, writing artifacts under config.output. Outputs are
// staged as "<name>.partial" and renamed only when the whole run succeeds.
void run(Subcommand command, const RunConfig& config, std::ostream& out, std::ostream& err);

// Full command line entry point; returns the process exit status
// (0 success, 1 runtime failure, 2 invalid configuration or usage).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace allusion
