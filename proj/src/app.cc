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

#include "allusion/app.h"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <unordered_set>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "allusion/agreement.h"
#include "allusion/corpus_stats.h"
#include "allusion/embeddings.h"
#include "allusion/eval.h"
#include "allusion/workbench.h"

namespace fs = std::filesystem;

namespace allusion {

namespace {

constexpr std::pair<Subcommand, std::string_view> kSubcommands[] = {
    {Subcommand::kIngest, "ingest"},     {Subcommand::kStats, "stats"},
    {Subcommand::kAgreement, "agreement"}, {Subcommand::kSegment, "segment"},
    {Subcommand::kRetrieve, "retrieve"}, {Subcommand::kEvaluate, "evaluate"},
    {Subcommand::kExplain, "explain"},
};

const std::set<std::string_view> kPathKeys = {"source",     "target",   "queries",  "annotations",
                                              "embeddings", "synonyms", "stopwords", "output"};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto piece = trim(s.substr(start, comma == std::string_view::npos ? s.npos
                                                                             : comma - start));
    if (!piece.empty()) out.push_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::optional<bool> parse_bool(std::string_view s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  return std::nullopt;
}

std::string absolute_path(const fs::path& base, std::string_view value) {
  fs::path p(value);
  if (p.is_relative()) p = base / p;
  return fs::absolute(p).lexically_normal().string();
}

// Staged output files under one directory.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  std::ostream& open(const std::string& name) {
    for (const auto& [n, _] : files_) {
      if (n == name) throw std::logic_error("output '" + name + "' opened twice");
    }
    auto stream = std::make_unique<std::ofstream>(dir_ / (name + ".partial"), std::ios::binary);
    if (!*stream) throw std::runtime_error("cannot write " + (dir_ / name).string());
    files_.emplace_back(name, std::move(stream));
    return *files_.back().second;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [n, _] : files_) out.push_back(n);
    return out;
  }

  void commit() {
    for (auto& [name, stream] : files_) {
      stream->close();
      if (!*stream) throw std::runtime_error("failed writing " + (dir_ / name).string());
    }
    for (const auto& [name, _] : files_) {
      fs::rename(dir_ / (name + ".partial"), dir_ / name);
    }
  }

 private:
  fs::path dir_;
  std::vector<std::pair<std::string, std::unique_ptr<std::ofstream>>> files_;
};

std::string file_hash(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return fnv1a_hex(buf.str());
}

struct Inputs {
  Collection source;
  Collection target;
  std::vector<QueryInstance> queries;
  std::optional<EmbeddingTable> embeddings;
  std::optional<SynonymLexicon> lexicon;
};

Inputs load_inputs(const RunConfig& config, bool with_queries, bool with_models) {
  Inputs in;
  const LoadOptions options{config.lowercase};
  in.source = load_collection(config.source, options);
  in.target = load_collection(config.target, options);
  if (with_queries && !config.queries.empty()) {
    in.queries = load_queries(config.queries, in.source, in.target);
  }
  if (!with_models) return in;
  const bool need_embeddings = std::any_of(config.models.begin(), config.models.end(),
                                           [](ModelKind k) { return uses_embeddings(k); });
  if (need_embeddings) {
    std::unordered_set<std::string> terms;
    for (const Collection* c : {&in.source, &in.target}) {
      for (const Document& d : *c) {
        terms.insert(d.tokens.begin(), d.tokens.end());
        terms.insert(d.lemmas.begin(), d.lemmas.end());
      }
    }
    EmbeddingLoadOptions eo;
    eo.lowercase = config.lowercase;
    if (config.restrict_embeddings) eo.restrict_to = &terms;
    in.embeddings = load_embeddings(config.embeddings, eo);
  }
  if (std::find(config.models.begin(), config.models.end(), ModelKind::kScWn) !=
      config.models.end()) {
    in.lexicon = load_synonym_lexicon(config.synonyms, config.lowercase);
  }
  return in;
}

WorkbenchOptions workbench_options(const RunConfig& config) {
  WorkbenchOptions o;
  o.sim_power = config.sim_power;
  o.seed = config.seed;
  o.ground_cost = config.ground_cost;
  o.idf_scope = config.idf_scope;
  o.synonym_scoring = config.synonym_scoring;
  return o;
}

std::string tag(const Segmentation& seg, TextView view) {
  return seg.name() + "_" + std::string(to_string(view));
}

void run_ingest(const RunConfig& config, Outputs& outputs, std::ostream& out) {
  const Inputs in = load_inputs(config, true, false);
  write_collection(outputs.open("source.jsonl"), in.source);
  write_collection(outputs.open("target.jsonl"), in.target);
  if (!config.queries.empty()) write_queries(outputs.open("queries.jsonl"), in.queries);
  out << "source: " << in.source.size() << " documents\n"
      << "target: " << in.target.size() << " documents\n";
  if (!config.queries.empty()) {
    out << "queries: " << in.queries.size() << " (" << active_queries(in.queries).size()
        << " active)\n";
  }
}

// One term per line; blank lines and '#' comments are skipped.
std::unordered_set<std::string> load_stopwords(const fs::path& path, bool lowercase) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::unordered_set<std::string> words;
  for (std::string line; std::getline(in, line);) {
    const std::string term = trim(std::string_view(line).substr(0, line.find('#')));
    if (!term.empty()) words.insert(lowercase ? normalize_term(term) : term);
  }
  return words;
}

void run_stats(const RunConfig& config, Outputs& outputs, std::ostream& out) {
  const Inputs in = load_inputs(config, true, false);
  std::optional<std::unordered_set<std::string>> stopwords;
  if (!config.stopwords.empty()) stopwords = load_stopwords(config.stopwords, config.lowercase);
  for (const Segmentation& seg : config.segmentations) {
    const auto queries = segment(in.queries, in.source, seg);
    std::vector<DatasetStats> all;
    for (TextView view : config.views) {
      all.push_back(dataset_stats(queries, in.source, in.target, view,
                                  stopwords ? &*stopwords : nullptr));
      write_stats_csv(outputs.open("stats_" + tag(seg, view) + ".csv"), all.back());
      write_histogram_csv(outputs.open("histogram_" + tag(seg, view) + ".csv"), all.back());
    }
    write_stats_summary_csv(outputs.open("summary_" + seg.name() + ".csv"), all);
    out << "# " << seg.name() << '\n';
    write_stats_summary_csv(out, all);
  }
}

void run_agreement(const RunConfig& config, Outputs& outputs, std::ostream& out) {
  const auto annotations = load_annotations(config.annotations);
  const AgreementReport report = kappa(annotations);
  const std::string doc = to_json(report).dump(2) + "\n";
  outputs.open("agreement.json") << doc;
  write_histogram_csv(outputs.open("agreement_histogram.csv"),
                      overlap_histogram(annotations, config.bins));
  out << to_json(report, false).dump(2) << '\n';
}

void run_segment(const RunConfig& config, Outputs& outputs, std::ostream& out) {
  const Inputs in = load_inputs(config, true, false);
  for (const Segmentation& seg : config.segmentations) {
    const auto queries = segment(in.queries, in.source, seg);
    write_queries(outputs.open("queries_" + seg.name() + ".jsonl"), queries);
    out << seg.name() << ": " << queries.size() << " queries\n";
  }
}

void note_degenerate(const RetrievalModel& model, std::ostream& err) {
  if (model.degenerate_scores() > 0) {
    err << "note: " << to_string(model.kind()) << '/' << to_string(model.view()) << ": "
        << model.degenerate_scores() << " soft cosine scores had a zero denominator\n";
  }
}

void run_retrieve(const RunConfig& config, Outputs& outputs, std::ostream& out,
                  std::ostream& err) {
  const Inputs in = load_inputs(config, true, true);
  Workbench bench(in.source, in.target, in.embeddings ? &*in.embeddings : nullptr,
                  in.lexicon ? &*in.lexicon : nullptr, workbench_options(config));
  for (ModelKind kind : config.models) {
    for (TextView view : config.views) {
      const auto model = bench.model(kind, view);
      for (const Segmentation& seg : config.segmentations) {
        const std::string name = "rankings_" + seg.name() + "_" + std::string(to_string(kind)) +
                                 "_" + std::string(to_string(view)) + ".jsonl";
        std::ostream& file = outputs.open(name);
        std::size_t count = 0;
        for (const auto& q : segment(in.queries, in.source, seg)) {
          if (q.discarded) continue;
          const Ranking ranking = model->rank(q, config.execution);
          const std::size_t n = std::min(config.top, ranking.entries.size());
          for (std::size_t r = 0; r < n; ++r) {
            const auto& e = ranking.entries[r];
            nlohmann::json record = {{"query_id", ranking.query_id},
                                     {"rank", r + 1},
                                     {"candidate_id", e.candidate_id},
                                     {"score", nullptr}};
            if (e.score) record["score"] = *e.score;
            file << record.dump() << '\n';
          }
          ++count;
        }
        out << name << ": " << count << " queries\n";
      }
      note_degenerate(*model, err);
    }
  }
}

void run_evaluate(const RunConfig& config, Outputs& outputs, std::ostream& out,
                  std::ostream& err) {
  const Inputs in = load_inputs(config, true, true);
  Workbench bench(in.source, in.target, in.embeddings ? &*in.embeddings : nullptr,
                  in.lexicon ? &*in.lexicon : nullptr, workbench_options(config));
  std::vector<std::vector<QueryInstance>> segmented;
  for (const Segmentation& seg : config.segmentations) {
    segmented.push_back(segment(in.queries, in.source, seg));
  }
  std::vector<std::vector<EvalReport>> reports(config.segmentations.size());
  for (ModelKind kind : config.models) {
    for (TextView view : config.views) {
      const auto model = bench.model(kind, view);
      for (std::size_t s = 0; s < segmented.size(); ++s) {
        reports[s].push_back(evaluate(*model, segmented[s], config.ks, config.execution));
        reports[s].back().segmentation = config.segmentations[s].name();
      }
      note_degenerate(*model, err);
    }
  }
  for (std::size_t s = 0; s < segmented.size(); ++s) {
    const std::string name = config.segmentations[s].name();
    write_report_csv(outputs.open("report_" + name + ".csv"), reports[s], config.ks);
    write_rank_dump(outputs.open("ranks_" + name + ".jsonl"), reports[s]);
    out << "# " << name << " (" << reports[s].front().query_count << " queries)\n";
    write_report_csv(out, reports[s], config.ks);
  }
}

void run_explain(const RunConfig& config, Outputs& outputs, std::ostream& out) {
  const Inputs in = load_inputs(config, true, true);
  Workbench bench(in.source, in.target, in.embeddings ? &*in.embeddings : nullptr,
                  in.lexicon ? &*in.lexicon : nullptr, workbench_options(config));
  const auto it = std::find_if(in.queries.begin(), in.queries.end(),
                               [&](const QueryInstance& q) { return q.id == config.query; });
  if (it == in.queries.end()) throw ValidationError("unknown query '" + config.query + "'");
  const Document* candidate = in.target.find(config.candidate);
  if (candidate == nullptr) {
    throw ValidationError("unknown candidate '" + config.candidate + "'");
  }
  const QueryInstance query = segment(std::span(&*it, 1), in.source,
                                      config.segmentations.front()).front();
  for (ModelKind kind : config.models) {
    for (TextView view : config.views) {
      const auto text = query_text(query, in.source, view);
      const SimilarityPtr sim = bench.similarity(kind, view);
      const Explanation e =
          explain(text, candidate->text(view), bench.vocabulary(view), kind, sim.get());
      const std::string name =
          "explain_" + std::string(to_string(kind)) + "_" + std::string(to_string(view)) + ".csv";
      write_explanation_csv(outputs.open(name), e);
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", e.score);
      out << "# " << to_string(kind) << '/' << to_string(view) << " score " << buf << '\n';
      write_explanation_csv(out, e);
    }
  }
}

void write_manifest(std::ostream& file, Subcommand command, const RunConfig& config,
                    const std::vector<std::string>& outputs) {
  nlohmann::ordered_json m;
  m["tool"] = "allusion";
  m["subcommand"] = std::string(to_string(command));
  m["versions"] = {{"allusion", std::string(kVersion)},
                   {"cli11", CLI11_VERSION},
                   {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
  m["config_hash"] = config_hash(config.values);
  m["seed"] = config.seed ? nlohmann::ordered_json(*config.seed) : nlohmann::ordered_json();
  m["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config.values) m["config"][k] = v;
  m["inputs"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config.values) {
    if (is_path_key(k) && k != "output") m["inputs"][k] = file_hash(v);
  }
  m["outputs"] = outputs;
  file << m.dump(2) << '\n';
}

}  // namespace

std::string_view to_string(Subcommand command) {
  for (const auto& [c, name] : kSubcommands) {
    if (c == command) return name;
  }
  return "?";
}

Subcommand parse_subcommand(std::string_view name) {
  for (const auto& [c, n] : kSubcommands) {
    if (n == name) return c;
  }
  throw ValidationError("unknown subcommand '" + std::string(name) + "'");
}

std::string Segmentation::name() const {
  return manual() ? "manual" : "window" + std::to_string(window);
}

Segmentation Segmentation::parse(std::string_view text) {
  if (text == "manual") return {};
  for (std::string_view prefix : {"window:", "window"}) {
    if (text.starts_with(prefix)) {
      const auto n = parse_number<std::size_t>(text.substr(prefix.size()));
      if (n && *n >= 1) return Segmentation{*n};
      break;
    }
  }
  throw ValidationError("invalid segmentation '" + std::string(text) +
                        "' (expected manual or window:N with N >= 1)");
}

std::vector<QueryInstance> segment(std::span<const QueryInstance> queries,
                                   const Collection& source, const Segmentation& mode) {
  std::vector<QueryInstance> out(queries.begin(), queries.end());
  if (mode.manual()) return out;
  for (auto& q : out) q = window_segment(q, source, mode.window);
  return out;
}

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
  std::string msg = "invalid configuration:";
  for (const auto& p : problems) msg += "\n  - " + p;
  return msg;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : ValidationError(join_problems(problems)), problems_(std::move(problems)) {}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "source", "target", "queries", "annotations", "embeddings", "synonyms", "stopwords",
      "output",
      "models", "views", "sim", "sim_power", "seed", "ks", "segmentation", "top",
      "ground_cost", "idf_scope", "synonym_scoring", "bins", "lowercase",
      "restrict_embeddings", "execution", "query", "candidate"};
  return keys;
}

bool is_path_key(std::string_view key) { return kPathKeys.contains(key); }

ConfigValues parse_config(std::istream& in, const fs::path& base, const std::string& name) {
  ConfigValues values;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError(name, number, "expected key = value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ParseError(name, number, "empty key");
    values[key] = is_path_key(key) && !value.empty() ? absolute_path(base, value) : value;
  }
  return values;
}

ConfigValues load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  return parse_config(in, fs::absolute(path).parent_path(), path.string());
}

RunConfig resolve_config(const ConfigValues& values, Subcommand command) {
  RunConfig c;
  std::vector<std::string> problems;
  const auto& known = config_keys();
  for (const auto& [k, _] : values) {
    if (std::find(known.begin(), known.end(), k) == known.end()) {
      problems.push_back("unknown key '" + k + "'");
    }
  }
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    auto it = values.find(key);
    if (it == values.end() || it->second.empty()) return std::nullopt;
    return it->second;
  };
  auto get_uint = [&](const std::string& key, std::size_t min) -> std::optional<std::size_t> {
    auto v = get(key);
    if (!v) return std::nullopt;
    auto n = parse_number<std::size_t>(*v);
    if (!n || *n < min) {
      problems.push_back(key + ": expected an integer >= " + std::to_string(min) + ", got '" +
                         *v + "'");
      return std::nullopt;
    }
    return n;
  };
  auto get_bool = [&](const std::string& key, bool& target) {
    if (auto v = get(key)) {
      if (auto b = parse_bool(*v)) {
        target = *b;
      } else {
        problems.push_back(key + ": expected true or false, got '" + *v + "'");
      }
    }
  };
  auto choice = [&](const std::string& key, std::initializer_list<std::string_view> allowed)
      -> std::optional<std::string> {
    auto v = get(key);
    if (!v) return std::nullopt;
    if (std::find(allowed.begin(), allowed.end(), *v) != allowed.end()) return v;
    std::string list;
    for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
    problems.push_back(key + ": '" + *v + "' is not one of " + list);
    return std::nullopt;
  };

  if (auto v = get("source")) c.source = *v;
  if (auto v = get("target")) c.target = *v;
  if (auto v = get("queries")) c.queries = *v;
  if (auto v = get("annotations")) c.annotations = *v;
  if (auto v = get("embeddings")) c.embeddings = *v;
  if (auto v = get("synonyms")) c.synonyms = *v;
  if (auto v = get("stopwords")) c.stopwords = *v;
  if (auto v = get("output")) c.output = *v;

  // Models; "sc" defers to the sim key.
  const auto sim = choice("sim", {"emb", "wordnet", "random"});
  const auto sim_kind = !sim              ? std::optional<ModelKind>()
                        : *sim == "emb"     ? ModelKind::kScEmb
                        : *sim == "wordnet" ? ModelKind::kScWn
                                            : ModelKind::kScRnd;
  if (auto v = get("models")) {
    for (const auto& name : split_list(*v)) {
      try {
        if (name == "all") {
          for (ModelKind k : all_model_kinds()) c.models.push_back(k);
        } else if (name == "sc") {
          if (sim_kind) {
            c.models.push_back(*sim_kind);
          } else {
            problems.push_back("models: 'sc' needs sim = emb, wordnet or random");
          }
        } else {
          c.models.push_back(parse_model_kind(name));
        }
      } catch (const ValidationError& e) {
        problems.push_back(std::string("models: ") + e.what());
      }
    }
  } else if (sim_kind) {
    c.models.push_back(*sim_kind);
  }
  if (sim_kind) {
    for (ModelKind k : c.models) {
      if (is_soft_cosine(k) && k != *sim_kind) {
        problems.push_back("sim = " + *sim + " conflicts with model " +
                           std::string(to_string(k)));
      }
    }
  }
  {
    std::vector<ModelKind> unique;
    for (ModelKind k : c.models) {
      if (std::find(unique.begin(), unique.end(), k) == unique.end()) unique.push_back(k);
    }
    c.models = std::move(unique);
  }

  if (auto v = get("views")) {
    c.views.clear();
    for (const auto& name : split_list(*v)) {
      try {
        const TextView view = parse_text_view(name);
        if (std::find(c.views.begin(), c.views.end(), view) == c.views.end()) {
          c.views.push_back(view);
        }
      } catch (const ValidationError& e) {
        problems.push_back(std::string("views: ") + e.what());
      }
    }
    if (c.views.empty()) problems.push_back("views: empty list");
  }
  if (auto n = get_uint("sim_power", 1)) c.sim_power = static_cast<unsigned>(*n);
  if (auto v = get("seed")) {
    if (auto n = parse_number<std::uint64_t>(*v)) {
      c.seed = *n;
    } else {
      problems.push_back("seed: expected an unsigned 64-bit integer, got '" + *v + "'");
    }
  }
  if (auto v = get("ks")) {
    c.ks.clear();
    for (const auto& item : split_list(*v)) {
      auto n = parse_number<std::size_t>(item);
      if (!n || *n < 1) {
        problems.push_back("ks: '" + item + "' is not an integer >= 1");
      } else {
        c.ks.push_back(*n);
      }
    }
    std::sort(c.ks.begin(), c.ks.end());
    c.ks.erase(std::unique(c.ks.begin(), c.ks.end()), c.ks.end());
    if (c.ks.empty()) problems.push_back("ks: empty list");
  }
  if (auto v = get("segmentation")) {
    c.segmentations.clear();
    for (const auto& item : split_list(*v)) {
      try {
        const auto seg = Segmentation::parse(item);
        if (std::find(c.segmentations.begin(), c.segmentations.end(), seg) ==
            c.segmentations.end()) {
          c.segmentations.push_back(seg);
        }
      } catch (const ValidationError& e) {
        problems.push_back(std::string("segmentation: ") + e.what());
      }
    }
    if (c.segmentations.empty()) problems.push_back("segmentation: empty list");
  }
  if (auto n = get_uint("top", 1)) c.top = *n;
  if (auto n = get_uint("bins", 1)) c.bins = *n;
  if (auto v = choice("ground_cost", {"cosine", "euclidean"})) {
    c.ground_cost = *v == "cosine" ? GroundCost::kCosine : GroundCost::kEuclidean;
  }
  if (auto v = choice("idf_scope", {"all", "target"})) {
    c.idf_scope = *v == "all" ? IdfScope::kAllCollections : IdfScope::kLastCollection;
  }
  if (auto v = choice("synonym_scoring", {"inverse", "jaccard"})) {
    c.synonym_scoring =
        *v == "inverse" ? SynonymScoring::kInverseIntersection : SynonymScoring::kJaccard;
  }
  if (auto v = choice("execution", {"parallel", "serial"})) {
    c.execution = *v == "parallel" ? Execution::kParallel : Execution::kSerial;
  }
  get_bool("lowercase", c.lowercase);
  get_bool("restrict_embeddings", c.restrict_embeddings);
  if (auto v = get("query")) c.query = *v;
  if (auto v = get("candidate")) c.candidate = *v;

  // Requirements per subcommand.
  auto require = [&](const char* key, bool present) {
    if (!present) {
      problems.push_back(std::string(key) + " is required for " +
                         std::string(to_string(command)));
    }
  };
  const bool corpus = command != Subcommand::kAgreement;
  const bool queries = corpus && command != Subcommand::kIngest;
  const bool models = command == Subcommand::kRetrieve || command == Subcommand::kEvaluate ||
                      command == Subcommand::kExplain;
  if (corpus) {
    require("source", !c.source.empty());
    require("target", !c.target.empty());
  }
  if (queries) require("queries", !c.queries.empty());
  if (command == Subcommand::kAgreement) require("annotations", !c.annotations.empty());
  if (models) {
    require("models", !c.models.empty());
    const auto any = [&](auto pred) { return std::any_of(c.models.begin(), c.models.end(), pred); };
    if (any([](ModelKind k) { return uses_embeddings(k); })) {
      require("embeddings", !c.embeddings.empty());
    }
    if (any([](ModelKind k) { return k == ModelKind::kScWn; })) {
      require("synonyms", !c.synonyms.empty());
    }
    if (any([](ModelKind k) { return is_stochastic(k); }) && !c.seed) {
      problems.push_back("seed is required when sc-rnd is selected");
    }
  }
  if (command == Subcommand::kExplain) {
    require("query", !c.query.empty());
    require("candidate", !c.candidate.empty());
    for (ModelKind k : c.models) {
      if (k != ModelKind::kBow && k != ModelKind::kTfidf && !is_soft_cosine(k)) {
        problems.push_back("explain does not support model " + std::string(to_string(k)) +
                           " (use bow, tfidf, sc-emb, sc-wn or sc-rnd)");
      }
    }
    if (c.segmentations.size() != 1) {
      problems.push_back("explain takes a single segmentation");
    }
  }
  for (const auto& [key, path] :
       {std::pair<const char*, const fs::path*>{"source", &c.source},
        {"target", &c.target},
        {"queries", &c.queries},
        {"annotations", &c.annotations},
        {"embeddings", &c.embeddings},
        {"synonyms", &c.synonyms},
        {"stopwords", &c.stopwords}}) {
    if (!path->empty() && !fs::is_regular_file(*path)) {
      problems.push_back(std::string(key) + ": file not found: " + path->string());
    }
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));

  // Canonical form: explicit values plus the effective defaults that shape
  // the outputs.
  c.values = values;
  for (auto it = c.values.begin(); it != c.values.end();) {
    it = it->second.empty() ? c.values.erase(it) : std::next(it);
  }
  auto join = [](const auto& items, auto fmt) {
    std::string s;
    for (const auto& i : items) s += (s.empty() ? "" : ",") + fmt(i);
    return s;
  };
  c.values["output"] = fs::absolute(c.output).lexically_normal().string();
  c.values["views"] = join(c.views, [](TextView v) { return std::string(to_string(v)); });
  c.values["ks"] = join(c.ks, [](std::size_t k) { return std::to_string(k); });
  c.values["segmentation"] = join(c.segmentations, [](const Segmentation& s) {
    return s.manual() ? std::string("manual") : "window:" + std::to_string(s.window);
  });
  if (!c.models.empty()) {
    c.values["models"] = join(c.models, [](ModelKind k) { return std::string(to_string(k)); });
  }
  c.values.erase("sim");
  c.values["sim_power"] = std::to_string(c.sim_power);
  c.values["top"] = std::to_string(c.top);
  c.values["bins"] = std::to_string(c.bins);
  c.values["ground_cost"] = c.ground_cost == GroundCost::kCosine ? "cosine" : "euclidean";
  c.values["idf_scope"] = c.idf_scope == IdfScope::kAllCollections ? "all" : "target";
  c.values["synonym_scoring"] =
      c.synonym_scoring == SynonymScoring::kInverseIntersection ? "inverse" : "jaccard";
  c.values["lowercase"] = c.lowercase ? "true" : "false";
  c.values["restrict_embeddings"] = c.restrict_embeddings ? "true" : "false";
  c.values["execution"] = c.execution == Execution::kParallel ? "parallel" : "serial";
  return c;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const ConfigValues& values) {
  std::string canonical;
  for (const auto& [k, v] : values) {
    if (k == "output") continue;
    canonical += k + "=" + v + "\n";
  }
  return fnv1a_hex(canonical);
}

void run(Subcommand command, const RunConfig& config, std::ostream& out, std::ostream& err) {
  Outputs outputs(config.output);
  switch (command) {
    case Subcommand::kIngest: run_ingest(config, outputs, out); break;
    case Subcommand::kStats: run_stats(config, outputs, out); break;
    case Subcommand::kAgreement: run_agreement(config, outputs, out); break;
    case Subcommand::kSegment: run_segment(config, outputs, out); break;
    case Subcommand::kRetrieve: run_retrieve(config, outputs, out, err); break;
    case Subcommand::kEvaluate: run_evaluate(config, outputs, out, err); break;
    case Subcommand::kExplain: run_explain(config, outputs, out); break;
  }
  auto names = outputs.names();
  names.push_back("manifest.json");
  write_manifest(outputs.open("manifest.json"), command, config, names);
  outputs.commit();
}

namespace {

struct FlagSpec {
  const char* flags;
  const char* key;
  const char* help;
};

constexpr FlagSpec kFlags[] = {
    {"--source", "source", "source collection (JSONL)"},
    {"--target", "target", "target collection (JSONL)"},
    {"--queries", "queries", "query annotations (JSONL)"},
    {"--annotations", "annotations", "span annotations for agreement (JSONL)"},
    {"--embeddings", "embeddings", "word vectors (text format)"},
    {"--synonyms", "synonyms", "synonym lexicon (TSV)"},
    {"--stopwords", "stopwords", "stats: terms excluded from Jaccard (one per line)"},
    {"-o,--output", "output", "output directory"},
    {"-m,--model,--models", "models", "model list, comma separated, or 'all'"},
    {"--view,--views", "views", "token and/or lemma"},
    {"--sim", "sim", "soft cosine matrix: emb, wordnet or random"},
    {"--sim-power", "sim_power", "power applied to off-diagonal similarities"},
    {"--seed", "seed", "seed for the random similarity matrix"},
    {"-k,--ks", "ks", "precision cutoffs, comma separated"},
    {"--segmentation", "segmentation", "manual and/or window:N"},
    {"--top", "top", "rankings kept per query by retrieve"},
    {"--ground-cost", "ground_cost", "WMD ground cost: cosine or euclidean"},
    {"--idf-scope", "idf_scope", "document frequencies from all collections or the target"},
    {"--synonym-scoring", "synonym_scoring", "inverse or jaccard"},
    {"--bins", "bins", "agreement histogram bins"},
    {"--lowercase", "lowercase", "lowercase terms on load"},
    {"--restrict-embeddings", "restrict_embeddings", "keep only vectors for corpus terms"},
    {"--execution", "execution", "parallel or serial scoring"},
    {"--query", "query", "explain: query instance id"},
    {"--candidate", "candidate", "explain: target document id"},
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Allusive text reuse retrieval and evaluation", "allusion"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  std::string config_path;
  app.add_option("-c,--config", config_path,
                 "flat key = value config file (default: $" + std::string(kConfigEnv) + ")");
  std::vector<std::string> sets;
  app.add_option("--set", sets, "override any config key: key=value");
  std::map<std::string, std::vector<std::string>> flags;
  for (const auto& f : kFlags) {
    app.add_option(f.flags, flags[f.key], f.help);
  }
  std::map<std::string, CLI::App*> subs;
  for (const auto& [command, name] : kSubcommands) {
    subs[std::string(name)] = app.add_subcommand(std::string(name))->fallthrough();
  }
  subs["ingest"]->description("validate and normalize collections and queries");
  subs["stats"]->description("Jaccard, length and overlap statistics per view");
  subs["agreement"]->description("span-overlap kappa and overlap histogram");
  subs["segment"]->description("write queries with manual or window spans");
  subs["retrieve"]->description("rank the target collection for every query");
  subs["evaluate"]->description("MRR and precision@k tables");
  subs["explain"]->description("per-term contributions to one similarity score");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  Subcommand command = Subcommand::kIngest;
  for (const auto& [c, name] : kSubcommands) {
    if (subs[std::string(name)]->parsed()) command = c;
  }

  try {
    ConfigValues values;
    if (config_path.empty()) {
      if (const char* env = std::getenv(std::string(kConfigEnv).c_str()); env && *env) {
        config_path = env;
      }
    }
    if (!config_path.empty()) values = load_config(config_path);
    const fs::path cwd = fs::current_path();
    auto put = [&](const std::string& key, const std::string& value) {
      values[key] = is_path_key(key) && !value.empty() ? absolute_path(cwd, value) : value;
    };
    for (const auto& f : kFlags) {
      const auto& given = flags[f.key];
      if (given.empty()) continue;
      const std::string_view key = f.key;
      const bool list = key == "models" || key == "views" || key == "ks" || key == "segmentation";
      std::string joined;
      for (const auto& g : given) joined += (joined.empty() ? "" : ",") + g;
      put(f.key, list ? joined : given.back());
    }
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError({"--set expects key=value, got '" + s + "'"});
      put(trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
    }
    const RunConfig config = resolve_config(values, command);
    try {
      run(command, config, out, err);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n'
          << "note: incomplete outputs are left as *.partial in " << config.output.string()
          << '\n';
      return 1;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace allusion
