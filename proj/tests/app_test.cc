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

#include <unistd.h>

#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "allusion/app.h"
#include "test_util.h"
#include "toy_fixture.h"

namespace fs = std::filesystem;

namespace allusion {
namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() /
                       ("allusion_app_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "allusion");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string toy_conf() { return (testing::toy_dir() / "toy.conf").string(); }

ConfigValues parse(const std::string& text, const fs::path& base = "/base") {
  std::istringstream in(text);
  return parse_config(in, base);
}

ConfigValues toy_values() { return load_config(toy_conf()); }

TEST(Config, ParsesKeyValueLines) {
  const auto v = parse(
      "# comment\n"
      "  models = bow, tfidf   # trailing\n"
      "\n"
      "source = data/s.jsonl\n"
      "target = /abs/t.jsonl\n"
      "seed=7\n");
  EXPECT_EQ(v.at("models"), "bow, tfidf");
  EXPECT_EQ(v.at("source"), "/base/data/s.jsonl");
  EXPECT_EQ(v.at("target"), "/abs/t.jsonl");
  EXPECT_EQ(v.at("seed"), "7");
  EXPECT_THROW(parse("models bow\n"), ParseError);
  EXPECT_THROW(parse(" = x\n"), ParseError);
}

TEST(Config, PathsResolveAgainstTheConfigFile) {
  const auto v = toy_values();
  EXPECT_EQ(fs::path(v.at("source")), testing::toy_dir() / "source.jsonl");
  EXPECT_TRUE(fs::path(v.at("output")).is_absolute());
}

TEST(Config, ResolvesToyConfig) {
  const RunConfig c = resolve_config(toy_values(), Subcommand::kEvaluate);
  EXPECT_EQ(c.models.size(), 10u);
  EXPECT_EQ(c.views, (std::vector<TextView>{TextView::kToken, TextView::kLemma}));
  EXPECT_EQ(c.ks, (std::vector<std::size_t>{10, 20}));
  ASSERT_EQ(c.segmentations.size(), 2u);
  EXPECT_EQ(c.segmentations[1].window, 3u);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.values.at("segmentation"), "manual,window:3");
}

TEST(Config, ReportsEveryProblemAtOnce) {
  ConfigValues v = {{"modles", "bow"},
                    {"models", "bow,lsi"},
                    {"sim_power", "0"},
                    {"ks", "10,x"},
                    {"ground_cost", "manhattan"},
                    {"source", "/nonexistent/s.jsonl"}};
  try {
    resolve_config(v, Subcommand::kEvaluate);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const auto& p = e.problems();
    auto mentions = [&](const std::string& s) {
      return std::any_of(p.begin(), p.end(),
                         [&](const std::string& x) { return x.find(s) != std::string::npos; });
    };
    EXPECT_TRUE(mentions("unknown key 'modles'"));
    EXPECT_TRUE(mentions("unknown model 'lsi'"));
    EXPECT_TRUE(mentions("sim_power"));
    EXPECT_TRUE(mentions("ks: 'x'"));
    EXPECT_TRUE(mentions("ground_cost"));
    EXPECT_TRUE(mentions("target is required"));
    EXPECT_TRUE(mentions("queries is required"));
    EXPECT_TRUE(mentions("file not found: /nonexistent/s.jsonl"));
    EXPECT_GE(p.size(), 8u);
    EXPECT_NE(std::string(e.what()).find("\n  - "), std::string::npos);
  }
}

TEST(Config, UnknownModelListsValidNames) {
  auto v = toy_values();
  v["models"] = "bm25";
  try {
    resolve_config(v, Subcommand::kEvaluate);
    FAIL();
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    for (ModelKind k : all_model_kinds()) {
      EXPECT_NE(msg.find(std::string(to_string(k))), std::string::npos) << to_string(k);
    }
  }
}

TEST(Config, SeedIsMandatoryForRandomMatrix) {
  auto v = toy_values();
  v.erase("seed");
  v["models"] = "tfidf,sc-rnd";
  EXPECT_THROW(resolve_config(v, Subcommand::kEvaluate), ConfigError);
  v["models"] = "tfidf";
  EXPECT_NO_THROW(resolve_config(v, Subcommand::kEvaluate));
  v["models"] = "sc";
  v["sim"] = "random";
  EXPECT_THROW(resolve_config(v, Subcommand::kEvaluate), ConfigError);
}

TEST(Config, ModelShorthands) {
  auto v = toy_values();
  v["models"] = "sc,bow";
  v["sim"] = "wordnet";
  EXPECT_EQ(resolve_config(v, Subcommand::kEvaluate).models,
            (std::vector<ModelKind>{ModelKind::kScWn, ModelKind::kBow}));
  v["models"] = "sc-emb";
  EXPECT_THROW(resolve_config(v, Subcommand::kEvaluate), ConfigError);
  v.erase("sim");
  v["models"] = "all,bow";
  EXPECT_EQ(resolve_config(v, Subcommand::kEvaluate).models.size(), 10u);
}

TEST(Config, ExplainRestrictions) {
  auto v = toy_values();
  v["query"] = "q001";
  v["candidate"] = "v001";
  v["models"] = "tfidf,sc-emb";
  v["segmentation"] = "manual";
  EXPECT_NO_THROW(resolve_config(v, Subcommand::kExplain));
  v["models"] = "wmd";
  EXPECT_THROW(resolve_config(v, Subcommand::kExplain), ConfigError);
  v["models"] = "tfidf";
  v["segmentation"] = "manual,window:2";
  EXPECT_THROW(resolve_config(v, Subcommand::kExplain), ConfigError);
  v["segmentation"] = "manual";
  v.erase("candidate");
  EXPECT_THROW(resolve_config(v, Subcommand::kExplain), ConfigError);
}

TEST(Config, AgreementOnlyNeedsAnnotations) {
  const ConfigValues v = {{"annotations", toy_values().at("annotations")}};
  EXPECT_NO_THROW(resolve_config(v, Subcommand::kAgreement));
  EXPECT_THROW(resolve_config({}, Subcommand::kAgreement), ConfigError);
}

TEST(Segmentations, Parse) {
  EXPECT_TRUE(Segmentation::parse("manual").manual());
  EXPECT_EQ(Segmentation::parse("window:3").window, 3u);
  EXPECT_EQ(Segmentation::parse("window5").window, 5u);
  EXPECT_EQ(Segmentation::parse("window:3").name(), "window3");
  EXPECT_THROW(Segmentation::parse("window:0"), ValidationError);
  EXPECT_THROW(Segmentation::parse("sentence"), ValidationError);
}

TEST(Hashing, Fnv1a) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(fnv1a_hex("foobar"), "85944171f73967e8");
}

TEST(Hashing, ConfigHashIgnoresOutput) {
  ConfigValues a = {{"models", "bow"}, {"output", "/x"}};
  ConfigValues b = {{"models", "bow"}, {"output", "/y"}};
  ConfigValues c = {{"models", "tfidf"}, {"output", "/x"}};
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_NE(config_hash(a), config_hash(c));
}

// ---- command line

TEST(Cli, EvaluateIsDeterministic) {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const std::vector<std::string> common = {"evaluate", "-c", toy_conf(), "-m", "tfidf,sc-rnd,wmd",
                                           "--segmentation", "manual"};
  auto args_a = common, args_b = common;
  args_a.insert(args_a.end(), {"-o", a.string()});
  args_b.insert(args_b.end(), {"-o", b.string(), "--execution", "serial"});
  const CliResult ra = cli(args_a);
  ASSERT_EQ(ra.code, 0) << ra.err;
  const CliResult rb = cli(args_b);
  ASSERT_EQ(rb.code, 0) << rb.err;
  EXPECT_EQ(ra.out, rb.out);
  for (const char* name : {"report_manual.csv", "ranks_manual.jsonl"}) {
    ASSERT_TRUE(fs::exists(a / name)) << name;
    EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
  }
}

TEST(Cli, ManifestRecordsTheRun) {
  const fs::path dir = scratch("manifest");
  const CliResult r = cli({"evaluate", "-c", toy_conf(), "-m", "bow", "--views", "lemma",
                           "--segmentation", "manual", "-o", dir.string(), "--set", "seed=5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(m["tool"], "allusion");
  EXPECT_EQ(m["subcommand"], "evaluate");
  EXPECT_EQ(m["versions"]["allusion"], std::string(kVersion));
  EXPECT_EQ(m["seed"], 5);
  EXPECT_EQ(m["config"]["models"], "bow");
  EXPECT_EQ(m["config"]["views"], "lemma");
  EXPECT_EQ(m["inputs"]["source"].get<std::string>().size(), 16u);
  ConfigValues values;
  for (const auto& [k, v] : m["config"].items()) values[k] = v.get<std::string>();
  EXPECT_EQ(m["config_hash"], config_hash(values));
  const std::vector<std::string> outputs = m["outputs"];
  EXPECT_EQ(outputs, (std::vector<std::string>{"report_manual.csv", "ranks_manual.jsonl",
                                               "manifest.json"}));
  for (const auto& entry : fs::directory_iterator(dir)) {
    EXPECT_NE(entry.path().extension(), ".partial");
  }
}

TEST(Cli, EnvironmentSuppliesTheConfig) {
  const fs::path dir = scratch("env");
  ::setenv(std::string(kConfigEnv).c_str(), toy_conf().c_str(), 1);
  const CliResult r = cli({"segment", "-o", dir.string()});
  ::unsetenv(std::string(kConfigEnv).c_str());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "queries_manual.jsonl"));
  EXPECT_TRUE(fs::exists(dir / "queries_window3.jsonl"));
}

TEST(Cli, ConfigErrorsExitWithTwo) {
  const fs::path dir = scratch("bad");
  CliResult r = cli({"evaluate", "-c", toy_conf(), "-m", "lsi", "-o", dir.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("unknown model 'lsi'"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir / "manifest.json"));
  r = cli({"evaluate", "-c", (dir / "missing.conf").string()});
  EXPECT_EQ(r.code, 2);
  r = cli({"frobnicate"});
  EXPECT_EQ(r.code, 2);
  r = cli({"evaluate", "--set", "novalue"});
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, RuntimeFailureLeavesOnlyPartialOutputs) {
  const fs::path dir = scratch("partial");
  // Blocks the second ranking file.
  fs::create_directories(dir / "rankings_manual_tfidf_lemma.jsonl.partial");
  const CliResult r = cli({"retrieve", "-c", toy_conf(), "-m", "bow,tfidf", "--views", "lemma",
                           "--segmentation", "manual", "-o", dir.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find(".partial"), std::string::npos) << r.err;
  EXPECT_TRUE(fs::exists(dir / "rankings_manual_bow_lemma.jsonl.partial"));
  EXPECT_FALSE(fs::exists(dir / "rankings_manual_bow_lemma.jsonl"));
  EXPECT_FALSE(fs::exists(dir / "manifest.json"));
}

TEST(Cli, RetrieveWritesTopRankings) {
  const fs::path dir = scratch("retrieve");
  const CliResult r = cli({"retrieve", "-c", toy_conf(), "-m", "tesserae", "--views", "lemma",
                           "--segmentation", "manual", "--top", "3", "-o", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(dir / "rankings_manual_tesserae_lemma.jsonl");
  std::map<std::string, int> per_query;
  for (std::string line; std::getline(in, line);) {
    const auto j = nlohmann::json::parse(line);
    ++per_query[j["query_id"]];
    EXPECT_TRUE(j["score"].is_null() || j["score"].is_number());
    EXPECT_EQ(j["rank"], per_query[j["query_id"]]);
  }
  EXPECT_EQ(per_query.size(), active_queries(testing::toy().queries).size());
  for (const auto& [q, n] : per_query) EXPECT_EQ(n, 3) << q;
}

TEST(Cli, ExplainWritesContributions) {
  const fs::path dir = scratch("explain");
  const auto& q = testing::toy().queries.front();
  const CliResult r = cli({"explain", "-c", toy_conf(), "-m", "sc-emb", "--views", "lemma",
                           "--segmentation", "manual", "--query", q.id, "--candidate",
                           q.relevant_doc, "-o", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(dir / "explain_sc-emb_lemma.csv");
  EXPECT_EQ(csv.rfind("side,position,term,contribution\n", 0), 0u);
}

TEST(Cli, AgreementAndStats) {
  const fs::path dir = scratch("agreement");
  CliResult r = cli({"agreement", "-c", toy_conf(), "-o", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(slurp(dir / "agreement.json"));
  EXPECT_TRUE(j.contains("kappa"));
  r = cli({"stats", "-c", toy_conf(), "-o", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "stats_window3_lemma.csv"));
  EXPECT_TRUE(fs::exists(dir / "summary_manual.csv"));
  const std::string plain = slurp(dir / "summary_manual.csv");

  std::ofstream(dir / "stop.txt") << "# function words\net\nin\nEST\n";
  const fs::path filtered = dir / "filtered";
  r = cli({"stats", "-c", toy_conf(), "--stopwords", (dir / "stop.txt").string(), "-o",
           filtered.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(slurp(filtered / "summary_manual.csv"), plain);
  const auto m = nlohmann::json::parse(slurp(filtered / "manifest.json"));
  EXPECT_TRUE(m["inputs"].contains("stopwords"));
}

}  // namespace
}  // namespace allusion
