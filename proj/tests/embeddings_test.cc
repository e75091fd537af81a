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

#include <cmath>
#include <sstream>
#include <unordered_set>

#include "allusion/embeddings.h"
#include "allusion/corpus.h"
#include "test_util.h"

namespace allusion {
namespace {

using testing::words;

EmbeddingTable table_from(const std::string& text, EmbeddingLoadOptions options = {}) {
  std::istringstream in(text);
  return parse_embeddings(in, options);
}

TEST(LoadEmbeddings, ReadsHeaderAndRows) {
  const auto t = table_from("3 4\na 1 0 0 0\nb 0 1 0 0\nc 0 0 1 0.5\n");
  EXPECT_EQ(t.dim(), 4u);
  EXPECT_EQ(t.size(), 3u);
  EXPECT_EQ(t.at("c")[3], 0.5);
  EXPECT_TRUE(t.find("zz").empty());
  EXPECT_THROW(t.at("zz"), std::out_of_range);
}

TEST(LoadEmbeddings, ShortRowNamesLine) {
  try {
    table_from("2 4\na 1 0 0 0\nb 0 1 0\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(LoadEmbeddings, MissingHeaderRejected) {
  EXPECT_THROW(table_from("a 1 0 0 0\n"), ParseError);
  EXPECT_THROW(table_from(""), ParseError);
}

TEST(LoadEmbeddings, LimitKeepsFileOrder) {
  EmbeddingLoadOptions o;
  o.limit = 2;
  const auto t = table_from("3 2\nx 1 0\ny 0 1\nz 1 1\n", o);
  EXPECT_EQ(t.terms(), (std::vector<std::string>{"x", "y"}));
}

TEST(LoadEmbeddings, RestrictAndLowercase) {
  const std::unordered_set<std::string> keep = {"deus"};
  EmbeddingLoadOptions o;
  o.restrict_to = &keep;
  const auto t = table_from("2 2\nDeus 1 0\nhomo 0 1\n", o);
  EXPECT_TRUE(t.contains("deus"));
  EXPECT_FALSE(t.contains("homo"));
}

TEST(LoadEmbeddings, FirstOccurrenceWins) {
  const auto t = table_from("2 2\nx 1 0\nx 0 1\n");
  EXPECT_EQ(t.size(), 1u);
  EXPECT_EQ(t.at("x")[0], 1.0);
}

class Sentences : public ::testing::Test {
 protected:
  EmbeddingTable t = table_from("3 3\nu 1 2 0\nv 3 0 1\nw -1 0 0\n");
};

TEST_F(Sentences, SingleTokenIsItsVector) {
  const auto e = sentence_embedding(words("u"), t);
  EXPECT_EQ(e.vector, (std::vector<double>{1, 2, 0}));
  EXPECT_FALSE(e.zero);
}

TEST_F(Sentences, MeanAndWeightedMean) {
  EXPECT_EQ(sentence_embedding(words("u v"), t).vector, (std::vector<double>{2, 1, 0.5}));
  // multiset semantics
  const auto rep = sentence_embedding(words("u u v"), t).vector;
  EXPECT_DOUBLE_EQ(rep[0], 5.0 / 3.0);
  const TermWeight weights = [](std::string_view term) { return term == "u" ? 2.0 : 1.0; };
  const auto e = sentence_embedding(words("u v"), t, weights).vector;
  EXPECT_DOUBLE_EQ(e[0], (2.0 * 1 + 3) / 3.0);
  EXPECT_DOUBLE_EQ(e[1], (2.0 * 2 + 0) / 3.0);
  EXPECT_DOUBLE_EQ(e[2], (0.0 + 1) / 3.0);
}

TEST_F(Sentences, OovAndZeroWeightGiveFlaggedZeroVector) {
  const auto oov = sentence_embedding(words("q r"), t);
  EXPECT_TRUE(oov.zero);
  EXPECT_EQ(oov.oov, 2u);
  EXPECT_EQ(oov.vector, (std::vector<double>(3, 0.0)));
  const TermWeight none = [](std::string_view) { return 0.0; };
  EXPECT_TRUE(sentence_embedding(words("u v"), t, none).zero);
}

TEST_F(Sentences, PermutationInvariantAndUniformWeights) {
  const auto a = sentence_embedding(words("u v w u"), t).vector;
  const auto b = sentence_embedding(words("w u u v"), t).vector;
  const TermWeight uniform = [](std::string_view) { return 3.0; };
  const auto c = sentence_embedding(words("u v w u"), t, uniform).vector;
  for (std::size_t d = 0; d < 3; ++d) {
    EXPECT_NEAR(a[d], b[d], 1e-12);
    EXPECT_NEAR(a[d], c[d], 1e-9);
  }
}

TEST(WordSimilarity, Examples) {
  const auto t = table_from("4 2\na 1 0\nb 0 2\nc -3 0\nd 2 0\n");
  EXPECT_NEAR(word_similarity("a", "a", t), 1.0, 1e-9);
  EXPECT_NEAR(word_similarity("a", "b", t), 0.0, 1e-12);
  EXPECT_NEAR(word_similarity("a", "c", t), -1.0, 1e-12);
  EXPECT_NEAR(word_similarity("a", "d", t), 1.0, 1e-12);
  EXPECT_THROW(word_similarity("a", "zz", t), std::out_of_range);
}

}  // namespace
}  // namespace allusion
