// Copyright 2026 The imgvec Authors.
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

#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "imgvec/data.h"
#include "imgvec/errors.h"
#include "test_util.h"

namespace imgvec {
namespace {

std::vector<TripleRecord> Parse(const std::string &text) {
  std::istringstream in(text);
  return ReadTriples(in, "t.tsv");
}

ImageFeatures ParseFeatures(const std::string &text) {
  std::istringstream in(text);
  return ReadFeatures(in, "f.tsv");
}

std::string ErrorOf(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const DataError &e) {
    return e.what();
  }
  return "";
}

TEST(TriplesTest, ParsesLine) {
  const auto t = Parse("1.0\ten\tback pain\timg42\n");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0], (TripleRecord{1.0, "en", "back pain", "img42"}));
}

TEST(TriplesTest, SkipsBlankLinesAndCarriageReturns) {
  const auto t = Parse("2\tde\tRücken\ta\r\n\n0.5\tes\tdolor\tb\n");
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].image_id, "a");
  EXPECT_EQ(t[1].weight, 0.5);
}

TEST(TriplesTest, Errors) {
  EXPECT_NE(ErrorOf([] { Parse("1\ten\tx\timg\n1\ten\tx\n"); })
                .find("t.tsv:2"),
            std::string::npos);
  EXPECT_NE(ErrorOf([] { Parse("-1\ten\tx\timg\n"); }).find("negative weight"),
            std::string::npos);
  EXPECT_NE(ErrorOf([] { Parse("abc\ten\tx\timg\n"); }).find("non-numeric"),
            std::string::npos);
  EXPECT_NE(ErrorOf([] { Parse("1\ten\tx\t\n"); }).find("image_id"),
            std::string::npos);
  EXPECT_THROW(LoadTriples("/nonexistent/triples.tsv"), DataError);
}

TEST(TriplesTest, WriteReadRoundTrip) {
  const std::vector<TripleRecord> t = {{1.5, "en", "a b", "i1"},
                                       {0.0, "de", "c", "i2"}};
  std::ostringstream out;
  WriteTriples(out, t);
  EXPECT_EQ(Parse(out.str()), t);
}

TEST(FeaturesTest, Parses) {
  const auto f = ParseFeatures("img1\t0.1,0.2\nimg2\t0.3,0.4\n");
  EXPECT_EQ(f.size(), 2u);
  EXPECT_EQ(f.dim(), 2u);
  uint32_t row;
  ASSERT_TRUE(f.Find("img2", &row));
  EXPECT_EQ(f.ToMatrix()(row, 1), 0.4);
  EXPECT_FALSE(f.Find("img3", &row));
}

TEST(FeaturesTest, Errors) {
  EXPECT_THROW(ParseFeatures("img1\t0.1,0.2\nimg2\t0.3,0.4,0.5\n"), DataError);
  EXPECT_THROW(ParseFeatures("img1\t0.1,0.2\nimg1\t0.3,0.4\n"), DataError);
  EXPECT_THROW(ParseFeatures("img1\t0.1,nan\n"), DataError);
  EXPECT_THROW(ParseFeatures("img1\t0.1,x\n"), DataError);
}

TEST(FeaturesTest, RoundTripIsExact) {
  ImageFeatures f;
  const std::vector<double> a = {0.1, -1.0 / 3.0, 1e-300};
  f.Add("a", a);
  std::ostringstream out;
  WriteFeatures(out, f);
  const auto back = ParseFeatures(out.str());
  EXPECT_EQ(back.ToMatrix(), f.ToMatrix());
}

TEST(FilterTest, DropsMonolingualImages) {
  const std::vector<TripleRecord> t = {{1, "en", "a", "imgA"},
                                       {1, "en", "b", "imgB"},
                                       {1, "de", "c", "imgA"}};
  const auto kept = FilterMultilingual(t);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0], t[0]);
  EXPECT_EQ(kept[1], t[2]);
  EXPECT_TRUE(FilterMultilingual({}).empty());
}

TEST(FilterTest, HandEnumeratedTenTriples) {
  // p: {en, de, es} -> kept; q: {en} (three times) -> dropped;
  // r: {fr, en} -> kept.
  const std::vector<TripleRecord> t = {
      {1, "en", "t0", "p"}, {1, "en", "t1", "q"}, {1, "de", "t2", "p"},
      {1, "en", "t3", "q"}, {1, "fr", "t4", "r"}, {1, "es", "t5", "p"},
      {1, "en", "t6", "q"}, {1, "en", "t7", "r"}, {1, "en", "t8", "p"},
      {1, "fr", "t9", "r"}};
  std::vector<std::string> queries;
  for (const auto &r : FilterMultilingual(t)) queries.push_back(r.query);
  EXPECT_EQ(queries, (std::vector<std::string>{"t0", "t2", "t4", "t5", "t7",
                                               "t8", "t9"}));
}

TEST(FilterProperty, MatchesBruteForceAndIsIdempotent) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto t = testing::RandomTriples(rng, 1000);
    const auto kept = FilterMultilingual(t);
    EXPECT_EQ(kept, testing::BruteForceFilter(t));
    EXPECT_EQ(FilterMultilingual(kept), kept);
  }
}

Vocabulary TinyVocab() {
  return Vocabulary::FromTokens({"en:back", "en:pain", "de:rücken"}, 10,
                                LangMode::kAware);
}

TEST(PrepareTest, MapsTokensAndDropsEmpty) {
  const std::vector<TripleRecord> t = {{1, "en", "back pain", "img42"},
                                       {1, "en", "!!", "img1"},
                                       {2, "de", "Rücken", "img42"}};
  ImageFeatures f;
  f.Add("img1", std::vector<double>{1, 0});
  f.Add("img42", std::vector<double>{0, 1});
  const auto vocab = TinyVocab();
  const PreparedCorpus p = PrepareExamples(t, vocab, &f);
  EXPECT_EQ(p.dropped_empty, 1u);
  ASSERT_EQ(p.training.examples.size(), 2u);
  EXPECT_EQ(p.training.examples[0].tokens,
            (std::vector<TokenId>{vocab.Lookup("en:back"),
                                  vocab.Lookup("en:pain")}));
  EXPECT_EQ(p.training.examples[1].weight, 2.0);
  EXPECT_EQ(p.training.image_features.row(p.training.examples[1].image),
            f.ToMatrix().row(1));
}

TEST(PrepareTest, MissingFeatureNamesImage) {
  const std::vector<TripleRecord> t = {{1, "en", "back", "ghost"}};
  ImageFeatures f;
  f.Add("img1", std::vector<double>{1, 0});
  const auto vocab = TinyVocab();
  EXPECT_NE(ErrorOf([&] { PrepareExamples(t, vocab, &f); }).find("ghost"),
            std::string::npos);
}

TEST(PrepareTest, LookupModeDenseIds) {
  const std::vector<TripleRecord> t = {{1, "en", "back", "a"},
                                       {1, "en", "pain", "b"},
                                       {1, "en", "back pain", "a"}};
  const PreparedCorpus p = PrepareExamples(t, TinyVocab(), nullptr);
  ASSERT_EQ(p.training.examples.size(), 3u);
  EXPECT_EQ(p.training.examples[0].image, 0u);
  EXPECT_EQ(p.training.examples[1].image, 1u);
  EXPECT_EQ(p.training.examples[2].image, 0u);
  EXPECT_EQ(p.training.num_images, 2u);
  EXPECT_EQ(p.image_ids, (std::vector<std::string>{"a", "b"}));
}

TEST(CorpusTokensTest, FollowsMode) {
  const std::vector<TripleRecord> t = {{1, "en", "Back pain", "a"},
                                       {1, "de", "back", "b"}};
  EXPECT_EQ(CorpusTokens(t, LangMode::kAware),
            (std::vector<std::string>{"en:back", "en:pain", "de:back"}));
  EXPECT_EQ(CorpusTokens(t, LangMode::kUnaware),
            (std::vector<std::string>{"back", "pain", "back"}));
}

}  // namespace
}  // namespace imgvec
