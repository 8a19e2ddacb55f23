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

#include "imgvec/textproc.h"

#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "imgvec/errors.h"

namespace imgvec {
namespace {

using Tokens = std::vector<std::string>;

TEST(TokenizeTest, AwareModePrefixesLanguage) {
  EXPECT_EQ(Tokenize("back  pain", "en", LangMode::kAware),
            (Tokens{"en:back", "en:pain"}));
}

TEST(TokenizeTest, EmptyInput) {
  EXPECT_TRUE(Tokenize("", "en", LangMode::kAware).empty());
  EXPECT_TRUE(Tokenize(" -_!? ", "en", LangMode::kAware).empty());
}

TEST(TokenizeTest, SeparatorsReplacedInUnawareMode) {
  EXPECT_EQ(Tokenize("cat-with big_ears", "en", LangMode::kUnaware),
            (Tokens{"cat", "with", "big", "ears"}));
}

TEST(TokenizeTest, LowercasesAndTrims) {
  EXPECT_EQ(Tokenize("  Back\tPAIN\n", "en", LangMode::kUnaware),
            (Tokens{"back", "pain"}));
}

TEST(TokenizeTest, UnicodeLettersAndDigitsAreKept) {
  EXPECT_EQ(Tokenize("Über straße 42", "de", LangMode::kAware),
            (Tokens{"de:über", "de:straße", "de:42"}));
  EXPECT_EQ(Tokenize("東京タワー、夜景", "ja", LangMode::kUnaware),
            (Tokens{"東京タワー", "夜景"}));
  EXPECT_EQ(Tokenize("ΑΘΗΝΑ«ακρόπολη»", "el", LangMode::kUnaware),
            (Tokens{"αθηνα", "ακρόπολη"}));
}

TEST(TokenizeTest, InvalidUtf8IsASeparator) {
  EXPECT_EQ(Tokenize("ab\xff" "cd", "en", LangMode::kUnaware),
            (Tokens{"ab", "cd"}));
}

TEST(TokenizeTest, UnawareModeSharesSurfaceForms) {
  EXPECT_EQ(Tokenize("pain", "en", LangMode::kUnaware),
            Tokenize("pain", "fr", LangMode::kUnaware));
  EXPECT_NE(Tokenize("pain", "en", LangMode::kAware),
            Tokenize("pain", "fr", LangMode::kAware));
}

TEST(LangModeTest, ParseRoundTrip) {
  for (LangMode m : {LangMode::kAware, LangMode::kUnaware}) {
    EXPECT_EQ(ParseLangMode(LangModeName(m)), m);
  }
  EXPECT_THROW(ParseLangMode("maybe"), ConfigError);
}

TEST(SplitTaggedWordTest, Splits) {
  std::string_view lang, word;
  ASSERT_TRUE(SplitTaggedWord("en:dog", &lang, &word));
  EXPECT_EQ(lang, "en");
  EXPECT_EQ(word, "dog");
  EXPECT_FALSE(SplitTaggedWord("dog", &lang, &word));
  EXPECT_FALSE(SplitTaggedWord(":dog", &lang, &word));
  EXPECT_FALSE(SplitTaggedWord("en:", &lang, &word));
}

// Reference values from an independent FNV-1a implementation.
TEST(Fnv1aTest, ReferenceVectors) {
  EXPECT_EQ(Fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(Fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(Fnv1a64("en:zzzunseen"), 0xce848a206f0240beULL);
}

Tokens Repeat(const std::string &token, int n) {
  return Tokens(n, token);
}

Tokens Concat(std::initializer_list<Tokens> parts) {
  Tokens all;
  for (const auto &p : parts) all.insert(all.end(), p.begin(), p.end());
  return all;
}

TEST(VocabularyTest, MinCountBoundary) {
  VocabOptions opts;
  opts.min_count = 6;
  opts.num_buckets = 10;
  auto vocab = Vocabulary::Build(
      Concat({Repeat("en:a", 6), Repeat("en:b", 5)}), opts);
  ASSERT_EQ(vocab.size(), 1u);
  EXPECT_EQ(vocab.tokens()[0], "en:a");
}

TEST(VocabularyTest, EmptyStream) {
  auto vocab = Vocabulary::Build({}, VocabOptions{});
  EXPECT_EQ(vocab.size(), 0u);
  EXPECT_EQ(vocab.total_rows(), 1000000u);
}

TEST(VocabularyTest, FrequencyThenLexicographicOrder) {
  VocabOptions opts;
  opts.num_buckets = 10;
  auto vocab = Vocabulary::Build(
      Concat({Repeat("en:y", 7), Repeat("en:x", 7), Repeat("en:z", 9)}), opts);
  ASSERT_EQ(vocab.size(), 3u);
  EXPECT_EQ(vocab.Lookup("en:z"), TokenId(0));
  EXPECT_EQ(vocab.Lookup("en:x"), TokenId(1));
  EXPECT_EQ(vocab.Lookup("en:y"), TokenId(2));
}

TEST(VocabularyTest, RejectsBadOptions) {
  VocabOptions opts;
  opts.min_count = 0;
  EXPECT_THROW(Vocabulary::Build({}, opts), ConfigError);
  opts.min_count = 1;
  opts.num_buckets = 0;
  EXPECT_THROW(Vocabulary::Build({}, opts), ConfigError);
}

Vocabulary HundredTokens() {
  Tokens tokens;
  for (int i = 0; i < 100; ++i) tokens.push_back("en:w" + std::to_string(i));
  return Vocabulary::FromTokens(tokens, 1000, LangMode::kAware);
}

TEST(VocabularyTest, LookupInVocabulary) {
  auto vocab = HundredTokens();
  EXPECT_EQ(vocab.Lookup("en:w17"), TokenId(17));
}

TEST(VocabularyTest, LookupOovHashesIntoBuckets) {
  auto vocab = HundredTokens();
  // 100 + (0xce848a206f0240be mod 1000) = 100 + 590.
  EXPECT_EQ(vocab.Lookup("en:zzzunseen"), TokenId(690));
  TokenId id;
  EXPECT_FALSE(vocab.Find("en:zzzunseen", &id));
}

TEST(VocabularyTest, ModeSeparation) {
  VocabOptions aware;
  aware.min_count = 1;
  aware.num_buckets = 50;
  Tokens stream = Concat({Tokenize("pain", "en", LangMode::kAware),
                          Tokenize("pain", "fr", LangMode::kAware)});
  auto vocab = Vocabulary::Build(stream, aware);
  EXPECT_NE(vocab.Lookup("en:pain"), vocab.Lookup("fr:pain"));

  VocabOptions unaware = aware;
  unaware.mode = LangMode::kUnaware;
  stream = Concat({Tokenize("pain", "en", LangMode::kUnaware),
                   Tokenize("pain", "fr", LangMode::kUnaware)});
  auto shared = Vocabulary::Build(stream, unaware);
  ASSERT_EQ(shared.size(), 1u);
  EXPECT_EQ(shared.Lookup(Tokenize("pain", "en", LangMode::kUnaware)[0]),
            shared.Lookup(Tokenize("pain", "fr", LangMode::kUnaware)[0]));
}

TEST(VocabularyTest, SaveLoadPreservesContent) {
  auto vocab = HundredTokens();
  std::stringstream buf;
  vocab.Save(buf);
  EXPECT_EQ(buf.str().substr(0, buf.str().find('\n')), "100 1000 aware");
  auto loaded = Vocabulary::Load(buf);
  EXPECT_EQ(loaded.tokens(), vocab.tokens());
  EXPECT_EQ(loaded.num_buckets(), vocab.num_buckets());
  EXPECT_EQ(loaded.mode(), vocab.mode());
  EXPECT_EQ(loaded.Fingerprint(), vocab.Fingerprint());
}

TEST(VocabularyTest, LoadRejectsTruncatedFile) {
  std::istringstream in("3 10 aware\nen:a\nen:b\n");
  EXPECT_THROW(Vocabulary::Load(in), DataError);
}

// Random corpora: round trip, determinism, and bucket range.
TEST(VocabularyProperty, RandomCorpora) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<int> word(0, 40), len(0, 400);
    Tokens stream;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) {
      stream.push_back("en:t" + std::to_string(word(rng) * word(rng) / 7));
    }
    VocabOptions opts;
    opts.min_count = 1 + trial % 8;
    opts.num_buckets = 1 + trial * 13;
    const auto a = Vocabulary::Build(stream, opts);
    const auto b = Vocabulary::Build(stream, opts);
    ASSERT_EQ(a.tokens(), b.tokens());

    std::unordered_map<std::string, int64_t> counts;
    for (const auto &t : stream) ++counts[t];
    for (size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a.Lookup(a.tokens()[i]), TokenId(i));
      EXPECT_GE(counts[a.tokens()[i]], opts.min_count);
    }
    for (const auto &[token, count] : counts) {
      TokenId id;
      EXPECT_EQ(a.Find(token, &id), count >= opts.min_count);
    }
    for (int k = 0; k < 20; ++k) {
      const std::string oov = "xx:" + std::to_string(rng());
      const TokenId id = a.Lookup(oov);
      EXPECT_GE(id.value, a.size());
      EXPECT_LT(id.value, a.total_rows());
      EXPECT_EQ(id, b.Lookup(oov));
    }
  }
}

}  // namespace
}  // namespace imgvec
