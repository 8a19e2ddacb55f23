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

#ifndef IMGVEC_TEXTPROC_H_
#define IMGVEC_TEXTPROC_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace imgvec {

// Whether tokens carry a "<lang>:" prefix. In unaware mode identical surface
// forms from different languages share one token.
enum class LangMode { kAware, kUnaware };

std::string_view LangModeName(LangMode mode);

// Accepts "aware" or "unaware". Throws ConfigError otherwise.
LangMode ParseLangMode(std::string_view name);

// Row index into the combined vocabulary + hash bucket id space.
struct TokenId {
  uint32_t value = 0;

  constexpr TokenId() = default;
  constexpr explicit TokenId(uint32_t v) : value(v) {}
  constexpr auto operator<=>(const TokenId &) const = default;
};

// Replaces every character that is not a Unicode letter or digit with a space,
// lowercases, and splits on whitespace. In aware mode each token is returned
// as "<lang>:<surface>". Invalid UTF-8 sequences count as separators.
std::vector<std::string> Tokenize(std::string_view raw, std::string_view lang,
                                  LangMode mode);

// Splits "<lang>:<word>" at the first ':'. Returns false if either side is
// empty.
bool SplitTaggedWord(std::string_view tagged, std::string_view *lang,
                     std::string_view *word);

// 64-bit FNV-1a over the raw bytes.
uint64_t Fnv1a64(std::string_view bytes);

struct VocabOptions {
  int64_t min_count = 6;
  int64_t num_buckets = 1000000;
  LangMode mode = LangMode::kAware;
};

// Token <-> id map. Ids [0, size()) are in-vocabulary tokens ordered by
// descending corpus frequency with lexicographic tie-break; ids
// [size(), size() + num_buckets()) are hash buckets shared by every OOV token.
// Immutable after construction.
class Vocabulary {
 public:
  Vocabulary() = default;

  // Counts every token occurrence and keeps those seen at least min_count
  // times. Throws ConfigError if min_count < 1 or num_buckets < 1.
  static Vocabulary Build(const std::vector<std::string> &token_stream,
                          const VocabOptions &options);

  // Builds from precomputed counts.
  static Vocabulary FromCounts(
      const std::unordered_map<std::string, int64_t> &counts,
      const VocabOptions &options);

  // Tokens must already be in id order.
  static Vocabulary FromTokens(std::vector<std::string> tokens,
                               int64_t num_buckets, LangMode mode);

  // In-vocabulary id, or the token's hash bucket.
  TokenId Lookup(std::string_view token) const;

  // In-vocabulary id only; buckets are never consulted.
  bool Find(std::string_view token, TokenId *id) const;

  const std::string &token(TokenId id) const { return tokens_[id.value]; }
  const std::vector<std::string> &tokens() const { return tokens_; }

  size_t size() const { return tokens_.size(); }
  size_t num_buckets() const { return num_buckets_; }
  size_t total_rows() const { return tokens_.size() + num_buckets_; }
  LangMode mode() const { return mode_; }

  // Stable content hash used to tie checkpoints to a vocabulary.
  uint64_t Fingerprint() const;

  // Format: "<vocab_size> <num_buckets> <mode>" then one token per line.
  void Save(std::ostream &out) const;
  static Vocabulary Load(std::istream &in);

 private:
  struct StringHash {
    using is_transparent = void;
    size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };

  void Reindex();

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, uint32_t, StringHash, std::equal_to<>>
      index_;
  size_t num_buckets_ = 1;
  LangMode mode_ = LangMode::kAware;
};

}  // namespace imgvec

#endif  // IMGVEC_TEXTPROC_H_
