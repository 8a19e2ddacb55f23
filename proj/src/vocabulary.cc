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

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "imgvec/errors.h"
#include "imgvec/textproc.h"

namespace imgvec {

namespace {

void CheckOptions(const VocabOptions &options) {
  if (options.min_count < 1) {
    throw ConfigError("min_count must be >= 1");
  }
  if (options.num_buckets < 1) {
    throw ConfigError("num_buckets must be >= 1");
  }
}

}  // namespace

Vocabulary Vocabulary::Build(const std::vector<std::string> &token_stream,
                             const VocabOptions &options) {
  CheckOptions(options);
  std::unordered_map<std::string, int64_t> counts;
  for (const auto &token : token_stream) ++counts[token];
  return FromCounts(counts, options);
}

Vocabulary Vocabulary::FromCounts(
    const std::unordered_map<std::string, int64_t> &counts,
    const VocabOptions &options) {
  CheckOptions(options);
  std::vector<std::pair<std::string, int64_t>> kept;
  for (const auto &[token, count] : counts) {
    if (count >= options.min_count) kept.emplace_back(token, count);
  }
  std::sort(kept.begin(), kept.end(), [](const auto &a, const auto &b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  std::vector<std::string> tokens;
  tokens.reserve(kept.size());
  for (auto &entry : kept) tokens.push_back(std::move(entry.first));
  return FromTokens(std::move(tokens), options.num_buckets, options.mode);
}

Vocabulary Vocabulary::FromTokens(std::vector<std::string> tokens,
                                  int64_t num_buckets, LangMode mode) {
  if (num_buckets < 1) throw ConfigError("num_buckets must be >= 1");
  if (tokens.size() + static_cast<uint64_t>(num_buckets) >
      std::numeric_limits<uint32_t>::max()) {
    throw ConfigError("vocabulary plus buckets exceeds the 32-bit id space");
  }
  Vocabulary vocab;
  vocab.tokens_ = std::move(tokens);
  vocab.num_buckets_ = static_cast<size_t>(num_buckets);
  vocab.mode_ = mode;
  vocab.Reindex();
  return vocab;
}

void Vocabulary::Reindex() {
  index_.clear();
  index_.reserve(tokens_.size());
  for (size_t i = 0; i < tokens_.size(); ++i) {
    auto [it, inserted] = index_.emplace(tokens_[i], static_cast<uint32_t>(i));
    if (!inserted) throw DataError("duplicate vocabulary token '" + tokens_[i] + "'");
  }
}

TokenId Vocabulary::Lookup(std::string_view token) const {
  TokenId id;
  if (Find(token, &id)) return id;
  return TokenId(static_cast<uint32_t>(tokens_.size() +
                                       Fnv1a64(token) % num_buckets_));
}

bool Vocabulary::Find(std::string_view token, TokenId *id) const {
  auto it = index_.find(token);
  if (it == index_.end()) return false;
  *id = TokenId(it->second);
  return true;
}

uint64_t Vocabulary::Fingerprint() const {
  std::ostringstream out;
  Save(out);
  return Fnv1a64(out.str());
}

void Vocabulary::Save(std::ostream &out) const {
  out << tokens_.size() << ' ' << num_buckets_ << ' ' << LangModeName(mode_)
      << '\n';
  for (const auto &token : tokens_) out << token << '\n';
}

Vocabulary Vocabulary::Load(std::istream &in) {
  std::string header;
  if (!std::getline(in, header)) throw DataError("vocabulary: missing header");
  std::istringstream fields(header);
  int64_t size = -1, buckets = -1;
  std::string mode;
  if (!(fields >> size >> buckets >> mode) || size < 0) {
    throw DataError("vocabulary: malformed header '" + header + "'");
  }
  std::vector<std::string> tokens;
  tokens.reserve(static_cast<size_t>(size));
  std::string line;
  for (int64_t i = 0; i < size; ++i) {
    if (!std::getline(in, line)) {
      throw DataError("vocabulary: expected " + std::to_string(size) +
                      " tokens, found " + std::to_string(i));
    }
    tokens.push_back(line);
  }
  return FromTokens(std::move(tokens), buckets, ParseLangMode(mode));
}

}  // namespace imgvec
