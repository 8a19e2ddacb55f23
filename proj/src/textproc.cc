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

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include "imgvec/errors.h"

namespace imgvec {

std::string_view LangModeName(LangMode mode) {
  return mode == LangMode::kAware ? "aware" : "unaware";
}

LangMode ParseLangMode(std::string_view name) {
  if (name == "aware") return LangMode::kAware;
  if (name == "unaware") return LangMode::kUnaware;
  throw ConfigError("unknown language mode '" + std::string(name) +
                    "' (expected aware or unaware)");
}

std::vector<std::string> Tokenize(std::string_view raw, std::string_view lang,
                                  LangMode mode) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&]() {
    if (current.empty()) return;
    if (mode == LangMode::kAware) {
      std::string tagged;
      tagged.reserve(lang.size() + 1 + current.size());
      tagged.append(lang).push_back(':');
      tagged.append(current);
      tokens.push_back(std::move(tagged));
    } else {
      tokens.push_back(std::move(current));
    }
    current.clear();
  };

  const auto *bytes = reinterpret_cast<const uint8_t *>(raw.data());
  const int32_t length = static_cast<int32_t>(raw.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c < 0 || !u_isalnum(c)) {
      flush();
      continue;
    }
    UChar32 lower = u_tolower(c);
    char buf[U8_MAX_LENGTH];
    int32_t n = 0;
    U8_APPEND_UNSAFE(reinterpret_cast<uint8_t *>(buf), n, lower);
    current.append(buf, n);
  }
  flush();
  return tokens;
}

bool SplitTaggedWord(std::string_view tagged, std::string_view *lang,
                     std::string_view *word) {
  const size_t colon = tagged.find(':');
  if (colon == std::string_view::npos || colon == 0 ||
      colon + 1 == tagged.size()) {
    return false;
  }
  *lang = tagged.substr(0, colon);
  *word = tagged.substr(colon + 1);
  return true;
}

uint64_t Fnv1a64(std::string_view bytes) {
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace imgvec
