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

#ifndef IMGVEC_CLI_H_
#define IMGVEC_CLI_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "imgvec/model.h"
#include "imgvec/textproc.h"

namespace imgvec::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,    // bad flags or configuration
  kExitData = 2,     // unreadable or malformed input, errored eval subtask
  kExitFailure = 3,  // gradient check failure
};

// Named training configurations.
//   paper-100       mlp, emb 100, hidden 200
//   paper-300       mlp, emb 300, hidden 300
//   baseline        lookup tower, emb 100
//   baseline-2lang  lookup tower, emb 100, >= 2-language image filter
//   unaware-100     mlp, emb 100, hidden 200, language-unaware tokens
struct Preset {
  std::string_view name;
  TowerKind tower;
  LangMode mode;
  size_t emb_dim;
  size_t hidden_dim;
  bool filter_multilingual;
};

std::span<const Preset> Presets();
const Preset *FindPreset(std::string_view name);

// Parses `args` (args[0] is the program name) and runs one subcommand:
// gensynth, filter, train, eval, gradcheck. Returns an ExitCode.
int Run(const std::vector<std::string> &args, std::ostream &out,
        std::ostream &err);

}  // namespace imgvec::cli

#endif  // IMGVEC_CLI_H_
