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

#ifndef IMGVEC_ERRORS_H_
#define IMGVEC_ERRORS_H_

#include <stdexcept>
#include <string>

namespace imgvec {

// Invalid user configuration, detected before any work is done.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string &what) : std::invalid_argument(what) {}
};

// Malformed or inconsistent input data. The message names the file and line
// when one is known.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string &what) : std::runtime_error(what) {}
};

}  // namespace imgvec

#endif  // IMGVEC_ERRORS_H_
