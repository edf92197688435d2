// Copyright 2026 The resel Authors.
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

#pragma once

#include <stdexcept>
#include <string>

namespace resel {

// Error categories map one-to-one onto the process exit codes of the CLI and
// the status codes of the C API.
enum class ErrorKind {
  kInput = 2,      // unreadable, malformed or inconsistent input data
  kNumerical = 3,  // degenerate geometry, solver failure
  kConfig = 4,     // invalid configuration values
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void ThrowInput(const std::string& what) {
  throw Error(ErrorKind::kInput, what);
}
[[noreturn]] inline void ThrowNumerical(const std::string& what) {
  throw Error(ErrorKind::kNumerical, what);
}
[[noreturn]] inline void ThrowConfig(const std::string& what) {
  throw Error(ErrorKind::kConfig, what);
}

}  // namespace resel
