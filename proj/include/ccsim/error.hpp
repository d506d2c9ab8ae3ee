// Copyright 2026 The ccsim Authors
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

namespace ccsim {

enum class ErrorKind {
  kParameter,
  kRange,
  kData,
  kConfig,
  kIo,
  kInternal,
};

const char* ErrorKindName(ErrorKind kind);

// Single exception type for the library. `field` carries a JSON-style path
// (e.g. "topology.rows") for configuration errors and is empty otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string field = {})
      : std::runtime_error(message), kind_(kind), field_(std::move(field)) {}

  ErrorKind kind() const { return kind_; }
  const std::string& field() const { return field_; }

 private:
  ErrorKind kind_;
  std::string field_;
};

[[noreturn]] inline void Throw(ErrorKind kind, const std::string& message,
                               std::string field = {}) {
  throw Error(kind, message, std::move(field));
}

}  // namespace ccsim
