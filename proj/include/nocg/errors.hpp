// Copyright 2025 The Authors.
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

#ifndef NOCG_ERRORS_HPP
#define NOCG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nocg {

// Requested operation is not available for the given object (for example a
// second-order oracle on a family that only exposes gradients).
class UnsupportedOperation : public std::runtime_error {
 public:
  explicit UnsupportedOperation(const std::string& msg) : std::runtime_error(msg) {}
};

// A solver produced a state that violates one of its guaranteed invariants.
class InvariantViolation : public std::runtime_error {
 public:
  explicit InvariantViolation(const std::string& msg) : std::runtime_error(msg) {}
};

// Exhaustive enumeration was requested beyond the supported instance size.
class SizeLimitError : public std::runtime_error {
 public:
  explicit SizeLimitError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or unreadable run configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace nocg

#endif  // NOCG_ERRORS_HPP
