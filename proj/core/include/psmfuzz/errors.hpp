// Copyright 2026 The psmfuzz Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace psmfuzz {

/// Text input that does not follow one of the file grammars.
/// Line and column are 1-based; column 0 means "whole line".
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string message_;
};

/// Well-formed input that violates a model invariant (determinism,
/// unknown state, ...). Raised by loaders and by lookups.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A formula shape the skeleton generator has no rule for.
class UnsupportedShape : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mutation operation requested for a message it does not apply to.
class InapplicableOp : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adapter could not talk to the implementation. Not a TIMEOUT.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad campaign configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace psmfuzz
