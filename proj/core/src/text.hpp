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

// Small line/column aware scanner shared by the text loaders.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "psmfuzz/symbol.hpp"

namespace psmfuzz::detail {

struct SourceLine {
  std::size_t number;  // 1-based
  std::string text;    // comment stripped, right-trimmed
};

/// Splits a document into non-blank lines with `#` comments removed.
std::vector<SourceLine> logical_lines(std::string_view document);

class Cursor {
 public:
  Cursor(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  void skip_ws();
  bool at_end();
  char peek();
  bool consume(char c);
  bool consume(std::string_view token);
  /// Matches `word` only when not followed by an identifier character.
  bool consume_word(std::string_view word);
  void expect(char c, std::string_view what);

  std::string identifier(std::string_view what);
  std::uint64_t number(std::string_view what);
  Symbol symbol();
  /// `*` or a symbol.
  std::optional<Symbol> symbol_or_wildcard();

  std::size_t column() const { return pos_ + 1; }
  std::size_t line() const { return line_; }
  [[noreturn]] void fail(const std::string& message) const;
  [[noreturn]] void fail_at(std::size_t column, const std::string& message) const;

 private:
  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

bool is_ident_start(char c);
bool is_ident_char(char c);

}  // namespace psmfuzz::detail
