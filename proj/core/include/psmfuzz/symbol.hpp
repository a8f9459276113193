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

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace psmfuzz {

struct FieldPredicate {
  std::string field;
  std::uint64_t value = 0;

  auto operator<=>(const FieldPredicate&) const = default;
};

/// A message type plus equality predicates, kept sorted by field name.
/// Used for both input and output symbols. The output NULL_ACTION is the
/// type "null" with no predicates.
class Symbol {
 public:
  Symbol() = default;
  explicit Symbol(std::string type, std::vector<FieldPredicate> predicates = {});

  static Symbol null_action();

  const std::string& type() const noexcept { return type_; }
  const std::vector<FieldPredicate>& predicates() const noexcept { return predicates_; }
  bool is_null() const noexcept { return type_ == kNullType; }

  std::optional<std::uint64_t> get(std::string_view field) const;
  /// Returns a copy with `field` set (added or overwritten).
  Symbol with(std::string_view field, std::uint64_t value) const;

  auto operator<=>(const Symbol&) const = default;

  static constexpr std::string_view kNullType = "null";

 private:
  std::string type_;
  std::vector<FieldPredicate> predicates_;
};

using InputSymbol = Symbol;
using OutputSymbol = Symbol;

struct Observation {
  InputSymbol input;
  OutputSymbol output;

  auto operator<=>(const Observation&) const = default;
};

/// An observation with either side possibly a wildcard (`*`).
struct ObservationPattern {
  std::optional<Symbol> input;
  std::optional<Symbol> output;
  /// Display name (atom id) used by dumps; not part of equality.
  std::string label;

  static ObservationPattern exact(const Observation& obs, std::string label = {});

  bool operator==(const ObservationPattern& other) const {
    return input == other.input && output == other.output;
  }
  bool operator<(const ObservationPattern& other) const;
};

/// Parses `type{f=v,...}`, a bare `type`, or `null`. Predicates may come in
/// any order and are canonicalized. Throws ParseError (line 1).
Symbol parse_symbol(std::string_view text);

/// Canonical text: `type{a=1,b=2}` or `null`.
std::string to_string(const Symbol& symbol);
std::string to_string(const Observation& obs);
/// Uses the label when present, else the `in / out` text with `*` sides.
std::string to_string(const ObservationPattern& pattern);
std::string pattern_text(const ObservationPattern& pattern);

/// Types equal and every predicate of `pattern` present in `concrete`.
bool symbol_matches(const Symbol& concrete, const Symbol& pattern);

/// Some concrete symbol matches both patterns.
bool compatible(const Symbol& a, const Symbol& b);

/// The least specific symbol matched by exactly the symbols matching both.
std::optional<Symbol> merge(const Symbol& a, const Symbol& b);

bool matches(const Observation& obs, const ObservationPattern& pattern);
/// Every observation matching `p` also matches `q`.
bool implies(const ObservationPattern& p, const ObservationPattern& q);
/// Some observation matches both.
bool compatible(const ObservationPattern& p, const ObservationPattern& q);
std::optional<ObservationPattern> merge(const ObservationPattern& p, const ObservationPattern& q);

}  // namespace psmfuzz
