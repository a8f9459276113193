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

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "psmfuzz/symbol.hpp"

namespace psmfuzz {

enum class FormulaKind { Atom, Not, And, Or, Implies, Yesterday, Once, Historically, Since };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// Past-time LTL node. Immutable once built; subtrees may be shared.
struct Formula {
  FormulaKind kind = FormulaKind::Atom;
  ObservationPattern atom;          // Atom only
  std::vector<FormulaPtr> children;  // 0, 1 or 2 per kind

  static FormulaPtr make_atom(ObservationPattern pattern);
  static FormulaPtr unary(FormulaKind kind, FormulaPtr child);
  static FormulaPtr binary(FormulaKind kind, FormulaPtr lhs, FormulaPtr rhs);

  const Formula& lhs() const { return *children.at(0); }
  const Formula& rhs() const { return *children.at(1); }
};

std::size_t arity(FormulaKind kind);
bool is_atom(const Formula& f);
bool is_negated_atom(const Formula& f);

struct Property {
  std::string id;
  FormulaPtr formula;
  std::string description;
};

class PropertySet {
 public:
  void add(Property p);
  const std::vector<Property>& properties() const noexcept { return properties_; }
  const Property* find(std::string_view id) const;
  const std::map<std::string, ObservationPattern, std::less<>>& atoms() const noexcept { return atoms_; }
  void add_atom(const std::string& id, ObservationPattern pattern);
  void describe(std::string_view id, std::string text);
  bool empty() const noexcept { return properties_.empty(); }
  std::size_t size() const noexcept { return properties_.size(); }

 private:
  std::vector<Property> properties_;
  std::map<std::string, ObservationPattern, std::less<>> atoms_;
};

/// Grammar, one declaration per line:
///   atom <id> = <in> / <out>       either side may be `*`
///   prop <id>: <expr>
///   describe <id> <free text>      optional, after the prop
/// Operators by binding strength: `!` `H` `Y` `O` (prefix), `S`, `&`, `|`,
/// `->` (right associative).
PropertySet parse_properties(std::string_view text);

/// Truth at the last position. Empty trace: H true, everything else built
/// from atoms/Y/O/S is false (negation and connectives still apply).
bool evaluate(const Formula& formula, const std::vector<Observation>& trace);

/// Truth value of `formula` at every position of `trace`.
std::vector<bool> evaluate_all(const Formula& formula, const std::vector<Observation>& trace);

std::string to_string(const Formula& formula);

/// Distinct atoms in first-appearance order.
std::vector<ObservationPattern> atoms_of(const Formula& formula);

}  // namespace psmfuzz
