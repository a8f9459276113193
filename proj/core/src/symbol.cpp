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

#include "psmfuzz/symbol.hpp"

#include <algorithm>
#include <tuple>

#include "psmfuzz/errors.hpp"
#include "text.hpp"

namespace psmfuzz {

Symbol::Symbol(std::string type, std::vector<FieldPredicate> predicates)
    : type_(std::move(type)), predicates_(std::move(predicates)) {
  std::sort(predicates_.begin(), predicates_.end());
  for (std::size_t i = 1; i < predicates_.size(); ++i) {
    if (predicates_[i].field == predicates_[i - 1].field) {
      throw ModelError("duplicate predicate on field '" + predicates_[i].field + "'");
    }
  }
  if (is_null() && !predicates_.empty()) throw ModelError("null carries no predicates");
}

Symbol Symbol::null_action() { return Symbol(std::string(kNullType)); }

std::optional<std::uint64_t> Symbol::get(std::string_view field) const {
  for (const auto& p : predicates_) {
    if (p.field == field) return p.value;
  }
  return std::nullopt;
}

Symbol Symbol::with(std::string_view field, std::uint64_t value) const {
  std::vector<FieldPredicate> preds;
  preds.reserve(predicates_.size() + 1);
  bool replaced = false;
  for (const auto& p : predicates_) {
    if (p.field == field) {
      preds.push_back({p.field, value});
      replaced = true;
    } else {
      preds.push_back(p);
    }
  }
  if (!replaced) preds.push_back({std::string(field), value});
  return Symbol(type_, std::move(preds));
}

ObservationPattern ObservationPattern::exact(const Observation& obs, std::string label) {
  return ObservationPattern{obs.input, obs.output, std::move(label)};
}

bool ObservationPattern::operator<(const ObservationPattern& other) const {
  return std::tie(input, output) < std::tie(other.input, other.output);
}

Symbol parse_symbol(std::string_view text) {
  detail::Cursor cur(text, 1);
  Symbol s = cur.symbol();
  if (!cur.at_end()) cur.fail("trailing characters after symbol");
  return s;
}

std::string to_string(const Symbol& symbol) {
  if (symbol.is_null()) return std::string(Symbol::kNullType);
  std::string out = symbol.type();
  out += '{';
  bool first = true;
  for (const auto& p : symbol.predicates()) {
    if (!first) out += ',';
    first = false;
    out += p.field;
    out += '=';
    out += std::to_string(p.value);
  }
  out += '}';
  return out;
}

std::string to_string(const Observation& obs) {
  return to_string(obs.input) + " / " + to_string(obs.output);
}

std::string pattern_text(const ObservationPattern& pattern) {
  std::string in = pattern.input ? to_string(*pattern.input) : "*";
  std::string out = pattern.output ? to_string(*pattern.output) : "*";
  return in + " / " + out;
}

std::string to_string(const ObservationPattern& pattern) {
  return pattern.label.empty() ? pattern_text(pattern) : pattern.label;
}

bool symbol_matches(const Symbol& concrete, const Symbol& pattern) {
  if (concrete.type() != pattern.type()) return false;
  return std::includes(concrete.predicates().begin(), concrete.predicates().end(),
                       pattern.predicates().begin(), pattern.predicates().end());
}

bool compatible(const Symbol& a, const Symbol& b) { return merge(a, b).has_value(); }

std::optional<Symbol> merge(const Symbol& a, const Symbol& b) {
  if (a.type() != b.type()) return std::nullopt;
  std::vector<FieldPredicate> preds = a.predicates();
  for (const auto& p : b.predicates()) {
    auto existing = a.get(p.field);
    if (!existing) {
      preds.push_back(p);
    } else if (*existing != p.value) {
      return std::nullopt;
    }
  }
  return Symbol(a.type(), std::move(preds));
}

namespace {

bool side_matches(const Symbol& concrete, const std::optional<Symbol>& pattern) {
  return !pattern || symbol_matches(concrete, *pattern);
}

bool side_implies(const std::optional<Symbol>& p, const std::optional<Symbol>& q) {
  if (!q) return true;
  if (!p) return false;
  return symbol_matches(*p, *q);
}

bool side_compatible(const std::optional<Symbol>& p, const std::optional<Symbol>& q) {
  return !p || !q || compatible(*p, *q);
}

std::optional<std::optional<Symbol>> side_merge(const std::optional<Symbol>& p,
                                                const std::optional<Symbol>& q) {
  if (!p) return q;
  if (!q) return p;
  auto m = merge(*p, *q);
  if (!m) return std::nullopt;
  return std::optional<Symbol>(*m);
}

}  // namespace

bool matches(const Observation& obs, const ObservationPattern& pattern) {
  return side_matches(obs.input, pattern.input) && side_matches(obs.output, pattern.output);
}

bool implies(const ObservationPattern& p, const ObservationPattern& q) {
  return side_implies(p.input, q.input) && side_implies(p.output, q.output);
}

bool compatible(const ObservationPattern& p, const ObservationPattern& q) {
  return side_compatible(p.input, q.input) && side_compatible(p.output, q.output);
}

std::optional<ObservationPattern> merge(const ObservationPattern& p, const ObservationPattern& q) {
  auto in = side_merge(p.input, q.input);
  auto out = side_merge(p.output, q.output);
  if (!in || !out) return std::nullopt;
  ObservationPattern r{*in, *out, {}};
  if (r == p) r.label = p.label;
  else if (r == q) r.label = q.label;
  else if (!p.label.empty() && !q.label.empty()) r.label = p.label + "&" + q.label;
  return r;
}

}  // namespace psmfuzz
