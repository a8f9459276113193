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

#include "psmfuzz/pltl.hpp"

#include <algorithm>

#include "psmfuzz/errors.hpp"
#include "text.hpp"

namespace psmfuzz {

std::size_t arity(FormulaKind kind) {
  switch (kind) {
    case FormulaKind::Atom:
      return 0;
    case FormulaKind::Not:
    case FormulaKind::Yesterday:
    case FormulaKind::Once:
    case FormulaKind::Historically:
      return 1;
    default:
      return 2;
  }
}

FormulaPtr Formula::make_atom(ObservationPattern pattern) {
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Atom;
  f->atom = std::move(pattern);
  return f;
}

FormulaPtr Formula::unary(FormulaKind kind, FormulaPtr child) {
  if (arity(kind) != 1 || !child) throw std::invalid_argument("unary: bad kind or child");
  auto f = std::make_shared<Formula>();
  f->kind = kind;
  f->children = {std::move(child)};
  return f;
}

FormulaPtr Formula::binary(FormulaKind kind, FormulaPtr lhs, FormulaPtr rhs) {
  if (arity(kind) != 2 || !lhs || !rhs) throw std::invalid_argument("binary: bad kind or child");
  auto f = std::make_shared<Formula>();
  f->kind = kind;
  f->children = {std::move(lhs), std::move(rhs)};
  return f;
}

bool is_atom(const Formula& f) { return f.kind == FormulaKind::Atom; }

bool is_negated_atom(const Formula& f) {
  return f.kind == FormulaKind::Not && is_atom(f.lhs());
}

void PropertySet::add(Property p) {
  if (find(p.id)) throw ModelError("duplicate property id " + p.id);
  properties_.push_back(std::move(p));
}

const Property* PropertySet::find(std::string_view id) const {
  for (const auto& p : properties_) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

void PropertySet::add_atom(const std::string& id, ObservationPattern pattern) {
  pattern.label = id;
  if (!atoms_.emplace(id, std::move(pattern)).second) throw ModelError("duplicate atom " + id);
}

void PropertySet::describe(std::string_view id, std::string text) {
  for (auto& p : properties_) {
    if (p.id == id) {
      p.description = std::move(text);
      return;
    }
  }
  throw ModelError("unknown property " + std::string(id));
}

namespace {

class ExprParser {
 public:
  ExprParser(detail::Cursor& cur, const PropertySet& set) : cur_(cur), set_(set) {}

  FormulaPtr parse() {
    FormulaPtr f = implication();
    if (!cur_.at_end()) cur_.fail("unexpected token");
    return f;
  }

 private:
  FormulaPtr implication() {
    FormulaPtr lhs = disjunction();
    if (cur_.consume("->")) {
      FormulaPtr rhs = operand("->", [this] { return implication(); });
      return Formula::binary(FormulaKind::Implies, lhs, rhs);
    }
    return lhs;
  }

  FormulaPtr disjunction() {
    FormulaPtr lhs = conjunction();
    while (cur_.consume('|')) {
      lhs = Formula::binary(FormulaKind::Or, lhs, operand("|", [this] { return conjunction(); }));
    }
    return lhs;
  }

  FormulaPtr conjunction() {
    FormulaPtr lhs = since();
    while (cur_.consume('&')) {
      lhs = Formula::binary(FormulaKind::And, lhs, operand("&", [this] { return since(); }));
    }
    return lhs;
  }

  FormulaPtr since() {
    FormulaPtr lhs = unary();
    while (cur_.consume_word("S")) {
      lhs = Formula::binary(FormulaKind::Since, lhs, operand("S", [this] { return unary(); }));
    }
    return lhs;
  }

  FormulaPtr unary() {
    if (cur_.consume('!')) return Formula::unary(FormulaKind::Not, operand("!", [this] { return unary(); }));
    if (cur_.consume_word("H")) {
      return Formula::unary(FormulaKind::Historically, operand("H", [this] { return unary(); }));
    }
    if (cur_.consume_word("Y")) {
      return Formula::unary(FormulaKind::Yesterday, operand("Y", [this] { return unary(); }));
    }
    if (cur_.consume_word("O")) {
      return Formula::unary(FormulaKind::Once, operand("O", [this] { return unary(); }));
    }
    return primary();
  }

  FormulaPtr primary() {
    if (cur_.consume('(')) {
      FormulaPtr f = implication();
      cur_.expect(')', "to close '('");
      return f;
    }
    cur_.skip_ws();
    std::size_t col = cur_.column();
    if (cur_.at_end() || !detail::is_ident_start(cur_.peek())) cur_.fail("expected atom or '('");
    std::string name = cur_.identifier("atom");
    auto it = set_.atoms().find(name);
    if (it == set_.atoms().end()) cur_.fail_at(col, "unbound atom '" + name + "'");
    return Formula::make_atom(it->second);
  }

  // Parses the operand of `op`, turning a missing operand into an arity error.
  template <typename Fn>
  FormulaPtr operand(std::string_view op, Fn fn) {
    char c = cur_.peek();
    if (c == '\0' || c == ')' || c == '&' || c == '|' || (c == '-' )) {
      cur_.fail("operator '" + std::string(op) + "' is missing an operand");
    }
    return fn();
  }

  detail::Cursor& cur_;
  const PropertySet& set_;
};

}  // namespace

PropertySet parse_properties(std::string_view text) {
  PropertySet set;
  for (const auto& line : detail::logical_lines(text)) {
    detail::Cursor cur(line.text, line.number);
    std::size_t kw_col = (cur.skip_ws(), cur.column());
    std::string kw = cur.identifier("keyword");
    if (kw == "atom") {
      std::size_t id_col = (cur.skip_ws(), cur.column());
      std::string id = cur.identifier("atom id");
      if (id == "H" || id == "Y" || id == "O" || id == "S") cur.fail_at(id_col, "reserved name " + id);
      if (set.atoms().count(id)) cur.fail_at(id_col, "duplicate atom " + id);
      cur.expect('=', "after atom id");
      ObservationPattern p;
      p.input = cur.symbol_or_wildcard();
      cur.expect('/', "between input and output");
      p.output = cur.symbol_or_wildcard();
      if (!cur.at_end()) cur.fail("unexpected trailing text");
      set.add_atom(id, std::move(p));
    } else if (kw == "prop") {
      std::size_t id_col = (cur.skip_ws(), cur.column());
      std::string id = cur.identifier("property id");
      if (set.find(id)) cur.fail_at(id_col, "duplicate property " + id);
      cur.expect(':', "after property id");
      ExprParser parser(cur, set);
      FormulaPtr f = parser.parse();
      set.add(Property{id, f, to_string(*f)});
    } else if (kw == "describe") {
      std::size_t id_col = (cur.skip_ws(), cur.column());
      std::string id = cur.identifier("property id");
      if (!set.find(id)) cur.fail_at(id_col, "describe for unknown property " + id);
      cur.skip_ws();
      std::string desc = line.text.substr(cur.column() - 1);
      set.describe(id, desc);
    } else {
      cur.fail_at(kw_col, "unknown keyword '" + kw + "'");
    }
  }
  return set;
}

std::vector<bool> evaluate_all(const Formula& f, const std::vector<Observation>& trace) {
  const std::size_t n = trace.size();
  std::vector<bool> v(n, false);
  switch (f.kind) {
    case FormulaKind::Atom:
      for (std::size_t i = 0; i < n; ++i) v[i] = matches(trace[i], f.atom);
      return v;
    case FormulaKind::Not: {
      auto a = evaluate_all(f.lhs(), trace);
      for (std::size_t i = 0; i < n; ++i) v[i] = !a[i];
      return v;
    }
    case FormulaKind::Yesterday: {
      auto a = evaluate_all(f.lhs(), trace);
      for (std::size_t i = 1; i < n; ++i) v[i] = a[i - 1];
      return v;
    }
    case FormulaKind::Once: {
      auto a = evaluate_all(f.lhs(), trace);
      bool seen = false;
      for (std::size_t i = 0; i < n; ++i) v[i] = seen = seen || a[i];
      return v;
    }
    case FormulaKind::Historically: {
      auto a = evaluate_all(f.lhs(), trace);
      bool all = true;
      for (std::size_t i = 0; i < n; ++i) v[i] = all = all && a[i];
      return v;
    }
    default:
      break;
  }
  auto a = evaluate_all(f.lhs(), trace);
  auto b = evaluate_all(f.rhs(), trace);
  bool held = false;
  for (std::size_t i = 0; i < n; ++i) {
    switch (f.kind) {
      case FormulaKind::And:
        v[i] = a[i] && b[i];
        break;
      case FormulaKind::Or:
        v[i] = a[i] || b[i];
        break;
      case FormulaKind::Implies:
        v[i] = !a[i] || b[i];
        break;
      case FormulaKind::Since:
        held = b[i] || (held && a[i]);
        v[i] = held;
        break;
      default:
        break;
    }
  }
  return v;
}

namespace {

bool evaluate_empty(const Formula& f) {
  switch (f.kind) {
    case FormulaKind::Historically:
      return true;
    case FormulaKind::Not:
      return !evaluate_empty(f.lhs());
    case FormulaKind::And:
      return evaluate_empty(f.lhs()) && evaluate_empty(f.rhs());
    case FormulaKind::Or:
      return evaluate_empty(f.lhs()) || evaluate_empty(f.rhs());
    case FormulaKind::Implies:
      return !evaluate_empty(f.lhs()) || evaluate_empty(f.rhs());
    default:
      return false;
  }
}

}  // namespace

bool evaluate(const Formula& formula, const std::vector<Observation>& trace) {
  if (trace.empty()) return evaluate_empty(formula);
  return evaluate_all(formula, trace).back();
}

std::string to_string(const Formula& f) {
  auto wrap = [](const Formula& c) {
    std::string s = to_string(c);
    return (is_atom(c) || arity(c.kind) == 1) ? s : "(" + s + ")";
  };
  switch (f.kind) {
    case FormulaKind::Atom:
      return to_string(f.atom);
    case FormulaKind::Not:
      return "!" + wrap(f.lhs());
    case FormulaKind::Yesterday:
      return "Y " + wrap(f.lhs());
    case FormulaKind::Once:
      return "O " + wrap(f.lhs());
    case FormulaKind::Historically:
      return "H " + wrap(f.lhs());
    case FormulaKind::And:
      return wrap(f.lhs()) + " & " + wrap(f.rhs());
    case FormulaKind::Or:
      return wrap(f.lhs()) + " | " + wrap(f.rhs());
    case FormulaKind::Implies:
      return wrap(f.lhs()) + " -> " + wrap(f.rhs());
    case FormulaKind::Since:
      return wrap(f.lhs()) + " S " + wrap(f.rhs());
  }
  return {};
}

std::vector<ObservationPattern> atoms_of(const Formula& formula) {
  std::vector<ObservationPattern> out;
  auto visit = [&](auto&& self, const Formula& f) -> void {
    if (is_atom(f)) {
      if (std::find(out.begin(), out.end(), f.atom) == out.end()) out.push_back(f.atom);
      return;
    }
    for (const auto& c : f.children) self(self, *c);
  };
  visit(visit, formula);
  return out;
}

}  // namespace psmfuzz
