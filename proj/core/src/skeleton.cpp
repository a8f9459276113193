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

#include "psmfuzz/skeleton.hpp"

#include <algorithm>
#include <stdexcept>

#include "psmfuzz/errors.hpp"

namespace psmfuzz {

namespace {

std::vector<ObservationPattern> normalized(std::vector<ObservationPattern> ps) {
  std::stable_sort(ps.begin(), ps.end());
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
  return ps;
}

}  // namespace

SkeletonElement::SkeletonElement(ElementKind kind, std::vector<ObservationPattern> ps)
    : kind_(kind), patterns_(normalized(std::move(ps))) {
  if (kind_ == ElementKind::AnyStar) {
    patterns_.clear();
  } else if (patterns_.empty()) {
    throw std::invalid_argument("skeleton element needs at least one pattern");
  }
  if (kind_ == ElementKind::Literal && patterns_.size() != 1) {
    throw std::invalid_argument("literal holds exactly one pattern");
  }
}

SkeletonElement SkeletonElement::literal(ObservationPattern p) {
  return SkeletonElement(ElementKind::Literal, {std::move(p)});
}
SkeletonElement SkeletonElement::neg_literal(std::vector<ObservationPattern> ps) {
  return SkeletonElement(ElementKind::NegLiteral, std::move(ps));
}
SkeletonElement SkeletonElement::any_star() { return SkeletonElement(ElementKind::AnyStar, {}); }
SkeletonElement SkeletonElement::neg_star(std::vector<ObservationPattern> ps) {
  return SkeletonElement(ElementKind::NegStar, std::move(ps));
}
SkeletonElement SkeletonElement::choice(std::vector<ObservationPattern> ps) {
  ps = normalized(std::move(ps));
  if (ps.size() == 1) return literal(ps.front());
  return SkeletonElement(ElementKind::LiteralChoice, std::move(ps));
}

bool SkeletonElement::accepts(const Observation& obs) const {
  auto any_match = [&] {
    return std::any_of(patterns_.begin(), patterns_.end(),
                       [&](const ObservationPattern& p) { return matches(obs, p); });
  };
  switch (kind_) {
    case ElementKind::AnyStar:
      return true;
    case ElementKind::Literal:
    case ElementKind::LiteralChoice:
      return any_match();
    case ElementKind::NegLiteral:
    case ElementKind::NegStar:
      return !any_match();
  }
  return false;
}

// ---------------------------------------------------------------------------
// Generation.

namespace {

using Patterns = std::vector<ObservationPattern>;

// Whole-prefix exclusion left by VIO(O φ): the atoms must not occur at any
// element before index `at` of the final skeleton.
struct Exclusion {
  std::size_t at;
  Patterns atoms;
};

struct Frag {
  std::vector<SkeletonElement> elems;
  std::vector<Exclusion> exclusions;
  // Produced by Y: the next fragment must start right after this one.
  bool open_tail = false;
  // Produced by Y: when appended, goes right before the previous position.
  bool shift_back = false;
};

using Alts = std::vector<Frag>;

enum class Mode { Sat, Vio };

[[noreturn]] void unsupported(const std::string& what) { throw UnsupportedShape(what); }

std::size_t leading_stars(const std::vector<SkeletonElement>& es) {
  std::size_t k = 0;
  while (k < es.size() && es[k].is_star()) ++k;
  return k;
}

Frag concat(const Frag& a, const Frag& b) {
  if (a.elems.empty() && a.exclusions.empty() && !a.open_tail) return b;
  Frag r;
  if (b.shift_back && !a.elems.empty()) {
    if (a.open_tail) unsupported("yesterday on both sides of one position");
    if (!a.elems.back().is_positional()) unsupported("yesterday after a star");
    std::size_t cut = a.elems.size() - 1;
    r.elems.assign(a.elems.begin(), a.elems.begin() + static_cast<std::ptrdiff_t>(cut));
    r.elems.insert(r.elems.end(), b.elems.begin(), b.elems.end());
    r.elems.push_back(a.elems.back());
    for (const auto& e : a.exclusions) {
      r.exclusions.push_back({e.at > cut ? e.at + b.elems.size() : e.at, e.atoms});
    }
    for (const auto& e : b.exclusions) r.exclusions.push_back({cut + e.at, e.atoms});
    return r;
  }
  std::size_t drop = a.open_tail ? leading_stars(b.elems) : 0;
  r.elems = a.elems;
  r.elems.insert(r.elems.end(), b.elems.begin() + static_cast<std::ptrdiff_t>(drop), b.elems.end());
  r.exclusions = a.exclusions;
  for (const auto& e : b.exclusions) {
    r.exclusions.push_back({a.elems.size() + (e.at > drop ? e.at - drop : 0), e.atoms});
  }
  bool b_vanished = b.elems.size() == drop;
  r.open_tail = b.open_tail || (a.open_tail && b_vanished);
  return r;
}

Alts concat(const Alts& as, const Alts& bs) {
  Alts out;
  for (const auto& a : as) {
    for (const auto& b : bs) out.push_back(concat(a, b));
  }
  return out;
}

Frag single(SkeletonElement e) {
  Frag f;
  f.elems.push_back(std::move(e));
  return f;
}

// Atom set for "φ holds": an atom, an OR of atoms, or an AND of atoms
// (merged to one pattern).
Patterns holding_atoms(const Formula& f) {
  if (is_atom(f)) return {f.atom};
  if (f.kind == FormulaKind::Or) {
    Patterns l = holding_atoms(f.lhs());
    Patterns r = holding_atoms(f.rhs());
    l.insert(l.end(), r.begin(), r.end());
    return l;
  }
  if (f.kind == FormulaKind::And) {
    Patterns l = holding_atoms(f.lhs());
    Patterns r = holding_atoms(f.rhs());
    if (l.size() == 1 && r.size() == 1) {
      if (auto m = merge(l[0], r[0])) return {*m};
      return {};
    }
  }
  unsupported("expected an atom or a disjunction of atoms, got " + to_string(f));
}

// Flattens a chain of the same connective whose leaves are atoms or
// negated atoms.
void flatten(const Formula& f, FormulaKind kind, Patterns& pos, Patterns& neg) {
  if (f.kind == kind) {
    flatten(f.lhs(), kind, pos, neg);
    flatten(f.rhs(), kind, pos, neg);
  } else if (is_atom(f)) {
    pos.push_back(f.atom);
  } else if (is_negated_atom(f)) {
    neg.push_back(f.lhs().atom);
  } else {
    unsupported("conjunction/disjunction children must be atoms or negated atoms: " + to_string(f));
  }
}

// One position holding every pattern in `pos` and none in `neg`.
// Empty result means unsatisfiable.
Alts one_position(const Patterns& pos, const Patterns& neg) {
  if (pos.empty()) return {single(SkeletonElement::neg_literal(neg))};
  ObservationPattern merged = pos.front();
  for (std::size_t i = 1; i < pos.size(); ++i) {
    auto m = merge(merged, pos[i]);
    if (!m) return {};
    merged = *m;
  }
  for (const auto& n : neg) {
    if (implies(merged, n)) return {};
    if (compatible(merged, n)) {
      unsupported("cannot express " + to_string(merged) + " without " + to_string(n) +
                  " as one literal");
    }
  }
  return {single(SkeletonElement::literal(merged))};
}

Frag prefix_exclusion(const Patterns& atoms) {
  Frag f;
  if (!atoms.empty()) {
    f.elems.push_back(SkeletonElement::neg_star(atoms));
    f.exclusions.push_back({0, atoms});
  }
  return f;
}

Alts gen(const Formula& f, Mode mode);

Alts gen_yesterday(const Formula& f, Mode mode) {
  Alts inner = gen(f.lhs(), mode);
  for (auto& a : inner) {
    if (a.open_tail || a.shift_back) unsupported("nested yesterday");
    a.open_tail = true;
    a.shift_back = true;
  }
  return inner;
}

Alts gen(const Formula& f, Mode mode) {
  const bool sat = mode == Mode::Sat;
  switch (f.kind) {
    case FormulaKind::Atom:
      if (sat) return {single(SkeletonElement::literal(f.atom))};
      return {single(SkeletonElement::neg_literal({f.atom}))};

    case FormulaKind::Not:
      return gen(f.lhs(), sat ? Mode::Vio : Mode::Sat);

    case FormulaKind::Implies:
      if (!sat) return concat(gen(f.lhs(), Mode::Sat), gen(f.rhs(), Mode::Vio));
      {
        Alts l = gen(f.lhs(), Mode::Vio);
        Alts r = gen(f.rhs(), Mode::Sat);
        l.insert(l.end(), r.begin(), r.end());
        return l;
      }

    case FormulaKind::And:
    case FormulaKind::Or: {
      Patterns pos, neg;
      flatten(f, f.kind, pos, neg);
      bool is_and = f.kind == FormulaKind::And;
      // SAT(AND) and VIO(OR) pin every child to one position.
      if (is_and == sat) {
        return is_and ? one_position(pos, neg) : one_position(neg, pos);
      }
      // SAT(OR) of plain atoms, VIO(AND) of negated atoms: a choice.
      const Patterns& options = is_and ? neg : pos;
      const Patterns& others = is_and ? pos : neg;
      if (others.empty()) return {single(SkeletonElement::choice(options))};
      Alts out;
      for (const auto& p : pos) {
        Alts a = is_and ? Alts{single(SkeletonElement::neg_literal({p}))}
                        : Alts{single(SkeletonElement::literal(p))};
        out.insert(out.end(), a.begin(), a.end());
      }
      for (const auto& n : neg) {
        Alts a = is_and ? Alts{single(SkeletonElement::literal(n))}
                        : Alts{single(SkeletonElement::neg_literal({n}))};
        out.insert(out.end(), a.begin(), a.end());
      }
      return out;
    }

    case FormulaKind::Yesterday:
      return gen_yesterday(f, mode);

    case FormulaKind::Once:
      if (sat) {
        return concat(concat(Alts{single(SkeletonElement::any_star())}, gen(f.lhs(), Mode::Sat)),
                      Alts{single(SkeletonElement::any_star())});
      }
      return {prefix_exclusion(holding_atoms(f.lhs()))};

    case FormulaKind::Historically:
      if (!sat) return concat(Alts{single(SkeletonElement::any_star())}, gen(f.lhs(), Mode::Vio));
      // H ¬ψ is ¬O ψ.
      if (f.lhs().kind != FormulaKind::Not) unsupported("historically must wrap a negation here");
      return {prefix_exclusion(holding_atoms(f.lhs().lhs()))};

    case FormulaKind::Since: {
      const Formula& hold = f.lhs();
      const Formula& trigger = f.rhs();
      if (trigger.kind == FormulaKind::Since) unsupported("nested since on the right of since");
      if (!sat) {
        Patterns atoms = holding_atoms(trigger);
        Alts guard = {atoms.empty() ? Frag{} : single(SkeletonElement::neg_star(atoms))};
        return concat(guard, gen(hold, Mode::Vio));
      }
      if (is_atom(hold)) return gen(trigger, Mode::Sat);
      if (is_negated_atom(hold)) {
        return concat(gen(trigger, Mode::Sat),
                      Alts{single(SkeletonElement::neg_star({hold.lhs().atom}))});
      }
      unsupported("since can only be satisfied with an atomic left operand");
    }
  }
  unsupported("unknown formula kind");
}

std::vector<SkeletonElement> merge_stars(const std::vector<SkeletonElement>& es) {
  std::vector<SkeletonElement> out;
  for (const auto& e : es) {
    if (!out.empty() && out.back().is_star() && e.is_star()) {
      const auto& prev = out.back();
      if (prev.kind() == ElementKind::AnyStar || e.kind() == ElementKind::AnyStar) {
        out.back() = SkeletonElement::any_star();
      } else {
        // Narrower of the two languages keeps every word a violation.
        Patterns u = prev.patterns();
        u.insert(u.end(), e.patterns().begin(), e.patterns().end());
        out.back() = SkeletonElement::neg_star(u);
      }
      continue;
    }
    out.push_back(e);
  }
  return out;
}

// Applies prefix exclusions, merges stars, drops the trailing star.
// Returns nullopt for an unsatisfiable or unconstructible fragment.
std::optional<std::vector<SkeletonElement>> finalize(Frag f) {
  if (f.shift_back && !f.open_tail) unsupported("yesterday without a following position");
  if (f.open_tail) unsupported("yesterday needs a following position");
  for (const auto& ex : f.exclusions) {
    for (std::size_t i = 0; i < ex.at && i < f.elems.size(); ++i) {
      SkeletonElement& e = f.elems[i];
      switch (e.kind()) {
        case ElementKind::AnyStar:
          e = SkeletonElement::neg_star(ex.atoms);
          break;
        case ElementKind::NegStar:
        case ElementKind::NegLiteral: {
          Patterns u = e.patterns();
          u.insert(u.end(), ex.atoms.begin(), ex.atoms.end());
          e = e.kind() == ElementKind::NegStar ? SkeletonElement::neg_star(u)
                                               : SkeletonElement::neg_literal(u);
          break;
        }
        case ElementKind::Literal:
        case ElementKind::LiteralChoice: {
          Patterns kept;
          for (const auto& p : e.patterns()) {
            bool excluded = false;
            for (const auto& a : ex.atoms) {
              if (implies(p, a)) {
                excluded = true;
                break;
              }
              if (compatible(p, a)) {
                unsupported("literal " + to_string(p) + " overlaps excluded atom " + to_string(a));
              }
            }
            if (!excluded) kept.push_back(p);
          }
          if (kept.empty()) return std::nullopt;
          e = SkeletonElement::choice(kept);
          break;
        }
      }
    }
  }
  auto es = merge_stars(f.elems);
  while (!es.empty() && es.back().is_star()) es.pop_back();
  if (std::none_of(es.begin(), es.end(), [](const SkeletonElement& e) { return e.is_positional(); })) {
    return std::nullopt;
  }
  return es;
}

}  // namespace

std::vector<TestSkeleton> generate_skeletons(const Formula& formula, std::size_t max_skeletons,
                                             const std::string& property_id) {
  if (max_skeletons == 0) throw std::invalid_argument("max_skeletons must be positive");
  Alts alts;
  try {
    alts = gen(formula, Mode::Vio);
  } catch (const UnsupportedShape& e) {
    if (property_id.empty()) throw;
    throw UnsupportedShape(property_id + ": " + e.what());
  }
  std::vector<TestSkeleton> out;
  for (auto& frag : alts) {
    std::optional<std::vector<SkeletonElement>> es;
    try {
      es = finalize(std::move(frag));
    } catch (const UnsupportedShape& e) {
      if (property_id.empty()) throw;
      throw UnsupportedShape(property_id + ": " + e.what());
    }
    if (!es) continue;
    TestSkeleton s{std::move(*es), property_id, {}};
    bool covered = std::any_of(out.begin(), out.end(),
                               [&](const TestSkeleton& prev) { return covers(prev, s); });
    if (covered) continue;
    s.id = property_id + "#" + std::to_string(out.size() + 1);
    out.push_back(std::move(s));
    if (out.size() == max_skeletons) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Matching.

namespace {

// Adds k and every index reachable from it over star elements.
void close(const std::vector<SkeletonElement>& es, std::vector<char>& set) {
  for (std::size_t k = 0; k < es.size(); ++k) {
    if (set[k] && es[k].is_star()) set[k + 1] = 1;
  }
}

}  // namespace

std::optional<std::size_t> shortest_match(const TestSkeleton& skeleton,
                                          const std::vector<Observation>& trace) {
  const auto& es = skeleton.elements;
  const std::size_t m = es.size();
  std::vector<char> cur(m + 1, 0);
  cur[0] = 1;
  close(es, cur);
  if (cur[m]) return 0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    std::vector<char> next(m + 1, 0);
    bool any = false;
    for (std::size_t k = 0; k < m; ++k) {
      if (!cur[k] || !es[k].accepts(trace[i])) continue;
      next[es[k].is_star() ? k : k + 1] = 1;
      any = true;
    }
    if (!any) return std::nullopt;
    close(es, next);
    if (next[m]) return i + 1;
    cur.swap(next);
  }
  return std::nullopt;
}

bool skeleton_matches(const TestSkeleton& skeleton, const std::vector<Observation>& trace) {
  return shortest_match(skeleton, trace).has_value();
}

std::size_t literal_count(const TestSkeleton& skeleton) {
  return static_cast<std::size_t>(std::count_if(
      skeleton.elements.begin(), skeleton.elements.end(),
      [](const SkeletonElement& e) { return e.is_positional(); }));
}

bool letters_subset(const SkeletonElement& e, const SkeletonElement& f) {
  auto disjoint_from_all = [](const ObservationPattern& p, const Patterns& qs) {
    return std::none_of(qs.begin(), qs.end(),
                        [&](const ObservationPattern& q) { return compatible(p, q); });
  };
  auto implied_by_one = [](const ObservationPattern& p, const Patterns& qs) {
    return std::any_of(qs.begin(), qs.end(),
                       [&](const ObservationPattern& q) { return implies(p, q); });
  };
  const bool e_positive = e.kind() == ElementKind::Literal || e.kind() == ElementKind::LiteralChoice;
  const bool e_negative = e.kind() == ElementKind::NegLiteral || e.kind() == ElementKind::NegStar;
  switch (f.kind()) {
    case ElementKind::AnyStar:
      return true;
    case ElementKind::NegStar:
    case ElementKind::NegLiteral:
      if (e_positive) {
        return std::all_of(e.patterns().begin(), e.patterns().end(),
                           [&](const ObservationPattern& p) { return disjoint_from_all(p, f.patterns()); });
      }
      if (e_negative) {
        // complement(S) ⊆ complement(T) when each t is inside some s.
        return std::all_of(f.patterns().begin(), f.patterns().end(),
                           [&](const ObservationPattern& t) { return implied_by_one(t, e.patterns()); });
      }
      return false;
    case ElementKind::Literal:
    case ElementKind::LiteralChoice:
      if (!e_positive) return false;
      return std::all_of(e.patterns().begin(), e.patterns().end(),
                         [&](const ObservationPattern& p) { return implied_by_one(p, f.patterns()); });
  }
  return false;
}

bool covers(const TestSkeleton& a, const TestSkeleton& b) {
  const auto& A = a.elements;
  const auto& B = b.elements;
  const std::size_t n = A.size();
  const std::size_t m = B.size();
  // ok[i][j]: every word of B[j..] has a prefix in A[i..].
  std::vector<std::vector<char>> ok(n + 1, std::vector<char>(m + 1, 0));
  for (std::size_t j = 0; j <= m; ++j) ok[n][j] = 1;
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m + 1; j-- > 0;) {
      bool v = false;
      if (A[i].is_star()) {
        v = ok[i + 1][j];
        if (!v && j < m && letters_subset(B[j], A[i])) v = ok[i][j + 1];
      } else if (j < m && B[j].is_positional() && letters_subset(B[j], A[i])) {
        v = ok[i + 1][j + 1];
      }
      ok[i][j] = v;
    }
  }
  return ok[0][0];
}

// ---------------------------------------------------------------------------
// Dumps.

namespace {

std::string join(const Patterns& ps, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (i) out += sep;
    out += to_string(ps[i]);
  }
  return out;
}

}  // namespace

std::string dump(const SkeletonElement& e) {
  switch (e.kind()) {
    case ElementKind::Literal:
      return "LIT " + to_string(e.pattern());
    case ElementKind::NegLiteral:
      return "NEG " + join(e.patterns(), ",");
    case ElementKind::AnyStar:
      return "ANY*";
    case ElementKind::NegStar:
      return "NEG*(" + join(e.patterns(), ",") + ")";
    case ElementKind::LiteralChoice:
      return "ALT " + join(e.patterns(), "|");
  }
  return {};
}

std::string dump(const TestSkeleton& skeleton) {
  std::string out;
  for (const auto& e : skeleton.elements) out += dump(e) + "\n";
  return out;
}

std::string compact(const TestSkeleton& skeleton) {
  std::string out;
  for (const auto& e : skeleton.elements) {
    if (!out.empty()) out += ' ';
    switch (e.kind()) {
      case ElementKind::Literal:
        out += to_string(e.pattern());
        break;
      case ElementKind::NegLiteral:
        out += "!(" + join(e.patterns(), ",") + ")";
        break;
      case ElementKind::AnyStar:
        out += "(.)*";
        break;
      case ElementKind::NegStar:
        out += "!(" + join(e.patterns(), ",") + ")*";
        break;
      case ElementKind::LiteralChoice:
        out += "(" + join(e.patterns(), "|") + ")";
        break;
    }
  }
  return out;
}

}  // namespace psmfuzz
