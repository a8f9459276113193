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

// Exhaustive enumeration of step sequences, kept independent of the DP so
// the two can be compared.

#include <map>
#include <set>

#include "psmfuzz/trace_builder.hpp"

namespace psmfuzz {

namespace {

struct Move {
  TraceStep step;
  Transition base;
  bool mutated = false;  // M1
  std::optional<StateId> redirect;
  enum class Kind { Plain, Placed, Marker } kind = Kind::Plain;
};

class Oracle {
 public:
  Oracle(const GuidingPsm& psm, const TestSkeleton& skeleton, const Budget& budget)
      : psm_(psm), es_(skeleton.elements), budget_(budget) {
    for (std::size_t k = 0; k < es_.size(); ++k) {
      if (es_[k].is_positional()) last_ = k;
    }
  }

  std::vector<InstantiatedTrace> run() {
    if (last_ == npos) return {};
    std::set<std::size_t> start = closure({0});
    walk(psm_.initial(), start, budget_.mutations);
    std::vector<InstantiatedTrace> out;
    for (auto& [key, t] : found_) out.push_back(std::move(t));
    return out;
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::set<std::size_t> closure(std::set<std::size_t> s) const {
    for (std::size_t k = 0; k < es_.size(); ++k) {
      if (s.count(k) && es_[k].is_star()) s.insert(k + 1);
    }
    return s;
  }

  // Placements for positional element k at state q: legal only when no
  // transition at q already satisfies it.
  std::vector<std::pair<Observation, Transition>> placements(std::size_t k, const StateId& q) const {
    std::vector<std::pair<Observation, Transition>> out;
    const SkeletonElement& e = es_[k];
    if (!e.is_positional() || e.kind() == ElementKind::NegLiteral) return out;
    for (const Transition& t : psm_.transitions()) {
      if (t.source == q && e.accepts(t.observation())) return out;
    }
    for (const auto& p : e.patterns()) {
      if (!p.input) continue;
      bool any = false;
      for (const Transition& t : psm_.transitions()) {
        if (t.source != q || t.input.type() != p.input->type()) continue;
        any = true;
        out.push_back({Observation{*p.input, p.output ? *p.output : t.output}, t});
      }
      if (!any) {
        Transition syn{q, *p.input, Symbol::null_action(), q};
        out.push_back({Observation{*p.input, p.output ? *p.output : syn.output}, syn});
      }
    }
    return out;
  }

  std::vector<Move> moves(const StateId& q, std::size_t mu) const {
    std::vector<Move> base_moves;
    for (const Transition& t : psm_.transitions()) {
      if (t.source != q) continue;
      Move m;
      m.step = TraceStep::concrete(t.observation());
      m.base = t;
      base_moves.push_back(m);
      if (mu >= 1) {
        Move mk;
        mk.step = TraceStep::marker(t.input);
        mk.base = t;
        mk.mutated = true;
        mk.kind = Move::Kind::Marker;
        base_moves.push_back(mk);
      }
    }
    if (mu >= 1) {
      std::set<std::pair<Observation, Transition>> seen;
      for (std::size_t k = 0; k < es_.size(); ++k) {
        for (auto& [obs, t] : placements(k, q)) {
          if (!seen.insert({obs, t}).second) continue;
          Move m;
          m.step = TraceStep::concrete(obs);
          m.base = t;
          m.mutated = true;
          m.kind = Move::Kind::Placed;
          base_moves.push_back(m);
        }
      }
    }
    std::vector<Move> all;
    for (const Move& m : base_moves) {
      all.push_back(m);
      for (const StateId& q2 : psm_.states()) {
        if (q2 == m.base.destination) continue;
        Move r = m;
        r.redirect = q2;
        all.push_back(r);
      }
    }
    return all;
  }

  // Advances the alignment set by one move; `accepted` reports consumption
  // of the last positional element.
  std::set<std::size_t> advance(const std::set<std::size_t>& cur, const Move& m, const StateId& q,
                                bool& accepted) const {
    std::set<std::size_t> next;
    accepted = false;
    for (std::size_t k : cur) {
      if (k >= es_.size()) continue;
      const SkeletonElement& e = es_[k];
      std::size_t to = npos;
      switch (m.kind) {
        case Move::Kind::Plain:
          if (e.accepts(m.step.obs)) to = e.is_star() ? k : k + 1;
          break;
        case Move::Kind::Marker:
          if (e.kind() == ElementKind::AnyStar) to = k;
          break;
        case Move::Kind::Placed:
          for (auto& [obs, t] : placements(k, q)) {
            if (obs == m.step.obs && t == m.base) to = k + 1;
          }
          break;
      }
      if (to == npos) continue;
      if (e.is_positional() && k == last_) {
        accepted = true;
        continue;
      }
      next.insert(to);
    }
    return closure(next);
  }

  void walk(const StateId& q, const std::set<std::size_t>& align, std::size_t mu) {
    if (prefix_.size() >= budget_.length) return;
    for (const Move& m : moves(q, mu)) {
      std::size_t cost = (m.mutated ? 1 : 0) + (m.redirect ? 1 : 0);
      if (cost > mu) continue;
      bool accepted = false;
      std::set<std::size_t> next = advance(align, m, q, accepted);
      if (!accepted && next.empty()) continue;
      prefix_.push_back(m);
      if (accepted) record();
      if (!next.empty()) walk(m.redirect ? *m.redirect : m.base.destination, next, mu - cost);
      prefix_.pop_back();
    }
  }

  void record() {
    InstantiatedTrace t;
    for (std::size_t i = 0; i < prefix_.size(); ++i) {
      const Move& m = prefix_[i];
      t.steps.push_back(m.step);
      if (m.mutated) {
        MutationAnnotation a;
        a.kind = MutationKind::Observation;
        a.step = i;
        a.base = m.base;
        if (m.kind == Move::Kind::Placed) a.placed = m.step.obs;
        t.annotations.push_back(a);
      }
      if (m.redirect) {
        MutationAnnotation a;
        a.kind = MutationKind::Destination;
        a.step = i;
        a.base = m.base;
        a.redirect = *m.redirect;
        t.annotations.push_back(a);
      }
    }
    replay(psm_, t);
    std::string key = identity_key(t);
    found_.emplace(std::move(key), std::move(t));
  }

  const GuidingPsm& psm_;
  const std::vector<SkeletonElement>& es_;
  Budget budget_;
  std::size_t last_ = npos;
  std::vector<Move> prefix_;
  std::map<std::string, InstantiatedTrace> found_;
};

}  // namespace

std::vector<InstantiatedTrace> brute_force_traces(const GuidingPsm& psm,
                                                  const TestSkeleton& skeleton,
                                                  const Budget& budget) {
  Oracle oracle(psm, skeleton, budget);
  auto out = oracle.run();
  order_traces(out, skeleton.id);
  return out;
}

}  // namespace psmfuzz
