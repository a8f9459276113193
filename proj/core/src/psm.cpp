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

#include "psmfuzz/psm.hpp"

#include <algorithm>
#include <set>

#include "psmfuzz/errors.hpp"
#include "text.hpp"

namespace psmfuzz {

namespace {

// Returns the index of a transition that makes `b` ambiguous or a duplicate
// of an earlier one, as a pair (index, is_duplicate).
struct Conflict {
  std::size_t other;
  std::size_t index;
  bool duplicate;
};

std::optional<Conflict> find_conflict(const std::vector<Transition>& ts) {
  for (std::size_t i = 0; i < ts.size(); ++i) {
    for (std::size_t j = i + 1; j < ts.size(); ++j) {
      const Transition& a = ts[i];
      const Transition& b = ts[j];
      if (a.source != b.source || a.input.type() != b.input.type()) continue;
      if (a.input == b.input) return Conflict{i, j, true};
      if (a.input.predicates().size() != b.input.predicates().size()) continue;
      auto both = merge(a.input, b.input);
      if (!both) continue;
      // A transition on exactly the union outranks both for every symbol
      // they share, so the tie can never be observed.
      bool resolved = std::any_of(ts.begin(), ts.end(), [&](const Transition& t) {
        return t.source == a.source && t.input == *both;
      });
      if (!resolved) return Conflict{i, j, false};
    }
  }
  return std::nullopt;
}

std::string conflict_message(const std::vector<Transition>& ts, const Conflict& c) {
  const Transition& b = ts[c.index];
  if (c.duplicate) {
    return "duplicate transition for input " + to_string(b.input) + " at state " + b.source;
  }
  return "ambiguous inputs " + to_string(ts[c.other].input) + " and " + to_string(b.input) +
         " at state " + b.source + " (equally specific, no transition on their union)";
}

}  // namespace

GuidingPsm::GuidingPsm(std::vector<StateId> states, StateId initial,
                       std::vector<Transition> transitions, std::map<StateId, Observation> probes)
    : states_(std::move(states)),
      initial_(std::move(initial)),
      transitions_(std::move(transitions)),
      probes_(std::move(probes)) {
  std::set<StateId> seen;
  for (const auto& s : states_) {
    if (!seen.insert(s).second) throw ModelError("state declared twice: " + s);
    index_[s];
  }
  if (!has_state(initial_)) throw ModelError("initial state " + initial_ + " is not a state");
  for (std::size_t i = 0; i < transitions_.size(); ++i) {
    const Transition& t = transitions_[i];
    if (!has_state(t.source)) throw ModelError("unknown state " + t.source);
    if (!has_state(t.destination)) throw ModelError("unknown state " + t.destination);
    if (t.input.is_null()) throw ModelError("null is not an input symbol");
    index_[t.source].push_back(i);
  }
  if (auto c = find_conflict(transitions_)) throw ModelError(conflict_message(transitions_, *c));
  for (const auto& [state, obs] : probes_) {
    if (!has_state(state)) throw ModelError("probe for unknown state " + state);
  }
}

bool GuidingPsm::has_state(const StateId& state) const { return index_.count(state) > 0; }

std::vector<const Transition*> GuidingPsm::outgoing(const StateId& state) const {
  auto it = index_.find(state);
  if (it == index_.end()) throw ModelError("unknown state " + state);
  std::vector<const Transition*> out;
  out.reserve(it->second.size());
  for (std::size_t i : it->second) out.push_back(&transitions_[i]);
  return out;
}

std::optional<StepResult> step_exact(const GuidingPsm& psm, const StateId& state,
                                     const InputSymbol& input) {
  for (const Transition* t : psm.outgoing(state)) {
    if (t->input == input) return StepResult{t->output, t->destination, t};
  }
  return std::nullopt;
}

std::optional<StepResult> step(const GuidingPsm& psm, const StateId& state,
                               const InputSymbol& input) {
  const Transition* best = nullptr;
  for (const Transition* t : psm.outgoing(state)) {
    if (t->input == input) return StepResult{t->output, t->destination, t};
    if (!symbol_matches(input, t->input)) continue;
    if (!best || t->input.predicates().size() > best->input.predicates().size()) best = t;
  }
  if (!best) return std::nullopt;
  return StepResult{best->output, best->destination, best};
}

RunResult run(const GuidingPsm& psm, const std::vector<InputSymbol>& inputs) {
  RunResult r;
  StateId state = psm.initial();
  r.visited.push_back(state);
  for (const auto& in : inputs) {
    if (auto s = step(psm, state, in)) {
      r.observations.push_back({in, s->output});
      state = s->destination;
    } else {
      r.observations.push_back({in, Symbol::null_action()});
    }
    r.visited.push_back(state);
  }
  return r;
}

GuidingPsm parse_psm(std::string_view text) {
  std::vector<StateId> states;
  std::set<StateId> known;
  auto introduce = [&](const StateId& s) {
    if (known.insert(s).second) states.push_back(s);
  };

  struct Pending {
    StateId state;
    std::size_t line;
    std::size_t column;
  };
  std::optional<Pending> init;
  std::vector<Pending> refs;  // states that must be introduced elsewhere
  std::vector<Transition> transitions;
  std::vector<std::size_t> transition_lines;
  std::map<StateId, Observation> probes;

  for (const auto& line : detail::logical_lines(text)) {
    detail::Cursor cur(line.text, line.number);
    std::size_t kw_col = (cur.skip_ws(), cur.column());
    std::string kw = cur.identifier("keyword");
    if (kw == "state") {
      introduce(cur.identifier("state id"));
    } else if (kw == "init") {
      if (init) cur.fail_at(kw_col, "duplicate init (first on line " + std::to_string(init->line) + ")");
      std::size_t col = (cur.skip_ws(), cur.column());
      init = Pending{cur.identifier("state id"), line.number, col};
    } else if (kw == "trans") {
      Transition t;
      t.source = cur.identifier("source state");
      t.destination = cur.identifier("destination state");
      cur.expect(':', "after states");
      std::size_t in_col = (cur.skip_ws(), cur.column());
      t.input = cur.symbol();
      if (t.input.is_null()) cur.fail_at(in_col, "null is not an input symbol");
      cur.expect('/', "between input and output");
      t.output = cur.symbol();
      introduce(t.source);
      introduce(t.destination);
      transitions.push_back(std::move(t));
      transition_lines.push_back(line.number);
    } else if (kw == "probe") {
      std::size_t col = (cur.skip_ws(), cur.column());
      StateId s = cur.identifier("state id");
      cur.expect(':', "after state");
      Observation obs;
      obs.input = cur.symbol();
      cur.expect('/', "between input and output");
      obs.output = cur.symbol();
      if (probes.count(s)) cur.fail_at(col, "duplicate probe for state " + s);
      refs.push_back({s, line.number, col});
      probes[s] = std::move(obs);
    } else {
      cur.fail_at(kw_col, "unknown keyword '" + kw + "'");
    }
    if (!cur.at_end()) cur.fail("unexpected trailing text");
  }

  if (!init) throw ParseError(0, 0, "missing init");
  refs.push_back(*init);
  for (const auto& r : refs) {
    if (!known.count(r.state)) throw ParseError(r.line, r.column, "unknown state " + r.state);
  }
  if (auto c = find_conflict(transitions)) {
    throw ParseError(transition_lines[c->index], 0, conflict_message(transitions, *c));
  }
  return GuidingPsm(std::move(states), init->state, std::move(transitions), std::move(probes));
}

std::string serialize_psm(const GuidingPsm& psm) {
  std::string out;
  for (const auto& s : psm.states()) out += "state " + s + "\n";
  out += "init " + psm.initial() + "\n";
  for (const auto& t : psm.transitions()) {
    out += "trans " + t.source + " " + t.destination + " : " + to_string(t.input) + " / " +
           to_string(t.output) + "\n";
  }
  for (const auto& [s, obs] : psm.probes()) {
    out += "probe " + s + " : " + to_string(obs) + "\n";
  }
  return out;
}

}  // namespace psmfuzz
