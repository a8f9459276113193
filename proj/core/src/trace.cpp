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

#include "psmfuzz/trace.hpp"

#include <algorithm>

namespace psmfuzz {

bool InstantiatedTrace::has_marker() const {
  return std::any_of(steps.begin(), steps.end(), [](const TraceStep& s) { return s.is_marker(); });
}

const MutationAnnotation* InstantiatedTrace::annotation(std::size_t step, MutationKind kind) const {
  for (const auto& a : annotations) {
    if (a.step == step && a.kind == kind) return &a;
  }
  return nullptr;
}

std::string dump(const InstantiatedTrace& trace) {
  std::string out;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const TraceStep& s = trace.steps[i];
    if (s.is_marker()) {
      out += "MARK " + to_string(s.obs.input);
    } else {
      out += "OBS " + to_string(s.obs);
    }
    if (trace.annotation(i, MutationKind::Observation)) out += " ! M1@" + std::to_string(i);
    if (const auto* m2 = trace.annotation(i, MutationKind::Destination)) {
      out += " ! M2@" + std::to_string(i) + " -> " + m2->redirect;
    }
    out += '\n';
  }
  return out;
}

std::string identity_key(const InstantiatedTrace& trace) {
  std::string key = dump(trace);
  for (const auto& a : trace.annotations) {
    key += "@" + std::to_string(a.step) + (a.kind == MutationKind::Observation ? "M1 " : "M2 ") +
           a.base.source + " " + to_string(a.base.input) + " / " + to_string(a.base.output) + " " +
           a.base.destination + "\n";
  }
  return key;
}

void replay(const GuidingPsm& psm, InstantiatedTrace& trace) {
  StateId state = psm.initial();
  trace.states_covered = {state};
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    StateId next = state;
    if (const auto* m1 = trace.annotation(i, MutationKind::Observation)) {
      next = m1->base.destination;
    } else if (auto s = step_exact(psm, state, trace.steps[i].obs.input)) {
      next = s->destination;
    }
    if (const auto* m2 = trace.annotation(i, MutationKind::Destination)) next = m2->redirect;
    state = next;
    trace.states_covered.insert(state);
  }
  trace.expected_final_state = state;
}

std::vector<Observation> observations(const InstantiatedTrace& trace) {
  std::vector<Observation> out;
  out.reserve(trace.steps.size());
  for (const auto& s : trace.steps) out.push_back(s.obs);
  return out;
}

namespace {

// Full-language membership where markers only fit ANY_STAR and mutated
// placements only fit positional elements.
bool realizes(const TestSkeleton& skeleton, const InstantiatedTrace& trace) {
  const auto& es = skeleton.elements;
  const std::size_t m = es.size();
  std::vector<char> cur(m + 1, 0);
  cur[0] = 1;
  auto close = [&](std::vector<char>& set) {
    for (std::size_t k = 0; k < m; ++k) {
      if (set[k] && es[k].is_star()) set[k + 1] = 1;
    }
  };
  close(cur);
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const TraceStep& s = trace.steps[i];
    const bool placed = trace.annotation(i, MutationKind::Observation) != nullptr;
    std::vector<char> next(m + 1, 0);
    for (std::size_t k = 0; k < m; ++k) {
      if (!cur[k]) continue;
      const auto& e = es[k];
      if (s.is_marker()) {
        if (e.kind() == ElementKind::AnyStar) next[k] = 1;
      } else if (e.is_star()) {
        if (!placed && e.accepts(s.obs)) next[k] = 1;
      } else if (e.accepts(s.obs)) {
        next[k + 1] = 1;
      }
    }
    close(next);
    cur.swap(next);
  }
  return cur[m] != 0;
}

}  // namespace

std::string check_invariants(const GuidingPsm& psm, const TestSkeleton& skeleton,
                             const Budget& budget, const InstantiatedTrace& trace) {
  if (trace.steps.size() > budget.length) return "longer than the length budget";
  if (trace.annotations.size() > budget.mutations) return "more mutations than the budget";
  for (const auto& a : trace.annotations) {
    if (a.step >= trace.steps.size()) return "annotation past the end";
    if (a.kind == MutationKind::Destination && a.redirect == a.base.destination) {
      return "M2 redirect equals the base destination";
    }
  }
  StateId state = psm.initial();
  std::set<StateId> covered = {state};
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const TraceStep& s = trace.steps[i];
    const auto* m1 = trace.annotation(i, MutationKind::Observation);
    const auto* m2 = trace.annotation(i, MutationKind::Destination);
    const std::string at = " at step " + std::to_string(i);
    Transition base;
    if (m1) {
      base = m1->base;
      if (base.source != state) return "M1 base does not start at the current state" + at;
      bool exists = std::any_of(psm.transitions().begin(), psm.transitions().end(),
                                [&](const Transition& t) { return t == base; });
      bool synthesized = base.output.is_null() && base.destination == state &&
                         !step_exact(psm, state, base.input).has_value();
      if (!exists && !synthesized) return "M1 base is not a model transition" + at;
      if (s.is_marker()) {
        if (m1->placed) return "marker carries a placed observation" + at;
        if (s.obs.input != base.input) return "marker input differs from its base" + at;
      } else {
        if (!m1->placed || *m1->placed != s.obs) return "M1 placement differs from the step" + at;
      }
    } else {
      if (s.is_marker()) return "marker without an M1 annotation" + at;
      auto t = step_exact(psm, state, s.obs.input);
      if (!t || t->output != s.obs.output) return "unmutated step is not a model transition" + at;
      base = *t->transition;
    }
    if (m2 && m2->base != base) return "M2 base differs from the step's transition" + at;
    state = m2 ? m2->redirect : base.destination;
    if (!psm.has_state(state)) return "unknown state" + at;
    covered.insert(state);
  }
  if (state != trace.expected_final_state) return "expected_final_state mismatch";
  if (covered != trace.states_covered) return "states_covered mismatch";
  if (!realizes(skeleton, trace)) return "trace does not realize its skeleton";
  return {};
}

}  // namespace psmfuzz
