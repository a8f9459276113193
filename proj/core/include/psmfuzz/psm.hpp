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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "psmfuzz/symbol.hpp"

namespace psmfuzz {

using StateId = std::string;

struct Transition {
  StateId source;
  InputSymbol input;
  OutputSymbol output;
  StateId destination;

  Observation observation() const { return {input, output}; }
  auto operator<=>(const Transition&) const = default;
};

/// Deterministic Mealy machine used as the reference model.
///
/// States keep declaration order (first mention). Transitions keep file
/// order; `outgoing` lists indices into `transitions()`.
class GuidingPsm {
 public:
  GuidingPsm() = default;
  /// Validates every invariant; throws ModelError.
  GuidingPsm(std::vector<StateId> states, StateId initial, std::vector<Transition> transitions,
             std::map<StateId, Observation> probes = {});

  const std::vector<StateId>& states() const noexcept { return states_; }
  const StateId& initial() const noexcept { return initial_; }
  const std::vector<Transition>& transitions() const noexcept { return transitions_; }
  const std::map<StateId, Observation>& probes() const noexcept { return probes_; }

  bool has_state(const StateId& state) const;
  /// Transitions leaving `state` in file order. Throws ModelError on unknown state.
  std::vector<const Transition*> outgoing(const StateId& state) const;

  bool operator==(const GuidingPsm& other) const = default;

 private:
  std::vector<StateId> states_;
  StateId initial_;
  std::vector<Transition> transitions_;
  std::map<StateId, Observation> probes_;
  std::map<StateId, std::vector<std::size_t>> index_;
};

struct StepResult {
  OutputSymbol output;
  StateId destination;
  const Transition* transition = nullptr;
};

/// Exact input match first, then the most specific subsuming transition.
/// Absent means the input is undefined at `state`.
std::optional<StepResult> step(const GuidingPsm& psm, const StateId& state, const InputSymbol& input);

/// Only structurally equal inputs count. Used for reference outputs, where
/// an input that is not literally in the model is treated as mutated.
std::optional<StepResult> step_exact(const GuidingPsm& psm, const StateId& state,
                                     const InputSymbol& input);

struct RunResult {
  std::vector<Observation> observations;
  std::vector<StateId> visited;
};

/// Folds `step` from the initial state. Undefined inputs give (null, same state).
RunResult run(const GuidingPsm& psm, const std::vector<InputSymbol>& inputs);

GuidingPsm parse_psm(std::string_view text);
std::string serialize_psm(const GuidingPsm& psm);

}  // namespace psmfuzz
