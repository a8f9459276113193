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

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "psmfuzz/psm.hpp"
#include "psmfuzz/skeleton.hpp"
#include "psmfuzz/symbol.hpp"

namespace psmfuzz {

struct Budget {
  std::size_t length = 1;     // λ, max input symbols
  std::size_t mutations = 0;  // μ
};

enum class MutationKind { Observation, Destination };  // M1, M2

struct MutationAnnotation {
  MutationKind kind = MutationKind::Observation;
  std::size_t step = 0;
  /// For a synthesized M1 placement this is the implicit undefined-input
  /// transition (source, input, null, source).
  Transition base;
  /// M1: the placed observation, or nullopt for a marker.
  std::optional<Observation> placed;
  /// M2: the redirected state.
  StateId redirect;

  auto operator<=>(const MutationAnnotation&) const = default;
};

struct TraceStep {
  enum class Kind { Concrete, Marker };
  Kind kind = Kind::Concrete;
  /// Concrete: the expected observation. Marker: input is the base input,
  /// output is unused (null).
  Observation obs;

  static TraceStep concrete(Observation o) { return {Kind::Concrete, std::move(o)}; }
  static TraceStep marker(InputSymbol base) {
    return {Kind::Marker, Observation{std::move(base), Symbol::null_action()}};
  }
  bool is_marker() const noexcept { return kind == Kind::Marker; }
  auto operator<=>(const TraceStep&) const = default;
};

struct InstantiatedTrace {
  std::vector<TraceStep> steps;
  std::vector<MutationAnnotation> annotations;
  std::string source_skeleton;
  /// `<skeleton>/<n>`, assigned after ordering.
  std::string id;
  StateId expected_final_state;
  std::set<StateId> states_covered;

  std::size_t mutation_count() const noexcept { return annotations.size(); }
  bool has_marker() const;
  /// Annotation of the given kind at `step`, if any.
  const MutationAnnotation* annotation(std::size_t step, MutationKind kind) const;
};

/// One line per step: `OBS <in> / <out>` or `MARK <in>`, then
/// `! M1@<i>` / `! M2@<i> -> <state>` for that step.
std::string dump(const InstantiatedTrace& trace);

/// Dump plus the base transition of every annotation; two traces are the
/// same trace iff their keys are equal.
std::string identity_key(const InstantiatedTrace& trace);

/// Recomputes expected_final_state and states_covered: M1 steps follow
/// their base transition, M2 overrides the destination.
void replay(const GuidingPsm& psm, InstantiatedTrace& trace);

/// Observed-trace view used for skeleton checks on a built trace: concrete
/// steps as is, markers as their base input with a null output.
std::vector<Observation> observations(const InstantiatedTrace& trace);

/// Empty when `trace` honors every structural invariant against the model,
/// skeleton and budget; otherwise a description of the first problem.
std::string check_invariants(const GuidingPsm& psm, const TestSkeleton& skeleton,
                             const Budget& budget, const InstantiatedTrace& trace);

}  // namespace psmfuzz
