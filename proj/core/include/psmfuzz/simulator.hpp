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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "psmfuzz/adapter.hpp"
#include "psmfuzz/psm.hpp"

namespace psmfuzz {

enum class BugBehavior { Respond, Hang, Drop };

struct BugRule {
  StateId at_state;
  InputSymbol input_pattern;  // subsumption-matched
  OutputSymbol response;
  StateId next_state;
  BugBehavior behavior = BugBehavior::Respond;
};

/// `bug <state> : <input> -> <output> @ <next> [hang|drop]`, one per line.
/// States must exist in `base`.
std::vector<BugRule> parse_bugs(std::string_view text, const GuidingPsm& base);

/// A model-driven implementation with injected misbehavior. Bug rules are
/// tried in order before the base model; the first match wins.
class SimulatedIut {
 public:
  SimulatedIut(GuidingPsm base, std::vector<BugRule> bugs = {});

  void reset();
  Reply send(const InputSymbol& input);

  const StateId& state() const noexcept { return state_; }
  bool hung() const noexcept { return hung_; }
  const GuidingPsm& base() const noexcept { return base_; }
  const std::vector<BugRule>& bugs() const noexcept { return bugs_; }

 private:
  GuidingPsm base_;
  std::vector<BugRule> bugs_;
  StateId state_;
  bool hung_ = false;
};

class SimAdapter : public Adapter {
 public:
  explicit SimAdapter(SimulatedIut iut) : iut_(std::move(iut)) {}

  void reset() override { iut_.reset(); }
  Reply send(const InputSymbol& input) override { return iut_.send(input); }
  const SimulatedIut& iut() const noexcept { return iut_; }

 private:
  SimulatedIut iut_;
};

/// Loads `<model.psm>[+<bugs>...]`, paths resolved against `base_dir`.
SimulatedIut load_simulator(std::string_view spec, const std::filesystem::path& base_dir = {});

}  // namespace psmfuzz
