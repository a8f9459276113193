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

#include <optional>

#include "psmfuzz/symbol.hpp"

namespace psmfuzz {

/// Simulated seconds charged per interaction.
struct CostModel {
  double reset_seconds = 30.0;
  double message_seconds = 5.0;
};

/// Reply to one sent symbol; nullopt is TIMEOUT.
using Reply = std::optional<OutputSymbol>;

/// Black-box access to an implementation under test. Transport problems
/// raise TransportError; silence is a TIMEOUT reply, not an exception.
class Adapter {
 public:
  virtual ~Adapter() = default;

  /// Returns the implementation to its initial protocol state.
  virtual void reset() = 0;
  virtual Reply send(const InputSymbol& input) = 0;

  const CostModel& costs() const noexcept { return costs_; }
  void set_costs(const CostModel& c) { costs_ = c; }

 private:
  CostModel costs_;
};

}  // namespace psmfuzz
