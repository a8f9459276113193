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

#include <string>
#include <vector>

#include "psmfuzz/rng.hpp"
#include "psmfuzz/schema.hpp"
#include "psmfuzz/symbol.hpp"

namespace psmfuzz {

enum class OpKind {
  InRange = 1,     // OP1
  OutOfRange = 2,  // OP2
  Boundary = 3,    // OP3
  Plaintext = 4,   // OP4
  Compose = 5,     // OP5
  Replay = 6,      // OP6
};

std::string to_string(OpKind op);

/// Reserved predicate names understood by adapters.
inline constexpr const char* kIntegrityField = "integrity";
inline constexpr const char* kCipherField = "cipher";
inline constexpr const char* kReplayField = "replay";

/// Operations usable on `base`, in OP order. Throws ModelError when the
/// schema does not describe `base`'s message type.
std::vector<OpKind> applicable_ops(const MessageSchema& schema, const InputSymbol& base);

/// Applies `op`, overwriting predicates of `base`. Throws InapplicableOp.
InputSymbol apply_op(OpKind op, const MessageSchema& schema, const InputSymbol& base, Rng& rng);

}  // namespace psmfuzz
