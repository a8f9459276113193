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
#include <limits>
#include <vector>

#include "psmfuzz/psm.hpp"
#include "psmfuzz/skeleton.hpp"
#include "psmfuzz/trace.hpp"

namespace psmfuzz {

inline constexpr std::size_t kDefaultTraceCap = 20000;
inline constexpr std::size_t kUncapped = std::numeric_limits<std::size_t>::max();

/// Memoized enumeration of the traces that realize `skeleton` on `psm`
/// within `budget`. Ordered shortest first, then fewest mutations, then by
/// dump text; truncated to `cap`. Trace ids are `<skeleton id>/<n>`.
std::vector<InstantiatedTrace> build_traces(const GuidingPsm& psm, const TestSkeleton& skeleton,
                                            const Budget& budget, std::size_t cap = kDefaultTraceCap);

/// Exhaustive reference enumeration, for small models only. Same ordering
/// and ids as build_traces, no cap.
std::vector<InstantiatedTrace> brute_force_traces(const GuidingPsm& psm,
                                                  const TestSkeleton& skeleton,
                                                  const Budget& budget);

/// Sorts by (length, mutations, dump) and assigns ids.
void order_traces(std::vector<InstantiatedTrace>& traces, const std::string& skeleton_id);

}  // namespace psmfuzz
