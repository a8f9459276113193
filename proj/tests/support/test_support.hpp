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
#include <vector>

#include "psmfuzz/io.hpp"
#include "psmfuzz/pltl.hpp"
#include "psmfuzz/psm.hpp"
#include "psmfuzz/schema.hpp"
#include "psmfuzz/skeleton.hpp"

namespace psmfuzz::testing {

inline std::filesystem::path models_dir() { return PSMFUZZ_MODELS_DIR; }
inline std::filesystem::path fixtures_dir() { return PSMFUZZ_FIXTURES_DIR; }
inline std::filesystem::path lte_dir() { return models_dir() / "lte"; }
inline std::filesystem::path ble_dir() { return models_dir() / "ble"; }

inline GuidingPsm load_psm(const std::filesystem::path& p) { return parse_psm(read_file(p)); }
inline PropertySet load_props(const std::filesystem::path& p) {
  return parse_properties(read_file(p));
}
inline SchemaSet load_schemas(const std::filesystem::path& p) {
  return parse_schemas(read_file(p));
}

inline const Property& prop(const PropertySet& set, const std::string& id) {
  const Property* p = set.find(id);
  if (!p) throw std::runtime_error("no property " + id);
  return *p;
}

inline TestSkeleton first_skeleton(const PropertySet& set, const std::string& id) {
  return generate_skeletons(*prop(set, id).formula, kDefaultMaxSkeletons, id).at(0);
}

inline Observation obs(const std::string& in, const std::string& out) {
  return {parse_symbol(in), parse_symbol(out)};
}

/// Observation of an atom whose sides are both concrete.
inline Observation atom_obs(const PropertySet& set, const std::string& atom) {
  const ObservationPattern& p = set.atoms().at(atom);
  return {p.input.value_or(Symbol("any")), p.output.value_or(Symbol::null_action())};
}

/// The files shipped with every model directory. Kept in one place so the
/// soundness corpus is the same everywhere.
inline std::vector<std::filesystem::path> corpus_property_files() {
  return {lte_dir() / "lte.props", ble_dir() / "ble.props"};
}

}  // namespace psmfuzz::testing
