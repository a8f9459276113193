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
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "psmfuzz/adapter.hpp"
#include "psmfuzz/pltl.hpp"
#include "psmfuzz/psm.hpp"
#include "psmfuzz/schema.hpp"
#include "psmfuzz/skeleton.hpp"
#include "psmfuzz/trace_builder.hpp"

namespace psmfuzz {

/// Campaign settings. Paths are stored as given; `base_dir` is where they
/// are resolved from (the config file's directory).
///
/// JSON keys: psm, schemas, props (string or list), queries, length_budget,
/// mutation_budget, seed, marker_preference, reset_cost, message_cost,
/// time_budget, max_skeletons, trace_cap, adapter.
struct CampaignConfig {
  std::filesystem::path base_dir;
  std::filesystem::path psm;
  std::filesystem::path schemas;
  std::vector<std::filesystem::path> props;
  std::size_t queries = 3000;
  /// λ for every skeleton; unset means literal_count + 1 per skeleton.
  std::optional<std::size_t> length_budget;
  std::size_t mutation_budget = 2;
  std::uint64_t seed = 1;
  double marker_preference = 0.8;
  CostModel costs;
  /// Simulated seconds; unset means no limit.
  std::optional<double> time_budget;
  std::size_t max_skeletons = kDefaultMaxSkeletons;
  std::size_t trace_cap = kDefaultTraceCap;
  /// `sim:<model.psm>[+<bugs>...]` or `tcp://host:port`.
  std::string adapter;

  std::filesystem::path resolve(const std::filesystem::path& p) const;
  /// λ used for `skeleton`.
  std::size_t length_for(const TestSkeleton& skeleton) const;
};

/// Throws ConfigError on unknown keys, wrong types or bad values.
CampaignConfig parse_campaign_config(std::string_view json, const std::filesystem::path& base_dir);
CampaignConfig load_campaign_config(const std::filesystem::path& file);

struct CampaignInputs {
  GuidingPsm psm;
  SchemaSet schemas;
  PropertySet properties;
};

/// Loads model, schemas and every property file (ids must be unique
/// across files).
CampaignInputs load_inputs(const CampaignConfig& config);

/// Builds the adapter named by `spec`, resolving simulator paths against
/// `base_dir`. Throws ConfigError or TransportError.
std::unique_ptr<Adapter> make_adapter(std::string_view spec, const std::filesystem::path& base_dir);

}  // namespace psmfuzz
