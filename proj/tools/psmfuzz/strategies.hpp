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

// Baseline strategies for the ablation runs. They share the executor and
// the skeleton-based violation check with the main campaign loop.

#pragma once

#include <string>
#include <string_view>

#include "psmfuzz/adapter.hpp"
#include "psmfuzz/campaign_config.hpp"
#include "psmfuzz/dispatcher.hpp"

namespace psmfuzz::cli {

enum class Strategy { Proteus, PropertyOnly, PsmOnly };

/// Accepts `proteus`, `property-only`, `psm-only`. Throws ConfigError.
Strategy parse_strategy(std::string_view name);
std::string to_string(Strategy s);

/// Fills skeleton stars with random symbols, ignoring the model. Total
/// length is uniform between the literal count and the skeleton's λ.
CampaignReport run_property_only(const CampaignConfig& config, const CampaignPlan& plan,
                                 Adapter& adapter);

/// Random walks on the guiding model with up to μ random M1/M2 mutations.
CampaignReport run_psm_only(const CampaignConfig& config, const CampaignPlan& plan,
                            Adapter& adapter);

CampaignReport run_strategy(Strategy s, const CampaignConfig& config, const CampaignPlan& plan,
                            Adapter& adapter);

}  // namespace psmfuzz::cli
