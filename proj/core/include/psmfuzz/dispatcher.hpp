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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "psmfuzz/adapter.hpp"
#include "psmfuzz/campaign_config.hpp"
#include "psmfuzz/psm.hpp"
#include "psmfuzz/rng.hpp"
#include "psmfuzz/schema.hpp"
#include "psmfuzz/skeleton.hpp"
#include "psmfuzz/trace.hpp"

namespace psmfuzz {

/// Reference state and message type of a step.
using DeviationSite = std::pair<StateId, std::string>;

struct TraceStats {
  std::size_t f = 0;  // times selected
  std::size_t d = 0;  // registered deviation sites the trace passes through
  std::size_t u = 0;  // runs that left the implementation unresponsive
  long long score() const noexcept {
    return static_cast<long long>(f) - static_cast<long long>(d) + static_cast<long long>(u);
  }
};

struct TraceEntry {
  InstantiatedTrace trace;
  TraceStats stats;
  /// Sites the trace passes through on the reference model.
  std::set<DeviationSite> sites;
  /// Message types of the trace's markers.
  std::set<std::string> marker_types;
  bool alive = true;
};

struct PropertyEntry {
  std::string id;
  double weight = 0;
  bool active = true;
  std::vector<TestSkeleton> skeletons;
  std::vector<TraceEntry> traces;
  std::size_t alive_traces() const;
};

/// Sites visited by a step sequence on the reference model. Markers count
/// as mutated inputs: the reference stays put.
std::set<DeviationSite> trace_sites(const GuidingPsm& psm, const InstantiatedTrace& trace);

/// Mean number of distinct model states covered; 0 without traces.
double property_weight(const std::vector<InstantiatedTrace>& traces);

struct Violation {
  std::string property;
  std::string skeleton;
  std::vector<Observation> witness;
  std::size_t query = 0;
  std::string trace;
};

class CampaignState {
 public:
  CampaignState(std::uint64_t seed, double marker_preference)
      : rng(seed), marker_preference(marker_preference) {}

  std::vector<PropertyEntry> properties;
  std::map<DeviationSite, std::size_t> registry;
  /// Message types some marker has already been resolved on.
  std::set<std::string> mutated_types;
  std::size_t queries = 0;
  double sim_time = 0;
  std::vector<Violation> violations;
  Rng rng;
  double marker_preference;

  PropertyEntry* find(const std::string& id);
  /// Records deviation sites and refreshes every live trace's d.
  void register_deviations(const std::vector<DeviationSite>& sites);
  /// Deactivates the property and drops its traces.
  void deactivate(const std::string& id);
};

/// Weighted draw over active properties that still have traces; uniform
/// when every weight is zero. nullopt when nothing is left to test.
std::optional<std::size_t> select_property(CampaignState& state);

/// Index into the property's traces. Throws std::out_of_range when the
/// property has no live trace.
std::size_t select_trace(CampaignState& state, std::size_t property);

/// Replaces every marker by a mutated concrete input drawn from its
/// applicable operations. With a reference model the expected output of a
/// resolved step is the model's reply (null for inputs it does not define),
/// otherwise null. Throws InapplicableOp when a marker's type has no schema
/// or no operation.
InstantiatedTrace resolve_markers(const InstantiatedTrace& trace, const SchemaSet& schemas,
                                  Rng& rng, std::set<std::string>* mutated_types = nullptr,
                                  const GuidingPsm* reference = nullptr);

struct StepRecord {
  InputSymbol sent;
  Reply received;  // nullopt: TIMEOUT
  OutputSymbol reference;
  StateId reference_state;
  bool deviation = false;
};

struct ExecutionResult {
  std::vector<StepRecord> records;
  bool unresponsive = false;
  /// Sent inputs with what came back; a TIMEOUT is recorded as null.
  std::vector<Observation> observed;
  std::size_t messages = 0;  // including the probe
  double cost = 0;
  std::size_t deviation_count() const;
  std::vector<DeviationSite> deviation_sites() const;
};

/// Resets, sends every step, then probes from the expected final state.
/// A TIMEOUT mid-trace stops the run and marks it unresponsive.
ExecutionResult execute_trace(Adapter& adapter, const InstantiatedTrace& trace,
                              const GuidingPsm& psm);

/// Same as above for a bare input sequence (baselines); the probe uses the
/// state reached on the reference model.
ExecutionResult execute_inputs(Adapter& adapter, const std::vector<InputSymbol>& inputs,
                               const GuidingPsm& psm,
                               const std::optional<StateId>& probe_state = std::nullopt);

/// First skeleton (in the given order) matching the observed trace, with
/// the shortest matching prefix. Only consulted when something deviated.
std::optional<Violation> detect_violation(const ExecutionResult& result,
                                          const std::vector<const TestSkeleton*>& skeletons);

/// One line of the per-query log.
struct QueryRecord {
  std::size_t query = 0;
  std::string property;
  std::string trace;
  std::size_t mutations = 0;
  std::size_t deviations = 0;
  std::vector<DeviationSite> deviation_sites;
  bool unresponsive = false;
  bool violation = false;
  std::string violated_property;
  std::vector<Observation> witness;
  std::vector<InputSymbol> sent;
  double sim_time = 0;  // cumulative
};

std::string log_header();
std::string format_log_row(const QueryRecord& record);
std::string format_log(const std::vector<QueryRecord>& records);
/// Throws ParseError on malformed input.
std::vector<QueryRecord> parse_log(std::string_view csv);

/// Violations with witnesses, deviation counts per site and the cumulative
/// violation curve.
std::string summarize_log(const std::vector<QueryRecord>& records);

struct SkeletonPlan {
  TestSkeleton skeleton;
  Budget budget;
  std::size_t trace_count = 0;
};

struct PropertyPlan {
  std::string property;
  std::vector<SkeletonPlan> skeletons;
  std::vector<InstantiatedTrace> traces;
};

struct CampaignPlan {
  CampaignInputs inputs;
  std::vector<PropertyPlan> properties;
};

/// Skeletons for every property, then traces for every skeleton.
CampaignPlan plan_campaign(const CampaignConfig& config, CampaignInputs inputs);
CampaignPlan plan_campaign(const CampaignConfig& config);

struct CampaignReport {
  std::vector<QueryRecord> log;
  std::vector<Violation> violations;
  std::map<DeviationSite, std::size_t> registry;
  double sim_time = 0;
  std::size_t skipped_traces = 0;
  /// Set when the adapter failed and the campaign stopped early.
  std::string error;
  /// Skeleton and trace counts, then the log summary.
  std::string text;
  std::string csv() const { return format_log(log); }
};

/// Header lines shared by every strategy: skeletons and trace counts.
std::string describe_plan(const CampaignPlan& plan);

CampaignReport run_campaign(const CampaignConfig& config, const CampaignPlan& plan,
                            Adapter& adapter);
/// Loads, plans and runs against the configured adapter.
CampaignReport run_campaign(const CampaignConfig& config);

}  // namespace psmfuzz
