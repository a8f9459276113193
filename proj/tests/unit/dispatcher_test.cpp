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

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <map>

#include "psmfuzz/dispatcher.hpp"
#include "psmfuzz/errors.hpp"
#include "psmfuzz/io.hpp"
#include "psmfuzz/simulator.hpp"
#include "psmfuzz/trace_builder.hpp"
#include "test_support.hpp"

namespace psmfuzz {
namespace {

namespace fs = std::filesystem;
using testing::lte_dir;

Symbol sym(const char* s) { return parse_symbol(s); }

InstantiatedTrace trace_covering(std::set<StateId> states) {
  InstantiatedTrace t;
  t.states_covered = std::move(states);
  return t;
}

InstantiatedTrace concrete_trace(const GuidingPsm& psm, const std::vector<InputSymbol>& inputs) {
  InstantiatedTrace t;
  for (const auto& o : run(psm, inputs).observations) t.steps.push_back(TraceStep::concrete(o));
  replay(psm, t);
  t.id = "t/1";
  return t;
}

std::vector<InputSymbol> attach_inputs() {
  return {sym("enable_s1{}"), sym("authentication_request{}"), sym("security_mode_command{}"),
          sym("rrc_security_mode_command{}"), sym("attach_accept{}")};
}

PropertyEntry entry(const std::string& id, double weight, std::size_t traces = 1) {
  PropertyEntry e;
  e.id = id;
  e.weight = weight;
  e.traces.resize(traces);
  return e;
}

TEST(Weight, SchedulingExample) {
  std::set<StateId> five{"q0", "q1", "q2", "q3", "q4"};
  EXPECT_DOUBLE_EQ(property_weight({trace_covering(five), trace_covering(five), trace_covering(five)}),
                   5.0);
  EXPECT_DOUBLE_EQ(property_weight({trace_covering({"q0", "q1"})}), 2.0);
  EXPECT_DOUBLE_EQ(property_weight({}), 0.0);
}

TEST(SelectProperty, FrequenciesFollowWeights) {
  CampaignState st(1, 0.8);
  st.properties = {entry("phi1", 5), entry("phi2", 3)};
  std::size_t first = 0;
  for (int i = 0; i < 10000; ++i) first += *select_property(st) == 0 ? 1 : 0;
  EXPECT_NEAR(first / 10000.0, 5.0 / 8.0, 0.03);
}

TEST(SelectProperty, SingleAndZeroWeights) {
  CampaignState st(2, 0.8);
  st.properties = {entry("only", 4)};
  for (int i = 0; i < 50; ++i) EXPECT_EQ(select_property(st), 0u);

  st.properties = {entry("a", 0), entry("b", 0), entry("c", 0)};
  std::map<std::size_t, int> seen;
  for (int i = 0; i < 3000; ++i) ++seen[*select_property(st)];
  ASSERT_EQ(seen.size(), 3u);
  for (const auto& [k, n] : seen) EXPECT_NEAR(n / 3000.0, 1.0 / 3.0, 0.04);
}

TEST(SelectProperty, SkipsInactiveAndExhausted) {
  CampaignState st(3, 0.8);
  st.properties = {entry("a", 9), entry("b", 1), entry("c", 9, 0)};
  st.deactivate("a");
  EXPECT_FALSE(st.properties[0].active);
  EXPECT_TRUE(st.properties[0].traces.empty());
  for (int i = 0; i < 100; ++i) EXPECT_EQ(select_property(st), 1u);
  st.deactivate("b");
  EXPECT_FALSE(select_property(st));
}

TEST(SelectTrace, LowestScoreWins) {
  CampaignState st(4, 0.8);
  st.properties = {entry("phi1", 5, 3)};
  st.properties[0].traces[0].stats.d = 2;
  st.properties[0].traces[1].stats.d = 1;
  for (int i = 0; i < 20; ++i) EXPECT_EQ(select_trace(st, 0), 0u);
}

TEST(SelectTrace, TiesAreDrawnUniformly) {
  std::set<std::size_t> seen;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    CampaignState st(seed, 0.8);
    st.properties = {entry("p", 1, 2)};
    seen.insert(select_trace(st, 0));
  }
  EXPECT_EQ(seen, (std::set<std::size_t>{0, 1}));

  CampaignState st(5, 0.8);
  st.properties = {entry("p", 1, 4)};
  std::map<std::size_t, int> counts;
  for (int i = 0; i < 4000; ++i) ++counts[select_trace(st, 0)];
  for (const auto& [k, n] : counts) EXPECT_NEAR(n / 4000.0, 0.25, 0.03);
}

TEST(SelectTrace, MarkerPreferenceAndFreshTypes) {
  CampaignState st(6, 0.8);
  st.properties = {entry("p", 1, 3)};
  auto& ts = st.properties[0].traces;
  ts[1].marker_types = {"security_mode_command"};
  ts[2].marker_types = {"guti_reallocation_command"};
  st.mutated_types = {"security_mode_command"};
  std::map<std::size_t, int> counts;
  for (int i = 0; i < 5000; ++i) ++counts[select_trace(st, 0)];
  EXPECT_NEAR(counts[2] / 5000.0, 0.8, 0.03);
  EXPECT_EQ(counts[1], 0);
  EXPECT_NEAR(counts[0] / 5000.0, 0.2, 0.03);
}

TEST(SelectTrace, ExhaustedThrows) {
  CampaignState st(7, 0.8);
  st.properties = {entry("p", 1, 1)};
  st.properties[0].traces[0].alive = false;
  EXPECT_THROW(select_trace(st, 0), std::out_of_range);
}

TEST(Registry, DeviationsRaiseD) {
  auto psm = testing::load_psm(lte_dir() / "lte.psm");
  CampaignState st(8, 0.8);
  st.properties = {entry("p", 1, 2)};
  auto& ts = st.properties[0].traces;
  ts[0].trace = concrete_trace(psm, attach_inputs());
  ts[0].sites = trace_sites(psm, ts[0].trace);
  ts[1].trace = concrete_trace(psm, {sym("enable_s1{}")});
  ts[1].sites = trace_sites(psm, ts[1].trace);
  EXPECT_TRUE(ts[0].sites.count({"q4", "attach_accept"}));

  st.register_deviations({{"q4", "attach_accept"}, {"q4", "attach_accept"}});
  EXPECT_EQ(st.registry.at({"q4", "attach_accept"}), 2u);
  EXPECT_EQ(ts[0].stats.d, 1u);
  EXPECT_EQ(ts[1].stats.d, 0u);
  st.register_deviations({{"q0", "enable_s1"}});
  EXPECT_EQ(ts[0].stats.d, 2u);
  EXPECT_EQ(ts[1].stats.d, 1u);
}

TEST(Resolve, MarkerBecomesMutatedInput) {
  auto psm = testing::load_psm(lte_dir() / "lte.psm");
  auto schemas = testing::load_schemas(lte_dir() / "lte.schema");
  auto inputs = attach_inputs();
  inputs.push_back(sym("guti_reallocation_command{}"));
  auto t = concrete_trace(psm, inputs);
  t.steps.push_back(TraceStep::marker(sym("guti_reallocation_command{}")));
  MutationAnnotation m;
  m.step = 6;
  m.base = psm.transitions().back();
  t.annotations = {m};

  bool saw_replay = false;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed);
    std::set<std::string> mutated;
    auto out = resolve_markers(t, schemas, rng, &mutated, &psm);
    EXPECT_FALSE(out.has_marker());
    EXPECT_EQ(mutated, std::set<std::string>{"guti_reallocation_command"});
    const auto& last = out.steps.back().obs;
    EXPECT_EQ(last.input.type(), "guti_reallocation_command");
    EXPECT_NE(last.input, sym("guti_reallocation_command{}"));
    EXPECT_EQ(last.output, Symbol::null_action());
    ASSERT_TRUE(out.annotations[0].placed);
    EXPECT_EQ(*out.annotations[0].placed, last);
    if (last.input == sym("guti_reallocation_command{replay=1}")) saw_replay = true;
    for (std::size_t i = 0; i + 1 < out.steps.size(); ++i) EXPECT_EQ(out.steps[i], t.steps[i]);
  }
  EXPECT_TRUE(saw_replay);
}

TEST(Resolve, NoMarkersIsIdentity) {
  auto psm = testing::load_psm(lte_dir() / "lte.psm");
  auto schemas = testing::load_schemas(lte_dir() / "lte.schema");
  auto t = concrete_trace(psm, attach_inputs());
  Rng rng(1);
  auto out = resolve_markers(t, schemas, rng, nullptr, &psm);
  EXPECT_EQ(dump(out), dump(t));
}

TEST(Resolve, NoApplicableOperation) {
  auto schemas = testing::load_schemas(lte_dir() / "lte.schema");
  InstantiatedTrace t;
  t.steps = {TraceStep::marker(sym("enable_s1{}"))};
  Rng rng(1);
  EXPECT_THROW(resolve_markers(t, schemas, rng), InapplicableOp);
  t.steps = {TraceStep::marker(sym("unknown{}"))};
  EXPECT_THROW(resolve_markers(t, schemas, rng), InapplicableOp);
}

struct Execution : ::testing::Test {
  GuidingPsm psm = testing::load_psm(lte_dir() / "lte.psm");
  PropertySet props = testing::load_props(lte_dir() / "running.props");

  SimAdapter sim(const std::string& spec) { return SimAdapter(load_simulator(spec, lte_dir())); }
};

TEST_F(Execution, CleanS0HasNoDeviation) {
  auto adapter = sim("lte_iut.psm");
  auto t = concrete_trace(psm, {sym("enable_s1{}"), sym("authentication_request{}"),
                                sym("security_mode_command{}"),
                                sym("identity_request{identity_type=1,integrity=1}")});
  auto r = execute_trace(adapter, t, psm);
  EXPECT_EQ(r.deviation_count(), 0u);
  EXPECT_FALSE(r.unresponsive);
  EXPECT_EQ(r.messages, 5u);
  EXPECT_DOUBLE_EQ(r.cost, 30.0 + 5 * 5.0);
  ASSERT_EQ(r.observed.size(), 4u);
  EXPECT_EQ(r.observed[3].output, sym("identity_response{}"));
  auto sigma_v = testing::first_skeleton(props, "phi_v");
  EXPECT_FALSE(detect_violation(r, {&sigma_v}));
}

TEST_F(Execution, ReplayedGutiDeviatesAndViolates) {
  auto adapter = sim("lte_iut.psm+guti_replay.bugs");
  auto sigma_g = testing::first_skeleton(props, "phi_g");
  auto traces = build_traces(psm, sigma_g, {8, 2});
  const auto& t = traces.front();
  ASSERT_FALSE(t.has_marker());
  auto r = execute_trace(adapter, t, psm);
  ASSERT_EQ(r.deviation_count(), 1u);
  EXPECT_EQ(r.deviation_sites(), (std::vector<DeviationSite>{{"q5", "guti_reallocation_command"}}));
  const auto& step = r.records.back();
  EXPECT_EQ(step.reference, Symbol::null_action());
  EXPECT_EQ(step.received, sym("guti_reallocation_complete{}"));

  auto sigma_s = testing::first_skeleton(props, "phi_s");
  auto v = detect_violation(r, {&sigma_s, &sigma_g});
  ASSERT_TRUE(v);
  EXPECT_EQ(v->property, "phi_g");
  EXPECT_EQ(v->skeleton, sigma_g.id);
  EXPECT_EQ(v->witness.size(), 7u);
}

TEST_F(Execution, SameTraceOnCleanIutIsQuiet) {
  auto adapter = sim("lte_iut.psm");
  auto sigma_g = testing::first_skeleton(props, "phi_g");
  auto t = build_traces(psm, sigma_g, {8, 2}).front();
  auto r = execute_trace(adapter, t, psm);
  EXPECT_EQ(r.deviation_count(), 0u);
  EXPECT_FALSE(detect_violation(r, {&sigma_g}));
}

TEST_F(Execution, DeviationWithoutMatchIsNotAViolation) {
  auto adapter = sim("lte_iut.psm+smc_replay.bugs");
  auto inputs = attach_inputs();
  inputs.push_back(sym("security_mode_command{replay=1}"));
  auto r = execute_inputs(adapter, inputs, psm);
  EXPECT_EQ(r.deviation_count(), 1u);
  auto sigma_g = testing::first_skeleton(props, "phi_g");
  EXPECT_FALSE(detect_violation(r, {&sigma_g}));
  auto sigma_s = testing::first_skeleton(props, "phi_s");
  auto v = detect_violation(r, {&sigma_g, &sigma_s});
  ASSERT_TRUE(v);
  EXPECT_EQ(v->property, "phi_s");
}

TEST_F(Execution, HangIsUnresponsive) {
  auto adapter = sim("lte_iut.psm+hang.bugs");
  auto inputs = attach_inputs();
  inputs.back() = sym("attach_accept{integrity=0}");
  inputs.push_back(sym("guti_reallocation_command{}"));
  auto r = execute_inputs(adapter, inputs, psm);
  EXPECT_TRUE(r.unresponsive);
  ASSERT_EQ(r.records.size(), 5u);
  EXPECT_FALSE(r.records.back().received);
  EXPECT_TRUE(r.records.back().deviation);
  EXPECT_EQ(r.observed.back().output, Symbol::null_action());
  EXPECT_EQ(r.messages, 5u);

  // Reset clears the hang.
  auto again = execute_inputs(adapter, attach_inputs(), psm);
  EXPECT_FALSE(again.unresponsive);
  EXPECT_EQ(again.deviation_count(), 0u);
}

TEST_F(Execution, UnresolvedMarkerIsRejected) {
  auto adapter = sim("lte_iut.psm");
  InstantiatedTrace t;
  t.steps = {TraceStep::marker(sym("enable_s1{}"))};
  EXPECT_THROW(execute_trace(adapter, t, psm), std::invalid_argument);
}

QueryRecord record(std::size_t q) {
  QueryRecord r;
  r.query = q;
  r.property = "phi_g";
  r.trace = "phi_g#1/" + std::to_string(q);
  r.mutations = 2;
  r.sim_time = 35.5 * static_cast<double>(q);
  r.sent = {sym("enable_s1{}"), sym("identity_request{identity_type=1,integrity=1}")};
  return r;
}

TEST(Log, RoundTrip) {
  std::vector<QueryRecord> log{record(1), record(2), record(3)};
  log[1].deviations = 2;
  log[1].deviation_sites = {{"q5", "guti_reallocation_command"}, {"q1", "attach_accept"}};
  log[1].unresponsive = true;
  log[2].violation = true;
  log[2].violated_property = "phi_g";
  log[2].witness = {testing::obs("a{x=1,y=2}", "b{}"), testing::obs("c{}", "null")};
  log[2].property = "odd,\"name\"";
  auto csv = format_log(log);
  EXPECT_EQ(csv.substr(0, log_header().size()), log_header());
  auto back = parse_log(csv);
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(format_log(back), csv);
  EXPECT_EQ(back[2].property, "odd,\"name\"");
  EXPECT_EQ(back[2].witness, log[2].witness);
  EXPECT_EQ(back[1].deviation_sites, log[1].deviation_sites);
  EXPECT_DOUBLE_EQ(back[1].sim_time, 71.0);
}

TEST(Log, Malformed) {
  EXPECT_THROW(parse_log("nonsense\n"), ParseError);
  EXPECT_THROW(parse_log(log_header() + "\n1,2,3\n"), ParseError);
  auto row = format_log_row(record(1));
  auto bad = row;
  bad.replace(0, 1, "x");
  EXPECT_THROW(parse_log(log_header() + "\n" + bad + "\n"), ParseError);
  EXPECT_TRUE(parse_log(log_header() + "\n").empty());
}

TEST(Summary, EmptyLog) {
  auto text = summarize_log({});
  EXPECT_EQ(text.rfind("0 queries", 0), 0u);
}

TEST(Summary, RegistryAndViolation) {
  std::vector<QueryRecord> log;
  for (std::size_t q = 1; q <= 3; ++q) {
    auto r = record(q);
    r.deviations = 1;
    r.deviation_sites = {{"q1", "attach_accept"}};
    log.push_back(r);
  }
  log[2].violation = true;
  log[2].violated_property = "phi_g";
  log[2].witness = {testing::obs("enable_s1{}", "attach_request{}")};
  auto text = summarize_log(log);
  EXPECT_NE(text.find("  q1 attach_accept 3\n"), std::string::npos) << text;
  EXPECT_NE(text.find("phi_g at query 3"), std::string::npos);
  EXPECT_NE(text.find("1. enable_s1{} / attach_request{}"), std::string::npos);
  EXPECT_NE(text.find("violations: 1\n"), std::string::npos);
}

struct Campaign : ::testing::Test {
  static CampaignReport run(const fs::path& config, std::size_t queries = 3000) {
    auto c = load_campaign_config(config);
    c.queries = queries;
    return run_campaign(c);
  }
};

void expect_log_contracts(const CampaignReport& r, const CampaignConfig& c) {
  std::map<std::string, std::size_t> violated_at;
  double previous = 0;
  for (const auto& rec : r.log) {
    auto it = violated_at.find(rec.property);
    EXPECT_TRUE(it == violated_at.end()) << rec.property << " queried after its violation";
    if (rec.violation) violated_at[rec.violated_property] = rec.query;
    double dt = rec.sim_time - previous;
    double base = c.costs.reset_seconds + c.costs.message_seconds * rec.sent.size();
    EXPECT_GE(dt, base - 1e-9);
    EXPECT_LE(dt, base + c.costs.message_seconds + 1e-9);
    previous = rec.sim_time;
  }
  EXPECT_LE(r.log.size(), c.queries);
  EXPECT_DOUBLE_EQ(r.sim_time, previous);
}

TEST_F(Campaign, PlantedGutiFoundOnce) {
  auto c = load_campaign_config(lte_dir() / "campaign_guti.json");
  auto r = run_campaign(c);
  ASSERT_EQ(std::count_if(r.violations.begin(), r.violations.end(),
                          [](const Violation& v) { return v.property == "phi_g"; }),
            1);
  EXPECT_TRUE(r.error.empty());
  expect_log_contracts(r, c);
  EXPECT_NE(r.text.find("violations by property"), std::string::npos);
}

TEST_F(Campaign, CleanIutHasNoViolations) {
  auto c = load_campaign_config(lte_dir() / "clean.json");
  auto r = run_campaign(c);
  EXPECT_EQ(r.log.size(), c.queries);
  EXPECT_TRUE(r.violations.empty());
  expect_log_contracts(r, c);
}

TEST_F(Campaign, SameSeedSameLog) {
  auto a = run(lte_dir() / "campaign_guti.json", 300);
  auto b = run(lte_dir() / "campaign_guti.json", 300);
  EXPECT_EQ(a.csv(), b.csv());
  EXPECT_EQ(a.text, b.text);
}

TEST_F(Campaign, SelectionCountsMatchLog) {
  auto c = load_campaign_config(lte_dir() / "clean.json");
  c.queries = 500;
  auto plan = plan_campaign(c);
  SimAdapter adapter(load_simulator("lte_iut.psm", lte_dir()));
  auto r = run_campaign(c, plan, adapter);
  std::set<std::string> planned;
  for (const auto& p : plan.properties)
    for (const auto& t : p.traces) planned.insert(t.id);
  std::map<std::string, std::size_t> per_trace;
  for (const auto& rec : r.log) {
    EXPECT_TRUE(planned.count(rec.trace)) << rec.trace;
    ++per_trace[rec.trace];
  }
  std::size_t total = 0;
  for (const auto& [id, n] : per_trace) total += n;
  EXPECT_EQ(total, 500u);
  EXPECT_EQ(r.log.back().query, 500u);
}

TEST_F(Campaign, EmptyPropertySet) {
  auto dir = fs::temp_directory_path() / "psmfuzz_empty_props";
  fs::create_directories(dir);
  write_file(dir / "none.props", "# nothing here\n");
  auto c = load_campaign_config(lte_dir() / "clean.json");
  c.props = {dir / "none.props"};
  auto r = run_campaign(c);
  EXPECT_TRUE(r.log.empty());
  EXPECT_EQ(r.sim_time, 0.0);
  fs::remove_all(dir);
}

class BrokenAdapter : public Adapter {
 public:
  void reset() override {
    if (++resets > 3) throw TransportError("link down");
  }
  Reply send(const InputSymbol&) override { return Symbol::null_action(); }
  int resets = 0;
};

TEST_F(Campaign, TransportFailureStopsWithPartialReport) {
  auto c = load_campaign_config(lte_dir() / "campaign_guti.json");
  auto plan = plan_campaign(c);
  BrokenAdapter adapter;
  auto r = run_campaign(c, plan, adapter);
  EXPECT_EQ(r.log.size(), 3u);
  EXPECT_EQ(r.error, "link down");
  EXPECT_NE(r.text.find("stopped early: link down"), std::string::npos);
}

TEST_F(Campaign, TimeBudgetStopsEarly) {
  auto c = load_campaign_config(lte_dir() / "clean.json");
  c.time_budget = 1000.0;
  auto r = run_campaign(c);
  ASSERT_FALSE(r.log.empty());
  EXPECT_LT(r.log.size(), 30u);
  EXPECT_GE(r.sim_time, 1000.0);
  EXPECT_LT(r.log[r.log.size() - 2].sim_time, 1000.0);
}

TEST(Plan, DefaultLengthIsLiteralsPlusOne) {
  auto c = load_campaign_config(lte_dir() / "campaign_guti.json");
  auto plan = plan_campaign(c);
  for (const auto& p : plan.properties)
    for (const auto& s : p.skeletons) {
      EXPECT_EQ(s.budget.length, literal_count(s.skeleton) + 1);
      EXPECT_EQ(s.budget.mutations, 2u);
    }
  auto text = describe_plan(plan);
  EXPECT_NE(text.find("model: 6 states, 10 transitions"), std::string::npos);
}

}  // namespace
}  // namespace psmfuzz
