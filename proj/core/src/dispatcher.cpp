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

#include "psmfuzz/dispatcher.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "psmfuzz/errors.hpp"
#include "psmfuzz/mutation_ops.hpp"
#include "psmfuzz/trace_builder.hpp"

namespace psmfuzz {

std::size_t PropertyEntry::alive_traces() const {
  return static_cast<std::size_t>(
      std::count_if(traces.begin(), traces.end(), [](const TraceEntry& t) { return t.alive; }));
}

std::set<DeviationSite> trace_sites(const GuidingPsm& psm, const InstantiatedTrace& trace) {
  std::set<DeviationSite> sites;
  StateId r = psm.initial();
  for (const auto& s : trace.steps) {
    sites.emplace(r, s.obs.input.type());
    if (s.is_marker()) continue;
    if (auto next = step_exact(psm, r, s.obs.input)) r = next->destination;
  }
  return sites;
}

double property_weight(const std::vector<InstantiatedTrace>& traces) {
  if (traces.empty()) return 0;
  double total = 0;
  for (const auto& t : traces) total += static_cast<double>(t.states_covered.size());
  return total / static_cast<double>(traces.size());
}

PropertyEntry* CampaignState::find(const std::string& id) {
  for (auto& p : properties) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

void CampaignState::register_deviations(const std::vector<DeviationSite>& sites) {
  for (const auto& site : sites) {
    if (registry[site]++ > 0) continue;
    for (auto& p : properties) {
      for (auto& t : p.traces) {
        if (t.alive && t.sites.count(site)) ++t.stats.d;
      }
    }
  }
}

void CampaignState::deactivate(const std::string& id) {
  if (PropertyEntry* p = find(id)) {
    p->active = false;
    p->traces.clear();
  }
}

std::optional<std::size_t> select_property(CampaignState& state) {
  std::vector<std::size_t> candidates;
  double total = 0;
  for (std::size_t i = 0; i < state.properties.size(); ++i) {
    const auto& p = state.properties[i];
    if (!p.active || p.alive_traces() == 0) continue;
    candidates.push_back(i);
    total += p.weight;
  }
  if (candidates.empty()) return std::nullopt;
  if (total <= 0) return candidates[state.rng.below(candidates.size())];
  double x = state.rng.unit() * total;
  double cumulative = 0;
  std::size_t last_positive = candidates.front();
  for (std::size_t i : candidates) {
    double w = state.properties[i].weight;
    if (w <= 0) continue;
    cumulative += w;
    last_positive = i;
    if (x < cumulative) return i;
  }
  return last_positive;
}

std::size_t select_trace(CampaignState& state, std::size_t property) {
  auto& traces = state.properties.at(property).traces;
  std::vector<std::size_t> marked, plain;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    if (!traces[i].alive) continue;
    (traces[i].marker_types.empty() ? plain : marked).push_back(i);
  }
  if (marked.empty() && plain.empty()) {
    throw std::out_of_range("property " + state.properties[property].id + " has no traces left");
  }
  bool use_marked = plain.empty() ||
                    (!marked.empty() && state.rng.chance(state.marker_preference));
  std::vector<std::size_t> pool = use_marked ? marked : plain;

  if (use_marked) {
    std::vector<std::size_t> fresh;
    for (std::size_t i : pool) {
      for (const auto& type : traces[i].marker_types) {
        if (!state.mutated_types.count(type)) {
          fresh.push_back(i);
          break;
        }
      }
    }
    if (!fresh.empty()) pool = std::move(fresh);
  }

  long long best = traces[pool.front()].stats.score();
  for (std::size_t i : pool) best = std::min(best, traces[i].stats.score());
  std::vector<std::size_t> ties;
  for (std::size_t i : pool) {
    if (traces[i].stats.score() == best) ties.push_back(i);
  }
  return ties[state.rng.below(ties.size())];
}

InstantiatedTrace resolve_markers(const InstantiatedTrace& trace, const SchemaSet& schemas,
                                  Rng& rng, std::set<std::string>* mutated_types,
                                  const GuidingPsm* reference) {
  InstantiatedTrace out = trace;
  for (std::size_t i = 0; i < out.steps.size(); ++i) {
    TraceStep& s = out.steps[i];
    if (!s.is_marker()) continue;
    const InputSymbol& base = s.obs.input;
    const MessageSchema* schema = schemas.find(base.type());
    if (!schema) throw InapplicableOp("no schema for marker message " + base.type());
    std::vector<OpKind> ops = applicable_ops(*schema, base);
    if (ops.empty()) throw InapplicableOp("no operation applies to " + base.type());
    OpKind op = ops[rng.below(ops.size())];
    InputSymbol mutated = apply_op(op, *schema, base, rng);
    if (mutated_types) mutated_types->insert(base.type());
    s = TraceStep::concrete(Observation{std::move(mutated), Symbol::null_action()});
  }
  if (!reference) return out;
  // Expected outputs of resolved steps come from the reference model.
  StateId r = reference->initial();
  for (std::size_t i = 0; i < out.steps.size(); ++i) {
    auto s = step_exact(*reference, r, out.steps[i].obs.input);
    if (trace.steps[i].is_marker()) {
      out.steps[i].obs.output = s ? s->output : Symbol::null_action();
      for (auto& a : out.annotations) {
        if (a.step == i && a.kind == MutationKind::Observation) a.placed = out.steps[i].obs;
      }
    }
    if (s) r = s->destination;
  }
  return out;
}

std::size_t ExecutionResult::deviation_count() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const StepRecord& r) { return r.deviation; }));
}

std::vector<DeviationSite> ExecutionResult::deviation_sites() const {
  std::vector<DeviationSite> sites;
  for (const auto& r : records) {
    if (r.deviation) sites.emplace_back(r.reference_state, r.sent.type());
  }
  return sites;
}

ExecutionResult execute_inputs(Adapter& adapter, const std::vector<InputSymbol>& inputs,
                               const GuidingPsm& psm, const std::optional<StateId>& probe_state) {
  ExecutionResult result;
  adapter.reset();
  StateId r = psm.initial();
  for (const auto& in : inputs) {
    StepRecord rec;
    rec.sent = in;
    rec.reference_state = r;
    rec.received = adapter.send(in);
    ++result.messages;
    StateId next = r;
    rec.reference = Symbol::null_action();
    if (auto s = step_exact(psm, r, in)) {
      rec.reference = s->output;
      next = s->destination;
    }
    rec.deviation = !rec.received || *rec.received != rec.reference;
    result.observed.push_back(Observation{in, rec.received.value_or(Symbol::null_action())});
    bool timed_out = !rec.received;
    result.records.push_back(std::move(rec));
    if (timed_out) {
      result.unresponsive = true;
      break;
    }
    r = next;
  }
  if (!result.unresponsive) {
    const StateId& at = probe_state ? *probe_state : r;
    auto probe = psm.probes().find(at);
    if (probe != psm.probes().end()) {
      Reply reply = adapter.send(probe->second.input);
      ++result.messages;
      if (!reply) result.unresponsive = true;
    }
  }
  result.cost = adapter.costs().reset_seconds +
                adapter.costs().message_seconds * static_cast<double>(result.messages);
  return result;
}

ExecutionResult execute_trace(Adapter& adapter, const InstantiatedTrace& trace,
                              const GuidingPsm& psm) {
  std::vector<InputSymbol> inputs;
  inputs.reserve(trace.steps.size());
  for (const auto& s : trace.steps) {
    if (s.is_marker()) throw std::invalid_argument("trace " + trace.id + " has unresolved markers");
    inputs.push_back(s.obs.input);
  }
  std::optional<StateId> probe_state;
  if (!trace.expected_final_state.empty()) probe_state = trace.expected_final_state;
  return execute_inputs(adapter, inputs, psm, probe_state);
}

std::optional<Violation> detect_violation(const ExecutionResult& result,
                                          const std::vector<const TestSkeleton*>& skeletons) {
  if (result.deviation_count() == 0) return std::nullopt;
  for (const TestSkeleton* sk : skeletons) {
    if (auto n = shortest_match(*sk, result.observed)) {
      Violation v;
      v.property = sk->source_property;
      v.skeleton = sk->id;
      v.witness.assign(result.observed.begin(), result.observed.begin() + static_cast<long>(*n));
      return v;
    }
  }
  return std::nullopt;
}

// ---- log ------------------------------------------------------------------

namespace {

constexpr const char* kColumns[] = {"query",     "property",          "trace",   "mutations",
                                    "deviations", "deviation_sites",  "unresponsive",
                                    "violation", "violated_property", "witness", "sent",
                                    "sim_time"};
constexpr std::size_t kColumnCount = sizeof kColumns / sizeof kColumns[0];

std::string csv_field(const std::string& v) {
  if (v.find_first_of(",\"\r\n") == std::string::npos) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, end) : std::to_string(v);
}

std::string join_sites(const std::vector<DeviationSite>& sites) {
  std::string out;
  for (const auto& [state, type] : sites) {
    if (!out.empty()) out += ';';
    out += state + ":" + type;
  }
  return out;
}

std::string join_observations(const std::vector<Observation>& obs) {
  std::string out;
  for (const auto& o : obs) {
    if (!out.empty()) out += "; ";
    out += to_string(o);
  }
  return out;
}

std::string join_inputs(const std::vector<InputSymbol>& in) {
  std::string out;
  for (const auto& s : in) {
    if (!out.empty()) out += "; ";
    out += to_string(s);
  }
  return out;
}

std::vector<std::string> split(std::string_view text, std::string_view sep) {
  std::vector<std::string> parts;
  if (text.empty()) return parts;
  std::size_t start = 0;
  while (true) {
    std::size_t at = text.find(sep, start);
    parts.emplace_back(text.substr(start, at == std::string_view::npos ? at : at - start));
    if (at == std::string_view::npos) break;
    start = at + sep.size();
  }
  return parts;
}

// RFC 4180 records; quoted fields may span lines.
std::vector<std::pair<std::size_t, std::vector<std::string>>> csv_records(std::string_view text) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> records;
  std::vector<std::string> fields;
  std::string field;
  std::size_t line = 1, record_line = 1;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"') {
      if (!field.empty()) throw ParseError(line, 0, "quote inside an unquoted field");
      quoted = any = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        fields.push_back(std::move(field));
        records.emplace_back(record_line, std::move(fields));
      }
      fields.clear();
      field.clear();
      any = false;
      record_line = ++line;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw ParseError(line, 0, "unterminated quoted field");
  if (any || !field.empty()) {
    fields.push_back(std::move(field));
    records.emplace_back(record_line, std::move(fields));
  }
  return records;
}

std::size_t parse_count(const std::string& v, std::size_t line, const char* what) {
  std::size_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ParseError(line, 0, std::string("bad ") + what + " '" + v + "'");
  }
  return out;
}

bool parse_flag(const std::string& v, std::size_t line, const char* what) {
  if (v == "0") return false;
  if (v == "1") return true;
  throw ParseError(line, 0, std::string("bad ") + what + " '" + v + "'");
}

Observation parse_observation(const std::string& text, std::size_t line) {
  auto slash = text.find(" / ");
  if (slash == std::string::npos) throw ParseError(line, 0, "bad observation '" + text + "'");
  try {
    return Observation{parse_symbol(text.substr(0, slash)), parse_symbol(text.substr(slash + 3))};
  } catch (const ParseError& e) {
    throw ParseError(line, 0, "bad observation '" + text + "': " + e.message());
  }
}

}  // namespace

std::string log_header() {
  std::string out;
  for (std::size_t i = 0; i < kColumnCount; ++i) {
    if (i) out += ',';
    out += kColumns[i];
  }
  return out;
}

std::string format_log_row(const QueryRecord& r) {
  const std::string fields[] = {std::to_string(r.query),
                                r.property,
                                r.trace,
                                std::to_string(r.mutations),
                                std::to_string(r.deviations),
                                join_sites(r.deviation_sites),
                                r.unresponsive ? "1" : "0",
                                r.violation ? "1" : "0",
                                r.violated_property,
                                join_observations(r.witness),
                                join_inputs(r.sent),
                                format_number(r.sim_time)};
  std::string out;
  for (std::size_t i = 0; i < kColumnCount; ++i) {
    if (i) out += ',';
    out += csv_field(fields[i]);
  }
  return out;
}

std::string format_log(const std::vector<QueryRecord>& records) {
  std::string out = log_header() + "\n";
  for (const auto& r : records) out += format_log_row(r) + "\n";
  return out;
}

std::vector<QueryRecord> parse_log(std::string_view csv) {
  auto records = csv_records(csv);
  if (records.empty()) throw ParseError(1, 0, "empty log: missing header");
  std::vector<std::string> header(kColumns, kColumns + kColumnCount);
  if (records.front().second != header) throw ParseError(1, 0, "unexpected log header");
  std::vector<QueryRecord> out;
  for (std::size_t k = 1; k < records.size(); ++k) {
    const auto& [line, f] = records[k];
    if (f.size() != kColumnCount) {
      throw ParseError(line, 0, "expected " + std::to_string(kColumnCount) + " fields, got " +
                                    std::to_string(f.size()));
    }
    QueryRecord r;
    r.query = parse_count(f[0], line, "query number");
    r.property = f[1];
    r.trace = f[2];
    r.mutations = parse_count(f[3], line, "mutation count");
    r.deviations = parse_count(f[4], line, "deviation count");
    for (const auto& site : split(f[5], ";")) {
      auto colon = site.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == site.size()) {
        throw ParseError(line, 0, "bad deviation site '" + site + "'");
      }
      r.deviation_sites.emplace_back(site.substr(0, colon), site.substr(colon + 1));
    }
    r.unresponsive = parse_flag(f[6], line, "unresponsive flag");
    r.violation = parse_flag(f[7], line, "violation flag");
    r.violated_property = f[8];
    for (const auto& o : split(f[9], "; ")) r.witness.push_back(parse_observation(o, line));
    for (const auto& s : split(f[10], "; ")) {
      try {
        r.sent.push_back(parse_symbol(s));
      } catch (const ParseError& e) {
        throw ParseError(line, 0, "bad sent symbol '" + s + "': " + e.message());
      }
    }
    const std::string& t = f[11];
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), r.sim_time);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
      throw ParseError(line, 0, "bad simulated time '" + t + "'");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string summarize_log(const std::vector<QueryRecord>& records) {
  std::ostringstream os;
  double sim_time = records.empty() ? 0 : records.back().sim_time;
  std::size_t deviating = 0, unresponsive = 0, violations = 0;
  std::map<DeviationSite, std::size_t> registry;
  for (const auto& r : records) {
    if (r.deviations > 0) ++deviating;
    if (r.unresponsive) ++unresponsive;
    if (r.violation) ++violations;
    for (const auto& site : r.deviation_sites) ++registry[site];
  }
  os << records.size() << " queries, " << format_number(sim_time) << " simulated seconds\n";
  os << "queries with deviations: " << deviating << "\n";
  os << "unresponsive runs: " << unresponsive << "\n";
  os << "violations: " << violations << "\n";

  if (violations > 0) {
    os << "\nviolations by property:\n";
    for (const auto& r : records) {
      if (!r.violation) continue;
      os << "  " << r.violated_property << " at query " << r.query << " (trace " << r.trace
         << ")\n";
      for (std::size_t i = 0; i < r.witness.size(); ++i) {
        os << "    " << (i + 1) << ". " << to_string(r.witness[i]) << "\n";
      }
    }
  }

  os << "\ndeviation registry (state, message type, count):\n";
  if (registry.empty()) os << "  none\n";
  for (const auto& [site, count] : registry) {
    os << "  " << site.first << " " << site.second << " " << count << "\n";
  }

  os << "\ncumulative violations:\n";
  if (records.empty()) {
    os << "  none\n";
    return os.str();
  }
  std::size_t n = records.size();
  std::size_t bin = std::max<std::size_t>(1, (n + 9) / 10);
  std::set<std::size_t> checkpoints;
  for (std::size_t q = bin; q < n; q += bin) checkpoints.insert(q);
  checkpoints.insert(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (records[i].violation) checkpoints.insert(i + 1);
  }
  os << "  query violations\n";
  std::size_t seen = 0, idx = 0;
  for (std::size_t q : checkpoints) {
    while (idx < q) seen += records[idx++].violation ? 1 : 0;
    os << "  " << records[q - 1].query << " " << seen << "\n";
  }
  return os.str();
}

// ---- campaign -------------------------------------------------------------

CampaignPlan plan_campaign(const CampaignConfig& config, CampaignInputs inputs) {
  CampaignPlan plan;
  plan.inputs = std::move(inputs);
  for (const auto& prop : plan.inputs.properties.properties()) {
    PropertyPlan pp;
    pp.property = prop.id;
    std::vector<TestSkeleton> skeletons;
    try {
      skeletons = generate_skeletons(*prop.formula, config.max_skeletons, prop.id);
    } catch (const UnsupportedShape& e) {
      throw UnsupportedShape("property " + prop.id + ": " + e.what());
    }
    for (auto& sk : skeletons) {
      SkeletonPlan sp;
      sp.budget = Budget{config.length_for(sk), config.mutation_budget};
      auto traces = build_traces(plan.inputs.psm, sk, sp.budget, config.trace_cap);
      sp.trace_count = traces.size();
      sp.skeleton = std::move(sk);
      pp.traces.insert(pp.traces.end(), std::make_move_iterator(traces.begin()),
                       std::make_move_iterator(traces.end()));
      pp.skeletons.push_back(std::move(sp));
    }
    plan.properties.push_back(std::move(pp));
  }
  return plan;
}

CampaignPlan plan_campaign(const CampaignConfig& config) {
  return plan_campaign(config, load_inputs(config));
}

std::string describe_plan(const CampaignPlan& plan) {
  std::ostringstream os;
  os << "model: " << plan.inputs.psm.states().size() << " states, "
     << plan.inputs.psm.transitions().size() << " transitions\n";
  for (const auto& p : plan.properties) {
    os << "property " << p.property << ": " << p.skeletons.size() << " skeletons, "
       << p.traces.size() << " traces, weight " << format_number(property_weight(p.traces))
       << "\n";
    for (const auto& s : p.skeletons) {
      os << "  " << s.skeleton.id << " (length " << s.budget.length << ", mutations "
         << s.budget.mutations << "): " << s.trace_count << " traces  " << compact(s.skeleton)
         << "\n";
    }
  }
  return os.str();
}

CampaignReport run_campaign(const CampaignConfig& config, const CampaignPlan& plan,
                            Adapter& adapter) {
  const GuidingPsm& psm = plan.inputs.psm;
  adapter.set_costs(config.costs);
  CampaignState state(config.seed, config.marker_preference);
  for (const auto& pp : plan.properties) {
    PropertyEntry e;
    e.id = pp.property;
    e.weight = property_weight(pp.traces);
    for (const auto& sp : pp.skeletons) e.skeletons.push_back(sp.skeleton);
    for (const auto& t : pp.traces) {
      TraceEntry te;
      te.trace = t;
      te.sites = trace_sites(psm, t);
      for (const auto& s : t.steps) {
        if (s.is_marker()) te.marker_types.insert(s.obs.input.type());
      }
      e.traces.push_back(std::move(te));
    }
    state.properties.push_back(std::move(e));
  }

  CampaignReport report;
  while (state.queries < config.queries) {
    if (config.time_budget && state.sim_time >= *config.time_budget) break;
    auto pi = select_property(state);
    if (!pi) break;
    std::size_t ti = select_trace(state, *pi);
    PropertyEntry& prop = state.properties[*pi];
    TraceEntry& entry = prop.traces[ti];

    InstantiatedTrace concrete;
    try {
      concrete = resolve_markers(entry.trace, plan.inputs.schemas, state.rng,
                                 &state.mutated_types, &psm);
    } catch (const InapplicableOp&) {
      entry.alive = false;
      ++report.skipped_traces;
      continue;
    }

    ExecutionResult result;
    try {
      result = execute_trace(adapter, concrete, psm);
    } catch (const TransportError& e) {
      report.error = e.what();
      break;
    }

    ++state.queries;
    state.sim_time += result.cost;
    ++entry.stats.f;
    if (result.unresponsive) ++entry.stats.u;

    QueryRecord rec;
    rec.query = state.queries;
    rec.property = prop.id;
    rec.trace = entry.trace.id;
    rec.mutations = entry.trace.mutation_count();
    rec.deviations = result.deviation_count();
    rec.deviation_sites = result.deviation_sites();
    rec.unresponsive = result.unresponsive;
    for (const auto& r : result.records) rec.sent.push_back(r.sent);
    rec.sim_time = state.sim_time;

    state.register_deviations(rec.deviation_sites);

    std::vector<const TestSkeleton*> active;
    for (const auto& p : state.properties) {
      if (!p.active) continue;
      for (const auto& sk : p.skeletons) active.push_back(&sk);
    }
    if (auto v = detect_violation(result, active)) {
      v->query = state.queries;
      v->trace = rec.trace;
      rec.violation = true;
      rec.violated_property = v->property;
      rec.witness = v->witness;
      state.violations.push_back(*v);
      state.deactivate(v->property);
    }
    report.log.push_back(std::move(rec));
  }

  report.violations = state.violations;
  report.registry = state.registry;
  report.sim_time = state.sim_time;
  std::ostringstream os;
  os << describe_plan(plan) << "\n" << summarize_log(report.log);
  if (report.skipped_traces) {
    os << "\nskipped traces (no applicable mutation): " << report.skipped_traces << "\n";
  }
  if (!report.error.empty()) os << "\nstopped early: " << report.error << "\n";
  report.text = os.str();
  return report;
}

CampaignReport run_campaign(const CampaignConfig& config) {
  CampaignPlan plan = plan_campaign(config);
  auto adapter = make_adapter(config.adapter, config.base_dir);
  return run_campaign(config, plan, *adapter);
}

}  // namespace psmfuzz
