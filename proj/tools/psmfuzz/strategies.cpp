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

#include "strategies.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "psmfuzz/errors.hpp"
#include "psmfuzz/mutation_ops.hpp"

namespace psmfuzz::cli {

Strategy parse_strategy(std::string_view name) {
  if (name == "proteus") return Strategy::Proteus;
  if (name == "property-only") return Strategy::PropertyOnly;
  if (name == "psm-only") return Strategy::PsmOnly;
  throw ConfigError("unknown strategy '" + std::string(name) +
                    "' (expected proteus, property-only or psm-only)");
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Proteus:
      return "proteus";
    case Strategy::PropertyOnly:
      return "property-only";
    case Strategy::PsmOnly:
      return "psm-only";
  }
  return {};
}

namespace {

struct Attempt {
  std::string property;
  std::string label;
  std::vector<InputSymbol> inputs;
  std::size_t mutations = 0;
};

struct Active {
  std::string property;
  std::vector<const TestSkeleton*> skeletons;
  bool active = true;
};

using Generator = std::function<std::optional<Attempt>(Rng&, const std::vector<Active*>&)>;

CampaignReport run_loop(const CampaignConfig& config, const CampaignPlan& plan, Adapter& adapter,
                        const std::string& strategy, const Generator& generate) {
  adapter.set_costs(config.costs);
  Rng rng(config.seed);
  std::vector<Active> props;
  for (const auto& pp : plan.properties) {
    Active a;
    a.property = pp.property;
    for (const auto& sp : pp.skeletons) a.skeletons.push_back(&sp.skeleton);
    if (!a.skeletons.empty()) props.push_back(std::move(a));
  }

  CampaignReport report;
  std::size_t queries = 0;
  double sim_time = 0;
  while (queries < config.queries) {
    if (config.time_budget && sim_time >= *config.time_budget) break;
    std::vector<Active*> live;
    for (auto& p : props) {
      if (p.active) live.push_back(&p);
    }
    if (live.empty()) break;
    auto attempt = generate(rng, live);
    if (!attempt) break;

    ExecutionResult result;
    try {
      result = execute_inputs(adapter, attempt->inputs, plan.inputs.psm);
    } catch (const TransportError& e) {
      report.error = e.what();
      break;
    }
    ++queries;
    sim_time += result.cost;

    QueryRecord rec;
    rec.query = queries;
    rec.property = attempt->property;
    rec.trace = attempt->label;
    rec.mutations = attempt->mutations;
    rec.deviations = result.deviation_count();
    rec.deviation_sites = result.deviation_sites();
    rec.unresponsive = result.unresponsive;
    for (const auto& r : result.records) rec.sent.push_back(r.sent);
    rec.sim_time = sim_time;
    for (const auto& site : rec.deviation_sites) ++report.registry[site];

    std::vector<const TestSkeleton*> skeletons;
    for (Active* p : live) skeletons.insert(skeletons.end(), p->skeletons.begin(), p->skeletons.end());
    if (auto v = detect_violation(result, skeletons)) {
      v->query = queries;
      v->trace = rec.trace;
      rec.violation = true;
      rec.violated_property = v->property;
      rec.witness = v->witness;
      report.violations.push_back(*v);
      for (auto& p : props) {
        if (p.property == v->property) p.active = false;
      }
    }
    report.log.push_back(std::move(rec));
  }
  report.sim_time = sim_time;
  std::ostringstream os;
  os << "strategy: " << strategy << "\n" << describe_plan(plan) << "\n" << summarize_log(report.log);
  if (!report.error.empty()) os << "\nstopped early: " << report.error << "\n";
  report.text = os.str();
  return report;
}

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& items) {
  return items[rng.below(items.size())];
}

// Plain message of every schema type plus the inputs of every atom.
std::vector<InputSymbol> filler_alphabet(const CampaignPlan& plan) {
  std::set<InputSymbol> symbols;
  for (const auto& [type, schema] : plan.inputs.schemas.all()) symbols.insert(Symbol(type));
  for (const auto& prop : plan.inputs.properties.properties()) {
    for (const auto& atom : atoms_of(*prop.formula)) {
      if (atom.input) symbols.insert(*atom.input);
    }
  }
  return {symbols.begin(), symbols.end()};
}

// An input that can never produce an observation in `excluded`.
bool avoids(const InputSymbol& s, const std::vector<ObservationPattern>& excluded) {
  return std::none_of(excluded.begin(), excluded.end(), [&](const ObservationPattern& p) {
    return !p.input || symbol_matches(s, *p.input);
  });
}

std::optional<InputSymbol> draw_avoiding(Rng& rng, const std::vector<InputSymbol>& alphabet,
                                         const std::vector<ObservationPattern>& excluded) {
  std::vector<InputSymbol> ok;
  for (const auto& s : alphabet) {
    if (avoids(s, excluded)) ok.push_back(s);
  }
  if (ok.empty()) return std::nullopt;
  return pick(rng, ok);
}

InputSymbol input_of(Rng& rng, const ObservationPattern& p, const std::vector<InputSymbol>& alphabet) {
  if (p.input) return *p.input;
  return pick(rng, alphabet);
}

}  // namespace

CampaignReport run_property_only(const CampaignConfig& config, const CampaignPlan& plan,
                                 Adapter& adapter) {
  const std::vector<InputSymbol> alphabet = filler_alphabet(plan);
  auto generate = [&](Rng& rng, const std::vector<Active*>& live) -> std::optional<Attempt> {
    const Active* prop = pick(rng, live);
    const TestSkeleton& sk = *pick(rng, prop->skeletons);
    const std::size_t literals = literal_count(sk);
    const std::size_t lambda = std::max(literals, config.length_for(sk));
    std::vector<std::size_t> stars;
    for (std::size_t i = 0; i < sk.elements.size(); ++i) {
      if (sk.elements[i].is_star()) stars.push_back(i);
    }
    std::size_t total = stars.empty() ? literals : rng.between(literals, lambda);
    std::vector<std::size_t> fill(sk.elements.size(), 0);
    for (std::size_t k = literals; k < total; ++k) ++fill[pick(rng, stars)];

    Attempt a;
    a.property = prop->property;
    a.label = sk.id + "/random";
    for (std::size_t i = 0; i < sk.elements.size(); ++i) {
      const SkeletonElement& e = sk.elements[i];
      switch (e.kind()) {
        case ElementKind::Literal:
        case ElementKind::LiteralChoice:
          a.inputs.push_back(input_of(rng, pick(rng, e.patterns()), alphabet));
          break;
        case ElementKind::NegLiteral:
          if (auto s = draw_avoiding(rng, alphabet, e.patterns())) a.inputs.push_back(*s);
          break;
        case ElementKind::AnyStar:
          for (std::size_t k = 0; k < fill[i]; ++k) a.inputs.push_back(pick(rng, alphabet));
          break;
        case ElementKind::NegStar:
          for (std::size_t k = 0; k < fill[i]; ++k) {
            if (auto s = draw_avoiding(rng, alphabet, e.patterns())) a.inputs.push_back(*s);
          }
          break;
      }
    }
    return a;
  };
  return run_loop(config, plan, adapter, "property-only", generate);
}

CampaignReport run_psm_only(const CampaignConfig& config, const CampaignPlan& plan,
                            Adapter& adapter) {
  const GuidingPsm& psm = plan.inputs.psm;
  std::size_t lambda = 1;
  for (const auto& pp : plan.properties) {
    for (const auto& sp : pp.skeletons) lambda = std::max(lambda, sp.budget.length);
  }
  auto generate = [&, lambda](Rng& rng, const std::vector<Active*>&) -> std::optional<Attempt> {
    const std::size_t length = rng.between(1, lambda);
    const std::size_t wanted = rng.between(0, std::min(config.mutation_budget, length));
    // Distinct mutated positions by partial shuffle.
    std::vector<std::size_t> positions(length);
    for (std::size_t i = 0; i < length; ++i) positions[i] = i;
    for (std::size_t i = 0; i < wanted; ++i) {
      std::swap(positions[i], positions[i + rng.below(length - i)]);
    }
    std::vector<int> kind(length, 0);  // 0 none, 1 M1, 2 M2
    for (std::size_t i = 0; i < wanted; ++i) kind[positions[i]] = rng.chance(0.5) ? 1 : 2;

    Attempt a;
    a.property = "*";
    a.label = "walk";
    StateId q = psm.initial();
    for (std::size_t i = 0; i < length; ++i) {
      auto out = psm.outgoing(q);
      if (out.empty()) break;
      const Transition& t = *pick(rng, out);
      InputSymbol in = t.input;
      StateId next = t.destination;
      if (kind[i] == 1) {
        const MessageSchema* schema = plan.inputs.schemas.find(in.type());
        std::vector<OpKind> ops;
        if (schema) ops = applicable_ops(*schema, in);
        if (!ops.empty()) {
          in = apply_op(pick(rng, ops), *schema, in, rng);
          ++a.mutations;
        }
      } else if (kind[i] == 2 && psm.states().size() > 1) {
        std::vector<StateId> others;
        for (const auto& s : psm.states()) {
          if (s != t.destination) others.push_back(s);
        }
        next = pick(rng, others);
        ++a.mutations;
      }
      a.inputs.push_back(std::move(in));
      q = next;
    }
    return a;
  };
  return run_loop(config, plan, adapter, "psm-only", generate);
}

CampaignReport run_strategy(Strategy s, const CampaignConfig& config, const CampaignPlan& plan,
                            Adapter& adapter) {
  switch (s) {
    case Strategy::Proteus:
      return run_campaign(config, plan, adapter);
    case Strategy::PropertyOnly:
      return run_property_only(config, plan, adapter);
    case Strategy::PsmOnly:
      return run_psm_only(config, plan, adapter);
  }
  throw ConfigError("unknown strategy");
}

}  // namespace psmfuzz::cli
