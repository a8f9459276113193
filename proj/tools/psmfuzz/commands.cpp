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

#include "commands.hpp"

#include <iostream>
#include <sstream>

#include "psmfuzz/errors.hpp"
#include "psmfuzz/io.hpp"
#include "psmfuzz/pltl.hpp"
#include "psmfuzz/schema.hpp"
#include "psmfuzz/simulator.hpp"
#include "psmfuzz/skeleton.hpp"
#include "psmfuzz/trace_builder.hpp"
#include "psmfuzz/wire.hpp"

namespace psmfuzz::cli {

namespace {

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    body();
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

template <typename F>
auto load(const std::filesystem::path& path, F&& parse) {
  try {
    return parse(read_file(path));
  } catch (const ParseError& e) {
    throw ConfigError(path.string() + ":" + std::to_string(e.line()) + ":" +
                      std::to_string(e.column()) + ": " + e.message());
  }
}

void emit(const std::filesystem::path& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    write_file(path, text);
  }
}

}  // namespace

int cmd_skeletons(const SkeletonsArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    PropertySet props = load(a.props, [](const std::string& t) { return parse_properties(t); });
    std::ostringstream os;
    for (const auto& p : props.properties()) {
      for (const auto& sk : generate_skeletons(*p.formula, a.max_skeletons, p.id)) {
        os << "skeleton " << sk.id << " literals=" << literal_count(sk) << "\n" << dump(sk) << "\n";
      }
    }
    emit(a.out, os.str(), out);
  });
}

int cmd_build(const BuildArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    GuidingPsm psm = load(a.psm, [](const std::string& t) { return parse_psm(t); });
    if (!a.schemas.empty()) load(a.schemas, [](const std::string& t) { return parse_schemas(t); });
    PropertySet props = load(a.props, [](const std::string& t) { return parse_properties(t); });
    if (a.length && *a.length == 0) throw ConfigError("length budget must be at least 1");
    std::ostringstream traces, summary;
    bool found = a.skeleton.empty();
    for (const auto& p : props.properties()) {
      for (const auto& sk : generate_skeletons(*p.formula, a.max_skeletons, p.id)) {
        if (!a.skeleton.empty() && sk.id != a.skeleton) continue;
        found = true;
        Budget budget{a.length ? *a.length : literal_count(sk) + 1, a.mutations};
        auto built = build_traces(psm, sk, budget, a.cap);
        summary << sk.id << " length=" << budget.length << " mutations=" << budget.mutations
                << " traces=" << built.size() << "\n";
        for (const auto& t : built) traces << "trace " << t.id << "\n" << dump(t) << "\n";
      }
    }
    if (!found) throw ConfigError("no skeleton with id " + a.skeleton);
    if (!a.out.empty()) write_file(a.out, traces.str());
    out << summary.str();
  });
}

CampaignConfig campaign_config(const CampaignArgs& a) {
  CampaignConfig c;
  if (!a.config.empty()) {
    c = load_campaign_config(a.config);
  } else {
    c.base_dir = std::filesystem::current_path();
  }
  // Flag paths are relative to the working directory, not the config file.
  auto absolute = [](const std::filesystem::path& p) { return std::filesystem::absolute(p); };
  if (a.psm) c.psm = absolute(*a.psm);
  if (a.schemas) c.schemas = absolute(*a.schemas);
  if (a.props) c.props = {absolute(*a.props)};
  if (a.length) c.length_budget = *a.length;
  if (a.mutations) c.mutation_budget = *a.mutations;
  if (a.queries) c.queries = *a.queries;
  if (a.seed) c.seed = *a.seed;
  if (a.adapter) {
    c.adapter = *a.adapter;
    if (c.adapter.rfind("sim:", 0) == 0) {
      // Anchor each simulator file to the working directory.
      std::string spec = "sim:";
      std::string_view rest = std::string_view(c.adapter).substr(4);
      while (true) {
        auto plus = rest.find('+');
        if (spec.size() > 4) spec += '+';
        spec += absolute(std::string(rest.substr(0, plus))).string();
        if (plus == std::string_view::npos) break;
        rest = rest.substr(plus + 1);
      }
      c.adapter = spec;
    }
  }
  if (c.psm.empty()) throw ConfigError("campaign needs a model (--psm or config 'psm')");
  if (c.adapter.empty()) throw ConfigError("campaign needs an adapter (--adapter or config)");
  if (c.length_budget && *c.length_budget == 0) {
    throw ConfigError("length budget must be at least 1");
  }
  return c;
}

int cmd_campaign(const CampaignArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    CampaignConfig config = campaign_config(a);
    CampaignPlan plan = plan_campaign(config);
    auto adapter = make_adapter(config.adapter, config.base_dir);
    CampaignReport report = run_strategy(a.strategy, config, plan, *adapter);
    if (!a.out.empty()) {
      std::filesystem::create_directories(a.out);
      write_file(a.out / "report.txt", report.text);
      write_file(a.out / "log.csv", report.csv());
    }
    out << report.text;
    if (!report.error.empty()) throw TransportError(report.error);
  });
}

int cmd_report(const ReportArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto rows = load(a.log, [](const std::string& t) { return parse_log(t); });
    emit(a.out, summarize_log(rows), out);
  });
}

int cmd_serve(const ServeArgs& a, std::istream& in, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    SimulatedIut iut = load_simulator(a.sim, a.base_dir);
    if (a.stdio) {
      serve_stream(iut, in, out);
      return;
    }
    TcpServer server(std::move(iut), a.host, a.port);
    out << "listening on " << a.host << ":" << server.port() << "\n" << std::flush;
    server.serve(a.sessions);
  });
}

}  // namespace psmfuzz::cli
