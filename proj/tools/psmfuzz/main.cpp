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

#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"

namespace cli = psmfuzz::cli;

int main(int argc, char** argv) {
  CLI::App app{"Property-guided test generation for stateful protocols"};
  app.require_subcommand(1);

  cli::SkeletonsArgs sk;
  auto* skeletons = app.add_subcommand("skeletons", "Compile properties into violating skeletons");
  skeletons->add_option("--props", sk.props, "Property file")->required();
  skeletons->add_option("--max-skeletons", sk.max_skeletons, "Skeletons kept per property");
  skeletons->add_option("--out", sk.out, "Output file (default stdout)");

  cli::BuildArgs b;
  std::size_t build_length = 0;
  auto* build = app.add_subcommand("build", "Instantiate skeletons into test traces");
  build->add_option("--psm", b.psm, "Guiding model")->required();
  build->add_option("--schemas", b.schemas, "Message schemas");
  build->add_option("--props", b.props, "Property file")->required();
  auto* build_length_opt =
      build->add_option("--budget-length", build_length, "Length budget (default literals + 1)");
  build->add_option("--budget-mutations", b.mutations, "Mutation budget");
  build->add_option("--cap", b.cap, "Traces kept per skeleton");
  build->add_option("--max-skeletons", b.max_skeletons, "Skeletons kept per property");
  build->add_option("--skeleton", b.skeleton, "Only this skeleton id");
  build->add_option("--out", b.out, "Trace dump file");

  cli::CampaignArgs c;
  std::string strategy = "proteus", psm, schemas, props, adapter;
  std::size_t length = 0, mutations = 0, queries = 0;
  std::uint64_t seed = 0;
  auto* campaign = app.add_subcommand("campaign", "Run a test campaign");
  campaign->add_option("--config", c.config, "Campaign JSON");
  campaign->add_option("--strategy", strategy, "proteus, property-only or psm-only");
  auto* psm_opt = campaign->add_option("--psm", psm, "Guiding model");
  auto* schemas_opt = campaign->add_option("--schemas", schemas, "Message schemas");
  auto* props_opt = campaign->add_option("--props", props, "Property file");
  auto* length_opt = campaign->add_option("--budget-length", length, "Length budget");
  auto* mutations_opt = campaign->add_option("--budget-mutations", mutations, "Mutation budget");
  auto* queries_opt = campaign->add_option("--queries", queries, "Query limit");
  auto* seed_opt = campaign->add_option("--seed", seed, "Random seed");
  auto* adapter_opt =
      campaign->add_option("--adapter", adapter, "sim:<model.psm>[+<bugs>...] or tcp://host:port");
  campaign->add_option("--out", c.out, "Directory for report.txt and log.csv");

  cli::ReportArgs r;
  auto* report = app.add_subcommand("report", "Summarize a campaign log");
  report->add_option("--log", r.log, "log.csv from a campaign")->required();
  report->add_option("--out", r.out, "Output file (default stdout)");

  cli::ServeArgs s;
  auto* serve = app.add_subcommand("serve", "Serve a simulated implementation");
  serve->add_option("--adapter", s.sim, "sim:<model.psm>[+<bugs>...]")->required();
  serve->add_option("--host", s.host, "Listen address");
  serve->add_option("--port", s.port, "Listen port (0 picks one)");
  serve->add_flag("--stdio", s.stdio, "Speak the protocol on stdin/stdout");
  serve->add_option("--sessions", s.sessions, "Stop after this many sessions");

  CLI11_PARSE(app, argc, argv);

  if (*skeletons) return cli::cmd_skeletons(sk, std::cout, std::cerr);
  if (*build) {
    if (*build_length_opt) b.length = build_length;
    return cli::cmd_build(b, std::cout, std::cerr);
  }
  if (*campaign) {
    try {
      c.strategy = cli::parse_strategy(strategy);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
    if (*psm_opt) c.psm = psm;
    if (*schemas_opt) c.schemas = schemas;
    if (*props_opt) c.props = props;
    if (*length_opt) c.length = length;
    if (*mutations_opt) c.mutations = mutations;
    if (*queries_opt) c.queries = queries;
    if (*seed_opt) c.seed = seed;
    if (*adapter_opt) c.adapter = adapter;
    return cli::cmd_campaign(c, std::cout, std::cerr);
  }
  if (*report) return cli::cmd_report(r, std::cout, std::cerr);
  if (*serve) {
    if (s.sim.rfind("sim:", 0) == 0) s.sim = s.sim.substr(4);
    return cli::cmd_serve(s, std::cin, std::cout, std::cerr);
  }
  return 0;
}
