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
#include <iosfwd>
#include <optional>
#include <string>

#include "strategies.hpp"

namespace psmfuzz::cli {

struct SkeletonsArgs {
  std::filesystem::path props;
  std::size_t max_skeletons = kDefaultMaxSkeletons;
  std::filesystem::path out;  // empty: stdout
};

struct BuildArgs {
  std::filesystem::path psm;
  std::filesystem::path schemas;
  std::filesystem::path props;
  std::optional<std::size_t> length;  // unset: literal count + 1
  std::size_t mutations = 2;
  std::size_t cap = kDefaultTraceCap;
  std::size_t max_skeletons = kDefaultMaxSkeletons;
  std::string skeleton;  // only this skeleton id when set
  std::filesystem::path out;  // trace dumps; empty: not written
};

struct CampaignArgs {
  std::filesystem::path config;
  Strategy strategy = Strategy::Proteus;
  std::optional<std::filesystem::path> psm, schemas, props;
  std::optional<std::size_t> length, mutations, queries;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> adapter;
  std::filesystem::path out;  // directory for report.txt and log.csv
};

struct ReportArgs {
  std::filesystem::path log;
  std::filesystem::path out;  // empty: stdout
};

struct ServeArgs {
  std::string sim;
  std::filesystem::path base_dir;
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
  bool stdio = false;
  std::size_t sessions = 0;  // 0: until killed
};

// Each command writes results to `out`, diagnostics to `err`, and returns
// the exit status (non-zero iff something was written to `err`).
int cmd_skeletons(const SkeletonsArgs& a, std::ostream& out, std::ostream& err);
int cmd_build(const BuildArgs& a, std::ostream& out, std::ostream& err);
int cmd_campaign(const CampaignArgs& a, std::ostream& out, std::ostream& err);
int cmd_report(const ReportArgs& a, std::ostream& out, std::ostream& err);
int cmd_serve(const ServeArgs& a, std::istream& in, std::ostream& out, std::ostream& err);

/// Config for `cmd_campaign`: the file if given, then flag overrides.
CampaignConfig campaign_config(const CampaignArgs& a);

}  // namespace psmfuzz::cli
