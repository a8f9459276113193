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

#include "psmfuzz/campaign_config.hpp"

#include <json.hpp>
#include <set>

#include "psmfuzz/errors.hpp"
#include "psmfuzz/io.hpp"
#include "psmfuzz/simulator.hpp"
#include "psmfuzz/wire.hpp"

namespace psmfuzz {

namespace {

using nlohmann::json;

template <typename T>
T get_as(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

std::size_t get_count(const json& j, const char* key, bool allow_zero) {
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < (allow_zero ? 0 : 1)) {
    throw ConfigError(std::string("config key '") + key + "' must be an integer >= " +
                      (allow_zero ? "0" : "1"));
  }
  return v.get<std::size_t>();
}

double get_seconds(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_number() || v.get<double>() < 0) {
    throw ConfigError(std::string("config key '") + key + "' must be a non-negative number");
  }
  return v.get<double>();
}

}  // namespace

std::filesystem::path CampaignConfig::resolve(const std::filesystem::path& p) const {
  if (p.empty() || p.is_absolute()) return p;
  return base_dir / p;
}

std::size_t CampaignConfig::length_for(const TestSkeleton& skeleton) const {
  return length_budget ? *length_budget : literal_count(skeleton) + 1;
}

CampaignConfig parse_campaign_config(std::string_view text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  static const std::set<std::string> known = {
      "psm",          "schemas",       "props",        "queries",       "length_budget",
      "mutation_budget", "seed",       "marker_preference", "reset_cost", "message_cost",
      "time_budget",  "max_skeletons", "trace_cap",    "adapter"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }

  CampaignConfig c;
  c.base_dir = base_dir;
  if (!j.contains("psm")) throw ConfigError("config needs 'psm'");
  c.psm = get_as<std::string>(j, "psm");
  if (j.contains("schemas")) c.schemas = get_as<std::string>(j, "schemas");
  if (j.contains("props")) {
    if (j["props"].is_array()) {
      for (const auto& p : get_as<std::vector<std::string>>(j, "props")) c.props.emplace_back(p);
    } else {
      c.props.emplace_back(get_as<std::string>(j, "props"));
    }
  }
  if (j.contains("queries")) c.queries = get_count(j, "queries", true);
  if (j.contains("length_budget") && !j["length_budget"].is_null()) {
    c.length_budget = get_count(j, "length_budget", false);
  }
  if (j.contains("mutation_budget")) c.mutation_budget = get_count(j, "mutation_budget", true);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("config key 'seed' must be unsigned");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("marker_preference")) {
    c.marker_preference = get_seconds(j, "marker_preference");
    if (c.marker_preference > 1) throw ConfigError("marker_preference must be in [0, 1]");
  }
  if (j.contains("reset_cost")) c.costs.reset_seconds = get_seconds(j, "reset_cost");
  if (j.contains("message_cost")) c.costs.message_seconds = get_seconds(j, "message_cost");
  if (j.contains("time_budget") && !j["time_budget"].is_null()) {
    c.time_budget = get_seconds(j, "time_budget");
  }
  if (j.contains("max_skeletons")) c.max_skeletons = get_count(j, "max_skeletons", false);
  if (j.contains("trace_cap")) c.trace_cap = get_count(j, "trace_cap", false);
  if (j.contains("adapter")) c.adapter = get_as<std::string>(j, "adapter");
  return c;
}

CampaignConfig load_campaign_config(const std::filesystem::path& file) {
  return parse_campaign_config(read_file(file), file.parent_path());
}

CampaignInputs load_inputs(const CampaignConfig& config) {
  auto load = [&](const std::filesystem::path& path, auto&& parse) {
    std::filesystem::path full = config.resolve(path);
    try {
      return parse(read_file(full));
    } catch (const ParseError& e) {
      throw ConfigError(full.string() + ": " + e.what());
    } catch (const ModelError& e) {
      throw ConfigError(full.string() + ": " + e.what());
    }
  };
  CampaignInputs in;
  in.psm = load(config.psm, [](const std::string& t) { return parse_psm(t); });
  if (!config.schemas.empty()) {
    in.schemas = load(config.schemas, [](const std::string& t) { return parse_schemas(t); });
  }
  for (const auto& path : config.props) {
    PropertySet one = load(path, [](const std::string& t) { return parse_properties(t); });
    for (const auto& p : one.properties()) {
      if (in.properties.find(p.id)) {
        throw ConfigError("property " + p.id + " defined in more than one file");
      }
      in.properties.add(p);
    }
  }
  return in;
}

std::unique_ptr<Adapter> make_adapter(std::string_view spec, const std::filesystem::path& base_dir) {
  if (spec.substr(0, 4) == "sim:") {
    return std::make_unique<SimAdapter>(load_simulator(spec.substr(4), base_dir));
  }
  if (spec.substr(0, 6) == "tcp://") {
    Endpoint e = parse_tcp_endpoint(spec);
    return std::make_unique<TcpAdapter>(e.host, e.port);
  }
  throw ConfigError("adapter must be sim:<model> or tcp://host:port, got '" + std::string(spec) +
                    "'");
}

}  // namespace psmfuzz
