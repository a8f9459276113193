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

#include "psmfuzz/simulator.hpp"

#include "psmfuzz/errors.hpp"
#include "psmfuzz/io.hpp"
#include "text.hpp"

namespace psmfuzz {

std::vector<BugRule> parse_bugs(std::string_view text, const GuidingPsm& base) {
  std::vector<BugRule> rules;
  for (const auto& line : detail::logical_lines(text)) {
    detail::Cursor cur(line.text, line.number);
    std::size_t kw_col = (cur.skip_ws(), cur.column());
    if (cur.identifier("keyword") != "bug") cur.fail_at(kw_col, "expected 'bug'");
    BugRule r;
    std::size_t at_col = (cur.skip_ws(), cur.column());
    r.at_state = cur.identifier("state id");
    if (!base.has_state(r.at_state)) cur.fail_at(at_col, "unknown state " + r.at_state);
    cur.expect(':', "after state");
    r.input_pattern = cur.symbol();
    if (!cur.consume("->")) cur.fail("expected '->'");
    r.response = cur.symbol();
    cur.expect('@', "before next state");
    std::size_t next_col = (cur.skip_ws(), cur.column());
    r.next_state = cur.identifier("state id");
    if (!base.has_state(r.next_state)) cur.fail_at(next_col, "unknown state " + r.next_state);
    if (cur.consume_word("hang")) r.behavior = BugBehavior::Hang;
    else if (cur.consume_word("drop")) r.behavior = BugBehavior::Drop;
    if (!cur.at_end()) cur.fail("unexpected trailing text");
    rules.push_back(std::move(r));
  }
  return rules;
}

SimulatedIut::SimulatedIut(GuidingPsm base, std::vector<BugRule> bugs)
    : base_(std::move(base)), bugs_(std::move(bugs)), state_(base_.initial()) {
  for (const auto& b : bugs_) {
    if (!base_.has_state(b.at_state) || !base_.has_state(b.next_state)) {
      throw ModelError("bug rule references an unknown state");
    }
  }
}

void SimulatedIut::reset() {
  state_ = base_.initial();
  hung_ = false;
}

Reply SimulatedIut::send(const InputSymbol& input) {
  if (hung_) return std::nullopt;
  for (const auto& b : bugs_) {
    if (b.at_state != state_ || !symbol_matches(input, b.input_pattern)) continue;
    switch (b.behavior) {
      case BugBehavior::Respond:
        state_ = b.next_state;
        return b.response;
      case BugBehavior::Hang:
        hung_ = true;
        return std::nullopt;
      case BugBehavior::Drop:
        return Symbol::null_action();
    }
  }
  if (auto s = step(base_, state_, input)) {
    state_ = s->destination;
    return s->output;
  }
  return Symbol::null_action();
}

SimulatedIut load_simulator(std::string_view spec, const std::filesystem::path& base_dir) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t plus = spec.find('+', start);
    parts.emplace_back(spec.substr(start, plus == std::string_view::npos ? plus : plus - start));
    if (plus == std::string_view::npos) break;
    start = plus + 1;
  }
  if (parts.front().empty()) throw ConfigError("simulator spec names no model");
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
  };
  auto load = [&](const std::filesystem::path& path, auto&& parse) {
    try {
      return parse(read_file(path));
    } catch (const ParseError& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
  };
  GuidingPsm model = load(resolve(parts[0]), [](const std::string& t) { return parse_psm(t); });
  std::vector<BugRule> bugs;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    auto more = load(resolve(parts[i]), [&](const std::string& t) { return parse_bugs(t, model); });
    bugs.insert(bugs.end(), more.begin(), more.end());
  }
  return SimulatedIut(std::move(model), std::move(bugs));
}

}  // namespace psmfuzz
