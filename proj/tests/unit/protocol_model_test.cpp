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

#include "psmfuzz/errors.hpp"
#include "psmfuzz/psm.hpp"
#include "psmfuzz/rng.hpp"
#include "psmfuzz/schema.hpp"
#include "psmfuzz/symbol.hpp"
#include "test_support.hpp"

namespace psmfuzz {
namespace {

using testing::load_psm;
using testing::lte_dir;

Symbol sym(const char* text) { return parse_symbol(text); }

TEST(Symbol, ParseCanonicalizesPredicateOrder) {
  EXPECT_EQ(sym("identity_request{integrity=1,identity_type=1}"),
            sym("identity_request{identity_type=1, integrity=1}"));
  EXPECT_EQ(to_string(sym("x{b=2,a=1}")), "x{a=1,b=2}");
  EXPECT_EQ(to_string(sym("ping")), "ping{}");
  EXPECT_TRUE(sym("null").is_null());
  EXPECT_EQ(to_string(Symbol::null_action()), "null");
}

TEST(Symbol, ParseErrors) {
  EXPECT_THROW(sym("x{a=}"), ParseError);
  EXPECT_THROW(sym("x{a=1"), ParseError);
  EXPECT_THROW(sym("x{a=1,a=2}"), ParseError);
  EXPECT_THROW(sym(""), ParseError);
}

TEST(Symbol, MatchesBySubsumption) {
  EXPECT_TRUE(symbol_matches(sym("identity_request{integrity=1,identity_type=1}"),
                             sym("identity_request{integrity=1}")));
  EXPECT_FALSE(symbol_matches(sym("identity_request{}"), sym("identity_request{integrity=1}")));
  EXPECT_FALSE(symbol_matches(sym("attach_accept{integrity=0}"), sym("attach_request{}")));
}

TEST(Symbol, MatchIsReflexiveTransitiveAntisymmetric) {
  std::vector<Symbol> all;
  for (int a = -1; a < 2; ++a)
    for (int b = -1; b < 2; ++b) {
      Symbol s("m");
      if (a >= 0) s = s.with("a", a);
      if (b >= 0) s = s.with("b", b);
      all.push_back(s);
    }
  all.push_back(sym("n{a=0}"));
  for (const auto& x : all) {
    EXPECT_TRUE(symbol_matches(x, x));
    for (const auto& y : all) {
      if (symbol_matches(x, y) && symbol_matches(y, x)) {
        EXPECT_EQ(x, y);
      }
      for (const auto& z : all)
        if (symbol_matches(x, y) && symbol_matches(y, z)) {
          EXPECT_TRUE(symbol_matches(x, z));
        }
    }
  }
}

TEST(Symbol, PatternMergeAndCompatibility) {
  ObservationPattern p{sym("m{a=1}"), std::nullopt, {}};
  ObservationPattern q{sym("m{b=2}"), sym("r{}"), {}};
  ObservationPattern r{sym("m{a=2}"), std::nullopt, {}};
  EXPECT_TRUE(compatible(p, q));
  EXPECT_FALSE(compatible(p, r));
  auto m = merge(p, q);
  ASSERT_TRUE(m);
  EXPECT_EQ(*m->input, sym("m{a=1,b=2}"));
  EXPECT_EQ(*m->output, sym("r{}"));
  EXPECT_TRUE(implies(*m, p));
  EXPECT_FALSE(implies(p, *m));
  EXPECT_FALSE(merge(p, r));
}

TEST(Schema, BoundaryValueFromBitWidth) {
  auto set = parse_schemas("msg connection_request\nfield Hop bits=5 range=5..16\n");
  const auto& f = *set.at("connection_request").field("Hop");
  EXPECT_EQ(f.max_value(), 31u);
  EXPECT_EQ(f.lo, 5u);
  EXPECT_EQ(f.hi, 16u);
}

TEST(Schema, OneBitFieldIsLegal) {
  auto set = parse_schemas("msg m\nfield f bits=1 range=0..1\n");
  EXPECT_TRUE(set.at("m").field("f")->prohibited.empty());
}

TEST(Schema, Errors) {
  EXPECT_THROW(parse_schemas("msg m\nfield f bits=3 range=0..9\n"), ParseError);
  EXPECT_THROW(parse_schemas("msg m\nfield f bits=3 range=0..1\nfield f bits=2 range=0..1\n"),
               ParseError);
  EXPECT_THROW(parse_schemas("msg m\nfield f bits=3 range=5..1\n"), ParseError);
  EXPECT_THROW(parse_schemas("field f bits=3 range=0..1\n"), ParseError);
  EXPECT_THROW(SchemaSet().at("nope"), ModelError);
}

TEST(Schema, Flags) {
  auto set = testing::load_schemas(lte_dir() / "lte.schema");
  EXPECT_TRUE(set.at("security_mode_command").replayable);
  EXPECT_TRUE(set.at("security_mode_command").protectable);
  EXPECT_FALSE(set.at("enable_s1").replayable);
}

TEST(Psm, SmallestLegal) {
  auto psm = parse_psm("init q0\ntrans q0 q0 : ping{} / pong{}\n");
  EXPECT_EQ(psm.states().size(), 1u);
  EXPECT_EQ(psm.transitions().size(), 1u);
}

TEST(Psm, RunningExampleModel) {
  auto psm = load_psm(lte_dir() / "lte.psm");
  EXPECT_EQ(psm.states(), (std::vector<StateId>{"q0", "q1", "q2", "q3", "q4", "q5"}));
  EXPECT_EQ(psm.transitions().size(), 10u);
  EXPECT_EQ(psm.initial(), "q0");
  Transition first{"q0", sym("enable_s1{}"), sym("attach_request{}"), "q1"};
  EXPECT_EQ(psm.transitions().front(), first);
}

TEST(Psm, LoaderErrors) {
  EXPECT_THROW(parse_psm("init q1\nstate q2\ntrans q1 q2 : a{} / b{}\ntrans q1 q3 : a{} / b{}\n"),
               ParseError);
  EXPECT_THROW(parse_psm("trans q0 q0 : a{} / b{}\n"), ParseError);
  EXPECT_THROW(parse_psm("init q0\ntrans q0 q0 a{} / b{}\n"), ParseError);
  EXPECT_THROW(parse_psm("init q0\nprobe q9 : a{} / b{}\n"), ParseError);
}

TEST(Psm, ParseErrorCarriesLine) {
  try {
    parse_psm("init q0\n\ntrans q0 q0 : a{ / b{}\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Psm, StepExamples) {
  auto psm = load_psm(lte_dir() / "lte.psm");
  auto r = step(psm, "q0", sym("enable_s1{}"));
  ASSERT_TRUE(r);
  EXPECT_EQ(r->output, sym("attach_request{}"));
  EXPECT_EQ(r->destination, "q1");

  r = step(psm, "q3", sym("identity_request{integrity=1,identity_type=1}"));
  ASSERT_TRUE(r);
  EXPECT_EQ(r->output, sym("identity_response{}"));
  EXPECT_EQ(r->destination, "q3");

  EXPECT_FALSE(step(psm, "q0", sym("security_mode_command{}")));
  EXPECT_THROW(step(psm, "q9", sym("enable_s1{}")), ModelError);
}

TEST(Psm, StepPrefersMostSpecific) {
  auto psm = parse_psm(
      "init s\ntrans s s : m{} / a{}\ntrans s s : m{x=1} / b{}\ntrans s s : m{x=1,y=2} / c{}\n");
  EXPECT_EQ(step(psm, "s", sym("m{x=1,y=2,z=3}"))->output, sym("c{}"));
  EXPECT_EQ(step(psm, "s", sym("m{x=1,y=3}"))->output, sym("b{}"));
  EXPECT_EQ(step(psm, "s", sym("m{x=2}"))->output, sym("a{}"));
  EXPECT_FALSE(step_exact(psm, "s", sym("m{x=2}")));
  EXPECT_EQ(step_exact(psm, "s", sym("m{x=1}"))->output, sym("b{}"));
}

TEST(Psm, RunS0) {
  auto psm = load_psm(lte_dir() / "lte.psm");
  auto res = run(psm, {sym("enable_s1{}"), sym("authentication_request{}"),
                       sym("security_mode_command{}"),
                       sym("identity_request{identity_type=1,integrity=1}")});
  EXPECT_EQ(res.visited, (std::vector<StateId>{"q0", "q1", "q2", "q3", "q3"}));
  EXPECT_EQ(res.observations.size(), 4u);
}

TEST(Psm, RunEmptyAndUndefined) {
  auto psm = load_psm(lte_dir() / "lte.psm");
  auto empty = run(psm, {});
  EXPECT_TRUE(empty.observations.empty());
  EXPECT_EQ(empty.visited, std::vector<StateId>{"q0"});

  auto res = run(psm, {sym("detach_request{}")});
  ASSERT_EQ(res.observations.size(), 1u);
  EXPECT_EQ(res.observations[0].output, Symbol::null_action());
  EXPECT_EQ(res.visited, (std::vector<StateId>{"q0", "q0"}));
}

TEST(Psm, RunLengthLawOnRandomInputs) {
  auto psm = load_psm(lte_dir() / "lte.psm");
  Rng rng(7);
  std::vector<InputSymbol> pool;
  for (const auto& t : psm.transitions()) pool.push_back(t.input);
  pool.push_back(sym("nonsense{}"));
  for (int i = 0; i < 200; ++i) {
    std::vector<InputSymbol> in;
    for (std::size_t n = rng.below(10); n > 0; --n) in.push_back(pool[rng.below(pool.size())]);
    auto a = run(psm, in);
    auto b = run(psm, in);
    EXPECT_EQ(a.observations.size(), in.size());
    EXPECT_EQ(a.visited.size(), in.size() + 1);
    EXPECT_EQ(a.observations, b.observations);
    EXPECT_EQ(a.visited, b.visited);
  }
}

TEST(Psm, SerializeRoundTrip) {
  for (const char* f : {"lte/lte.psm", "lte/lte_iut.psm", "lte/lte_no_smc.psm", "ble/ble.psm",
                        "ble/ble_iut.psm"}) {
    auto psm = load_psm(testing::models_dir() / f);
    EXPECT_EQ(parse_psm(serialize_psm(psm)), psm) << f;
  }
}

}  // namespace
}  // namespace psmfuzz
