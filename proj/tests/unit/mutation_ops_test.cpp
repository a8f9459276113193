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

#include <set>

#include "psmfuzz/errors.hpp"
#include "psmfuzz/mutation_ops.hpp"
#include "test_support.hpp"

namespace psmfuzz {
namespace {

using Ops = std::vector<OpKind>;

const SchemaSet& schemas() {
  static const SchemaSet s = parse_schemas(
      "msg connection_request\nfield Hop bits=5 range=5..16\n"
      "msg security_mode_command replayable protectable\n"
      "msg one\nfield f bits=1 range=0..1\n"
      "msg attach_accept replayable protectable\nfield security_header_type bits=4 range=0..3\n"
      "msg gap\nfield g bits=3 range=0..7 prohibited=2,3\n"
      "msg bare\n");
  return s;
}

const MessageSchema& schema(const char* type) { return schemas().at(type); }

TEST(ApplicableOps, Examples) {
  EXPECT_EQ(applicable_ops(schema("connection_request"), Symbol("connection_request")),
            (Ops{OpKind::InRange, OpKind::OutOfRange, OpKind::Boundary, OpKind::Compose}));
  EXPECT_EQ(applicable_ops(schema("security_mode_command"), Symbol("security_mode_command")),
            (Ops{OpKind::Plaintext, OpKind::Compose, OpKind::Replay}));
  EXPECT_EQ(applicable_ops(schema("one"), Symbol("one")), (Ops{OpKind::InRange, OpKind::Boundary}));
  EXPECT_TRUE(applicable_ops(schema("bare"), Symbol("bare")).empty());
}

TEST(ApplicableOps, ProhibitedValuesEnableOutOfRange) {
  auto ops = applicable_ops(schema("gap"), Symbol("gap"));
  EXPECT_NE(std::find(ops.begin(), ops.end(), OpKind::OutOfRange), ops.end());
}

TEST(ApplicableOps, SchemaMismatch) {
  EXPECT_THROW(applicable_ops(schema("one"), Symbol("bare")), ModelError);
}

TEST(ApplyOp, OutOfRangeHop) {
  Rng rng(1);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 500; ++i) {
    auto out = apply_op(OpKind::OutOfRange, schema("connection_request"),
                        Symbol("connection_request"), rng);
    auto v = *out.get("Hop");
    EXPECT_TRUE(v < 5 || v > 16);
    EXPECT_LE(v, 31u);
    seen.insert(v);
  }
  EXPECT_TRUE(seen.count(20));
  EXPECT_EQ(seen.size(), 32u - 12u);
}

TEST(ApplyOp, BoundaryHop) {
  Rng rng(2);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 100; ++i)
    seen.insert(*apply_op(OpKind::Boundary, schema("connection_request"),
                          Symbol("connection_request"), rng)
                     .get("Hop"));
  EXPECT_EQ(seen, (std::set<std::uint64_t>{0, 31}));
}

TEST(ApplyOp, InRangeStaysInRange) {
  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    auto v = *apply_op(OpKind::InRange, schema("connection_request"), Symbol("connection_request"),
                       rng)
                  .get("Hop");
    EXPECT_GE(v, 5u);
    EXPECT_LE(v, 16u);
  }
}

TEST(ApplyOp, OutOfRangeMayUseProhibited) {
  Rng rng(4);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 200; ++i)
    seen.insert(*apply_op(OpKind::OutOfRange, schema("gap"), Symbol("gap"), rng).get("g"));
  EXPECT_EQ(seen, (std::set<std::uint64_t>{2, 3}));
}

TEST(ApplyOp, PlaintextAndReplay) {
  Rng rng(5);
  auto base = parse_symbol("security_mode_command{integrity=1}");
  EXPECT_EQ(apply_op(OpKind::Plaintext, schema("security_mode_command"), base, rng),
            parse_symbol("security_mode_command{cipher=0,integrity=0}"));
  EXPECT_EQ(apply_op(OpKind::Replay, schema("security_mode_command"), Symbol("security_mode_command"), rng),
            parse_symbol("security_mode_command{replay=1}"));
}

TEST(ApplyOp, ComposeOnAttachAccept) {
  Rng rng(6);
  bool plaintext_with_header = false;
  for (int i = 0; i < 300; ++i) {
    auto out = apply_op(OpKind::Compose, schema("attach_accept"), Symbol("attach_accept"), rng);
    ASSERT_NE(out, Symbol("attach_accept"));
    auto sht = out.get("security_header_type");
    if (sht) {
      EXPECT_LE(*sht, 15u);
    }
    if (out.get("integrity") == 0u && out.get("cipher") == 0u && sht == 15u)
      plaintext_with_header = true;
  }
  EXPECT_TRUE(plaintext_with_header);
}

TEST(ApplyOp, Inapplicable) {
  Rng rng(7);
  EXPECT_THROW(apply_op(OpKind::Replay, schema("connection_request"), Symbol("connection_request"), rng),
               InapplicableOp);
  EXPECT_THROW(apply_op(OpKind::Compose, schema("one"), Symbol("one"), rng), InapplicableOp);
}

TEST(ApplyOp, FixedSeedIsReproducible) {
  for (const auto& [type, s] : schemas().all()) {
    for (OpKind op : applicable_ops(s, Symbol(type))) {
      Rng a(99), b(99);
      for (int i = 0; i < 20; ++i)
        EXPECT_EQ(apply_op(op, s, Symbol(type), a), apply_op(op, s, Symbol(type), b));
    }
  }
}

TEST(ApplyOp, BitWidthRespected) {
  Rng rng(8);
  for (const auto& [type, s] : schemas().all())
    for (OpKind op : applicable_ops(s, Symbol(type)))
      for (int i = 0; i < 100; ++i) {
        auto out = apply_op(op, s, Symbol(type), rng);
        for (const auto& f : s.fields)
          if (auto v = out.get(f.name)) {
            EXPECT_LE(*v, f.max_value()) << type;
          }
      }
}

TEST(OpKindNames, Text) {
  EXPECT_EQ(to_string(OpKind::InRange), "OP1");
  EXPECT_EQ(to_string(OpKind::Replay), "OP6");
}

}  // namespace
}  // namespace psmfuzz
