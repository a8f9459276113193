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

#include "psmfuzz/mutation_ops.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "psmfuzz/errors.hpp"

namespace psmfuzz {

std::string to_string(OpKind op) { return "OP" + std::to_string(static_cast<int>(op)); }

namespace {

// Values outside the defined range, or prohibited, within the bit width.
std::uint64_t invalid_count(const FieldSchema& f) {
  std::uint64_t total = f.max_value();  // count is total + 1, may overflow at 64 bits
  std::uint64_t in_range = f.hi - f.lo;  // count is in_range + 1
  std::uint64_t outside = total - in_range;
  std::uint64_t prohibited_inside = 0;
  for (auto v : f.prohibited) {
    if (f.in_range(v)) ++prohibited_inside;
  }
  return outside + prohibited_inside;
}

std::uint64_t nth_invalid(const FieldSchema& f, std::uint64_t n) {
  if (n < f.lo) return n;
  n -= f.lo;
  std::uint64_t above = f.max_value() - f.hi;
  if (n < above) return f.hi + 1 + n;
  n -= above;
  for (auto v : f.prohibited) {
    if (!f.in_range(v)) continue;
    if (n == 0) return v;
    --n;
  }
  throw std::logic_error("nth_invalid out of bounds");
}

using Assignments = std::set<std::pair<std::string, std::uint64_t>>;

// Everything an op can produce, as (field, value) pairs; used to decide
// whether two primitives are actually different.
Assignments outcomes(OpKind op, const MessageSchema& schema) {
  Assignments out;
  auto small = [](const FieldSchema& f) { return f.bit_width <= 12; };
  for (const auto& f : schema.fields) {
    switch (op) {
      case OpKind::InRange:
        if (small(f)) {
          for (auto v = f.lo; v <= f.hi; ++v) out.insert({f.name, v});
        } else {
          out.insert({f.name + "#in", f.lo});
        }
        break;
      case OpKind::OutOfRange:
        if (small(f)) {
          for (std::uint64_t n = 0; n < invalid_count(f); ++n) out.insert({f.name, nth_invalid(f, n)});
        } else {
          out.insert({f.name + "#out", 0});
        }
        break;
      case OpKind::Boundary:
        out.insert({f.name, 0});
        out.insert({f.name, f.max_value()});
        break;
      default:
        break;
    }
  }
  if (op == OpKind::Plaintext) {
    out.insert({kIntegrityField, 0});
    out.insert({kCipherField, 0});
  }
  if (op == OpKind::Replay) out.insert({kReplayField, 1});
  return out;
}

std::vector<OpKind> primitives(const MessageSchema& schema) {
  std::vector<OpKind> out;
  bool ranged = !schema.fields.empty();
  if (ranged) out.push_back(OpKind::InRange);
  if (std::any_of(schema.fields.begin(), schema.fields.end(),
                  [](const FieldSchema& f) { return invalid_count(f) > 0; })) {
    out.push_back(OpKind::OutOfRange);
  }
  if (ranged) out.push_back(OpKind::Boundary);
  if (schema.protectable) out.push_back(OpKind::Plaintext);
  if (schema.replayable) out.push_back(OpKind::Replay);
  return out;
}

template <typename Pred>
const FieldSchema& pick_field(const MessageSchema& schema, Rng& rng, Pred ok) {
  std::vector<const FieldSchema*> fs;
  for (const auto& f : schema.fields) {
    if (ok(f)) fs.push_back(&f);
  }
  return *fs.at(rng.below(fs.size()));
}

InputSymbol apply_primitive(OpKind op, const MessageSchema& schema, const InputSymbol& base, Rng& rng) {
  switch (op) {
    case OpKind::InRange: {
      const auto& f = pick_field(schema, rng, [](const FieldSchema&) { return true; });
      return base.with(f.name, rng.between(f.lo, f.hi));
    }
    case OpKind::OutOfRange: {
      const auto& f = pick_field(schema, rng, [](const FieldSchema& x) { return invalid_count(x) > 0; });
      return base.with(f.name, nth_invalid(f, rng.below(invalid_count(f))));
    }
    case OpKind::Boundary: {
      const auto& f = pick_field(schema, rng, [](const FieldSchema&) { return true; });
      return base.with(f.name, rng.chance(0.5) ? f.max_value() : 0);
    }
    case OpKind::Plaintext:
      return base.with(kIntegrityField, 0).with(kCipherField, 0);
    case OpKind::Replay:
      return base.with(kReplayField, 1);
    case OpKind::Compose:
      break;
  }
  throw std::logic_error("not a primitive op");
}

}  // namespace

std::vector<OpKind> applicable_ops(const MessageSchema& schema, const InputSymbol& base) {
  if (schema.message_type != base.type()) {
    throw ModelError("schema " + schema.message_type + " does not describe " + base.type());
  }
  std::vector<OpKind> prims = primitives(schema);
  std::set<Assignments> distinct;
  for (OpKind op : prims) distinct.insert(outcomes(op, schema));
  std::vector<OpKind> out = prims;
  if (distinct.size() >= 2) out.push_back(OpKind::Compose);
  std::sort(out.begin(), out.end());
  return out;
}

InputSymbol apply_op(OpKind op, const MessageSchema& schema, const InputSymbol& base, Rng& rng) {
  auto ops = applicable_ops(schema, base);
  if (std::find(ops.begin(), ops.end(), op) == ops.end()) {
    throw InapplicableOp(to_string(op) + " does not apply to " + base.type());
  }
  if (op != OpKind::Compose) return apply_primitive(op, schema, base, rng);

  std::vector<OpKind> prims = primitives(schema);
  std::size_t depth = std::min<std::size_t>(prims.size(), 2 + rng.below(2));
  // Partial Fisher-Yates: `depth` distinct primitives in random order.
  for (std::size_t i = 0; i < depth; ++i) {
    std::size_t j = i + rng.below(prims.size() - i);
    std::swap(prims[i], prims[j]);
  }
  InputSymbol out = base;
  for (std::size_t i = 0; i < depth; ++i) out = apply_primitive(prims[i], schema, out, rng);
  return out;
}

}  // namespace psmfuzz
