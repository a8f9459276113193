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

#include "psmfuzz/schema.hpp"

#include "psmfuzz/errors.hpp"
#include "text.hpp"

namespace psmfuzz {

std::uint64_t FieldSchema::max_value() const {
  return bit_width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bit_width) - 1;
}

const FieldSchema* MessageSchema::field(std::string_view name) const {
  for (const auto& f : fields) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

void SchemaSet::add(MessageSchema schema) {
  std::string key = schema.message_type;
  if (!schemas_.emplace(key, std::move(schema)).second) {
    throw ModelError("duplicate schema for message " + key);
  }
}

const MessageSchema* SchemaSet::find(std::string_view type) const {
  auto it = schemas_.find(type);
  return it == schemas_.end() ? nullptr : &it->second;
}

const MessageSchema& SchemaSet::at(std::string_view type) const {
  if (const auto* s = find(type)) return *s;
  throw ModelError("unknown schema for message " + std::string(type));
}

SchemaSet parse_schemas(std::string_view text) {
  SchemaSet set;
  std::vector<MessageSchema> order;
  std::vector<std::size_t> msg_lines;

  for (const auto& line : detail::logical_lines(text)) {
    detail::Cursor cur(line.text, line.number);
    std::size_t kw_col = (cur.skip_ws(), cur.column());
    std::string kw = cur.identifier("keyword");
    if (kw == "msg") {
      std::size_t name_col = (cur.skip_ws(), cur.column());
      MessageSchema m;
      m.message_type = cur.identifier("message type");
      for (std::size_t i = 0; i < order.size(); ++i) {
        if (order[i].message_type == m.message_type) {
          cur.fail_at(name_col, "message " + m.message_type + " already declared on line " +
                                    std::to_string(msg_lines[i]));
        }
      }
      while (!cur.at_end()) {
        std::size_t col = (cur.skip_ws(), cur.column());
        std::string flag = cur.identifier("flag");
        if (flag == "replayable") m.replayable = true;
        else if (flag == "protectable") m.protectable = true;
        else cur.fail_at(col, "unknown flag '" + flag + "'");
      }
      order.push_back(std::move(m));
      msg_lines.push_back(line.number);
    } else if (kw == "field") {
      if (order.empty()) cur.fail_at(kw_col, "field outside a msg block");
      FieldSchema f;
      std::size_t name_col = (cur.skip_ws(), cur.column());
      f.name = cur.identifier("field name");
      if (order.back().field(f.name)) cur.fail_at(name_col, "duplicate field '" + f.name + "'");
      if (!cur.consume_word("bits")) cur.fail("expected bits=<n>");
      cur.expect('=', "after bits");
      std::size_t bits_col = (cur.skip_ws(), cur.column());
      std::uint64_t bits = cur.number("bit width");
      if (bits == 0 || bits > kMaxBitWidth) {
        cur.fail_at(bits_col, "bit width must be 1.." + std::to_string(kMaxBitWidth));
      }
      f.bit_width = static_cast<unsigned>(bits);
      if (!cur.consume_word("range")) cur.fail("expected range=<lo>..<hi>");
      cur.expect('=', "after range");
      std::size_t range_col = (cur.skip_ws(), cur.column());
      f.lo = cur.number("range low bound");
      if (!cur.consume("..")) cur.fail("expected '..' in range");
      f.hi = cur.number("range high bound");
      if (f.lo > f.hi) cur.fail_at(range_col, "range low bound exceeds high bound");
      if (f.hi > f.max_value()) {
        cur.fail_at(range_col, "range bound " + std::to_string(f.hi) + " does not fit in " +
                                   std::to_string(bits) + " bits");
      }
      if (cur.consume_word("prohibited")) {
        cur.expect('=', "after prohibited");
        do {
          std::size_t v_col = (cur.skip_ws(), cur.column());
          std::uint64_t v = cur.number("prohibited value");
          if (v > f.max_value()) cur.fail_at(v_col, "prohibited value does not fit in bit width");
          f.prohibited.insert(v);
        } while (cur.consume(','));
      }
      if (!cur.at_end()) cur.fail("unexpected trailing text");
      order.back().fields.push_back(std::move(f));
    } else {
      cur.fail_at(kw_col, "unknown keyword '" + kw + "'");
    }
  }
  for (auto& m : order) set.add(std::move(m));
  return set;
}

}  // namespace psmfuzz
