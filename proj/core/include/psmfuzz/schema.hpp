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

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace psmfuzz {

struct FieldSchema {
  std::string name;
  unsigned bit_width = 1;
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  std::set<std::uint64_t> prohibited;

  /// 2^bit_width - 1.
  std::uint64_t max_value() const;
  bool in_range(std::uint64_t v) const { return v >= lo && v <= hi; }

  bool operator==(const FieldSchema&) const = default;
};

struct MessageSchema {
  std::string message_type;
  std::vector<FieldSchema> fields;
  bool replayable = false;
  bool protectable = false;

  const FieldSchema* field(std::string_view name) const;
  bool operator==(const MessageSchema&) const = default;
};

class SchemaSet {
 public:
  void add(MessageSchema schema);
  const MessageSchema* find(std::string_view type) const;
  /// Throws ModelError for an unknown message type.
  const MessageSchema& at(std::string_view type) const;
  const std::map<std::string, MessageSchema, std::less<>>& all() const noexcept { return schemas_; }
  bool empty() const noexcept { return schemas_.empty(); }

 private:
  std::map<std::string, MessageSchema, std::less<>> schemas_;
};

/// Widest field accepted by the loader.
inline constexpr unsigned kMaxBitWidth = 63;

SchemaSet parse_schemas(std::string_view text);

}  // namespace psmfuzz
