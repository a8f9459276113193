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

#include <optional>
#include <string>
#include <vector>

#include "psmfuzz/pltl.hpp"
#include "psmfuzz/symbol.hpp"

namespace psmfuzz {

enum class ElementKind { Literal, NegLiteral, AnyStar, NegStar, LiteralChoice };

/// One element of a test skeleton. Pattern sets are kept sorted and unique.
class SkeletonElement {
 public:
  static SkeletonElement literal(ObservationPattern p);
  static SkeletonElement neg_literal(std::vector<ObservationPattern> ps);
  static SkeletonElement any_star();
  static SkeletonElement neg_star(std::vector<ObservationPattern> ps);
  static SkeletonElement choice(std::vector<ObservationPattern> ps);

  ElementKind kind() const noexcept { return kind_; }
  const std::vector<ObservationPattern>& patterns() const noexcept { return patterns_; }
  const ObservationPattern& pattern() const { return patterns_.at(0); }

  bool is_star() const noexcept {
    return kind_ == ElementKind::AnyStar || kind_ == ElementKind::NegStar;
  }
  bool is_positional() const noexcept { return !is_star(); }

  /// Whether `obs` is a letter of this element (one position for
  /// positional elements, one repetition for stars).
  bool accepts(const Observation& obs) const;

  bool operator==(const SkeletonElement& other) const {
    return kind_ == other.kind_ && patterns_ == other.patterns_;
  }

 private:
  SkeletonElement(ElementKind kind, std::vector<ObservationPattern> ps);

  ElementKind kind_ = ElementKind::AnyStar;
  std::vector<ObservationPattern> patterns_;
};

struct TestSkeleton {
  std::vector<SkeletonElement> elements;
  std::string source_property;
  /// `<property>#<n>`, 1-based in generation order.
  std::string id;

  bool operator==(const TestSkeleton& other) const { return elements == other.elements; }
};

inline constexpr std::size_t kDefaultMaxSkeletons = 8;

/// Violating skeletons for `formula`, deduplicated and with covered ones
/// removed, at most `max_skeletons`, in generation order. Throws
/// UnsupportedShape for shapes without a rule.
std::vector<TestSkeleton> generate_skeletons(const Formula& formula,
                                             std::size_t max_skeletons = kDefaultMaxSkeletons,
                                             const std::string& property_id = {});

/// Some prefix of `trace` is in the skeleton language.
bool skeleton_matches(const TestSkeleton& skeleton, const std::vector<Observation>& trace);

/// Length of the shortest prefix in the skeleton language.
std::optional<std::size_t> shortest_match(const TestSkeleton& skeleton,
                                          const std::vector<Observation>& trace);

/// Conservative: true only when every word of `b` has a prefix in the
/// language of `a`.
bool covers(const TestSkeleton& a, const TestSkeleton& b);

std::size_t literal_count(const TestSkeleton& skeleton);

/// True when every letter of `e` is a letter of `f`. Conservative.
bool letters_subset(const SkeletonElement& e, const SkeletonElement& f);

std::string dump(const SkeletonElement& element);
/// One element per line.
std::string dump(const TestSkeleton& skeleton);
/// `a b * c` style one-liner for logs.
std::string compact(const TestSkeleton& skeleton);

}  // namespace psmfuzz
