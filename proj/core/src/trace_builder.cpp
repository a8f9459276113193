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

#include "psmfuzz/trace_builder.hpp"

#include <algorithm>
#include <functional>
#include <memory>
#include <unordered_map>

namespace psmfuzz {

void order_traces(std::vector<InstantiatedTrace>& traces, const std::string& skeleton_id) {
  struct Keyed {
    std::string dump;
    std::string key;
    std::size_t index;
  };
  std::vector<Keyed> keys;
  keys.reserve(traces.size());
  for (std::size_t i = 0; i < traces.size(); ++i) {
    keys.push_back({dump(traces[i]), identity_key(traces[i]), i});
  }
  std::sort(keys.begin(), keys.end(), [&](const Keyed& a, const Keyed& b) {
    const auto& ta = traces[a.index];
    const auto& tb = traces[b.index];
    if (ta.steps.size() != tb.steps.size()) return ta.steps.size() < tb.steps.size();
    if (ta.annotations.size() != tb.annotations.size()) {
      return ta.annotations.size() < tb.annotations.size();
    }
    if (a.dump != b.dump) return a.dump < b.dump;
    return a.key < b.key;
  });
  std::vector<InstantiatedTrace> sorted;
  sorted.reserve(traces.size());
  for (const auto& k : keys) {
    sorted.push_back(std::move(traces[k.index]));
    sorted.back().source_skeleton = skeleton_id;
    sorted.back().id = skeleton_id + "/" + std::to_string(sorted.size());
  }
  traces = std::move(sorted);
}

namespace {

// One step of a suffix: what is sent, and which mutations it carries.
struct Choice {
  TraceStep step;
  Transition base;
  bool m1 = false;
  std::optional<StateId> redirect;

  bool operator==(const Choice& o) const {
    return step == o.step && m1 == o.m1 && redirect == o.redirect && base == o.base;
  }
};

struct Node;
using Suffix = std::shared_ptr<const Node>;

struct Node {
  Choice choice;
  Suffix next;
  std::size_t length;
  std::size_t mutations;
  std::size_t hash;
};

std::size_t choice_hash(const Choice& c) {
  std::string s = to_string(c.step.obs);
  s += c.step.is_marker() ? 'K' : 'C';
  s += c.m1 ? '1' : '0';
  s += c.base.source + '|' + to_string(c.base.input) + '|' + to_string(c.base.output) + '|' +
       c.base.destination;
  if (c.redirect) s += ">" + *c.redirect;
  return std::hash<std::string>{}(s);
}

bool same_suffix(const Suffix& a, const Suffix& b) {
  const Node* x = a.get();
  const Node* y = b.get();
  while (x && y) {
    if (x == y) return true;
    if (x->hash != y->hash || x->length != y->length || !(x->choice == y->choice)) return false;
    x = x->next.get();
    y = y->next.get();
  }
  return x == y;
}

// Deduplicating collection of suffixes.
class SuffixSet {
 public:
  void add(const Suffix& s) {
    std::size_t h = s ? s->hash : 0;
    auto& bucket = buckets_[h];
    for (std::size_t i : bucket) {
      if (same_suffix(items_[i], s)) return;
    }
    bucket.push_back(items_.size());
    items_.push_back(s);
  }
  std::vector<Suffix> take() { return std::move(items_); }

 private:
  std::vector<Suffix> items_;
  std::unordered_map<std::size_t, std::vector<std::size_t>> buckets_;
};

class Builder {
 public:
  Builder(const GuidingPsm& psm, const TestSkeleton& skeleton)
      : psm_(psm), es_(skeleton.elements) {
    for (std::size_t i = 0; i < psm_.states().size(); ++i) state_index_[psm_.states()[i]] = i;
    last_positional_ = es_.size();
    for (std::size_t k = 0; k < es_.size(); ++k) {
      if (es_[k].is_positional()) last_positional_ = k;
    }
  }

  std::vector<Suffix> run(const Budget& budget) {
    if (last_positional_ == es_.size()) return {};
    return solve(psm_.initial(), 0, budget.mutations, budget.length);
  }

 private:
  using Key = std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      auto [a, b, c, d] = k;
      std::size_t h = a;
      h = h * 1000003u ^ b;
      h = h * 1000003u ^ c;
      h = h * 1000003u ^ d;
      return h;
    }
  };

  const std::vector<Suffix>& solve(const StateId& q, std::size_t k, std::size_t mu,
                                   std::size_t lambda) {
    Key key{state_index_.at(q), k, mu, lambda};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    SuffixSet out;
    expand(q, k, mu, lambda, out);
    return memo_.emplace(key, out.take()).first->second;
  }

  // Prepends `c` (cost `cost`) to every suffix of the continuation.
  void extend(const Choice& c, std::size_t cost, const StateId& dst, std::size_t next_k,
              bool done, std::size_t mu, std::size_t lambda, SuffixSet& out) {
    auto push = [&](const Choice& ch, std::size_t total_cost, const StateId& to) {
      if (total_cost > mu) return;
      std::size_t h0 = choice_hash(ch);
      if (done) {
        out.add(std::make_shared<Node>(Node{ch, nullptr, 1, total_cost, h0}));
        return;
      }
      if (lambda < 2) return;
      for (const Suffix& s : solve(to, next_k, mu - total_cost, lambda - 1)) {
        std::size_t h = h0 * 31u + s->hash;
        out.add(std::make_shared<Node>(Node{ch, s, s->length + 1, s->mutations + total_cost, h}));
      }
    };
    push(c, cost, dst);
    // M2: any other destination, one more mutation.
    if (cost + 1 <= mu) {
      for (const auto& q2 : psm_.states()) {
        if (q2 == dst) continue;
        Choice redirected = c;
        redirected.redirect = q2;
        push(redirected, cost + 1, q2);
      }
    }
  }

  void expand(const StateId& q, std::size_t k, std::size_t mu, std::size_t lambda,
              SuffixSet& out) {
    if (lambda == 0) return;
    const SkeletonElement& e = es_[k];
    auto outgoing = psm_.outgoing(q);
    if (e.is_star()) {
      // Zero repetitions.
      for (const Suffix& s : solve(q, k + 1, mu, lambda)) out.add(s);
      // A transition in the star language.
      for (const Transition* t : outgoing) {
        if (!e.accepts(t->observation())) continue;
        Choice c{TraceStep::concrete(t->observation()), *t, false, std::nullopt};
        extend(c, 0, t->destination, k, false, mu, lambda, out);
      }
      // A marker, only under ANY_STAR.
      if (e.kind() == ElementKind::AnyStar && mu >= 1) {
        for (const Transition* t : outgoing) {
          Choice c{TraceStep::marker(t->input), *t, true, std::nullopt};
          extend(c, 1, t->destination, k, false, mu, lambda, out);
        }
      }
      return;
    }
    const bool done = k == last_positional_;
    bool satisfied = false;
    // A transition whose observation satisfies the element.
    for (const Transition* t : outgoing) {
      if (!e.accepts(t->observation())) continue;
      satisfied = true;
      Choice c{TraceStep::concrete(t->observation()), *t, false, std::nullopt};
      extend(c, 0, t->destination, k + 1, done, mu, lambda, out);
    }
    if (satisfied || mu == 0) return;
    // Otherwise place the element's observation as an M1 mutation.
    if (e.kind() == ElementKind::NegLiteral) return;
    for (const auto& p : e.patterns()) {
      if (!p.input) continue;
      std::vector<Transition> bases;
      for (const Transition* t : outgoing) {
        if (t->input.type() == p.input->type()) bases.push_back(*t);
      }
      if (bases.empty()) bases.push_back(Transition{q, *p.input, Symbol::null_action(), q});
      for (const auto& b : bases) {
        Observation placed{*p.input, p.output ? *p.output : b.output};
        Choice c{TraceStep::concrete(placed), b, true, std::nullopt};
        extend(c, 1, b.destination, k + 1, done, mu, lambda, out);
      }
    }
  }

  const GuidingPsm& psm_;
  const std::vector<SkeletonElement>& es_;
  std::size_t last_positional_ = 0;
  std::unordered_map<StateId, std::size_t> state_index_;
  std::unordered_map<Key, std::vector<Suffix>, KeyHash> memo_;
};

InstantiatedTrace materialize(const GuidingPsm& psm, const Suffix& s) {
  InstantiatedTrace t;
  std::size_t i = 0;
  for (const Node* n = s.get(); n; n = n->next.get(), ++i) {
    const Choice& c = n->choice;
    t.steps.push_back(c.step);
    if (c.m1) {
      MutationAnnotation a;
      a.kind = MutationKind::Observation;
      a.step = i;
      a.base = c.base;
      if (!c.step.is_marker()) a.placed = c.step.obs;
      t.annotations.push_back(std::move(a));
    }
    if (c.redirect) {
      MutationAnnotation a;
      a.kind = MutationKind::Destination;
      a.step = i;
      a.base = c.base;
      a.redirect = *c.redirect;
      t.annotations.push_back(std::move(a));
    }
  }
  replay(psm, t);
  return t;
}

}  // namespace

std::vector<InstantiatedTrace> build_traces(const GuidingPsm& psm, const TestSkeleton& skeleton,
                                            const Budget& budget, std::size_t cap) {
  if (cap == 0) throw std::invalid_argument("cap must be positive");
  if (budget.length == 0) throw std::invalid_argument("length budget must be at least 1");
  Builder builder(psm, skeleton);
  std::vector<Suffix> roots = builder.run(budget);

  // Order by (length, mutations) on the shared nodes, then materialize only
  // the groups that survive the cap.
  std::stable_sort(roots.begin(), roots.end(), [](const Suffix& a, const Suffix& b) {
    if (a->length != b->length) return a->length < b->length;
    return a->mutations < b->mutations;
  });
  std::vector<InstantiatedTrace> out;
  std::size_t i = 0;
  while (i < roots.size() && out.size() < cap) {
    std::size_t j = i;
    while (j < roots.size() && roots[j]->length == roots[i]->length &&
           roots[j]->mutations == roots[i]->mutations) {
      ++j;
    }
    std::vector<InstantiatedTrace> group;
    group.reserve(j - i);
    for (std::size_t x = i; x < j; ++x) group.push_back(materialize(psm, roots[x]));
    order_traces(group, skeleton.id);
    for (auto& t : group) {
      if (out.size() == cap) break;
      out.push_back(std::move(t));
    }
    i = j;
  }
  for (std::size_t n = 0; n < out.size(); ++n) {
    out[n].source_skeleton = skeleton.id;
    out[n].id = skeleton.id + "/" + std::to_string(n + 1);
  }
  return out;
}

}  // namespace psmfuzz
