// Copyright 2026 The TinyT Authors
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

#include "tinyt/navigation.hpp"

#include <algorithm>

namespace tinyt {

NodePool::NodePool() { nodes_.emplace_back(); }

NodePool::Handle NodePool::push(Handle parent, Pair p) {
  auto [it, fresh] = children_.try_emplace(Key{parent, p}, 0);
  if (!fresh) {
    ++nodes_[it->second].refs;
    return it->second;
  }
  Handle h;
  if (!free_.empty()) {
    h = free_.back();
    free_.pop_back();
  } else {
    h = static_cast<Handle>(nodes_.size());
    nodes_.emplace_back();
  }
  Node& n = nodes_[h];
  n.parent = parent;
  n.pair = p;
  n.refs = 1;
  n.depth = parent == kEmpty ? 1 : nodes_[parent].depth + 1;
  retain(parent);
  it->second = h;
  ++live_;
  return h;
}

void NodePool::release(Handle h) {
  while (h != kEmpty && --nodes_[h].refs == 0) {
    Node& n = nodes_[h];
    children_.erase(Key{n.parent, n.pair});
    free_.push_back(h);
    --live_;
    h = n.parent;
  }
}

NodeId PooledNodeId::to_node_id() const {
  std::vector<Pair> pairs;
  for (NodePool::Handle h = h_; h != NodePool::kEmpty; h = pool_->parent(h)) pairs.push_back(pool_->pair(h));
  std::reverse(pairs.begin(), pairs.end());
  return NodeId(std::move(pairs));
}

Navigator::Navigator(const TinyTIndex& ix) : ix_(ix) {
  if (ix.start_tags.empty()) throw Error(ErrorCode::kInvalidNodeId, "empty document");
  const std::size_t s = ix.start_tags.size();
  start_parent_.assign(s, kStartRule);
  start_child_.assign(s, 0);
  for (std::uint32_t p = 0; p < s; ++p) {
    std::uint32_t c = p + 1;
    for (unsigned k = 1; k <= ix.rank(ix.start_tags[p]); ++k) {
      start_parent_[c] = p;
      start_child_[c] = static_cast<std::uint8_t>(k);
      c += ix.find_close[c];
    }
  }
  std::vector<std::uint32_t> d(ix.num_nonterminals(), 1);
  for (std::uint32_t n = 0; n < ix.num_nonterminals(); ++n) {
    for (SymId x : {ix.rule_x(n), ix.rule_y(n)}) {
      if (ix.is_nt(x)) d[n] = std::max(d[n], d[ix.nt_of(x)] + 1);
    }
  }
  std::uint32_t deepest = 0;
  for (SymId t : ix.start_tags) {
    if (ix.is_nt(t)) deepest = std::max(deepest, d[ix.nt_of(t)]);
  }
  depth_ = deepest + 1;
}

void Navigator::validate(const NodeId& n) const {
  auto bad = [](const char* what) { throw Error(ErrorCode::kInvalidNodeId, what); };
  if (n.empty()) bad("empty node id");
  for (std::size_t k = 0; k < n.size(); ++k) {
    Pair p = n[k];
    if (k == 0) {
      if (p.rule != kStartRule || p.pos >= ix_.start_tags.size()) bad("first pair must address the start rule");
    } else {
      if (p.rule == kStartRule || p.rule >= ix_.num_nonterminals() || p.pos > 1) bad("pair out of range");
      if (symbol(n[k - 1]) != ix_.sym_of(p.rule)) bad("pair does not continue the derivation");
    }
  }
  if (ix_.is_nt(symbol(n.back()))) bad("node id ends at a nonterminal");
  if (symbol(n.back()) == kNullLabel) bad("node id addresses a null leaf");
}

NodeId Navigator::root() const {
  NodeId n;
  find_root(n);
  return n;
}

namespace {

template <typename F>
std::optional<NodeId> moved(const Navigator& nav, const NodeId& n, F&& move) {
  nav.validate(n);
  NodeId c = n;
  if (!move(c)) return std::nullopt;
  return c;
}

}  // namespace

std::optional<NodeId> Navigator::first_child(const NodeId& n) const {
  return moved(*this, n, [&](NodeId& c) { return to_first_child(c); });
}

std::optional<NodeId> Navigator::next_sibling(const NodeId& n) const {
  return moved(*this, n, [&](NodeId& c) { return to_next_sibling(c); });
}

std::optional<NodeId> Navigator::parent(const NodeId& n) const {
  return moved(*this, n, [&](NodeId& c) { return to_parent(c); });
}

std::optional<NodeId> Navigator::tagged_desc(const NodeId& n, LabelId b) const {
  return moved(*this, n, [&](NodeId& c) { return to_tagged_desc(c, b); });
}

std::optional<NodeId> Navigator::tagged_foll(const NodeId& n, LabelId b) const {
  return moved(*this, n, [&](NodeId& c) { return to_tagged_foll(c, b); });
}

LabelId Navigator::label_of(const NodeId& n) const {
  validate(n);
  return label(n);
}

std::string Navigator::format(const NodeId& n) const {
  std::string out;
  for (std::size_t k = 0; k < n.size(); ++k) {
    Pair p = n[k];
    std::string dewey;
    if (p.rule == kStartRule) {
      std::vector<unsigned> steps;
      for (std::uint32_t q = p.pos; q != 0; q = start_parent_[q]) steps.push_back(start_child_[q]);
      for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
        if (!dewey.empty()) dewey += '.';
        dewey += std::to_string(*it);
      }
    } else if (p.pos == 1) {
      dewey = std::to_string(ix_.rule_slot(p.rule));
    }
    if (dewey.empty()) dewey = "\xCE\xB5";
    out += '(';
    out += p.rule == kStartRule ? "S" : ix_.symbol_name(ix_.sym_of(p.rule));
    out += ',';
    out += dewey;
    out += ')';
  }
  return out;
}

namespace {

void visit(const Navigator& nav, const NodeId& n, std::uint64_t& count, std::uint64_t& sum) {
  ++count;
  sum = fold_label(sum, nav.label(n));
  NodeId c = n;
  if (!nav.to_first_child(c)) return;
  do {
    visit(nav, c, count, sum);
  } while (nav.to_next_sibling(c));
}

template <typename P>
std::uint64_t walk(const Navigator& nav, P n, std::uint64_t& sum) {
  std::uint64_t count = 0;
  nav.find_root(n);
  for (;;) {
    ++count;
    sum = fold_label(sum, nav.label(n));
    if (nav.to_first_child(n)) continue;
    while (!nav.to_next_sibling(n)) {
      if (!nav.to_parent(n)) return count;
    }
  }
}

}  // namespace

std::uint64_t traverse_recursive(const Navigator& nav, std::uint64_t& checksum) {
  std::uint64_t count = 0;
  visit(nav, nav.root(), count, checksum);
  return count;
}

std::uint64_t traverse_iterative(const Navigator& nav, std::uint64_t& checksum) {
  return walk(nav, NodeId{}, checksum);
}

std::uint64_t traverse_pooled(const Navigator& nav, std::uint64_t& checksum) {
  NodePool pool;
  return walk(nav, PooledNodeId(pool), checksum);
}

}  // namespace tinyt
