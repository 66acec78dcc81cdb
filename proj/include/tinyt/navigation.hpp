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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tinyt/error.hpp"
#include "tinyt/index.hpp"

namespace tinyt {

inline constexpr std::uint32_t kStartRule = 0xFFFFFFFFu;

// One production application: a node position inside the right-hand side
// of `rule` (kStartRule or a nonterminal number). Start-rule positions are
// pre-order indexes of the start rhs; inside a bCNF rule X(.., Y(..), ..)
// position 0 is X and position 1 is Y.
struct Pair {
  std::uint32_t rule = kStartRule;
  std::uint32_t pos = 0;
  friend bool operator==(Pair, Pair) = default;
};

// Plain pair sequence.
class NodeId {
 public:
  NodeId() = default;
  explicit NodeId(std::vector<Pair> pairs) : pairs_(std::move(pairs)) {}

  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  Pair back() const { return pairs_.back(); }
  Pair operator[](std::size_t i) const { return pairs_[i]; }
  void push(Pair p) { pairs_.push_back(p); }
  void pop() { pairs_.pop_back(); }
  void set_back(Pair p) { pairs_.back() = p; }
  const std::vector<Pair>& pairs() const { return pairs_; }

  friend bool operator==(const NodeId&, const NodeId&) = default;

 private:
  std::vector<Pair> pairs_;
};

// Prefix-sharing store of pair sequences. Every trie node holds a
// reference on its parent; handles are released when unreferenced.
class NodePool {
 public:
  using Handle = std::uint32_t;
  static constexpr Handle kEmpty = 0;

  NodePool();

  Handle push(Handle parent, Pair p);
  void retain(Handle h) {
    if (h != kEmpty) ++nodes_[h].refs;
  }
  void release(Handle h);
  Pair pair(Handle h) const { return nodes_[h].pair; }
  Handle parent(Handle h) const { return nodes_[h].parent; }
  std::uint32_t depth(Handle h) const { return nodes_[h].depth; }
  std::size_t live_nodes() const { return live_; }

 private:
  struct Node {
    Handle parent = kEmpty;
    Pair pair;
    std::uint32_t refs = 0;
    std::uint32_t depth = 0;
  };
  struct Key {
    Handle parent;
    Pair pair;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::uint64_t h = k.parent;
      h = h * 0x9E3779B97F4A7C15ull + k.pair.rule;
      h = h * 0x9E3779B97F4A7C15ull + k.pair.pos;
      return static_cast<std::size_t>(h ^ (h >> 32));
    }
  };
  std::vector<Node> nodes_;
  std::vector<Handle> free_;
  std::unordered_map<Key, Handle, KeyHash> children_;
  std::size_t live_ = 0;
};

// Pair sequence stored in a NodePool; copies share storage.
class PooledNodeId {
 public:
  explicit PooledNodeId(NodePool& pool) : pool_(&pool) {}
  PooledNodeId(const PooledNodeId& o) : pool_(o.pool_), h_(o.h_) { pool_->retain(h_); }
  PooledNodeId(PooledNodeId&& o) noexcept : pool_(o.pool_), h_(o.h_) { o.h_ = NodePool::kEmpty; }
  PooledNodeId& operator=(PooledNodeId o) noexcept {
    std::swap(pool_, o.pool_);
    std::swap(h_, o.h_);
    return *this;
  }
  ~PooledNodeId() { pool_->release(h_); }

  std::size_t size() const { return h_ == NodePool::kEmpty ? 0 : pool_->depth(h_); }
  bool empty() const { return h_ == NodePool::kEmpty; }
  Pair back() const { return pool_->pair(h_); }
  void push(Pair p) {
    NodePool::Handle n = pool_->push(h_, p);
    pool_->release(h_);
    h_ = n;
  }
  void pop() {
    NodePool::Handle p = pool_->parent(h_);
    pool_->retain(p);
    pool_->release(h_);
    h_ = p;
  }
  void set_back(Pair p) {
    pop();
    push(p);
  }
  NodePool::Handle handle() const { return h_; }
  NodeId to_node_id() const;

  friend bool operator==(const PooledNodeId& a, const PooledNodeId& b) { return a.h_ == b.h_; }

 private:
  NodePool* pool_;
  NodePool::Handle h_ = NodePool::kEmpty;
};

// Node-wise view of the document tree encoded by an index. The path type P
// is NodeId or PooledNodeId.
class Navigator {
 public:
  explicit Navigator(const TinyTIndex& ix);

  const TinyTIndex& index() const { return ix_; }
  std::uint32_t grammar_depth() const { return depth_; }

  // Symbol at a pair.
  SymId symbol(Pair p) const {
    if (p.rule == kStartRule) return ix_.start_tags[p.pos];
    return p.pos == 0 ? ix_.rule_x(p.rule) : ix_.rule_y(p.rule);
  }

  template <typename P> void find_root(P& out) const;
  template <typename P> LabelId label(const P& n) const { return symbol(n.back()); }
  template <typename P> bool to_first_child(P& n) const { return to_child_element(n, 1); }
  template <typename P> bool to_next_sibling(P& n) const { return to_child_element(n, 2); }
  template <typename P> bool to_parent(P& n) const;
  template <typename P> bool to_tagged_desc(P& n, LabelId b) const;
  template <typename P> bool to_tagged_foll(P& n, LabelId b) const;

  // Binary-tree moves over the fcns encoding including null leaves.
  template <typename P> void to_binary_child(P& n, unsigned k) const;
  template <typename P> bool to_binary_parent(P& n, unsigned& came_from) const;

  // Value-style wrappers over NodeId; they validate their argument.
  NodeId root() const;
  std::optional<NodeId> first_child(const NodeId& n) const;
  std::optional<NodeId> next_sibling(const NodeId& n) const;
  std::optional<NodeId> parent(const NodeId& n) const;
  std::optional<NodeId> tagged_desc(const NodeId& n, LabelId b) const;
  std::optional<NodeId> tagged_foll(const NodeId& n, LabelId b) const;
  LabelId label_of(const NodeId& n) const;

  // Throws InvalidNodeId unless `n` is a well-formed path to a terminal.
  void validate(const NodeId& n) const;

  // Pair-list rendering with Dewey addresses, e.g. (S,1)(N0,ε).
  std::string format(const NodeId& n) const;

 private:
  struct ParamParent {
    std::uint32_t pos;
    unsigned child;
  };
  ParamParent param_parent(std::uint32_t nt, unsigned j) const {
    unsigned i = ix_.rule_slot(nt);
    unsigned ry = ix_.rank(ix_.rule_y(nt));
    if (j < i) return {0, j};
    if (j < i + ry) return {1, j - i + 1};
    return {0, j - ry + 1};
  }

  template <typename P> void resolve(P& n) const;
  template <typename P> void to_child_position(P& n, unsigned k) const;
  template <typename P> bool to_child_element(P& n, unsigned k) const;
  template <typename P> bool find_in(P& n, LabelId b) const;

  const TinyTIndex& ix_;
  std::vector<std::uint32_t> start_parent_;
  std::vector<std::uint8_t> start_child_;
  std::uint32_t depth_ = 1;
};

// Depth-first left-to-right traversals; return the number of visited
// nodes and fold their labels into `checksum`.
std::uint64_t traverse_recursive(const Navigator& nav, std::uint64_t& checksum);
std::uint64_t traverse_iterative(const Navigator& nav, std::uint64_t& checksum);
std::uint64_t traverse_pooled(const Navigator& nav, std::uint64_t& checksum);

inline std::uint64_t fold_label(std::uint64_t checksum, LabelId l) {
  return (checksum ^ l) * 0x100000001B3ull;
}

// ---------------------------------------------------------------------------

template <typename P>
void Navigator::resolve(P& n) const {
  for (SymId s = symbol(n.back()); ix_.is_nt(s); s = symbol(n.back())) {
    n.push({ix_.nt_of(s), 0});
  }
}

template <typename P>
void Navigator::find_root(P& out) const {
  while (!out.empty()) out.pop();
  out.push({kStartRule, 0});
  resolve(out);
}

// Moves to the k-th child position of the node at n.back(), which may be a
// nonterminal node (its k-th argument); follows parameters outward.
template <typename P>
void Navigator::to_child_position(P& n, unsigned k) const {
  for (;;) {
    Pair t = n.back();
    if (t.rule == kStartRule) {
      std::uint32_t c = t.pos + 1;
      for (unsigned j = 1; j < k; ++j) c += ix_.find_close[c];
      n.set_back({kStartRule, c});
      return;
    }
    unsigned i = ix_.rule_slot(t.rule);
    unsigned ry = ix_.rank(ix_.rule_y(t.rule));
    unsigned param;
    if (t.pos == 0) {
      if (k == i) {
        n.set_back({t.rule, 1});
        return;
      }
      param = k < i ? k : k - 1 + ry;
    } else {
      param = i - 1 + k;
    }
    n.pop();
    k = param;
  }
}

template <typename P>
void Navigator::to_binary_child(P& n, unsigned k) const {
  to_child_position(n, k);
  resolve(n);
}

template <typename P>
bool Navigator::to_child_element(P& n, unsigned k) const {
  if (ix_.rank(symbol(n.back())) < k) return false;
  P c = n;
  to_binary_child(c, k);
  if (symbol(c.back()) == kNullLabel) return false;
  n = std::move(c);
  return true;
}

template <typename P>
bool Navigator::to_binary_parent(P& n, unsigned& came_from) const {
  for (;;) {
    Pair t = n.back();
    std::uint32_t pos;
    unsigned k;
    if (t.rule == kStartRule) {
      if (t.pos == 0) return false;
      pos = start_parent_[t.pos];
      k = start_child_[t.pos];
    } else if (t.pos == 0) {
      n.pop();
      continue;
    } else {
      pos = 0;
      k = ix_.rule_slot(t.rule);
    }
    n.set_back({t.rule, pos});
    // If the parent is a nonterminal node we came from its k-th argument:
    // descend to the node of its pattern that holds parameter k.
    for (SymId s = symbol(n.back()); ix_.is_nt(s); s = symbol(n.back())) {
      std::uint32_t m = ix_.nt_of(s);
      ParamParent pp = param_parent(m, k);
      n.push({m, pp.pos});
      k = pp.child;
    }
    came_from = k;
    return true;
  }
}

template <typename P>
bool Navigator::to_parent(P& n) const {
  P p = n;
  unsigned k = 0;
  do {
    if (!to_binary_parent(p, k)) return false;
  } while (k == 2);
  n = std::move(p);
  return true;
}

// Pre-order search of the binary subtree at n (possibly an unresolved
// nonterminal position) for label b, jumping nonterminals without b.
template <typename P>
bool Navigator::find_in(P& n, LabelId b) const {
  std::vector<P> stack{n};
  while (!stack.empty()) {
    P u = std::move(stack.back());
    stack.pop_back();
    SymId s = symbol(u.back());
    if (!ix_.is_nt(s)) {
      if (s == b) {
        n = std::move(u);
        return true;
      }
    } else if (ix_.jump_bit(ix_.nt_of(s), b)) {
      u.push({ix_.nt_of(s), 0});
      stack.push_back(std::move(u));
      continue;
    }
    unsigned r = ix_.rank(s);
    for (unsigned k = r; k >= 1; --k) {
      P c = u;
      to_child_position(c, k);
      stack.push_back(std::move(c));
    }
  }
  return false;
}

template <typename P>
bool Navigator::to_tagged_desc(P& n, LabelId b) const {
  if (b == kNullLabel || b >= ix_.num_terminals()) return false;
  if (ix_.rank(symbol(n.back())) < 1) return false;
  P c = n;
  to_child_position(c, 1);
  if (!find_in(c, b)) return false;
  n = std::move(c);
  return true;
}

template <typename P>
bool Navigator::to_tagged_foll(P& n, LabelId b) const {
  if (b == kNullLabel || b >= ix_.num_terminals()) return false;
  P u = n;
  unsigned k = 1;  // treat n as reached from a left edge: search its right part
  for (;;) {
    unsigned r = ix_.rank(symbol(u.back()));
    for (unsigned j = k + 1; j <= r; ++j) {
      P c = u;
      to_child_position(c, j);
      if (find_in(c, b)) {
        n = std::move(c);
        return true;
      }
    }
    if (!to_binary_parent(u, k)) return false;
  }
}

}  // namespace tinyt
