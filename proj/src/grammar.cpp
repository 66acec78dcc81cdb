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

#include <algorithm>
#include <unordered_map>

#include "tinyt/error.hpp"
#include "tinyt/grammar.hpp"
#include "grammar_internal.hpp"

namespace tinyt {

Alphabet Alphabet::fcns(const LabelTable& labels) {
  Alphabet a;
  a.labels = labels;
  a.ranks.assign(labels.size(), 2);
  a.ranks[kNullLabel] = 0;
  return a;
}

LabelId Alphabet::add(std::string_view name, unsigned rank) {
  if (ranks.size() < labels.size()) {
    // reserved labels of a fresh table
    ranks.resize(labels.size(), 2);
    ranks[kNullLabel] = 0;
  }
  LabelId id = labels.intern(name);
  if (id < ranks.size()) {
    if (ranks[id] != rank) {
      throw Error(ErrorCode::kInvalidGrammar,
                  "label " + std::string(name) + " used with ranks " +
                      std::to_string(ranks[id]) + " and " + std::to_string(rank));
    }
  } else {
    ranks.push_back(static_cast<std::uint8_t>(rank));
  }
  return id;
}

std::string SltGrammar::name_of(NtId id) const {
  if (id < names.size() && !names[id].empty()) return names[id];
  if (id == start) return "S";
  return "N" + std::to_string(id);
}

bool operator==(const BinaryTree& a, const BinaryTree& b) {
  if (a.nodes.size() != b.nodes.size()) return false;
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    const auto& x = a.nodes[i];
    const auto& y = b.nodes[i];
    if (x.left != y.left || x.right != y.right) return false;
    if (x.label != y.label &&
        a.alphabet.labels.name(x.label) != b.alphabet.labels.name(y.label)) {
      return false;
    }
  }
  return true;
}

BinaryTree binarize(const StructureTree& tree) {
  BinaryTree out;
  out.alphabet = Alphabet::fcns(tree.labels);
  if (tree.nodes.empty()) return out;
  out.nodes.reserve(2 * tree.size() + 1);
  struct Item {
    NodeIdx source;  // kNoNode for a null leaf
    NodeIdx parent;
    bool left;
  };
  std::vector<Item> stack{{tree.root, kNoNode, true}};
  while (!stack.empty()) {
    Item item = stack.back();
    stack.pop_back();
    auto idx = static_cast<NodeIdx>(out.nodes.size());
    out.nodes.emplace_back();
    if (item.parent != kNoNode) {
      (item.left ? out.nodes[item.parent].left : out.nodes[item.parent].right) = idx;
    }
    if (item.source == kNoNode) {
      out.nodes[idx].label = kNullLabel;
      continue;
    }
    const auto& node = tree[item.source];
    out.nodes[idx].label = node.label;
    // The root's next sibling is always null.
    NodeIdx sibling = item.source == tree.root ? kNoNode : node.next_sibling;
    stack.push_back({sibling, idx, false});
    stack.push_back({node.first_child, idx, true});
  }
  return out;
}

StructureTree unbinarize(const BinaryTree& bt) {
  auto bad = [](const char* what) {
    throw Error(ErrorCode::kInvalidGrammar, std::string("not an fcns tree: ") + what);
  };
  TreeBuilder builder(bt.alphabet.labels);
  if (bt.nodes.empty()) return std::move(builder).finish();
  if (bt[0].label == kNullLabel) bad("null root");
  // (binary node, parent in the unranked tree)
  std::vector<std::pair<NodeIdx, NodeIdx>> stack{{0, kNoNode}};
  bool root = true;
  while (!stack.empty()) {
    auto [b, parent] = stack.back();
    stack.pop_back();
    const auto& node = bt[b];
    if (node.label == kNullLabel) {
      if (node.left != kNoNode || node.right != kNoNode) bad("null leaf with children");
      continue;
    }
    if (node.left == kNoNode || node.right == kNoNode) bad("label without two children");
    if (root && bt[node.right].label != kNullLabel) bad("root has a sibling");
    root = false;
    NodeIdx me = builder.add(node.label, parent);
    stack.push_back({node.right, parent});
    stack.push_back({node.left, me});
  }
  return std::move(builder).finish();
}

SltGrammar one_rule_grammar(const BinaryTree& tree) {
  SltGrammar g;
  g.alphabet = tree.alphabet;
  g.rules.resize(1);
  g.start = 0;
  g.rules[0].rhs.reserve(tree.size());
  for (const auto& n : tree.nodes) g.rules[0].rhs.push_back(Symbol::terminal(n.label));
  return g;
}

namespace {

struct ClassKey {
  std::uint32_t label, left, right;
  bool operator==(const ClassKey&) const = default;
};

struct ClassKeyHash {
  std::size_t operator()(const ClassKey& k) const {
    std::uint64_t h = k.label;
    h = h * 0x9E3779B97F4A7C15ull + k.left;
    h = h * 0x9E3779B97F4A7C15ull + k.right;
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

constexpr std::uint32_t kNoClass = 0xFFFFFFFFu;

}  // namespace

SltGrammar build_dag(const BinaryTree& tree) {
  SltGrammar g;
  g.alphabet = tree.alphabet;
  if (tree.nodes.empty()) {
    g.rules.resize(1);
    return g;
  }
  const std::size_t n = tree.size();
  std::vector<std::uint32_t> cls(n);
  std::vector<ClassKey> classes;
  std::unordered_map<ClassKey, std::uint32_t, ClassKeyHash> ids;
  ids.reserve(n / 2 + 1);
  for (std::size_t i = n; i-- > 0;) {
    const auto& node = tree[static_cast<NodeIdx>(i)];
    ClassKey key{node.label, node.left == kNoNode ? kNoClass : cls[node.left],
                 node.right == kNoNode ? kNoClass : cls[node.right]};
    auto [it, inserted] = ids.emplace(key, static_cast<std::uint32_t>(classes.size()));
    if (inserted) classes.push_back(key);
    cls[i] = it->second;
  }
  std::vector<std::uint32_t> indegree(classes.size(), 0);
  for (const auto& k : classes) {
    if (k.left != kNoClass) ++indegree[k.left];
    if (k.right != kNoClass) ++indegree[k.right];
  }
  const std::uint32_t root = cls[0];
  std::vector<std::uint32_t> nt_of(classes.size(), kNoClass);
  g.rules.emplace_back();  // start
  g.start = 0;
  for (std::uint32_t c = 0; c < classes.size(); ++c) {
    if (c == root || indegree[c] < 2 || classes[c].label == kNullLabel) continue;
    nt_of[c] = static_cast<std::uint32_t>(g.rules.size());
    g.rules.emplace_back();
  }
  auto write_rhs = [&](std::uint32_t top, Pattern& out) {
    std::vector<std::uint32_t> stack{top};
    bool first = true;
    while (!stack.empty()) {
      std::uint32_t c = stack.back();
      stack.pop_back();
      if (!first && nt_of[c] != kNoClass) {
        out.push_back(Symbol::nonterminal(nt_of[c]));
        continue;
      }
      first = false;
      out.push_back(Symbol::terminal(classes[c].label));
      if (classes[c].right != kNoClass) stack.push_back(classes[c].right);
      if (classes[c].left != kNoClass) stack.push_back(classes[c].left);
    }
  };
  write_rhs(root, g.rules[0].rhs);
  for (std::uint32_t c = 0; c < classes.size(); ++c) {
    if (nt_of[c] != kNoClass) write_rhs(c, g.rules[nt_of[c]].rhs);
  }
  return g;
}

std::vector<std::uint32_t> subtree_sizes(const SltGrammar& g, std::span<const Symbol> rhs) {
  std::vector<std::uint32_t> size(rhs.size(), 1);
  // Walk backwards; a stack holds the sizes of complete subtrees to the right.
  std::vector<std::uint32_t> stack;
  for (std::size_t i = rhs.size(); i-- > 0;) {
    unsigned r = g.rank_of(rhs[i]);
    std::uint32_t total = 1;
    for (unsigned k = 0; k < r; ++k) {
      if (stack.empty()) {
        throw Error(ErrorCode::kInvalidGrammar, "pattern arity mismatch");
      }
      total += stack.back();
      stack.pop_back();
    }
    size[i] = total;
    stack.push_back(total);
  }
  if (stack.size() != 1 && !rhs.empty()) {
    throw Error(ErrorCode::kInvalidGrammar, "pattern is not a single tree");
  }
  return size;
}

std::size_t non_param_nodes(std::span<const Symbol> rhs) {
  return static_cast<std::size_t>(
      std::count_if(rhs.begin(), rhs.end(), [](Symbol s) { return !s.is_param(); }));
}

namespace {

// Topological order of nonterminals reachable from `root` such that every
// rule appears after all rules it references. Throws CycleDetected.
std::vector<NtId> topo_order(const SltGrammar& g, NtId root) {
  enum : std::uint8_t { kWhite, kGrey, kBlack };
  std::vector<std::uint8_t> color(g.rules.size(), kWhite);
  std::vector<NtId> order;
  struct Frame {
    NtId nt;
    std::size_t pos;
  };
  std::vector<Frame> stack{{root, 0}};
  color[root] = kGrey;
  while (!stack.empty()) {
    Frame& f = stack.back();
    const Pattern& rhs = g.rules[f.nt].rhs;
    if (f.pos == rhs.size()) {
      color[f.nt] = kBlack;
      order.push_back(f.nt);
      stack.pop_back();
      continue;
    }
    Symbol s = rhs[f.pos++];
    if (!s.is_nonterminal()) continue;
    NtId x = s.id();
    if (color[x] == kGrey) {
      throw Error(ErrorCode::kCycleDetected,
                  "nonterminal " + g.name_of(x) + " derives itself");
    }
    if (color[x] == kWhite) {
      color[x] = kGrey;
      stack.push_back({x, 0});
    }
  }
  return order;
}

}  // namespace

void validate(const SltGrammar& g) {
  auto bad = [&](NtId nt, const std::string& what) {
    throw Error(ErrorCode::kInvalidGrammar, "rule " + g.name_of(nt) + ": " + what);
  };
  if (g.start >= g.rules.size()) {
    throw Error(ErrorCode::kInvalidGrammar, "start rule out of range");
  }
  if (g.alphabet.ranks.size() != g.alphabet.labels.size()) {
    throw Error(ErrorCode::kInvalidGrammar, "alphabet ranks/labels size mismatch");
  }
  if (g.rules[g.start].rank != 0) bad(g.start, "start rule has parameters");
  for (NtId nt = 0; nt < g.rules.size(); ++nt) {
    const Rule& r = g.rules[nt];
    if (r.rhs.empty()) bad(nt, "empty right-hand side");
    std::int64_t need = 1;
    std::uint32_t next_param = 1;
    for (Symbol s : r.rhs) {
      if (need <= 0) bad(nt, "trailing symbols");
      --need;
      switch (s.kind()) {
        case Symbol::Kind::kTerminal:
          if (s.id() >= g.alphabet.size()) bad(nt, "terminal out of range");
          break;
        case Symbol::Kind::kNonterminal:
          if (s.id() >= g.rules.size()) bad(nt, "nonterminal out of range");
          if (s.id() == g.start) bad(nt, "references the start rule");
          break;
        case Symbol::Kind::kParam:
          if (s.id() != next_param) bad(nt, "parameters out of order");
          ++next_param;
          break;
      }
      need += g.rank_of(s);
    }
    if (need != 0) bad(nt, "arity mismatch");
    if (next_param - 1 != r.rank) bad(nt, "rank does not match parameter count");
    if (r.rhs[0].is_param()) bad(nt, "right-hand side is a bare parameter");
  }
  topo_order(g, g.start);
}

namespace {

// Iterative expansion of rule `root` into pre-order terminals (and the
// root rule's own parameters). Calls emit(Symbol) per output node.
template <typename Emit>
void expand_rule(const SltGrammar& g, NtId root, Emit&& emit) {
  std::vector<std::vector<std::uint32_t>> sizes(g.rules.size());
  for (NtId nt : topo_order(g, root)) sizes[nt] = subtree_sizes(g, g.rules[nt].rhs);
  struct Env {
    NtId rule;
    std::uint32_t pos;
    std::int64_t parent;
  };
  struct Ref {
    NtId rule;
    std::uint32_t pos;
    std::int64_t env;
  };
  std::vector<Env> envs;
  auto child_pos = [&](NtId rule, std::uint32_t pos, unsigned k) {
    std::uint32_t c = pos + 1;
    for (unsigned i = 1; i < k; ++i) c += sizes[rule][c];
    return c;
  };
  std::vector<Ref> stack{{root, 0, -1}};
  while (!stack.empty()) {
    Ref ref = stack.back();
    stack.pop_back();
    for (;;) {
      Symbol s = g.rules[ref.rule].rhs[ref.pos];
      if (s.is_param()) {
        if (ref.env < 0) break;
        const Env& e = envs[static_cast<std::size_t>(ref.env)];
        ref = {e.rule, child_pos(e.rule, e.pos, s.id()), e.parent};
      } else if (s.is_nonterminal()) {
        envs.push_back({ref.rule, ref.pos, ref.env});
        ref = {s.id(), 0, static_cast<std::int64_t>(envs.size() - 1)};
      } else {
        break;
      }
    }
    Symbol s = g.rules[ref.rule].rhs[ref.pos];
    emit(s);
    if (s.is_param()) continue;
    unsigned r = g.alphabet.rank(s.id());
    std::uint32_t kids[16];
    std::uint32_t c = ref.pos + 1;
    for (unsigned k = 0; k < r; ++k) {
      kids[k] = c;
      c += sizes[ref.rule][c];
    }
    for (unsigned k = r; k-- > 0;) stack.push_back({ref.rule, kids[k], ref.env});
  }
}

}  // namespace

Pattern pattern_tree(const SltGrammar& g, NtId nt) {
  Pattern out;
  expand_rule(g, nt, [&](Symbol s) { out.push_back(s); });
  return out;
}

BinaryTree expand(const SltGrammar& g) {
  validate(g);
  BinaryTree out;
  out.alphabet = g.alphabet;
  // (node index, children still to attach)
  std::vector<std::pair<NodeIdx, unsigned>> open;
  expand_rule(g, g.start, [&](Symbol s) {
    auto idx = static_cast<NodeIdx>(out.nodes.size());
    out.nodes.push_back({s.id(), kNoNode, kNoNode});
    if (!open.empty()) {
      auto& [parent, filled] = open.back();
      (filled == 0 ? out.nodes[parent].left : out.nodes[parent].right) = idx;
      if (++filled == g.alphabet.rank(out.nodes[parent].label)) open.pop_back();
    }
    if (g.alphabet.rank(s.id()) > 0) open.push_back({idx, 0});
  });
  return out;
}

GrammarStats stats(const SltGrammar& g) {
  GrammarStats st;
  std::vector<NtId> order = topo_order(g, g.start);
  std::vector<std::uint64_t> depth(g.rules.size(), 0);
  for (NtId nt : order) {
    const Rule& r = g.rules[nt];
    st.size += r.rhs.size() - 1;
    st.rank = std::max(st.rank, r.rank);
    std::uint64_t d = 0;
    for (Symbol s : r.rhs) {
      if (s.is_nonterminal()) d = std::max(d, depth[s.id()]);
    }
    depth[nt] = d + 1;
  }
  st.num_rules = order.size() - 1;
  st.depth = depth[g.start];
  st.start_rhs_size = g.rules[g.start].rhs.size();
  return st;
}

namespace detail {

Pattern inline_rules(const SltGrammar& g, NtId root, const std::vector<char>& inl,
                     const std::vector<std::vector<std::uint32_t>>& sizes) {
  struct Env {
    NtId rule;
    std::uint32_t pos;
    std::int64_t parent;
  };
  struct Ref {
    NtId rule;
    std::uint32_t pos;
    std::int64_t env;
  };
  auto child_pos = [&](NtId rule, std::uint32_t pos, unsigned k) {
    std::uint32_t c = pos + 1;
    for (unsigned j = 1; j < k; ++j) c += sizes[rule][c];
    return c;
  };
  Pattern out;
  out.reserve(g.rules[root].rhs.size());
  std::vector<Env> envs;
  std::vector<Ref> stack{{root, 0, -1}};
  while (!stack.empty()) {
    Ref ref = stack.back();
    stack.pop_back();
    for (;;) {
      Symbol s = g.rules[ref.rule].rhs[ref.pos];
      if (s.is_param() && ref.env >= 0) {
        const Env& e = envs[static_cast<std::size_t>(ref.env)];
        ref = {e.rule, child_pos(e.rule, e.pos, s.id()), e.parent};
      } else if (s.is_nonterminal() && inl[s.id()]) {
        envs.push_back({ref.rule, ref.pos, ref.env});
        ref = {s.id(), 0, static_cast<std::int64_t>(envs.size() - 1)};
      } else {
        break;
      }
    }
    Symbol s = g.rules[ref.rule].rhs[ref.pos];
    out.push_back(s);
    unsigned r = g.rank_of(s);
    std::uint32_t kids[32];
    std::uint32_t c = ref.pos + 1;
    for (unsigned k = 0; k < r; ++k) {
      kids[k] = c;
      c += sizes[ref.rule][c];
    }
    for (unsigned k = r; k-- > 0;) stack.push_back({ref.rule, kids[k], ref.env});
  }
  return out;
}

std::vector<char> live_rules(const SltGrammar& g) {
  std::vector<char> live(g.rules.size(), 0);
  std::vector<NtId> stack{g.start};
  live[g.start] = 1;
  while (!stack.empty()) {
    NtId x = stack.back();
    stack.pop_back();
    for (Symbol s : g.rules[x].rhs) {
      if (s.is_nonterminal() && !live[s.id()]) {
        live[s.id()] = 1;
        stack.push_back(s.id());
      }
    }
  }
  return live;
}

SltGrammar compact(SltGrammar g) {
  std::vector<char> live = live_rules(g);
  constexpr NtId kUnset = 0xFFFFFFFFu;
  std::vector<NtId> id(g.rules.size(), kUnset);
  SltGrammar out;
  out.alphabet = std::move(g.alphabet);
  for (NtId x = 0; x < g.rules.size(); ++x) {
    if (!live[x]) continue;
    id[x] = static_cast<NtId>(out.rules.size());
    out.rules.push_back(std::move(g.rules[x]));
    if (x < g.names.size() && !g.names[x].empty()) {
      out.names.resize(out.rules.size());
      out.names.back() = std::move(g.names[x]);
    }
  }
  out.start = id[g.start];
  for (Rule& r : out.rules) {
    for (Symbol& s : r.rhs) {
      if (s.is_nonterminal()) s = Symbol::nonterminal(id[s.id()]);
    }
  }
  return out;
}

}  // namespace detail

}  // namespace tinyt
