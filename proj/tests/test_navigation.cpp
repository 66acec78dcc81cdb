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

#include <map>

#include "doctest.h"
#include "support.hpp"
#include "tinyt/navigation.hpp"

using namespace tinyt;

namespace {

constexpr const char* kG1 =
    "S -> A(A(a(b,c)))\n"
    "A(y1) -> f(y1,B)\n"
    "B -> C(c)\n"
    "C(y1) -> a(y1,c)\n";

std::uint32_t nt_named(const TinyTIndex& ix, const std::string& root_label) {
  for (std::uint32_t n = 0; n < ix.num_nonterminals(); ++n) {
    SymId x = ix.rule_x(n);
    if (!ix.is_nt(x) && ix.labels.name(x) == root_label) return n;
  }
  return 0;
}

// Pre-order list of NodeIds gathered with the iterative cursor.
std::vector<NodeId> all_nodes(const Navigator& nav) {
  std::vector<NodeId> out;
  NodeId n;
  nav.find_root(n);
  for (;;) {
    out.push_back(n);
    if (nav.to_first_child(n)) continue;
    bool more = true;
    while (!nav.to_next_sibling(n)) {
      if (!nav.to_parent(n)) {
        more = false;
        break;
      }
    }
    if (!more) break;
  }
  return out;
}

}  // namespace

TEST_CASE("G1 node ids") {
  TinyTIndex ix = build_index(parse_grammar(kG1));
  Navigator nav(ix);
  std::string a = ix.symbol_name(ix.sym_of(nt_named(ix, "f")));
  NodeId root = nav.root();
  CHECK(nav.format(root) == "(S,\xCE\xB5)(" + a + ",\xCE\xB5)");
  CHECK(ix.labels.name(nav.label_of(root)) == "f");
  auto fc = nav.first_child(root);
  REQUIRE(fc);
  CHECK(nav.format(*fc) == "(S,1)(" + a + ",\xCE\xB5)");
  auto b = nav.tagged_desc(root, *ix.labels.find("b"));
  REQUIRE(b);
  CHECK(nav.format(*b) == "(S,1.1.1)");
  CHECK_FALSE(nav.parent(root));
  CHECK(nav.parent(*fc) == root);
  CHECK_THROWS_AS(nav.first_child(NodeId{}), Error);
  CHECK_THROWS_AS(nav.first_child(NodeId({{kStartRule, 0}})), Error);
}

TEST_CASE("one-rule grammar root") {
  Document d = make_structure_tree("<a/>");
  TinyTIndex ix = build_index(one_rule_grammar(binarize(d.tree)));
  Navigator nav(ix);
  CHECK(nav.root() == NodeId({{kStartRule, 0}}));
  CHECK_FALSE(nav.first_child(nav.root()));
  CHECK_FALSE(nav.next_sibling(nav.root()));
}

TEST_CASE("navigation agrees with the expanded tree") {
  std::mt19937_64 rng(23);
  for (int iter = 0; iter < 120; ++iter) {
    Document d = testing::random_document(rng, 1 + rng() % 200, 1 + rng() % 4, 0.25, 0.5);
    BinaryTree bt = binarize(d.tree);
    TinyTIndex ix = build_index(to_bcnf(compress_repair(bt, rng() % 4)));
    Navigator nav(ix);
    const StructureTree& st = d.tree;
    std::vector<NodeId> nodes = all_nodes(nav);
    REQUIRE(nodes.size() == st.size());
    std::map<std::vector<std::pair<std::uint32_t, std::uint32_t>>, NodeIdx> pre;
    auto key = [](const NodeId& n) {
      std::vector<std::pair<std::uint32_t, std::uint32_t>> k;
      for (Pair p : n.pairs()) k.push_back({p.rule, p.pos});
      return k;
    };
    for (NodeIdx i = 0; i < nodes.size(); ++i) pre[key(nodes[i])] = i;
    std::vector<std::uint32_t> size(st.size(), 1);
    for (NodeIdx i = static_cast<NodeIdx>(st.size()); i-- > 1;) size[st[i].parent] += size[i];
    auto idx = [&](const std::optional<NodeId>& n) -> NodeIdx {
      if (!n) return kNoNode;
      auto it = pre.find(key(*n));
      return it == pre.end() ? kNoNode - 1 : it->second;
    };
    for (NodeIdx i = 0; i < st.size(); ++i) {
      const NodeId& n = nodes[i];
      CHECK(n.size() <= nav.grammar_depth() + 1);
      CHECK(st.labels.name(st[i].label) == ix.labels.name(nav.label_of(n)));
      CHECK(idx(nav.first_child(n)) == st[i].first_child);
      CHECK(idx(nav.next_sibling(n)) == st[i].next_sibling);
      CHECK(idx(nav.parent(n)) == st[i].parent);
      for (LabelId b = 0; b < ix.num_terminals(); ++b) {
        if (b == kNullLabel) continue;
        NodeIdx want_desc = kNoNode, want_foll = kNoNode;
        for (NodeIdx j = i + 1; j < i + size[i]; ++j) {
          if (ix.labels.name(b) == st.labels.name(st[j].label)) {
            want_desc = j;
            break;
          }
        }
        for (NodeIdx j = i + size[i]; j < st.size(); ++j) {
          if (ix.labels.name(b) == st.labels.name(st[j].label)) {
            want_foll = j;
            break;
          }
        }
        CHECK(idx(nav.tagged_desc(n, b)) == want_desc);
        CHECK(idx(nav.tagged_foll(n, b)) == want_foll);
      }
    }
    std::uint64_t c1 = 0, c2 = 0, c3 = 0;
    CHECK(traverse_recursive(nav, c1) == st.size());
    CHECK(traverse_iterative(nav, c2) == st.size());
    CHECK(traverse_pooled(nav, c3) == st.size());
    CHECK(c1 == c2);
    CHECK(c2 == c3);
  }
}

TEST_CASE("pooled ids share prefixes and match plain ids") {
  std::mt19937_64 rng(29);
  Document d = testing::random_document(rng, 150, 3, 0.2, 0.6);
  TinyTIndex ix = build_index(to_bcnf(compress_repair(binarize(d.tree), 2)));
  Navigator nav(ix);
  NodePool pool;
  {
    PooledNodeId p(pool);
    NodeId n;
    nav.find_root(p);
    nav.find_root(n);
    std::vector<PooledNodeId> keep;
    for (;;) {
      CHECK(p.to_node_id() == n);
      keep.push_back(p);
      bool a = nav.to_first_child(p);
      bool b = nav.to_first_child(n);
      REQUIRE(a == b);
      if (a) continue;
      bool done = false;
      for (;;) {
        bool s1 = nav.to_next_sibling(p), s2 = nav.to_next_sibling(n);
        REQUIRE(s1 == s2);
        if (s1) break;
        bool u1 = nav.to_parent(p), u2 = nav.to_parent(n);
        REQUIRE(u1 == u2);
        if (!u1) {
          done = true;
          break;
        }
      }
      if (done) break;
    }
    std::size_t total_pairs = 0;
    for (const auto& k : keep) total_pairs += k.size();
    CHECK(pool.live_nodes() <= total_pairs);
  }
  CHECK(pool.live_nodes() == 0);
}
