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

#include <set>

#include "doctest.h"
#include "support.hpp"
#include "tinyt/error.hpp"
#include "tinyt/grammar.hpp"

using namespace tinyt;

namespace {

BinaryTree tree_of(std::string_view term) {
  return expand(parse_grammar("S -> " + std::string(term)));
}

// Reference tree of the worked example; its DAG has 8 edges.
constexpr const char* kT = "f(f(a(b,c),a(c,c)),a(c,c))";
constexpr const char* kRank1 =
    "S -> A(A(a(b,c)))\n"
    "A(y1) -> f(y1,a(c,c))\n";
constexpr const char* kG1 =
    "S -> A(A(a(b,c)))\n"
    "A(y1) -> f(y1,B)\n"
    "B -> C(c)\n"
    "C(y1) -> a(y1,c)\n";

std::string canon(const SltGrammar& g) { return dump(canonicalize(g)); }

// Rule shapes: for each non-start rule, the rhs with nonterminals replaced by
// their canonical position.
std::multiset<std::string> rule_shapes(const SltGrammar& g) {
  SltGrammar c = canonicalize(g);
  std::multiset<std::string> out;
  for (NtId x = 1; x < c.rules.size(); ++x) out.insert(pattern_to_string(c, c.rules[x].rhs));
  return out;
}

}  // namespace

TEST_CASE("binarize encodes first child and next sibling") {
  Document d = make_structure_tree("<a><b/><c/><d/></a>");
  BinaryTree bt = binarize(d.tree);
  CHECK(to_term(bt) == "a(b(_N,c(_N,d(_N,_N))),_N)");
  CHECK(unbinarize(bt).same_shape(d.tree));
  Document single = make_structure_tree("<a/>");
  CHECK(to_term(binarize(single.tree)) == "a(_N,_N)");
}

TEST_CASE("binarize round trip on random documents") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    Document d = testing::random_document(rng, 1 + rng() % 80, 4);
    CHECK(unbinarize(binarize(d.tree)).same_shape(d.tree));
  }
}

TEST_CASE("DAG of the worked example") {
  BinaryTree t = tree_of(kT);
  CHECK(t.edges() == 10);
  SltGrammar dag = build_dag(t);
  CHECK(stats(dag).size == 8);
  CHECK(canon(dag) == canon(parse_grammar("S -> f(f(a(b,B),A),A)\nA -> a(B,B)\nB -> c\n")));
  CHECK(expand(dag) == t);
}

TEST_CASE("DAG of a tree with distinct subtrees is the tree") {
  BinaryTree t = tree_of("f(a(b,c),g(d,e))");
  SltGrammar dag = build_dag(t);
  CHECK(dag.rules.size() == 1);
  CHECK(stats(dag).size == t.edges());
}

TEST_CASE("rank-1 example grammar and G1") {
  SltGrammar g = parse_grammar(kRank1);
  CHECK(stats(g).size == 8);
  CHECK(expand(g) == tree_of(kT));
  SltGrammar b = to_bcnf(g);
  CHECK(is_bcnf(b));
  GrammarStats st = stats(b);
  CHECK(st.size == 9);
  CHECK(st.num_rules == 3);
  CHECK(st.rank == 1);
  CHECK(canon(b) == canon(parse_grammar(kG1)));
  CHECK(rule_shapes(b) == rule_shapes(parse_grammar(kG1)));
  CHECK(expand(b) == tree_of(kT));
  // Already in bCNF: unchanged.
  CHECK(canon(to_bcnf(b)) == canon(b));
}

TEST_CASE("bCNF of the DAG and of the extended tree") {
  SltGrammar b = to_bcnf(build_dag(tree_of(kT)));
  CHECK(stats(b).size == 9);
  CHECK(stats(b).rank == 1);
  std::string t2 = std::string("f(") + kT + ",a(c,c))";
  CHECK(stats(to_bcnf(build_dag(tree_of(t2)))).size == 11);
  SltGrammar cft = parse_grammar("S -> A(A(A(a(b,c))))\nA(y1) -> f(y1,B)\nB -> C(c)\nC(y1) -> a(y1,c)\n");
  CHECK(expand(cft) == tree_of(t2));
  CHECK(stats(cft).size == 10);
}

TEST_CASE("compress_repair on the worked example") {
  BinaryTree t = tree_of(kT);
  SltGrammar g = compress_repair(t, 1);
  CHECK(expand(g) == t);
  CHECK(stats(g).size <= 8);
  CHECK(stats(g).rank <= 1);
  SltGrammar g0 = compress_repair(t, 0);
  CHECK(stats(g0).rank == 0);
  CHECK(canon(g0) == canon(build_dag(t)));
}

TEST_CASE("stats of a one-rule grammar") {
  BinaryTree t = tree_of(kT);
  GrammarStats st = stats(one_rule_grammar(t));
  CHECK(st.size == t.edges());
  CHECK(st.depth == 1);
  CHECK(st.num_rules == 0);
}

TEST_CASE("cyclic grammar is rejected") {
  SltGrammar g = parse_grammar("S -> A\nA -> f(a,b)\n");
  g.rules[1].rhs = {Symbol::nonterminal(1)};
  CHECK_THROWS_AS(expand(g), Error);
  try {
    expand(g);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kCycleDetected);
  }
  SltGrammar self;
  self.alphabet = Alphabet::fcns(LabelTable{});
  self.rules.resize(1);
  self.rules[0].rhs = {Symbol::nonterminal(0)};
  CHECK_THROWS_AS(expand(self), Error);
}

TEST_CASE("grammar text round trip") {
  SltGrammar g = parse_grammar(kG1);
  CHECK(dump(g) == kG1);
  SltGrammar u = parse_grammar("S \xE2\x86\x92 f(a,b)\n");
  CHECK(pattern_to_string(u, u.rules[0].rhs) == "f(a,b)");
  CHECK_THROWS_AS(parse_grammar("S -> f(a,"), ParseError);
}

TEST_CASE("compressors preserve the tree on random inputs") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    BinaryTree t = testing::random_binary(rng, 1 + rng() % 120, 1 + rng() % 4, 0.4);
    std::uint64_t n = t.edges();
    SltGrammar dag = build_dag(t);
    REQUIRE(expand(dag) == t);
    CHECK(stats(dag).size <= n);
    for (unsigned r : {0u, 1u, 2u, 3u}) {
      SltGrammar g = compress_repair(t, r);
      validate(g);
      REQUIRE(expand(g) == t);
      CHECK(stats(g).rank <= r);
      CHECK(stats(g).size <= n);
      CHECK(stats(g).depth <= stats(g).num_rules + 1);
      SltGrammar b = to_bcnf(g);
      validate(b);
      REQUIRE(expand(b) == t);
      CHECK(is_bcnf(b));
      CHECK(b.rules.size() - 1 <= 2 * std::max<std::uint64_t>(stats(g).size, 1));
      CHECK(stats(b).rank <= stats(g).rank + std::max(stats(g).rank, 1u));
    }
  }
}

TEST_CASE("DAG nonterminals expand to distinct trees") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    BinaryTree t = testing::random_binary(rng, 60, 2, 0.5);
    SltGrammar dag = build_dag(t);
    std::set<Pattern> seen;
    for (NtId x = 0; x < dag.rules.size(); ++x) CHECK(seen.insert(pattern_tree(dag, x)).second);
  }
}
