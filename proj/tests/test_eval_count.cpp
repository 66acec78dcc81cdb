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


#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "support.hpp"
#include "tinyt/eval_count.hpp"

using namespace tinyt;

namespace {

constexpr const char* kG1 =
    "S -> A(A(a(b,c)))\n"
    "A(y1) -> f(y1,B)\n"
    "B -> C(c)\n"
    "C(y1) -> a(y1,c)\n";

constexpr const char* kDoc =
    "<g>This<f><f><a><b>is</b></a><c>a test</c></f><a><c>document</c>"
    "<c>for the purpose</c></a></f><a><c>of explaining</c><c>serialization</c></a></g>";

std::uint32_t nt_rooted_at(const TinyTIndex& ix, const std::string& label, unsigned rank) {
  for (std::uint32_t n = 0; n < ix.num_nonterminals(); ++n) {
    SymId x = ix.rule_x(n);
    if (!ix.is_nt(x) && ix.labels.name(x) == label && RuleWord::rank(ix.rules[n]) == rank) return n;
  }
  FAIL("no such rule");
  return 0;
}

const CountOptions kAllOptions[] = {
    {JumpMode::kOff, false},      {JumpMode::kOff, true},       {JumpMode::kRelevant, false},
    {JumpMode::kRelevant, true},  {JumpMode::kFRelevant, false}, {JumpMode::kFRelevant, true},
};

}  // namespace

TEST_CASE("count over G1") {
  TinyTIndex ix = build_index(parse_grammar(kG1));
  StAutomaton fb = compile_query("//f//b", ix.labels);
  for (const CountOptions& o : kAllOptions) CHECK(count(ix, fb, o) == 1);

  TinyTIndex ab = build_index(parse_grammar("S -> A(A(b))\nA(y1) -> f(y1,B)\nB -> C(c)\nC(y1) -> a(y1,c)\n"));
  StAutomaton b = compile_query("/b", ab.labels);
  for (const CountOptions& o : kAllOptions) CHECK(count(ab, b, o) == 0);
}

TEST_CASE("jump decisions") {
  TinyTIndex ix = build_index(parse_grammar(kG1));
  std::uint32_t A = nt_rooted_at(ix, "f", 1);
  StAutomaton fb = compile_query("//f//b", ix.labels);
  JumpDecision d = jump_decision(fb, 1, A, ix, JumpMode::kRelevant);
  CHECK(d.jump);
  CHECK(d.params == std::vector<StateId>{1});
  CHECK_FALSE(jump_decision(fb, 0, A, ix, JumpMode::kFRelevant).jump);

  StAutomaton b = compile_query("/b", ix.labels);
  CHECK_FALSE(jump_decision(b, 0, A, ix, JumpMode::kRelevant).jump);
  d = jump_decision(b, 0, A, ix, JumpMode::kFRelevant);
  CHECK(d.jump);
  CHECK(d.params == std::vector<StateId>{1});

  TinyTIndex sp = build_index(to_bcnf(parse_grammar("S -> A(A(b))\nA(y1) -> f(a(c,c),y1)\n")));
  StAutomaton b2 = compile_query("/b", sp.labels);
  d = jump_decision(b2, 0, nt_rooted_at(sp, "f", 1), sp, JumpMode::kFRelevant);
  CHECK(d.jump);
  CHECK(d.params == std::vector<StateId>{0});
}

TEST_CASE("count over the serialization example") {
  Document d = make_structure_tree(kDoc);
  for (unsigned k : {0u, 1u, 2u, 4u}) {
    TinyTIndex ix = testing::index_document(d, k);
    for (const CountOptions& o : kAllOptions) {
      CHECK(count(ix, compile_query("//c", ix.labels), o) == 5);
      CHECK(count(ix, compile_query("//b", ix.labels), o) == 1);
      CHECK(count(ix, compile_query("//text()", ix.labels), o) == 7);
      CHECK(count(ix, compile_query("/g/f/a/c", ix.labels), o) == 2);
      CHECK(count(ix, compile_query("//zz", ix.labels), o) == 0);
    }
  }
}

TEST_CASE("count equals the naive oracle under every option") {
  std::mt19937_64 rng(77);
  for (int iter = 0; iter < 400; ++iter) {
    Document d = testing::random_document(rng, 1 + rng() % 200, 4, 0.25, 0.5);
    TinyTIndex ix = testing::index_document(d, static_cast<unsigned>(rng() % 5));
    std::string qs = testing::random_query(rng, 4);
    XPathQuery q = parse_xpath(qs);
    StAutomaton a = determinize(compile(q, ix.labels));
    const std::uint64_t want = testing::naive_xpath(d.tree, q).size();
    std::uint64_t transitions_off[2] = {0, 0};
    for (const CountOptions& o : kAllOptions) {
      CountStats st;
      CHECK_MESSAGE(count(ix, a, o, &st) == want, qs);
      CHECK(st.max_key_evaluations <= 1);
      const std::uint64_t m = a.num_states(), n = ix.num_nonterminals();
      CHECK(st.evaluations <= m * n);
      CHECK(st.rule_visits <= m * n * (kMaxRank + 1));
      if (o.jump == JumpMode::kOff) {
        transitions_off[o.skip] = st.transitions;
      } else {
        CHECK(st.transitions <= transitions_off[o.skip]);
      }
    }
  }
}

TEST_CASE("skip never evaluates inside q_U") {
  Document d = make_structure_tree(kDoc);
  TinyTIndex ix = testing::index_document(d, 2);
  StAutomaton a = compile_query("/zz", ix.labels);
  CountStats st;
  CHECK(count(ix, a, {JumpMode::kOff, true}, &st) == 0);
  CHECK(st.evaluations == 0);
  CHECK(st.transitions == 0);
}
