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
#include <sstream>

#include "doctest.h"
#include "oracle.hpp"
#include "support.hpp"
#include "tinyt/eval_count.hpp"
#include "tinyt/eval_print.hpp"

using namespace tinyt;

namespace {

constexpr const char* kDoc =
    "<g>This<f><f><a><b>is</b></a><c>a test</c></f><a><c>document</c>"
    "<c>for the purpose</c></a></f><a><c>of explaining</c><c>serialization</c></a></g>";

// Binary form of kDoc with A(y1) = f(y1,B) shared twice.
constexpr const char* kDocGrammar =
    "S -> g(_T(_N,A(A(a(b(_T(_N,_N),_N),c(_T(_N,_N),_N))))),_N)\n"
    "A(y1) -> f(y1,B)\n"
    "B -> a(c(_T(_N,_N),c(_T(_N,_N),_N)),_N)\n";

const PrintOptions kAllOptions[] = {
    {true, true, true},  {false, true, true},  {true, false, true},  {false, false, true},
    {true, true, false}, {false, true, false}, {true, false, false}, {false, false, false},
};

std::vector<std::string> fragments(const TinyTIndex& ix, const TextCollection& texts,
                                   const StAutomaton& a, const PrintOptions& o) {
  std::vector<std::string> out;
  serialize_query(ix, texts, a, o, [&](std::string_view s) { out.emplace_back(s); });
  return out;
}

TinyTIndex doc_grammar_index(const Document& d) {
  SltGrammar g = parse_grammar(kDocGrammar);
  REQUIRE(to_term(expand(g)) == to_term(binarize(d.tree)));
  return build_index(to_bcnf(g));
}

}  // namespace

TEST_CASE("serialization trace of //c") {
  Document d = make_structure_tree(kDoc);
  TinyTIndex ix = doc_grammar_index(d);
  StAutomaton c = compile_query("//c", ix.labels);
  PrintTrace tr = run_print(ix, c, {});
  std::vector<std::pair<std::uint64_t, std::uint64_t>> frl;
  for (const ResultEntry& e : tr.results) frl.push_back({e.irt_begin + 1, e.text_index});
  CHECK(frl == std::vector<std::pair<std::uint64_t, std::uint64_t>>{{1, 2}, {4, 3}, {7, 4}, {10, 5}, {13, 6}});
  REQUIRE(tr.irt.size() == 15);
  for (std::size_t i = 0; i < 15; i += 3) {
    CHECK(tr.irt[i].kind == IrtToken::kOpen);
    CHECK(tr.irt[i + 1].kind == IrtToken::kText);
    CHECK(tr.irt[i + 2].kind == IrtToken::kClose);
    CHECK(ix.labels.name(tr.irt[i].label) == "c");
  }
  // A's first chunk is empty, its second chunk is IRT positions 4..9 and
  // is copied once more at position 10.
  std::uint32_t A = 0, B = 0;
  for (std::uint32_t n = 0; n < ix.num_nonterminals(); ++n) {
    SymId x = ix.rule_x(n);
    if (!ix.is_nt(x) && ix.labels.name(x) == "f") {
      A = n;
      B = ix.nt_of(ix.rule_y(n));
    }
  }
  const ChunkMemoEntry* a1 = tr.find_memo(A, 0, 0, false);
  REQUIRE(a1);
  CHECK(a1->length == 0);
  const ChunkMemoEntry* a2 = tr.find_memo(A, 0, 1, false);
  REQUIRE(a2);
  CHECK(a2->begin + 1 == 4);
  CHECK(a2->begin + a2->length == 9);
  const ChunkMemoEntry* b1 = tr.find_memo(B, 0, 0, false);
  REQUIRE(b1);
  CHECK(b1->begin + 1 == 4);
  CHECK(b1->length == 6);
  // The other hit is the empty first chunk of the outer A.
  REQUIRE(tr.copies.size() == 2);
  CHECK(tr.copies[0].length == 0);
  CHECK(tr.copies[1].src + 1 == 4);
  CHECK(tr.copies[1].length == 6);
  CHECK(tr.copies[1].dst + 1 == 10);
  CHECK(tr.num_texts == 7);
  CHECK(tr.num_elements == 12);

  std::vector<std::string> want = {"<c>a test</c>", "<c>document</c>", "<c>for the purpose</c>",
                                   "<c>of explaining</c>", "<c>serialization</c>"};
  for (const PrintOptions& o : kAllOptions) CHECK(fragments(ix, d.texts, c, o) == want);
  CHECK(materialize_query(ix, c) == std::vector<std::uint64_t>{5, 7, 8, 10, 11});
}

TEST_CASE("serialization of //b") {
  Document d = make_structure_tree(kDoc);
  TinyTIndex ix = doc_grammar_index(d);
  StAutomaton b = compile_query("//b", ix.labels);
  PrintTrace tr = run_print(ix, b, {});
  REQUIRE(tr.results.size() == 1);
  CHECK(tr.results[0].irt_begin + 1 == 1);
  CHECK(tr.results[0].text_index == 1);
  CHECK(tr.irt.size() == 3);
  for (const PrintOptions& o : kAllOptions) {
    CHECK(fragments(ix, d.texts, b, o) == std::vector<std::string>{"<b>is</b>"});
  }
}

TEST_CASE("root query reconstructs the document") {
  for (const char* xml : {kDoc, "<r a=\"1&amp;2\" b=\"x\"><s c=\"&lt;\">t&gt;</s>u<e/><s/></r>",
                          "<x><y z=\"q\"/>text</x>"}) {
    Document d = make_structure_tree(xml);
    for (unsigned k : {0u, 2u, 4u}) {
      TinyTIndex ix = testing::index_document(d, k);
      for (const PrintOptions& o : kAllOptions) {
        std::ostringstream os;
        CHECK(serialize_query(ix, d.texts, compile_query("/*", ix.labels), o, os) == 1);
        CHECK(os.str() == emit_xml(d.tree, d.texts));
        CHECK(fragments(ix, d.texts, compile_query("//*", ix.labels), o) ==
              testing::naive_fragments(d, parse_xpath("//*")));
      }
    }
  }
}

TEST_CASE("empty and full materialization") {
  Document d = make_structure_tree(kDoc);
  TinyTIndex ix = testing::index_document(d, 3);
  CHECK(materialize_query(ix, compile_query("//zz", ix.labels)).empty());
  std::vector<std::uint64_t> all = materialize_query(ix, compile_query("//*", ix.labels));
  REQUIRE(all.size() == 12);
  for (std::uint64_t i = 0; i < all.size(); ++i) CHECK(all[i] == i);
}

TEST_CASE("print evaluators equal the naive oracle") {
  std::mt19937_64 rng(1234);
  for (int iter = 0; iter < 300; ++iter) {
    Document d = testing::random_document(rng, 1 + rng() % 200, 4, 0.3, 0.5);
    TinyTIndex ix = testing::index_document(d, static_cast<unsigned>(rng() % 5));
    std::string qs = testing::random_query(rng, 4);
    XPathQuery q = parse_xpath(qs);
    StAutomaton a = determinize(compile(q, ix.labels));
    std::vector<std::string> want = testing::naive_fragments(d, q);
    std::vector<NodeIdx> sel = testing::naive_xpath(d.tree, q);
    std::vector<std::uint64_t> en = testing::element_numbers(d.tree), tn = testing::text_numbers(d.tree);
    std::vector<std::uint64_t> want_pos;
    for (NodeIdx v : sel) want_pos.push_back(d.tree.labels.is_element(d.tree[v].label) ? en[v] : tn[v]);

    PrintTrace ref = run_print(ix, a, kAllOptions[0]);
    for (const PrintOptions& o : kAllOptions) {
      CHECK_MESSAGE(fragments(ix, d.texts, a, o) == want, qs);
      CHECK_MESSAGE(materialize_query(ix, a, o) == want_pos, qs);
      PrintTrace tr = run_print(ix, a, o);
      CHECK(tr.results == ref.results);
      CHECK(tr.irt == ref.irt);
      CHECK(tr.num_texts == d.texts.count());
      CHECK(tr.num_elements == count_elements(d.tree));
    }
    CHECK(count(ix, a) == want.size());
  }
}
