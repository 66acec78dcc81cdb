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


// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "oracle.hpp"
#include "support.hpp"
#include "tinyt/corpus.hpp"
#include "tinyt/eval_count.hpp"
#include "tinyt/eval_print.hpp"
#include "tinyt/grammar.hpp"
#include "tinyt/index.hpp"
#include "tinyt/navigation.hpp"

using namespace tinyt;

namespace {

// Pinned limits.
constexpr int kCases = 1000;
constexpr double kSuiteSeconds = 60.0;
constexpr double kIndexToStructureRatio = 0.15;
constexpr double kCorpusScale = 10.0;  // about 10 MB of XML
constexpr std::uint64_t kQ01DepthFactor = 2;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Suite {
 public:
  void run(const std::string& id, const std::string& name, const std::function<Outcome()>& body) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (s > kSuiteSeconds) {
      o.pass = false;
      o.detail += " over time limit";
    }
    std::printf("%s %-4s %s [%.2fs] %s\n", o.pass ? "PASS" : "FAIL", id.c_str(), name.c_str(), s,
                o.detail.c_str());
    std::fflush(stdout);
    failures_ += !o.pass;
  }
  int failures() const { return failures_; }

 private:
  int failures_ = 0;
};

// Collects mismatches, keeping the first few messages.
class Tally {
 public:
  void check(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    if (++bad_ <= 3) msg_ += what + "; ";
  }
  Outcome done(const std::string& summary) const {
    return {bad_ == 0, summary + " checks=" + std::to_string(checks_) + " failed=" + std::to_string(bad_) +
                           (msg_.empty() ? "" : " first: " + msg_)};
  }

 private:
  std::uint64_t checks_ = 0, bad_ = 0;
  std::string msg_;
};

BinaryTree tree_of(std::string_view term) { return expand(parse_grammar("S -> " + std::string(term))); }

constexpr const char* kMiniDoc =
    "<g>This<f><f><a><b>is</b></a><c>a test</c></f><a><c>document</c>"
    "<c>for the purpose</c></a></f><a><c>of explaining</c><c>serialization</c></a></g>";
constexpr const char* kG1 =
    "S -> A(A(a(b,c)))\n"
    "A(y1) -> f(y1,B)\n"
    "B -> C(c)\n"
    "C(y1) -> a(y1,c)\n";

std::multiset<std::string> rule_shapes(const SltGrammar& g) {
  SltGrammar c = canonicalize(g);
  std::multiset<std::string> out;
  for (NtId x = 1; x < c.rules.size(); ++x) out.insert(pattern_to_string(c, c.rules[x].rhs));
  return out;
}

std::vector<std::string> fragments(const TinyTIndex& ix, const TextCollection& texts, const StAutomaton& a,
                                   const PrintOptions& o) {
  std::vector<std::string> out;
  serialize_query(ix, texts, a, o, [&](std::string_view s) { out.emplace_back(s); });
  return out;
}

std::uint64_t structure_xml_bytes(const StructureTree& st) {
  std::uint64_t n = 0;
  for (const auto& node : st.nodes) {
    if (LabelTable::is_text_slot(node.label)) {
      n += st.labels.name(node.label).size() + 3;  // <_T/>
    } else {
      n += 2 * st.labels.name(node.label).size() + 5;  // <x></x>
    }
  }
  return n;
}

// Shared state for the structural-bound criteria, filled by the suites.
struct Bounds {
  Tally bcnf, states, memo;
} bounds;

Outcome worked_dag() {
  Tally t;
  BinaryTree tree = tree_of("f(f(a(b,c),a(c,c)),a(c,c))");
  t.check(tree.edges() == 10, "tree size " + std::to_string(tree.edges()));
  std::uint64_t s = stats(build_dag(tree)).size;
  t.check(s == 8, "dag size " + std::to_string(s));
  return t.done("tree=10 dag=" + std::to_string(s));
}

Outcome worked_bcnf() {
  Tally t;
  SltGrammar b = to_bcnf(parse_grammar("S -> A(A(a(b,c)))\nA(y1) -> f(y1,a(c,c))\n"));
  GrammarStats st = stats(b);
  t.check(is_bcnf(b), "not bcnf");
  t.check(st.size == 9, "size " + std::to_string(st.size));
  t.check(st.num_rules == 3, "rules " + std::to_string(st.num_rules));
  t.check(rule_shapes(b) == rule_shapes(parse_grammar(kG1)), "rule shapes differ from G1");
  return t.done("size=" + std::to_string(st.size) + " rules=" + std::to_string(st.num_rules));
}

Outcome worked_count() {
  Tally t;
  TinyTIndex g1 = build_index(parse_grammar(kG1));
  TinyTIndex ab = build_index(parse_grammar("S -> A(A(b))\nA(y1) -> f(y1,B)\nB -> C(c)\nC(y1) -> a(y1,c)\n"));
  for (JumpMode j : {JumpMode::kOff, JumpMode::kRelevant, JumpMode::kFRelevant}) {
    for (bool skip : {false, true}) {
      t.check(count(g1, compile_query("//f//b", g1.labels), {j, skip}) == 1, "//f//b");
      t.check(count(ab, compile_query("/b", ab.labels), {j, skip}) == 0, "/b");
    }
  }
  return t.done("//f//b=1 /b=0");
}

Outcome worked_serialize() {
  Tally t;
  Document d = make_structure_tree(kMiniDoc);
  SltGrammar g = parse_grammar(
      "S -> g(_T(_N,A(A(a(b(_T(_N,_N),_N),c(_T(_N,_N),_N))))),_N)\n"
      "A(y1) -> f(y1,B)\n"
      "B -> a(c(_T(_N,_N),c(_T(_N,_N),_N)),_N)\n");
  t.check(expand(g) == binarize(d.tree), "grammar does not encode the document");
  TinyTIndex ix = build_index(to_bcnf(g));
  PrintTrace tr = run_print(ix, compile_query("//c", ix.labels));
  std::string frl;
  for (const ResultEntry& e : tr.results) {
    frl += "(" + std::to_string(e.irt_begin + 1) + "," + std::to_string(e.text_index) + ")";
  }
  t.check(frl == "(1,2)(4,3)(7,4)(10,5)(13,6)", "frl " + frl);
  t.check(tr.irt.size() == 15, "irt length");
  std::vector<std::string> want = {"<c>a test</c>", "<c>document</c>", "<c>for the purpose</c>",
                                   "<c>of explaining</c>", "<c>serialization</c>"};
  t.check(fragments(ix, d.texts, compile_query("//c", ix.labels), {}) == want, "//c fragments");
  t.check(fragments(ix, d.texts, compile_query("//b", ix.labels), {}) == std::vector<std::string>{"<b>is</b>"},
          "//b fragment");
  t.check(get_text(d.texts, 6) == "serialization", "getText(6)");
  return t.done("frl=" + frl);
}

Outcome worked_space() {
  Tally t;
  IndexShape s;
  s.rules = 39631;
  s.labels = 89;
  auto rows = index_size_report(s);
  double cnf = 0, jump = 0;
  for (const SizeRow& r : rows) {
    if (r.component == "CNF") cnf = r.kb();
    if (r.component == "jump") jump = r.kb();
  }
  t.check(std::round(cnf * 10) / 10 == 309.6, "CNF kb");
  t.check(std::round(jump) == 431, "jump kb");
  char buf[64];
  std::snprintf(buf, sizeof buf, "CNF=%.1fKB jump=%.1fKB", cnf, jump);
  return t.done(buf);
}

Outcome suite_compress() {
  Tally t;
  std::mt19937_64 rng(1001);
  for (int i = 0; i < kCases; ++i) {
    BinaryTree tree = testing::random_binary(rng, 1 + rng() % 200, 1 + rng() % 4, 0.5);
    SltGrammar dag = build_dag(tree);
    t.check(expand(dag) == tree, "dag");
    SltGrammar rp = compress_repair(tree, static_cast<unsigned>(rng() % 5));
    t.check(expand(rp) == tree, "repair");
    for (const SltGrammar* g : {&dag, &rp}) {
      SltGrammar b = to_bcnf(*g);
      t.check(expand(b) == tree, "bcnf");
      bounds.bcnf.check(is_bcnf(b), "non-start rule without two non-parameter nodes");
      bounds.bcnf.check(b.rules.size() - 1 <= 2 * std::max<std::uint64_t>(1, stats(*g).size),
                        "too many bCNF nonterminals");
    }
  }
  return t.done(std::to_string(kCases) + " trees");
}

Outcome suite_count() {
  Tally t;
  std::mt19937_64 rng(2002);
  for (int i = 0; i < kCases; ++i) {
    Document d = testing::random_document(rng, 1 + rng() % 200, 4, 0.25, 0.5);
    TinyTIndex ix = testing::index_document(d, static_cast<unsigned>(rng() % 5));
    std::string qs = testing::random_query(rng, 4);
    XPathQuery q = parse_xpath(qs);
    StAutomaton a = determinize(compile(q, ix.labels));
    bounds.states.check(a.num_states() <= 2 * q.steps.size(), "states > 2m for " + qs);
    std::uint64_t want = testing::naive_xpath(d.tree, q).size();
    for (JumpMode j : {JumpMode::kOff, JumpMode::kRelevant, JumpMode::kFRelevant}) {
      for (bool skip : {false, true}) {
        CountStats st;
        t.check(count(ix, a, {j, skip}, &st) == want, qs);
        bounds.memo.check(st.max_key_evaluations <= 1, "behaviour recomputed for " + qs);
      }
    }
  }
  return t.done(std::to_string(kCases) + " cases x 6 option sets");
}

Outcome suite_print() {
  Tally t;
  std::mt19937_64 rng(3003);
  for (int i = 0; i < kCases; ++i) {
    Document d = testing::random_document(rng, 1 + rng() % 200, 4, 0.3, 0.5);
    TinyTIndex ix = testing::index_document(d, static_cast<unsigned>(rng() % 5));
    std::string qs = testing::random_query(rng, 4);
    XPathQuery q = parse_xpath(qs);
    StAutomaton a = determinize(compile(q, ix.labels));
    std::vector<std::string> want = testing::naive_fragments(d, q);
    std::vector<std::uint64_t> en = testing::element_numbers(d.tree), tn = testing::text_numbers(d.tree);
    std::vector<std::uint64_t> want_pos;
    for (NodeIdx v : testing::naive_xpath(d.tree, q)) {
      want_pos.push_back(d.tree.labels.is_element(d.tree[v].label) ? en[v] : tn[v]);
    }
    PrintOptions o{(i & 1) != 0, (i & 2) != 0, (i & 4) == 0};
    t.check(fragments(ix, d.texts, a, o) == want, "serialize " + qs);
    std::vector<std::uint64_t> pos = materialize_query(ix, a, o);
    t.check(pos == want_pos, "materialize " + qs);
    t.check(pos.size() == count(ix, a), "materialize length vs count " + qs);
  }
  return t.done(std::to_string(kCases) + " cases");
}

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

Outcome suite_navigation() {
  Tally t;
  std::mt19937_64 rng(4004);
  using Key = std::vector<std::pair<std::uint32_t, std::uint32_t>>;
  auto key = [](const NodeId& n) {
    Key k;
    for (Pair p : n.pairs()) k.push_back({p.rule, p.pos});
    return k;
  };
  for (int iter = 0; iter < kCases; ++iter) {
    Document d = testing::random_document(rng, 1 + rng() % 200, 1 + rng() % 4, 0.25, 0.5);
    const StructureTree& st = d.tree;
    TinyTIndex ix = testing::index_document(d, static_cast<unsigned>(rng() % 4));
    Navigator nav(ix);
    std::vector<NodeId> nodes = all_nodes(nav);
    if (nodes.size() != st.size()) {
      t.check(false, "node count");
      continue;
    }
    std::map<Key, NodeIdx> pre;
    for (NodeIdx i = 0; i < nodes.size(); ++i) pre[key(nodes[i])] = i;
    auto idx = [&](const std::optional<NodeId>& n) -> NodeIdx {
      if (!n) return kNoNode;
      auto it = pre.find(key(*n));
      return it == pre.end() ? kNoNode - 1 : it->second;
    };
    std::vector<std::uint32_t> size(st.size(), 1);
    for (NodeIdx i = static_cast<NodeIdx>(st.size()); i-- > 1;) size[st[i].parent] += size[i];
    for (NodeIdx i = 0; i < st.size(); ++i) {
      const NodeId& n = nodes[i];
      t.check(idx(nav.first_child(n)) == st[i].first_child, "first child");
      t.check(idx(nav.next_sibling(n)) == st[i].next_sibling, "next sibling");
      t.check(idx(nav.parent(n)) == st[i].parent, "parent");
      for (LabelId b = 0; b < ix.num_terminals(); ++b) {
        if (b == kNullLabel) continue;
        const std::string& name = ix.labels.name(b);
        NodeIdx desc = kNoNode, foll = kNoNode;
        for (NodeIdx j = i + 1; j < i + size[i] && desc == kNoNode; ++j) {
          if (st.labels.name(st[j].label) == name) desc = j;
        }
        for (NodeIdx j = i + size[i]; j < st.size() && foll == kNoNode; ++j) {
          if (st.labels.name(st[j].label) == name) foll = j;
        }
        t.check(idx(nav.tagged_desc(n, b)) == desc, "taggedDesc");
        t.check(idx(nav.tagged_foll(n, b)) == foll, "taggedFoll");
      }
    }
  }
  return t.done(std::to_string(kCases) + " documents");
}

bool reconstructs(const Document& d, unsigned max_rank, bool dag) {
  BinaryTree bt = binarize(d.tree);
  TinyTIndex ix = build_index(to_bcnf(dag ? build_dag(bt) : compress_repair(bt, max_rank)));
  std::ostringstream os;
  serialize_query(ix, d.texts, compile_query("/*", ix.labels), {}, os);
  if (os.str() != emit_xml(d.tree, d.texts)) return false;
  Document back = make_structure_tree(os.str());
  return back.tree.same_shape(d.tree) && back.texts == d.texts;
}

Outcome suite_self_index() {
  Tally t;
  int docs = 0;
  for (double scale : {0.05, 0.3, 1.0}) {
    for (unsigned k : {0u, 4u}) t.check(reconstructs(make_structure_tree(gen_xmark_like(scale, 11)), k, false), "xmark");
    t.check(reconstructs(make_structure_tree(gen_xmark_like(scale, 11)), 0, true), "xmark dag");
    docs += 3;
  }
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    TreeGenSpec spec{seed, 20000, 12, 0.3, 0.5};
    t.check(reconstructs(gen_tree(spec), 3, false), "gen_tree seed " + std::to_string(seed));
    ++docs;
  }
  t.check(reconstructs(make_structure_tree(kMiniDoc), 2, false), "mini document");
  t.check(reconstructs(make_structure_tree("<r a=\"1&amp;2\" b=\"x\"><s c=\"&lt;\">t&gt;</s>u<e/><s/></r>"), 2,
                       false),
          "attributes");
  docs += 2;
  std::mt19937_64 rng(5005);
  for (int i = 0; i < kCases; ++i, ++docs) {
    Document d = testing::random_document(rng, 1 + rng() % 200, 1 + rng() % 5, 0.3, 0.5);
    t.check(reconstructs(d, static_cast<unsigned>(rng() % 5), false), "random document " + std::to_string(i));
  }
  return t.done(std::to_string(docs) + " documents");
}

struct Corpus {
  Document doc;
  std::uint64_t xml_bytes = 0;
  TinyTIndex ix;
  std::uint64_t repair_rules = 0, dag_rules = 0, dag_plain_rules = 0, one_rule_nodes = 0;
  std::uint64_t depth = 0;
};

Corpus& corpus() {
  static Corpus c = [] {
    Corpus c;
    std::string xml = gen_xmark_like(kCorpusScale, 42);
    c.xml_bytes = xml.size();
    c.doc = make_structure_tree(xml);
    BinaryTree bt = binarize(c.doc.tree);
    SltGrammar rp = to_bcnf(compress_repair(bt, 4));
    SltGrammar dag = build_dag(bt);
    c.dag_plain_rules = dag.rules.size();
    c.dag_rules = to_bcnf(dag).rules.size();
    c.repair_rules = rp.rules.size();
    c.one_rule_nodes = bt.size();
    c.depth = stats(rp).depth;
    c.ix = build_index(rp);
    return c;
  }();
  return c;
}

Outcome compression_sanity() {
  Tally t;
  Corpus& c = corpus();
  std::ostringstream os;
  save_index(c.ix, os);
  const std::uint64_t index_bytes = os.str().size();
  const std::uint64_t st_bytes = structure_xml_bytes(c.doc.tree);
  t.check(c.repair_rules < c.dag_rules, "repair rules not below dag rules");
  t.check(c.dag_rules < c.one_rule_nodes, "dag rules not below tree nodes");
  t.check(index_bytes < kIndexToStructureRatio * static_cast<double>(st_bytes), "index too large");
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "xml=%llu B, repair bCNF rules=%llu < dag bCNF rules=%llu (dag %llu) < nodes=%llu, "
                "index=%llu B = %.2f%% of structure XML %llu B",
                (unsigned long long)c.xml_bytes, (unsigned long long)c.repair_rules,
                (unsigned long long)c.dag_rules, (unsigned long long)c.dag_plain_rules,
                (unsigned long long)c.one_rule_nodes, (unsigned long long)index_bytes,
                100.0 * static_cast<double>(index_bytes) / static_cast<double>(st_bytes),
                (unsigned long long)st_bytes);
  return t.done(buf);
}

Outcome performance_smoke() {
  Tally t;
  Corpus& c = corpus();
  std::string detail;
  for (const BenchmarkQuery& q : benchmark_queries()) {
    StAutomaton a = compile_query(q.xpath, c.ix.labels);
    CountStats off, f;
    std::uint64_t n0 = count(c.ix, a, {JumpMode::kOff, true}, &off);
    std::uint64_t n1 = count(c.ix, a, {JumpMode::kFRelevant, true}, &f);
    t.check(n0 == n1 && n0 > 0, q.name + " count");
    t.check(f.transitions <= off.transitions, q.name + " transitions");
    if (q.name == "Q01") {
      const std::uint64_t touched = f.evaluations + f.jumps + f.memo_hits;
      t.check(touched <= kQ01DepthFactor * c.depth, "Q01 rules touched");
      detail += "Q01 rules touched=" + std::to_string(touched) + " depth=" + std::to_string(c.depth) + "; ";
    }
    if (q.name == "Q07" || q.name == "Q13") {
      detail += q.name + " transitions " + std::to_string(f.transitions) + "/" + std::to_string(off.transitions) + "; ";
    }
  }
  return t.done(detail);
}

}  // namespace

int main() {
  Suite s;
  s.run("1.1", "DAG of the worked example", worked_dag);
  s.run("1.2", "bCNF of the rank-1 grammar is G1", worked_bcnf);
  s.run("1.3", "count on G1 examples", worked_count);
  s.run("1.4", "serialization example", worked_serialize);
  s.run("1.5", "space formulas", worked_space);
  s.run("2.1", "expand after compress is the identity", suite_compress);
  s.run("2.2", "count equals the naive oracle", suite_count);
  s.run("2.3", "serialize and materialize equal the naive oracle", suite_print);
  s.run("2.4", "navigation equals the naive oracle", suite_navigation);
  s.run("3.1", "bCNF shape and nonterminal bound", [] { return bounds.bcnf.done("from 2.1"); });
  s.run("3.2", "automaton states at most 2m", [] { return bounds.states.done("from 2.2"); });
  s.run("3.3", "behaviour computed at most once per key", [] { return bounds.memo.done("from 2.2"); });
  s.run("4", "root query reconstructs every document", suite_self_index);
  s.run("5", "compression on a 10 MB corpus", compression_sanity);
  s.run("6", "jumping and Q01 work", performance_smoke);
  std::printf("%s: %d failed\n", s.failures() ? "FAILED" : "PASSED", s.failures());
  return s.failures() ? 1 : 0;
}
