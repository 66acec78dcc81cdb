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
#include <limits>
#include <set>
#include <unordered_map>

#include "tinyt/error.hpp"
#include "tinyt/grammar.hpp"
#include "grammar_internal.hpp"

namespace tinyt {

namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
constexpr std::uint32_t kDead = std::numeric_limits<std::uint32_t>::max();

// Mutable tree over terminal and nonterminal symbols. Child lists live in a
// shared pool; replacing a node's children appends a fresh list.
struct Arena {
  struct Node {
    std::uint32_t sym;
    std::uint32_t parent;
    std::uint32_t first;
    std::uint8_t nkids;
    std::uint8_t pidx;  // 1-based position below parent
  };
  std::vector<Node> nodes;
  std::vector<std::uint32_t> pool;

  std::uint32_t child(std::uint32_t n, unsigned k) const { return pool[nodes[n].first + k - 1]; }
};

class DigramCompressor {
 public:
  DigramCompressor(const BinaryTree& bt, unsigned max_rank) : max_rank_(max_rank) {
    g_.alphabet = bt.alphabet;
    g_.rules.emplace_back();  // start, filled in later
    sigma_ = static_cast<std::uint32_t>(g_.alphabet.size());
    arena_.nodes.resize(bt.size());
    arena_.pool.reserve(2 * bt.size());
    for (NodeIdx i = 0; i < bt.size(); ++i) {
      const auto& n = bt[i];
      auto& a = arena_.nodes[i];
      a.sym = Symbol::terminal(n.label).raw();
      a.parent = kNone;
      a.pidx = 0;
      a.first = static_cast<std::uint32_t>(arena_.pool.size());
      a.nkids = 0;
      for (NodeIdx c : {n.left, n.right}) {
        if (c == kNoNode) continue;
        arena_.pool.push_back(c);
        ++a.nkids;
      }
      if (a.nkids != g_.alphabet.rank(n.label)) {
        throw Error(ErrorCode::kInvalidGrammar, "binary tree does not match alphabet ranks");
      }
    }
    for (std::uint32_t i = 0; i < arena_.nodes.size(); ++i) {
      for (unsigned k = 1; k <= arena_.nodes[i].nkids; ++k) {
        auto c = arena_.child(i, k);
        arena_.nodes[c].parent = i;
        arena_.nodes[c].pidx = static_cast<std::uint8_t>(k);
      }
    }
  }

  SltGrammar run() {
    if (arena_.nodes.empty()) return std::move(g_);
    replace_digrams();
    g_.rules[0].rhs = extract_start();
    prune();
    share_start();
    return compact();
  }

 private:
  struct Entry {
    std::uint32_t count = 0;
    bool done = false;
    std::vector<std::uint32_t> occ;
  };

  unsigned rank(std::uint32_t raw) const {
    return g_.rank_of(raw_symbol(raw));
  }

  static Symbol raw_symbol(std::uint32_t raw) {
    return (raw >> 30) == 1 ? Symbol::nonterminal(raw & ((1u << 30) - 1))
                            : Symbol::terminal(raw & ((1u << 30) - 1));
  }

  std::uint64_t compact_id(std::uint32_t raw) const {
    Symbol s = raw_symbol(raw);
    std::uint64_t id = s.is_terminal() ? s.id() : sigma_ + s.id();
    if (id >= (1u << 28)) throw Error(ErrorCode::kIdOverflow, "too many symbols for digram keys");
    return id;
  }

  std::uint64_t key_of(std::uint32_t a, unsigned i, std::uint32_t b) const {
    return (compact_id(a) << 32) | (std::uint64_t{i} << 28) | compact_id(b);
  }

  bool eligible(std::uint32_t a, std::uint32_t b) const {
    return rank(a) - 1 + rank(b) <= max_rank_;
  }

  void update(std::uint32_t p, unsigned k, int delta) {
    std::uint32_t a = arena_.nodes[p].sym;
    std::uint32_t b = arena_.nodes[arena_.child(p, k)].sym;
    if (!eligible(a, b)) return;
    std::uint64_t key = key_of(a, k, b);
    Entry& e = digrams_[key];
    if (e.count >= 2) queue_.erase({-static_cast<std::int64_t>(e.count), key});
    e.count = static_cast<std::uint32_t>(static_cast<std::int64_t>(e.count) + delta);
    if (e.count >= 2 && !e.done) queue_.insert({-static_cast<std::int64_t>(e.count), key});
    if (delta > 0) e.occ.push_back(p);
  }

  NtId make_rule(std::uint32_t a, unsigned i, std::uint32_t b) {
    Rule r;
    std::uint32_t next = 1;
    r.rhs.push_back(raw_symbol(a));
    for (unsigned k = 1; k <= rank(a); ++k) {
      if (k == i) {
        r.rhs.push_back(raw_symbol(b));
        for (unsigned j = 0; j < rank(b); ++j) r.rhs.push_back(Symbol::param(next++));
      } else {
        r.rhs.push_back(Symbol::param(next++));
      }
    }
    r.rank = next - 1;
    g_.rules.push_back(std::move(r));
    return static_cast<NtId>(g_.rules.size() - 1);
  }

  void replace(std::uint32_t p, unsigned i, std::uint32_t nt_raw) {
    auto& nodes = arena_.nodes;
    std::uint32_t c = arena_.child(p, i);
    std::uint32_t pp = nodes[p].parent;
    if (pp != kNone) update(pp, nodes[p].pidx, -1);
    for (unsigned k = 1; k <= nodes[p].nkids; ++k) update(p, k, -1);
    for (unsigned k = 1; k <= nodes[c].nkids; ++k) update(c, k, -1);
    auto first = static_cast<std::uint32_t>(arena_.pool.size());
    for (unsigned k = 1; k <= nodes[p].nkids; ++k) {
      if (k == i) {
        for (unsigned j = 1; j <= nodes[c].nkids; ++j) {
          std::uint32_t x = arena_.child(c, j);
          arena_.pool.push_back(x);
        }
      } else {
        std::uint32_t x = arena_.child(p, k);
        arena_.pool.push_back(x);
      }
    }
    nodes[p].nkids = static_cast<std::uint8_t>(arena_.pool.size() - first);
    nodes[p].first = first;
    nodes[p].sym = nt_raw;
    nodes[c].sym = kDead;
    for (unsigned k = 1; k <= nodes[p].nkids; ++k) {
      std::uint32_t x = arena_.child(p, k);
      nodes[x].parent = p;
      nodes[x].pidx = static_cast<std::uint8_t>(k);
    }
    if (pp != kNone) update(pp, nodes[p].pidx, +1);
    for (unsigned k = 1; k <= nodes[p].nkids; ++k) update(p, k, +1);
  }

  void replace_digrams() {
    for (std::uint32_t p = 0; p < arena_.nodes.size(); ++p) {
      for (unsigned k = 1; k <= arena_.nodes[p].nkids; ++k) update(p, k, +1);
    }
    std::unordered_map<std::uint64_t, NtId> nt_of;
    while (!queue_.empty()) {
      std::uint64_t key = queue_.begin()->second;
      queue_.erase(queue_.begin());
      Entry& e = digrams_.at(key);
      e.done = true;
      // Recover the digram's symbols from any valid occurrence.
      std::vector<std::uint32_t> occ = std::move(e.occ);
      e.occ.clear();
      std::uint32_t a = kDead, b = kDead;
      unsigned i = static_cast<unsigned>((key >> 28) & 0xF);
      for (std::uint32_t p : occ) {
        const auto& n = arena_.nodes[p];
        if (n.sym == kDead || n.nkids < i) continue;
        std::uint32_t bb = arena_.nodes[arena_.child(p, i)].sym;
        if (key_of(n.sym, i, bb) == key) {
          a = n.sym;
          b = bb;
          break;
        }
      }
      if (a == kDead) continue;
      auto [it, fresh] = nt_of.try_emplace(key, 0);
      if (fresh) it->second = make_rule(a, i, b);
      std::uint32_t nt_raw = Symbol::nonterminal(it->second).raw();
      for (std::uint32_t p : occ) {
        const auto& n = arena_.nodes[p];
        if (n.sym != a || n.nkids < i) continue;
        if (arena_.nodes[arena_.child(p, i)].sym != b) continue;
        replace(p, i, nt_raw);
      }
      Entry& after = digrams_.at(key);
      after.done = false;
      if (after.count >= 2) queue_.insert({-static_cast<std::int64_t>(after.count), key});
    }
  }

  Pattern extract_start() const {
    Pattern out;
    std::vector<std::uint32_t> stack{0};
    while (!stack.empty()) {
      std::uint32_t n = stack.back();
      stack.pop_back();
      out.push_back(raw_symbol(arena_.nodes[n].sym));
      for (unsigned k = arena_.nodes[n].nkids; k >= 1; --k) stack.push_back(arena_.child(n, k));
    }
    return out;
  }

  std::vector<char> live_rules() const { return detail::live_rules(g_); }

  // Inlines rules that do not pay for themselves until a fixpoint.
  void prune() {
    for (;;) {
      std::vector<char> live = live_rules();
      std::vector<std::uint64_t> refs(g_.rules.size(), 0);
      for (NtId x = 0; x < g_.rules.size(); ++x) {
        if (!live[x]) continue;
        for (Symbol s : g_.rules[x].rhs) {
          if (s.is_nonterminal()) ++refs[s.id()];
        }
      }
      std::vector<char> inl(g_.rules.size(), 0);
      bool any = false;
      for (NtId x = 1; x < g_.rules.size(); ++x) {
        if (!live[x]) continue;
        auto k = static_cast<std::int64_t>(refs[x]);
        auto e = static_cast<std::int64_t>(g_.rules[x].rhs.size()) - 1;
        auto r = static_cast<std::int64_t>(g_.rules[x].rank);
        if (k <= 1 || k * (e - r) - e < 0) {
          inl[x] = 1;
          any = true;
        }
      }
      if (!any) return;
      std::vector<std::vector<std::uint32_t>> sizes(g_.rules.size());
      for (NtId x = 0; x < g_.rules.size(); ++x) {
        if (live[x]) sizes[x] = subtree_sizes(g_, g_.rules[x].rhs);
      }
      std::vector<Pattern> rewritten(g_.rules.size());
      for (NtId x = 0; x < g_.rules.size(); ++x) {
        if (live[x] && !inl[x]) rewritten[x] = detail::inline_rules(g_, x, inl, sizes);
      }
      for (NtId x = 0; x < g_.rules.size(); ++x) {
        if (live[x] && !inl[x]) {
          g_.rules[x].rhs = std::move(rewritten[x]);
        } else {
          g_.rules[x].rhs.clear();
          g_.rules[x].rhs.shrink_to_fit();
        }
      }
    }
  }

  struct VecHash {
    std::size_t operator()(const std::vector<std::uint32_t>& v) const {
      std::uint64_t h = 0xCBF29CE484222325ull;
      for (auto x : v) h = (h ^ x) * 0x100000001B3ull;
      return static_cast<std::size_t>(h ^ (h >> 31));
    }
  };

  // Shares repeated subtrees of the start rule as rank-0 rules.
  void share_start() {
    const Pattern& rhs = g_.rules[0].rhs;
    std::vector<std::uint32_t> cls(rhs.size());
    std::vector<std::vector<std::uint32_t>> classes;
    std::unordered_map<std::vector<std::uint32_t>, std::uint32_t, VecHash> ids;
    std::vector<std::uint32_t> stack;
    for (std::size_t i = rhs.size(); i-- > 0;) {
      unsigned r = g_.rank_of(rhs[i]);
      std::vector<std::uint32_t> key{rhs[i].raw()};
      for (unsigned k = 0; k < r; ++k) {
        key.push_back(stack.back());
        stack.pop_back();
      }
      auto [it, fresh] = ids.try_emplace(key, static_cast<std::uint32_t>(classes.size()));
      if (fresh) classes.push_back(std::move(key));
      cls[i] = it->second;
      stack.push_back(it->second);
    }
    std::vector<std::uint32_t> indegree(classes.size(), 0);
    for (const auto& c : classes) {
      for (std::size_t k = 1; k < c.size(); ++k) ++indegree[c[k]];
    }
    const std::uint32_t root = cls[0];
    std::vector<std::uint32_t> nt_of(classes.size(), kNone);
    for (std::uint32_t c = 0; c < classes.size(); ++c) {
      if (c == root || indegree[c] < 2) continue;
      Symbol s = raw_symbol(classes[c][0]);
      if (classes[c].size() == 1 && (s.is_nonterminal() || s.id() == kNullLabel)) continue;
      nt_of[c] = static_cast<std::uint32_t>(g_.rules.size());
      g_.rules.emplace_back();
    }
    auto write_rhs = [&](std::uint32_t top, Pattern& out) {
      std::vector<std::uint32_t> work{top};
      bool first = true;
      while (!work.empty()) {
        std::uint32_t c = work.back();
        work.pop_back();
        if (!first && nt_of[c] != kNone) {
          out.push_back(Symbol::nonterminal(nt_of[c]));
          continue;
        }
        first = false;
        out.push_back(raw_symbol(classes[c][0]));
        for (std::size_t k = classes[c].size(); k-- > 1;) work.push_back(classes[c][k]);
      }
    };
    Pattern start;
    write_rhs(root, start);
    for (std::uint32_t c = 0; c < classes.size(); ++c) {
      if (nt_of[c] != kNone) write_rhs(c, g_.rules[nt_of[c]].rhs);
    }
    g_.rules[0].rhs = std::move(start);
  }

  SltGrammar compact() { return detail::compact(std::move(g_)); }

  unsigned max_rank_;
  std::uint32_t sigma_ = 0;
  SltGrammar g_;
  Arena arena_;
  std::unordered_map<std::uint64_t, Entry> digrams_;
  std::set<std::pair<std::int64_t, std::uint64_t>> queue_;
};

}  // namespace

SltGrammar compress_repair(const BinaryTree& tree, unsigned max_rank) {
  if (max_rank > 15) throw Error(ErrorCode::kRankOverflow, "max_rank above 15");
  SltGrammar g = DigramCompressor(tree, max_rank).run();
  if (tree.nodes.empty()) {
    g.rules.resize(1);
    return g;
  }
  SltGrammar dag = build_dag(tree);
  if (stats(dag).size < stats(g).size) return dag;
  return g;
}

}  // namespace tinyt
