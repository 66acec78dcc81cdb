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
#include <bit>
#include <cstdio>

#include "tinyt/error.hpp"
#include "tinyt/index.hpp"
#include "grammar_internal.hpp"

namespace tinyt {

namespace {

struct Counts {
  std::uint64_t elems = 0;
  std::uint64_t texts = 0;
};

std::uint32_t checked(std::uint64_t v) {
  if (v > 0xFFFFFFFFull) throw Error(ErrorCode::kIdOverflow, "node count exceeds 32 bits");
  return static_cast<std::uint32_t>(v);
}

unsigned ceil_log2(std::uint64_t x) {
  return x <= 1 ? 0 : static_cast<unsigned>(std::bit_width(x - 1));
}

// Children-first order of the nonterminals reachable from the start rule.
std::vector<NtId> rules_bottom_up(const SltGrammar& g) {
  std::vector<char> state(g.rules.size(), 0);
  std::vector<NtId> order;
  std::vector<std::pair<NtId, std::size_t>> stack{{g.start, 0}};
  state[g.start] = 1;
  while (!stack.empty()) {
    auto& [x, pos] = stack.back();
    const Pattern& rhs = g.rules[x].rhs;
    if (pos == rhs.size()) {
      if (x != g.start) order.push_back(x);
      stack.pop_back();
      continue;
    }
    Symbol s = rhs[pos++];
    if (s.is_nonterminal() && !state[s.id()]) {
      state[s.id()] = 1;
      stack.push_back({s.id(), 0});
    }
  }
  return order;
}

}  // namespace

std::string TinyTIndex::symbol_name(SymId s) const {
  if (!is_nt(s)) return labels.name(s);
  return "N" + std::to_string(nt_of(s));
}

TinyTIndex build_index(const SltGrammar& g) {
  validate(g);
  if (!is_bcnf(g)) throw Error(ErrorCode::kInvalidGrammar, "grammar is not in bCNF");
  TinyTIndex ix;
  ix.labels = g.alphabet.labels;
  const auto T = static_cast<std::uint32_t>(g.alphabet.size());
  for (std::uint32_t t = 0; t < T; ++t) {
    if (g.alphabet.rank(t) > kMaxRank) throw Error(ErrorCode::kRankOverflow, "terminal rank above 15");
    ix.term_ranks.push_back(g.alphabet.ranks[t]);
  }
  std::vector<NtId> order = rules_bottom_up(g);
  if (std::uint64_t{T} + order.size() >= kMaxSymbols) {
    throw Error(ErrorCode::kIdOverflow, "more than 2^28 symbols");
  }
  std::vector<SymId> sym(g.rules.size(), 0);
  for (std::size_t n = 0; n < order.size(); ++n) sym[order[n]] = T + static_cast<SymId>(n);
  auto sym_of = [&](Symbol s) { return s.is_terminal() ? s.id() : sym[s.id()]; };

  const std::uint32_t N = static_cast<std::uint32_t>(order.size());
  ix.jump_stride = (T + 63) / 64;
  ix.jump.assign(std::size_t{N} * ix.jump_stride, 0);
  ix.spine.assign((N + 63) / 64, 0);
  ix.map_offset.push_back(0);
  // Segment counts and the spinal parameter (0 if none) per nonterminal.
  std::vector<std::vector<Counts>> seg(N);
  std::vector<unsigned> spinal(N, 0);
  auto segments_of = [&](SymId s) -> std::vector<Counts> {
    if (s >= T) return seg[s - T];
    std::vector<Counts> out(ix.term_ranks[s] + 1u);
    out[0].elems = ix.labels.is_element(s);
    out[0].texts = LabelTable::is_text_slot(s);
    return out;
  };
  auto spinal_of = [&](SymId s) -> unsigned {
    if (s >= T) return spinal[s - T];
    return ix.term_ranks[s] >= 2 ? 2 : 0;
  };

  for (std::uint32_t n = 0; n < N; ++n) {
    const Rule& rule = g.rules[order[n]];
    if (rule.rank > kMaxRank) throw Error(ErrorCode::kRankOverflow, "nonterminal rank above 15");
    const Pattern& rhs = rule.rhs;
    // rhs = X(.., Y(..), ..): locate Y and its slot below X.
    unsigned slot = 0;
    std::size_t ypos = 0;
    for (std::size_t p = 1, k = 1; p < rhs.size(); ++p, ++k) {
      if (!rhs[p].is_param()) {
        slot = static_cast<unsigned>(k);
        ypos = p;
        break;
      }
    }
    SymId x = sym_of(rhs[0]);
    SymId y = sym_of(rhs[ypos]);
    unsigned rx = ix.rank(x), ry = ix.rank(y);
    ix.rules.push_back(RuleWord::encode(x, slot, y, rule.rank));

    auto row = ix.jump.begin() + std::size_t{n} * ix.jump_stride;
    for (SymId s : {x, y}) {
      if (s >= T) {
        auto src = ix.jump.begin() + std::size_t{s - T} * ix.jump_stride;
        for (std::uint32_t w = 0; w < ix.jump_stride; ++w) row[w] |= src[w];
      } else {
        row[s / 64] |= std::uint64_t{1} << (s % 64);
      }
    }

    std::vector<Counts> sx = segments_of(x), sy = segments_of(y);
    std::vector<Counts> out(sx.begin(), sx.begin() + slot);
    out.back().elems += sy[0].elems;
    out.back().texts += sy[0].texts;
    for (unsigned j = 1; j <= ry; ++j) out.push_back(sy[j]);
    out.back().elems += sx[slot].elems;
    out.back().texts += sx[slot].texts;
    for (unsigned j = slot + 1; j <= rx; ++j) out.push_back(sx[j]);
    for (const Counts& c : out) {
      ix.pr_map.push_back(checked(c.elems));
      ix.text_map.push_back(checked(c.texts));
    }
    ix.map_offset.push_back(static_cast<std::uint32_t>(ix.pr_map.size()));
    seg[n] = std::move(out);

    unsigned sp = spinal_of(x);
    if (sp != 0 && sp != slot) {
      spinal[n] = sp < slot ? sp : sp + ry - 1;
    } else if (sp == slot) {
      unsigned sy_sp = spinal_of(y);
      spinal[n] = sy_sp == 0 ? 0 : slot - 1 + sy_sp;
    }
    if (rule.rank > 0 && spinal[n] == rule.rank) ix.spine[n / 64] |= std::uint64_t{1} << (n % 64);
  }

  const Pattern& start = g.rules[g.start].rhs;
  std::vector<std::uint32_t> sizes = subtree_sizes(g, start);
  std::vector<std::uint64_t> pe(start.size() + 1, 0), pt(start.size() + 1, 0);
  for (std::size_t p = 0; p < start.size(); ++p) {
    SymId s = sym_of(start[p]);
    ix.start_tags.push_back(s);
    ix.find_close.push_back(sizes[p]);
    Counts c;
    if (s >= T) {
      for (const Counts& k : seg[s - T]) {
        c.elems += k.elems;
        c.texts += k.texts;
      }
    } else {
      c = segments_of(s)[0];
    }
    pe[p + 1] = pe[p] + c.elems;
    pt[p + 1] = pt[p] + c.texts;
  }
  for (std::size_t p = 0; p < start.size(); ++p) {
    ix.sskip.push_back(checked(pe[p + sizes[p]] - pe[p]));
    ix.text_sskip.push_back(checked(pt[p + sizes[p]] - pt[p]));
  }
  return ix;
}

SltGrammar index_grammar(const TinyTIndex& ix) {
  SltGrammar g;
  g.alphabet.labels = ix.labels;
  g.alphabet.ranks = ix.term_ranks;
  const std::uint32_t T = ix.num_terminals();
  auto symbol = [&](SymId s) {
    return s >= T ? Symbol::nonterminal(s - T + 1) : Symbol::terminal(s);
  };
  g.rules.resize(ix.num_nonterminals() + 1);
  g.start = 0;
  for (SymId s : ix.start_tags) g.rules[0].rhs.push_back(symbol(s));
  for (std::uint32_t n = 0; n < ix.num_nonterminals(); ++n) {
    Rule& r = g.rules[n + 1];
    r.rank = RuleWord::rank(ix.rules[n]);
    SymId x = ix.rule_x(n), y = ix.rule_y(n);
    unsigned slot = ix.rule_slot(n);
    std::uint32_t next = 1;
    r.rhs.push_back(symbol(x));
    for (unsigned k = 1; k <= ix.rank(x); ++k) {
      if (k == slot) {
        r.rhs.push_back(symbol(y));
        for (unsigned j = 0; j < ix.rank(y); ++j) r.rhs.push_back(Symbol::param(next++));
      } else {
        r.rhs.push_back(Symbol::param(next++));
      }
    }
  }
  return g;
}

IndexShape shape_of(const TinyTIndex& ix) {
  IndexShape s;
  s.rules = ix.num_nonterminals();
  s.labels = ix.num_terminals();
  s.start_nodes = ix.start_tags.size();
  s.map_entries = ix.pr_map.size();
  return s;
}

std::vector<SizeRow> index_size_report(const IndexShape& s) {
  std::vector<SizeRow> rows{
      {"CNF", s.rules * 64},
      {"STag", s.start_nodes * ceil_log2(s.rules + s.labels)},
      {"ex", s.start_nodes * ceil_log2(s.start_nodes)},
      {"jump", s.rules * s.labels},
      {"prMap", s.map_entries * 32},
      {"textMap", s.map_entries * 32},
      {"SSkip", s.start_nodes * 32},
      {"textSSkip", s.start_nodes * 32},
  };
  std::uint64_t total = 0;
  for (const auto& r : rows) total += r.bits;
  rows.push_back({"total", total});
  return rows;
}

std::string format_size_report(const std::vector<SizeRow>& rows) {
  std::string out = "component        KB\n";
  char line[64];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-12s %9.1f\n", r.component.c_str(), r.kb());
    out += line;
  }
  return out;
}

}  // namespace tinyt
