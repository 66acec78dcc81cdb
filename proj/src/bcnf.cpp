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

#include <deque>

#include "tinyt/error.hpp"
#include "tinyt/grammar.hpp"
#include "grammar_internal.hpp"

namespace tinyt {

namespace {

struct Span {
  std::uint32_t begin, end;
};

// Positions of the root's children in `rhs`.
std::vector<Span> root_children(const SltGrammar& g, const Pattern& rhs,
                                const std::vector<std::uint32_t>& sizes) {
  std::vector<Span> out;
  std::uint32_t c = 1;
  for (unsigned k = 0; k < g.rank_of(rhs[0]); ++k) {
    out.push_back({c, c + sizes[c]});
    c += sizes[c];
  }
  return out;
}

std::uint32_t count_params(const Pattern& rhs, Span s) {
  std::uint32_t n = 0;
  for (auto i = s.begin; i < s.end; ++i) n += rhs[i].is_param();
  return n;
}

class Splitter {
 public:
  explicit Splitter(SltGrammar& g) : g_(g) {}

  void run() {
    std::deque<NtId> work;
    for (NtId x = 0; x < g_.rules.size(); ++x) {
      if (x != g_.start) work.push_back(x);
    }
    while (!work.empty()) {
      NtId x = work.front();
      work.pop_front();
      split(x, work);
    }
  }

 private:
  NtId add_rule(Pattern rhs, std::uint32_t shift) {
    Rule r;
    for (Symbol& s : rhs) {
      if (s.is_param()) {
        s = Symbol::param(s.id() - shift);
        ++r.rank;
      }
    }
    r.rhs = std::move(rhs);
    g_.rules.push_back(std::move(r));
    return static_cast<NtId>(g_.rules.size() - 1);
  }

  void split(NtId x, std::deque<NtId>& work) {
    const Pattern rhs = g_.rules[x].rhs;
    if (non_param_nodes(rhs) <= 2) return;
    auto sizes = subtree_sizes(g_, rhs);
    auto kids = root_children(g_, rhs, sizes);
    std::vector<unsigned> busy;
    for (unsigned k = 0; k < kids.size(); ++k) {
      if (non_param_nodes(std::span(rhs).subspan(kids[k].begin, kids[k].end - kids[k].begin)) > 0) {
        busy.push_back(k);
      }
    }
    Span sub = kids[busy.front()];
    std::uint32_t before = count_params(rhs, {0, sub.begin});
    std::uint32_t inside = count_params(rhs, sub);
    Pattern out;
    if (busy.size() == 1) {
      // x -> X(.., t_k, ..) becomes X(.., N(params of t_k), ..) with N -> t_k.
      NtId n = add_rule(Pattern(rhs.begin() + sub.begin, rhs.begin() + sub.end), before);
      out.assign(rhs.begin(), rhs.begin() + sub.begin);
      out.push_back(Symbol::nonterminal(n));
      for (std::uint32_t j = 1; j <= inside; ++j) out.push_back(Symbol::param(before + j));
      out.insert(out.end(), rhs.begin() + sub.end, rhs.end());
      g_.rules[x].rhs = std::move(out);
      work.push_back(n);
      return;
    }
    // x -> C(y.., t_k, y..) with C the context of t_k.
    Pattern context(rhs.begin(), rhs.begin() + sub.begin);
    context.push_back(Symbol::param(before + 1));
    for (auto i = sub.end; i < rhs.size(); ++i) {
      Symbol s = rhs[i];
      context.push_back(s.is_param() ? Symbol::param(s.id() - inside + 1) : s);
    }
    NtId c = add_rule(std::move(context), 0);
    out.push_back(Symbol::nonterminal(c));
    for (std::uint32_t j = 1; j <= before; ++j) out.push_back(Symbol::param(j));
    out.insert(out.end(), rhs.begin() + sub.begin, rhs.begin() + sub.end);
    for (std::uint32_t j = before + inside + 1; j <= g_.rules[x].rank; ++j) {
      out.push_back(Symbol::param(j));
    }
    g_.rules[x].rhs = std::move(out);
    work.push_back(c);
    work.push_back(x);
  }

  SltGrammar& g_;
};

}  // namespace

SltGrammar to_bcnf(const SltGrammar& input) {
  validate(input);
  SltGrammar g = detail::compact(input);
  // Inline rules with a single non-parameter node.
  std::vector<char> inl(g.rules.size(), 0);
  bool any = false;
  for (NtId x = 0; x < g.rules.size(); ++x) {
    if (x != g.start && non_param_nodes(g.rules[x].rhs) <= 1) inl[x] = any = true;
  }
  if (any) {
    std::vector<std::vector<std::uint32_t>> sizes(g.rules.size());
    for (NtId x = 0; x < g.rules.size(); ++x) sizes[x] = subtree_sizes(g, g.rules[x].rhs);
    std::vector<Pattern> rewritten(g.rules.size());
    for (NtId x = 0; x < g.rules.size(); ++x) {
      if (!inl[x]) rewritten[x] = detail::inline_rules(g, x, inl, sizes);
    }
    for (NtId x = 0; x < g.rules.size(); ++x) {
      if (!inl[x]) g.rules[x].rhs = std::move(rewritten[x]);
    }
    g = detail::compact(std::move(g));
  }
  Splitter(g).run();
  return g;
}

bool is_bcnf(const SltGrammar& g) {
  for (NtId x = 0; x < g.rules.size(); ++x) {
    if (x != g.start && non_param_nodes(g.rules[x].rhs) != 2) return false;
  }
  return true;
}

}  // namespace tinyt
