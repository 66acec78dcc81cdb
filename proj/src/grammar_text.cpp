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

#include <cctype>
#include <unordered_map>

#include "tinyt/error.hpp"
#include "tinyt/grammar.hpp"

namespace tinyt {

namespace {

std::string symbol_name(const SltGrammar& g, Symbol s) {
  switch (s.kind()) {
    case Symbol::Kind::kTerminal: return g.alphabet.labels.name(s.id());
    case Symbol::Kind::kNonterminal: return g.name_of(s.id());
    case Symbol::Kind::kParam: return "y" + std::to_string(s.id());
  }
  return "?";
}

}  // namespace

std::string pattern_to_string(const SltGrammar& g, std::span<const Symbol> rhs) {
  struct Open {
    unsigned remaining;
    bool first;
  };
  std::string out;
  std::vector<Open> stack;
  for (Symbol s : rhs) {
    if (!stack.empty()) {
      if (!stack.back().first) out += ',';
      stack.back().first = false;
      --stack.back().remaining;
    }
    out += symbol_name(g, s);
    if (unsigned r = g.rank_of(s); r > 0) {
      out += '(';
      stack.push_back({r, true});
    }
    while (!stack.empty() && stack.back().remaining == 0) {
      out += ')';
      stack.pop_back();
    }
  }
  return out;
}

std::string dump(const SltGrammar& g) {
  std::string out;
  auto line = [&](NtId nt) {
    const Rule& r = g.rules[nt];
    out += g.name_of(nt);
    if (r.rank > 0) {
      out += '(';
      for (unsigned i = 1; i <= r.rank; ++i) {
        if (i > 1) out += ',';
        out += "y" + std::to_string(i);
      }
      out += ')';
    }
    out += " -> ";
    out += pattern_to_string(g, r.rhs);
    out += '\n';
  };
  line(g.start);
  for (NtId nt = 0; nt < g.rules.size(); ++nt) {
    if (nt != g.start) line(nt);
  }
  return out;
}

namespace {

class GrammarParser {
 public:
  explicit GrammarParser(std::string_view text) : text_(text) {}

  SltGrammar parse() {
    std::vector<std::string_view> lines;
    std::size_t begin = 0;
    while (begin <= text_.size()) {
      auto end = text_.find('\n', begin);
      if (end == std::string_view::npos) end = text_.size();
      auto l = text_.substr(begin, end - begin);
      if (l.find_first_not_of(" \t\r") != std::string_view::npos) lines.push_back(l);
      begin = end + 1;
    }
    if (lines.empty()) fail(0, "empty grammar");
    struct Lhs {
      std::string name;
      unsigned rank;
      std::string_view rhs;
    };
    std::vector<Lhs> heads;
    for (auto l : lines) {
      auto arrow = l.find("->");
      std::size_t arrow_len = 2;
      auto unicode = l.find("\xE2\x86\x92");
      if (unicode != std::string_view::npos && (arrow == std::string_view::npos || unicode < arrow)) {
        arrow = unicode;
        arrow_len = 3;
      }
      if (arrow == std::string_view::npos) fail(0, "missing '->' in: " + std::string(l));
      line_ = l.substr(0, arrow);
      pos_ = 0;
      skip();
      Lhs head;
      head.name = std::string(ident());
      head.rank = 0;
      skip();
      if (pos_ < line_.size() && line_[pos_] == '(') {
        ++pos_;
        for (;;) {
          skip();
          auto p = ident();
          if (p != "y" + std::to_string(head.rank + 1)) fail(pos_, "expected parameter y" + std::to_string(head.rank + 1));
          ++head.rank;
          skip();
          if (pos_ < line_.size() && line_[pos_] == ',') { ++pos_; continue; }
          if (pos_ < line_.size() && line_[pos_] == ')') { ++pos_; break; }
          fail(pos_, "expected ',' or ')'");
        }
      }
      head.rhs = l.substr(arrow + arrow_len);
      if (nts_.count(head.name)) fail(0, "duplicate production for " + head.name);
      nts_[head.name] = static_cast<NtId>(heads.size());
      heads.push_back(head);
    }
    g_.alphabet.ranks.assign(g_.alphabet.labels.size(), 2);
    g_.alphabet.ranks[kNullLabel] = 0;
    g_.rules.resize(heads.size());
    g_.names.resize(heads.size());
    for (NtId i = 0; i < heads.size(); ++i) {
      g_.rules[i].rank = heads[i].rank;
      g_.names[i] = heads[i].name;
    }
    auto s = nts_.find("S");
    g_.start = s == nts_.end() ? 0 : s->second;
    for (NtId i = 0; i < heads.size(); ++i) {
      line_ = heads[i].rhs;
      pos_ = 0;
      current_rank_ = heads[i].rank;
      term(g_.rules[i].rhs);
      skip();
      if (pos_ != line_.size()) fail(pos_, "trailing input");
    }
    if (g_.names[g_.start] == "S") g_.names[g_.start].clear();
    validate(g_);
    return std::move(g_);
  }

 private:
  [[noreturn]] void fail(std::size_t pos, const std::string& what) {
    throw ParseError(ErrorCode::kSyntaxError, pos, "grammar: " + what);
  }

  void skip() {
    while (pos_ < line_.size() && std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
  }

  std::string_view ident() {
    std::size_t b = pos_;
    while (pos_ < line_.size()) {
      char c = line_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '@' || c == '#' ||
          c == '.' || c == '-' || c == ':') {
        ++pos_;
      } else {
        break;
      }
    }
    if (b == pos_) fail(pos_, "expected identifier");
    return line_.substr(b, pos_ - b);
  }

  void term(Pattern& out) {
    skip();
    std::string name(ident());
    std::size_t at = out.size();
    out.emplace_back();
    unsigned kids = 0;
    skip();
    if (pos_ < line_.size() && line_[pos_] == '(') {
      ++pos_;
      for (;;) {
        term(out);
        ++kids;
        skip();
        if (pos_ < line_.size() && line_[pos_] == ',') { ++pos_; continue; }
        if (pos_ < line_.size() && line_[pos_] == ')') { ++pos_; break; }
        fail(pos_, "expected ',' or ')'");
      }
    }
    if (name.size() > 1 && name[0] == 'y' &&
        name.find_first_not_of("0123456789", 1) == std::string::npos) {
      unsigned idx = static_cast<unsigned>(std::stoul(name.substr(1)));
      if (idx >= 1 && idx <= current_rank_) {
        if (kids) fail(pos_, "parameter with children");
        out[at] = Symbol::param(idx);
        return;
      }
    }
    if (auto it = nts_.find(name); it != nts_.end()) {
      out[at] = Symbol::nonterminal(it->second);
      if (kids != g_.rules[it->second].rank) fail(pos_, "wrong argument count for " + name);
      return;
    }
    out[at] = Symbol::terminal(g_.alphabet.add(name, kids));
  }

  std::string_view text_;
  std::string_view line_;
  std::size_t pos_ = 0;
  unsigned current_rank_ = 0;
  std::unordered_map<std::string, NtId> nts_;
  SltGrammar g_;
};

}  // namespace

SltGrammar parse_grammar(std::string_view text) { return GrammarParser(text).parse(); }

SltGrammar canonicalize(const SltGrammar& g) {
  constexpr NtId kUnset = 0xFFFFFFFFu;
  std::vector<NtId> new_id(g.rules.size(), kUnset);
  std::vector<NtId> order{g.start};
  new_id[g.start] = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (Symbol s : g.rules[order[i]].rhs) {
      if (s.is_nonterminal() && new_id[s.id()] == kUnset) {
        new_id[s.id()] = static_cast<NtId>(order.size());
        order.push_back(s.id());
      }
    }
  }
  SltGrammar out;
  out.alphabet = g.alphabet;
  out.start = 0;
  out.rules.resize(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    Rule r = g.rules[order[i]];
    for (Symbol& s : r.rhs) {
      if (s.is_nonterminal()) s = Symbol::nonterminal(new_id[s.id()]);
    }
    out.rules[i] = std::move(r);
  }
  return out;
}

std::string to_term(const BinaryTree& tree) {
  SltGrammar g = one_rule_grammar(tree);
  return pattern_to_string(g, g.rules[0].rhs);
}

}  // namespace tinyt
