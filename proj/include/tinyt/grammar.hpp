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

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tinyt/xml_model.hpp"

namespace tinyt {

using NtId = std::uint32_t;

// Ranked terminal alphabet. Labels of a first-child/next-sibling tree all
// have rank 2 except the null leaf, which has rank 0.
struct Alphabet {
  LabelTable labels;
  std::vector<std::uint8_t> ranks;

  static Alphabet fcns(const LabelTable& labels);

  std::size_t size() const { return ranks.size(); }
  unsigned rank(LabelId id) const { return ranks.at(id); }
  // Interns `name` with the given rank; throws InvalidGrammar when the
  // label already exists with a different rank.
  LabelId add(std::string_view name, unsigned rank);
};

// A grammar symbol packed into 32 bits: 2 kind bits and a 30-bit id.
// Parameters are numbered from 1.
class Symbol {
 public:
  enum class Kind : std::uint8_t { kTerminal = 0, kNonterminal = 1, kParam = 2 };

  constexpr Symbol() = default;
  static constexpr Symbol terminal(LabelId id) { return Symbol(Kind::kTerminal, id); }
  static constexpr Symbol nonterminal(NtId id) { return Symbol(Kind::kNonterminal, id); }
  static constexpr Symbol param(std::uint32_t index) { return Symbol(Kind::kParam, index); }

  constexpr Kind kind() const { return static_cast<Kind>(raw_ >> 30); }
  constexpr std::uint32_t id() const { return raw_ & kIdMask; }
  constexpr std::uint32_t raw() const { return raw_; }
  constexpr bool is_terminal() const { return kind() == Kind::kTerminal; }
  constexpr bool is_nonterminal() const { return kind() == Kind::kNonterminal; }
  constexpr bool is_param() const { return kind() == Kind::kParam; }

  friend constexpr bool operator==(Symbol a, Symbol b) { return a.raw_ == b.raw_; }
  friend constexpr bool operator<(Symbol a, Symbol b) { return a.raw_ < b.raw_; }

 private:
  static constexpr std::uint32_t kIdMask = (1u << 30) - 1;
  constexpr Symbol(Kind kind, std::uint32_t id)
      : raw_((static_cast<std::uint32_t>(kind) << 30) | (id & kIdMask)) {}
  std::uint32_t raw_ = 0;
};

// Ranked binary tree in pre-order (nodes[0] is the root). Every node has
// zero children or exactly `alphabet.rank(label)` of them.
struct BinaryTree {
  struct Node {
    LabelId label = 0;
    NodeIdx left = kNoNode;
    NodeIdx right = kNoNode;
  };

  std::vector<Node> nodes;
  Alphabet alphabet;

  std::size_t size() const { return nodes.size(); }
  std::size_t edges() const { return nodes.empty() ? 0 : nodes.size() - 1; }
  const Node& operator[](NodeIdx i) const { return nodes[i]; }

  friend bool operator==(const BinaryTree& a, const BinaryTree& b);
};

// A pattern tree in pre-order (Polish) notation; arities follow from
// symbol ranks.
using Pattern = std::vector<Symbol>;

struct Rule {
  unsigned rank = 0;
  Pattern rhs;
};

struct SltGrammar {
  Alphabet alphabet;
  std::vector<Rule> rules;
  NtId start = 0;
  // Optional display names, indexed like `rules`; empty when unnamed.
  std::vector<std::string> names;

  unsigned rank_of(Symbol s) const {
    switch (s.kind()) {
      case Symbol::Kind::kTerminal: return alphabet.rank(s.id());
      case Symbol::Kind::kNonterminal: return rules[s.id()].rank;
      case Symbol::Kind::kParam: return 0;
    }
    return 0;
  }
  std::string name_of(NtId id) const;
};

struct GrammarStats {
  std::uint64_t size = 0;
  std::uint64_t num_rules = 0;
  unsigned rank = 0;
  std::uint64_t depth = 0;
  std::uint64_t start_rhs_size = 0;
};

BinaryTree binarize(const StructureTree& tree);
StructureTree unbinarize(const BinaryTree& tree);

SltGrammar one_rule_grammar(const BinaryTree& tree);
SltGrammar build_dag(const BinaryTree& tree);
SltGrammar compress_repair(const BinaryTree& tree, unsigned max_rank);

BinaryTree expand(const SltGrammar& g);
// The pattern tree t_X over terminals and parameters.
Pattern pattern_tree(const SltGrammar& g, NtId nt);

SltGrammar to_bcnf(const SltGrammar& g);
bool is_bcnf(const SltGrammar& g);

GrammarStats stats(const SltGrammar& g);

// Throws InvalidGrammar for malformed rules (arity, parameter order, bad
// ids) and CycleDetected when the rule graph is not acyclic.
void validate(const SltGrammar& g);

// Number of nodes in each subtree of a pre-order pattern.
std::vector<std::uint32_t> subtree_sizes(const SltGrammar& g, std::span<const Symbol> rhs);
std::size_t non_param_nodes(std::span<const Symbol> rhs);

// Removes rules unreachable from the start rule and renumbers the rest in
// order of first reference (pre-order over start, then over each rule).
SltGrammar canonicalize(const SltGrammar& g);

// Textual form, one production per line: "S -> A(A(a(b,c)))",
// "A(y1) -> f(y1,a(c,c))". The start rule comes first.
std::string dump(const SltGrammar& g);
// Inverse of dump. Terminal ranks are inferred from usage; names that have
// a production are nonterminals.
SltGrammar parse_grammar(std::string_view text);

std::string to_term(const BinaryTree& tree);
std::string pattern_to_string(const SltGrammar& g, std::span<const Symbol> rhs);

}  // namespace tinyt
