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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tinyt/grammar.hpp"
#include "tinyt/xml_model.hpp"

namespace tinyt {

// Symbol ids of the index: terminals are 0..T-1 (equal to their LabelId),
// nonterminal n is T+n. Nonterminals are numbered so that every rule only
// references smaller ones.
using SymId = std::uint32_t;

inline constexpr unsigned kMaxRank = 15;
inline constexpr std::uint32_t kMaxSymbols = 1u << 28;

// 64-bit production word: Y in bits 0-27, the 1-based argument slot i in
// bits 28-31, X in bits 32-59 and the rank of the defined nonterminal in
// bits 60-63.
struct RuleWord {
  static constexpr std::uint64_t encode(SymId x, unsigned i, SymId y, unsigned rank) {
    return std::uint64_t{y} | (std::uint64_t{i} << 28) | (std::uint64_t{x} << 32) |
           (std::uint64_t{rank} << 60);
  }
  static constexpr SymId y(std::uint64_t w) { return static_cast<SymId>(w & 0x0FFFFFFF); }
  static constexpr unsigned slot(std::uint64_t w) { return static_cast<unsigned>((w >> 28) & 0xF); }
  static constexpr SymId x(std::uint64_t w) { return static_cast<SymId>((w >> 32) & 0x0FFFFFFF); }
  static constexpr unsigned rank(std::uint64_t w) { return static_cast<unsigned>(w >> 60); }
};

struct TinyTIndex {
  LabelTable labels;
  std::vector<std::uint8_t> term_ranks;  // one per terminal label
  std::vector<std::uint64_t> rules;      // one RuleWord per nonterminal

  // Start right-hand side in pre-order, and the node count of each subtree.
  std::vector<SymId> start_tags;
  std::vector<std::uint32_t> find_close;

  // Jump table: one row of `jump_stride` words per nonterminal, one bit per
  // terminal label.
  std::uint32_t jump_stride = 0;
  std::vector<std::uint64_t> jump;

  // Per nonterminal n, entries map_offset[n] .. map_offset[n+1]-1 hold the
  // element (pr_map) and text slot (text_map) counts of the rank(n)+1
  // segments of its pattern tree between consecutive parameters.
  std::vector<std::uint32_t> map_offset;
  std::vector<std::uint32_t> pr_map;
  std::vector<std::uint32_t> text_map;

  // Per start-rhs node: elements and text slots in its expanded subtree.
  std::vector<std::uint32_t> sskip;
  std::vector<std::uint32_t> text_sskip;

  // Per nonterminal: its last parameter sits at the end of the right spine.
  std::vector<std::uint64_t> spine;

  std::uint32_t num_terminals() const { return static_cast<std::uint32_t>(term_ranks.size()); }
  std::uint32_t num_nonterminals() const { return static_cast<std::uint32_t>(rules.size()); }
  std::uint32_t num_symbols() const { return num_terminals() + num_nonterminals(); }
  bool is_nt(SymId s) const { return s >= num_terminals(); }
  std::uint32_t nt_of(SymId s) const { return s - num_terminals(); }
  SymId sym_of(std::uint32_t nt) const { return nt + num_terminals(); }

  unsigned rank(SymId s) const {
    return is_nt(s) ? RuleWord::rank(rules[nt_of(s)]) : term_ranks[s];
  }
  SymId rule_x(std::uint32_t nt) const { return RuleWord::x(rules[nt]); }
  SymId rule_y(std::uint32_t nt) const { return RuleWord::y(rules[nt]); }
  unsigned rule_slot(std::uint32_t nt) const { return RuleWord::slot(rules[nt]); }

  std::span<const std::uint64_t> jump_row(std::uint32_t nt) const {
    return {jump.data() + std::size_t{nt} * jump_stride, jump_stride};
  }
  bool jump_bit(std::uint32_t nt, LabelId b) const {
    return (jump[std::size_t{nt} * jump_stride + b / 64] >> (b % 64)) & 1;
  }
  std::span<const std::uint32_t> pr(std::uint32_t nt) const {
    return {pr_map.data() + map_offset[nt], map_offset[nt + 1] - map_offset[nt]};
  }
  std::span<const std::uint32_t> text(std::uint32_t nt) const {
    return {text_map.data() + map_offset[nt], map_offset[nt + 1] - map_offset[nt]};
  }
  bool last_param_on_spine(std::uint32_t nt) const { return (spine[nt / 64] >> (nt % 64)) & 1; }

  std::uint64_t num_elements() const { return sskip.empty() ? 0 : sskip[0]; }
  std::uint64_t num_texts() const { return text_sskip.empty() ? 0 : text_sskip[0]; }

  std::string symbol_name(SymId s) const;

  friend bool operator==(const TinyTIndex&, const TinyTIndex&) = default;
};

TinyTIndex build_index(const SltGrammar& g);

// The bCNF grammar described by an index (nonterminal n becomes rule n+1,
// the start rule is rule 0).
SltGrammar index_grammar(const TinyTIndex& ix);

// Quantities the size formulas depend on.
struct IndexShape {
  std::uint64_t rules = 0;          // bCNF productions
  std::uint64_t labels = 0;         // distinct terminal labels
  std::uint64_t start_nodes = 0;    // start-rhs nodes
  std::uint64_t map_entries = 0;    // sum over nonterminals of rank+1
};

IndexShape shape_of(const TinyTIndex& ix);

struct SizeRow {
  std::string component;
  std::uint64_t bits = 0;
  double kb() const { return static_cast<double>(bits) / 8.0 / 1024.0; }
};

// Components: CNF, STag, ex, jump, prMap, textMap, SSkip, textSSkip, total.
std::vector<SizeRow> index_size_report(const IndexShape& shape);
std::string format_size_report(const std::vector<SizeRow>& rows);

void save_index(const TinyTIndex& ix, std::ostream& out);
TinyTIndex load_index(std::istream& in);
void save_index_file(const TinyTIndex& ix, const std::string& path);
TinyTIndex load_index_file(const std::string& path);

void save_texts(const TextCollection& texts, std::ostream& out);
TextCollection load_texts(std::istream& in);
void save_texts_file(const TextCollection& texts, const std::string& path);
TextCollection load_texts_file(const std::string& path);

}  // namespace tinyt
