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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tinyt/grammar.hpp"
#include "tinyt/xml_model.hpp"

namespace tinyt {

enum class Axis : std::uint8_t { kChild, kDescendant, kFollowingSibling };

struct NameTest {
  enum class Kind : std::uint8_t { kName, kStar, kText };
  Kind kind = Kind::kName;
  std::string name;
  friend bool operator==(const NameTest&, const NameTest&) = default;
};

struct Step {
  Axis axis = Axis::kChild;
  NameTest test;
  friend bool operator==(const Step&, const Step&) = default;
};

struct XPathQuery {
  std::vector<Step> steps;
  bool absolute = true;
};

// Grammar: ('/'|'//') test (('/'|'//') test | '/following-sibling::' test)*
// with test one of NCName, '*', 'text()'.
XPathQuery parse_xpath(std::string_view text);
std::string to_string(const XPathQuery& q);

// Nondeterministic automaton with one state per step. A set of states is a
// bit mask; state i waits for a node matching step i.
struct Nfa {
  std::vector<Step> steps;
  std::vector<std::optional<LabelId>> test_label;  // resolved names
  const LabelTable* labels = nullptr;

  std::size_t size() const { return steps.size(); }
  bool matches(std::size_t i, LabelId a) const;

  struct Move {
    std::uint64_t left = 0;
    std::uint64_t right = 0;
    bool select = false;
  };
  Move step(std::uint64_t set, LabelId a) const;
};

Nfa compile(const XPathQuery& q, const LabelTable& labels);

using StateId = std::uint32_t;

struct Transition {
  StateId left = 0;
  StateId right = 0;
  bool select = false;
  friend bool operator==(const Transition&, const Transition&) = default;
};

// Deterministic selecting tree automaton over the binary encoding, with a
// dense (state, label) transition table.
class StAutomaton {
 public:
  std::uint32_t num_states() const { return num_states_; }
  std::uint32_t num_labels() const { return num_labels_; }
  StateId initial() const { return 0; }
  std::optional<StateId> universal() const { return universal_; }
  bool is_universal(StateId q) const { return universal_ && *universal_ == q; }

  const Transition& delta(StateId q, LabelId a) const {
    return table_[std::size_t{q} * num_labels_ + a];
  }

  // Label bit sets per state, `words()` 64-bit words each.
  std::uint32_t words() const { return words_; }
  const std::uint64_t* relevant(StateId q) const { return &relevant_[std::size_t{q} * words_]; }
  // Labels on which q applies (q,q), (q_U,q) or (q_U,q_U) without selecting.
  const std::uint64_t* class_qq(StateId q) const { return &cqq_[std::size_t{q} * words_]; }
  const std::uint64_t* class_uq(StateId q) const { return &cuq_[std::size_t{q} * words_]; }
  const std::uint64_t* class_uu(StateId q) const { return &cuu_[std::size_t{q} * words_]; }
  bool is_relevant(StateId q, LabelId a) const { return (relevant(q)[a / 64] >> (a % 64)) & 1; }
  bool is_f_relevant(StateId q, LabelId a) const;

  // Set of nondeterministic states represented by q.
  std::uint64_t subset(StateId q) const { return subsets_[q]; }
  const LabelTable& labels() const { return *labels_; }

  // Selected nodes of a run over a binary tree (pre-order indexes).
  std::vector<NodeIdx> run(const BinaryTree& tree) const;

 private:
  friend StAutomaton determinize(const Nfa& nfa);
  std::uint32_t num_states_ = 0;
  std::uint32_t num_labels_ = 0;
  std::uint32_t words_ = 0;
  std::optional<StateId> universal_;
  std::vector<Transition> table_;
  std::vector<std::uint64_t> relevant_, cqq_, cuq_, cuu_;
  std::vector<std::uint64_t> subsets_;
  const LabelTable* labels_ = nullptr;
};

StAutomaton determinize(const Nfa& nfa);

// parse_xpath + compile + determinize. `labels` must outlive the result.
StAutomaton compile_query(std::string_view xpath, const LabelTable& labels);

// Arrow notation: one line per explicit row, then the state's default row,
// e.g. "q0,f→(q1,q0)" and "q0,L−{f}→(q0,q0)"; '⇒' marks selection.
std::string dump(const StAutomaton& a);

}  // namespace tinyt
