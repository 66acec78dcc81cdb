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
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "tinyt/automata.hpp"
#include "tinyt/index.hpp"
#include "tinyt/xml_model.hpp"

namespace tinyt {

struct PrintOptions {
  bool jump = true;   // f-relevance jumping of nonterminals
  bool skip = true;   // skip start-rhs subtrees entered in q_U
  bool memo = true;   // chunk memo with copy replay
};

// Intermediate result tag sequence entry.
struct IrtToken {
  enum Kind : std::uint8_t { kOpen, kClose, kText };
  Kind kind = kOpen;
  LabelId label = 0;
  std::uint32_t result = kNoResult;  // final result list index, if this token starts a result
  static constexpr std::uint32_t kNoResult = 0xFFFFFFFFu;
  friend bool operator==(const IrtToken&, const IrtToken&) = default;
};

// Final result list entry: IRT position of the result's first token, the
// collection index of its first text and its element pre-order number.
struct ResultEntry {
  std::uint64_t irt_begin = 0;
  std::uint64_t text_index = 0;
  std::uint64_t element_index = 0;
  bool is_element = true;
  friend bool operator==(const ResultEntry&, const ResultEntry&) = default;
};

struct ChunkMemoEntry {
  std::uint32_t nt = 0;
  StateId state = 0;
  std::uint32_t chunk = 0;  // 0 .. rank(nt)
  bool in_result = false;
  std::uint64_t begin = 0;   // 0-based IRT offset
  std::uint64_t length = 0;
};

struct CopyEvent {
  std::uint64_t src = 0;     // 0-based IRT offset of the copied span
  std::uint64_t length = 0;
  std::uint64_t dst = 0;     // IRT length when the copy started
};

struct PrintTrace {
  std::vector<IrtToken> irt;
  std::vector<ResultEntry> results;
  std::vector<ChunkMemoEntry> memo;  // in insertion order
  std::vector<CopyEvent> copies;
  std::uint64_t num_texts = 0;       // text slots passed, including jumped ones
  std::uint64_t num_elements = 0;

  const ChunkMemoEntry* find_memo(std::uint32_t nt, StateId q, std::uint32_t chunk, bool u) const;
};

// One chunk-wise pass. In `positions_only` mode no result content is kept,
// only the open and close tags of selected nodes.
PrintTrace run_print(const TinyTIndex& ix, const StAutomaton& a, const PrintOptions& opts = {},
                     bool positions_only = false);

// Renders result i of a trace, resolving text slots from `texts`.
void render_result(const PrintTrace& trace, std::size_t i, const LabelTable& labels,
                   const TextCollection& texts, std::string& out);

// Calls `sink` once per selected node, in document order, with the XML of
// its subtree. Returns the number of results.
std::uint64_t serialize_query(const TinyTIndex& ix, const TextCollection& texts, const StAutomaton& a,
                              const PrintOptions& opts,
                              const std::function<void(std::string_view)>& sink);
// Writes each result followed by a newline.
std::uint64_t serialize_query(const TinyTIndex& ix, const TextCollection& texts, const StAutomaton& a,
                              const PrintOptions& opts, std::ostream& sink);

// Pre-order numbers of the selected elements; a selected text slot reports
// its text collection index instead.
std::vector<std::uint64_t> materialize_query(const TinyTIndex& ix, const StAutomaton& a,
                                             const PrintOptions& opts = {});

}  // namespace tinyt
