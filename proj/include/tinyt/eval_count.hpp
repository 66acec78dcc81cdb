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
#include <vector>

#include "tinyt/automata.hpp"
#include "tinyt/index.hpp"

namespace tinyt {

enum class JumpMode : std::uint8_t { kOff, kRelevant, kFRelevant };

struct CountOptions {
  JumpMode jump = JumpMode::kFRelevant;
  bool skip = true;
};

struct CountStats {
  std::uint64_t evaluations = 0;   // (state, nonterminal) behaviours computed by recursion
  std::uint64_t rule_visits = 0;   // evaluations weighted by rank + 1
  std::uint64_t memo_hits = 0;
  std::uint64_t jumps = 0;
  std::uint64_t skips = 0;         // subtrees or nonterminals entered in q_U
  std::uint64_t transitions = 0;   // terminal transitions applied
  std::uint64_t max_key_evaluations = 0;
};

// Jump test for nonterminal `nt` entered in state q. When `jump` holds,
// `params` gives the state of every parameter.
struct JumpDecision {
  bool jump = false;
  std::vector<StateId> params;
};

JumpDecision jump_decision(const StAutomaton& a, StateId q, std::uint32_t nt, const TinyTIndex& ix,
                           JumpMode mode);

std::uint64_t count(const TinyTIndex& ix, const StAutomaton& a, const CountOptions& opts = {},
                    CountStats* stats = nullptr);

}  // namespace tinyt
