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

#include <vector>

#include "tinyt/grammar.hpp"

namespace tinyt::detail {

// Rewrites rule `root` with every nonterminal flagged in `inl` replaced by its
// right-hand side, recursively. `sizes[x]` must hold subtree_sizes of every
// rule reachable from `root`.
Pattern inline_rules(const SltGrammar& g, NtId root, const std::vector<char>& inl,
                     const std::vector<std::vector<std::uint32_t>>& sizes);

// Nonterminals reachable from the start rule (including it).
std::vector<char> live_rules(const SltGrammar& g);

// Drops unreachable rules and renumbers the rest in id order.
SltGrammar compact(SltGrammar g);

}  // namespace tinyt::detail
