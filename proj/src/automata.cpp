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

#include <map>
#include <unordered_map>

#include "tinyt/automata.hpp"
#include "tinyt/error.hpp"

namespace tinyt {

bool Nfa::matches(std::size_t i, LabelId a) const {
  switch (steps[i].test.kind) {
    case NameTest::Kind::kStar: return labels->is_element(a);
    case NameTest::Kind::kText: return a == kTextLabel;
    case NameTest::Kind::kName: return test_label[i] && *test_label[i] == a;
  }
  return false;
}

Nfa::Move Nfa::step(std::uint64_t set, LabelId a) const {
  Move m;
  if (a == kNullLabel) return m;
  const std::size_t n = steps.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!((set >> i) & 1)) continue;
    const std::uint64_t bit = std::uint64_t{1} << i;
    if (steps[i].axis == Axis::kDescendant) m.left |= bit;
    m.right |= bit;
    if (!matches(i, a)) continue;
    if (i + 1 == n) {
      m.select = true;
    } else if (steps[i + 1].axis == Axis::kFollowingSibling) {
      m.right |= bit << 1;
    } else {
      m.left |= bit << 1;
    }
  }
  return m;
}

Nfa compile(const XPathQuery& q, const LabelTable& labels) {
  if (q.steps.empty()) throw Error(ErrorCode::kSyntaxError, "empty query");
  if (q.steps.size() > 63) throw Error(ErrorCode::kUnsupportedFeature, "more than 63 steps");
  if (q.steps[0].axis == Axis::kFollowingSibling) {
    throw Error(ErrorCode::kUnsupportedFeature, "following-sibling as the first step");
  }
  Nfa nfa;
  nfa.steps = q.steps;
  nfa.labels = &labels;
  for (const Step& s : q.steps) {
    std::optional<LabelId> id;
    if (s.test.kind == NameTest::Kind::kName) {
      id = labels.find(s.test.name);
      // Reserved placeholder names are not addressable by name.
      if (id && !labels.is_element(*id)) id.reset();
    }
    nfa.test_label.push_back(id);
  }
  return nfa;
}

bool StAutomaton::is_f_relevant(StateId q, LabelId a) const {
  std::size_t w = std::size_t{q} * words_ + a / 64;
  std::uint64_t bit = std::uint64_t{1} << (a % 64);
  return !((cqq_[w] | cuq_[w] | cuu_[w]) & bit);
}

StAutomaton determinize(const Nfa& nfa) {
  const auto L = static_cast<std::uint32_t>(nfa.labels->size());
  std::vector<std::uint64_t> sets{1};
  std::unordered_map<std::uint64_t, StateId> ids{{1, 0}};
  std::vector<Transition> table;
  auto intern = [&](std::uint64_t s) {
    auto [it, fresh] = ids.try_emplace(s, static_cast<StateId>(sets.size()));
    if (fresh) sets.push_back(s);
    return it->second;
  };
  for (StateId q = 0; q < sets.size(); ++q) {
    for (LabelId a = 0; a < L; ++a) {
      if (a == kNullLabel) {
        table.push_back({q, q, false});
        continue;
      }
      Nfa::Move m = nfa.step(sets[q], a);
      StateId l = intern(m.left);
      StateId r = intern(m.right);
      table.push_back({l, r, m.select});
    }
  }
  const auto n = static_cast<StateId>(sets.size());
  // Coarsest partition in which equivalent states agree on selection and
  // on the blocks of both successors for every label.
  std::vector<StateId> block(n, 0);
  std::uint32_t blocks = 1;
  for (;;) {
    std::map<std::vector<std::uint32_t>, StateId> sig_ids;
    std::vector<StateId> next_block(n);
    for (StateId q = 0; q < n; ++q) {
      std::vector<std::uint32_t> sig{block[q]};
      for (LabelId l = 0; l < L; ++l) {
        if (l == kNullLabel) continue;
        const Transition& t = table[std::size_t{q} * L + l];
        sig.push_back(block[t.left] * 2 + t.select);
        sig.push_back(block[t.right]);
      }
      auto [it, fresh] = sig_ids.try_emplace(std::move(sig), static_cast<StateId>(sig_ids.size()));
      next_block[q] = it->second;
    }
    auto count = static_cast<std::uint32_t>(sig_ids.size());
    block = std::move(next_block);
    if (count == blocks) break;
    blocks = count;
  }
  // Number blocks in order of first appearance so the initial state is 0.
  std::vector<StateId> map(n);
  std::vector<StateId> renumber(blocks, 0xFFFFFFFFu);
  StateId next = 0;
  for (StateId q = 0; q < n; ++q) {
    if (renumber[block[q]] == 0xFFFFFFFFu) renumber[block[q]] = next++;
    map[q] = renumber[block[q]];
  }
  std::optional<StateId> rep;
  for (StateId q = 0; q < n && !rep; ++q) {
    bool uni = true;
    for (LabelId l = 0; l < L && uni; ++l) {
      if (l == kNullLabel) continue;
      const Transition& t = table[std::size_t{q} * L + l];
      uni = !t.select && map[t.left] == map[q] && map[t.right] == map[q];
    }
    if (uni) rep = map[q];
  }
  StAutomaton a;
  a.labels_ = nfa.labels;
  a.num_labels_ = L;
  a.num_states_ = next;
  a.universal_ = rep;
  a.words_ = (L + 63) / 64;
  a.table_.resize(std::size_t{next} * L);
  a.subsets_.assign(next, 0);
  std::vector<char> written(next, 0);
  for (StateId q = 0; q < n; ++q) {
    StateId m = map[q];
    if (written[m]) continue;
    written[m] = 1;
    a.subsets_[m] = sets[q];
    for (LabelId l = 0; l < L; ++l) {
      Transition t = table[std::size_t{q} * L + l];
      a.table_[std::size_t{m} * L + l] = {map[t.left], map[t.right], t.select};
    }
  }
  const std::size_t cells = std::size_t{next} * a.words_;
  a.relevant_.assign(cells, 0);
  a.cqq_.assign(cells, 0);
  a.cuq_.assign(cells, 0);
  a.cuu_.assign(cells, 0);
  for (StateId q = 0; q < next; ++q) {
    for (LabelId l = 0; l < L; ++l) {
      if (l == kNullLabel) continue;
      const Transition& t = a.delta(q, l);
      std::size_t w = std::size_t{q} * a.words_ + l / 64;
      std::uint64_t bit = std::uint64_t{1} << (l % 64);
      if (t.select || t.left != q || t.right != q) a.relevant_[w] |= bit;
      if (t.select) continue;
      if (t.left == q && t.right == q) a.cqq_[w] |= bit;
      if (rep && t.left == *rep && t.right == q) a.cuq_[w] |= bit;
      if (rep && t.left == *rep && t.right == *rep) a.cuu_[w] |= bit;
    }
  }
  return a;
}

StAutomaton compile_query(std::string_view xpath, const LabelTable& labels) {
  return determinize(compile(parse_xpath(xpath), labels));
}

std::vector<NodeIdx> StAutomaton::run(const BinaryTree& tree) const {
  std::vector<NodeIdx> out;
  if (tree.nodes.empty()) return out;
  std::vector<std::pair<NodeIdx, StateId>> stack{{0, initial()}};
  while (!stack.empty()) {
    auto [v, q] = stack.back();
    stack.pop_back();
    const auto& node = tree[v];
    if (node.label == kNullLabel) continue;
    const Transition& t = delta(q, node.label);
    if (t.select) out.push_back(v);
    if (node.right != kNoNode) stack.push_back({node.right, t.right});
    if (node.left != kNoNode) stack.push_back({node.left, t.left});
  }
  return out;
}

std::string dump(const StAutomaton& a) {
  auto name = [](StateId q) { return "q" + std::to_string(q); };
  auto rhs = [&](const Transition& t) {
    return std::string(t.select ? "\xE2\x87\x92" : "\xE2\x86\x92") + "(" + name(t.left) + "," +
           name(t.right) + ")";
  };
  std::string out;
  for (StateId q = 0; q < a.num_states(); ++q) {
    std::map<std::tuple<StateId, StateId, bool>, std::uint32_t> freq;
    std::map<std::tuple<StateId, StateId, bool>, LabelId> first;
    for (LabelId l = 0; l < a.num_labels(); ++l) {
      if (l == kNullLabel) continue;
      const Transition& t = a.delta(q, l);
      auto k = std::make_tuple(t.left, t.right, t.select);
      if (freq[k]++ == 0) first[k] = l;
    }
    std::tuple<StateId, StateId, bool> def{};
    std::uint32_t best = 0;
    LabelId best_first = 0;
    for (const auto& [k, c] : freq) {
      if (c > best || (c == best && first[k] < best_first)) {
        def = k;
        best = c;
        best_first = first[k];
      }
    }
    std::string except;
    for (LabelId l = 0; l < a.num_labels(); ++l) {
      if (l == kNullLabel) continue;
      const Transition& t = a.delta(q, l);
      if (std::make_tuple(t.left, t.right, t.select) == def) continue;
      out += name(q) + "," + a.labels().name(l) + rhs(t) + "\n";
      except += (except.empty() ? "" : ",") + a.labels().name(l);
    }
    Transition d{std::get<0>(def), std::get<1>(def), std::get<2>(def)};
    out += name(q) + ",L" + (except.empty() ? "" : "\xE2\x88\x92{" + except + "}") + rhs(d) + "\n";
  }
  return out;
}

}  // namespace tinyt
