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


#include "tinyt/eval_count.hpp"

#include <unordered_map>

#include "tinyt/error.hpp"

namespace tinyt {

namespace {

bool row_within(const TinyTIndex& ix, std::uint32_t nt, const std::uint64_t* set) {
  auto row = ix.jump_row(nt);
  for (std::uint32_t w = 0; w < ix.jump_stride; ++w) {
    std::uint64_t r = row[w];
    if (w == kNullLabel / 64) r &= ~(std::uint64_t{1} << (kNullLabel % 64));
    if (r & ~set[w]) return false;
  }
  return true;
}

void check_compatible(const TinyTIndex& ix, const StAutomaton& a) {
  if (a.num_labels() < ix.num_terminals() || a.words() < ix.jump_stride) {
    throw Error(ErrorCode::kIndexOutOfRange, "automaton was compiled over a smaller label table");
  }
  if (a.num_states() == 0) throw Error(ErrorCode::kNondeterministicAutomaton, "automaton has no states");
  for (std::uint32_t t = 0; t < ix.num_terminals(); ++t) {
    if (ix.term_ranks[t] > 2) throw Error(ErrorCode::kUnsupportedConstruct, "terminal rank above 2");
  }
}

inline std::uint64_t key(StateId q, std::uint32_t nt) { return (std::uint64_t{q} << 32) | nt; }

class Counter {
 public:
  Counter(const TinyTIndex& ix, const StAutomaton& a, const CountOptions& opts, CountStats* stats)
      : ix_(ix), a_(a), opts_(opts), stats_(stats) {}

  std::uint64_t run() {
    if (ix_.start_tags.empty()) return 0;
    std::uint64_t total = 0;
    std::vector<std::pair<std::uint32_t, StateId>> stack{{0, a_.initial()}};
    StateId kids[kMaxRank];
    while (!stack.empty()) {
      auto [pos, q] = stack.back();
      stack.pop_back();
      SymId s = ix_.start_tags[pos];
      if (opts_.skip && a_.is_universal(q)) {
        ++st_.skips;
        continue;
      }
      unsigned r = ix_.rank(s);
      if (ix_.is_nt(s)) {
        std::uint32_t b = resolve(q, ix_.nt_of(s));
        total += counts_[b];
        for (unsigned i = 0; i < r; ++i) kids[i] = params_[offsets_[b] + i];
      } else {
        if (s == kNullLabel) continue;
        const Transition& t = a_.delta(q, s);
        ++st_.transitions;
        total += t.select;
        if (r > 0) kids[0] = t.left;
        if (r > 1) kids[1] = t.right;
      }
      std::uint32_t child[kMaxRank];
      std::uint32_t c = pos + 1;
      for (unsigned i = 0; i < r; ++i) {
        child[i] = c;
        c += ix_.find_close[c];
      }
      for (unsigned i = r; i-- > 0;) stack.push_back({child[i], kids[i]});
    }
    if (stats_) {
      st_.max_key_evaluations = 0;
      for (const auto& [k, n] : evals_per_key_) {
        st_.max_key_evaluations = std::max<std::uint64_t>(st_.max_key_evaluations, n);
      }
      *stats_ = st_;
    }
    return total;
  }

 private:
  struct Frame {
    StateId q;
    std::uint32_t nt;
    std::uint8_t phase;
    std::uint32_t bx;  // behaviour of X, or kNone for terminals
    std::uint64_t cx;
    StateId sx[2];
  };
  static constexpr std::uint32_t kNone = 0xFFFFFFFFu;

  std::uint32_t store(StateId q, std::uint32_t nt, std::uint64_t cnt, const StateId* ps, unsigned r) {
    auto b = static_cast<std::uint32_t>(counts_.size());
    counts_.push_back(cnt);
    offsets_.push_back(static_cast<std::uint32_t>(params_.size()));
    params_.insert(params_.end(), ps, ps + r);
    memo_.emplace(key(q, nt), b);
    return b;
  }

  // Behaviour of q on nt without recursion, if memoized, jumped or skipped.
  std::uint32_t shortcut(StateId q, std::uint32_t nt) {
    if (auto it = memo_.find(key(q, nt)); it != memo_.end()) {
      ++st_.memo_hits;
      return it->second;
    }
    unsigned r = RuleWord::rank(ix_.rules[nt]);
    if (opts_.skip && a_.is_universal(q)) {
      ++st_.skips;
      StateId ps[kMaxRank];
      std::fill(ps, ps + r, q);
      return store(q, nt, 0, ps, r);
    }
    if (opts_.jump != JumpMode::kOff) {
      JumpDecision d = jump_decision(a_, q, nt, ix_, opts_.jump);
      if (d.jump) {
        ++st_.jumps;
        return store(q, nt, 0, d.params.data(), r);
      }
    }
    return kNone;
  }

  std::uint32_t resolve(StateId q0, std::uint32_t nt0) {
    if (std::uint32_t b = shortcut(q0, nt0); b != kNone) return b;
    std::vector<Frame>& stack = frames_;
    stack.clear();
    stack.push_back({q0, nt0, 0, kNone, 0, {}});
    std::uint32_t last = kNone;
    while (true) {
      Frame& f = stack.back();
      std::uint64_t w = ix_.rules[f.nt];
      SymId x = RuleWord::x(w), y = RuleWord::y(w);
      if (f.phase == 0) {
        if (ix_.is_nt(x)) {
          if (last == kNone) {
            last = shortcut(f.q, ix_.nt_of(x));
            if (last == kNone) {
              stack.push_back({f.q, ix_.nt_of(x), 0, kNone, 0, {}});
              continue;
            }
          }
          f.bx = last;
          f.cx = counts_[last];
        } else {
          f.cx = apply(f.q, x, f.sx);
        }
        last = kNone;
        f.phase = 1;
      }
      unsigned slot = RuleWord::slot(w);
      StateId qy = f.bx == kNone ? f.sx[slot - 1] : params_[offsets_[f.bx] + slot - 1];
      std::uint64_t cy = 0;
      StateId sy[2];
      std::uint32_t by = kNone;
      if (ix_.is_nt(y)) {
        if (last == kNone) {
          last = shortcut(qy, ix_.nt_of(y));
          if (last == kNone) {
            stack.push_back({qy, ix_.nt_of(y), 0, kNone, 0, {}});
            continue;
          }
        }
        by = last;
        cy = counts_[by];
      } else {
        cy = apply(qy, y, sy);
      }
      // Combine: X's params before the slot, Y's params, X's params after.
      unsigned rx = ix_.rank(x), ry = ix_.rank(y), r = RuleWord::rank(w);
      StateId ps[kMaxRank];
      unsigned k = 0;
      auto px = [&](unsigned i) { return f.bx == kNone ? f.sx[i] : params_[offsets_[f.bx] + i]; };
      for (unsigned i = 0; i + 1 < slot; ++i) ps[k++] = px(i);
      for (unsigned i = 0; i < ry; ++i) ps[k++] = by == kNone ? sy[i] : params_[offsets_[by] + i];
      for (unsigned i = slot; i < rx; ++i) ps[k++] = px(i);
      if (k != r) throw Error(ErrorCode::kInternal, "rule rank mismatch");
      ++st_.evaluations;
      st_.rule_visits += r + 1;
      if (stats_) ++evals_per_key_[key(f.q, f.nt)];
      last = store(f.q, f.nt, f.cx + cy, ps, r);
      stack.pop_back();
      if (stack.empty()) return last;
    }
  }

  std::uint64_t apply(StateId q, SymId a, StateId* out) {
    if (a == kNullLabel) return 0;
    const Transition& t = a_.delta(q, a);
    ++st_.transitions;
    out[0] = t.left;
    out[1] = t.right;
    return t.select;
  }

  const TinyTIndex& ix_;
  const StAutomaton& a_;
  CountOptions opts_;
  CountStats* stats_;
  CountStats st_;
  std::unordered_map<std::uint64_t, std::uint32_t> memo_;
  std::unordered_map<std::uint64_t, std::uint32_t> evals_per_key_;
  std::vector<std::uint64_t> counts_;
  std::vector<std::uint32_t> offsets_;
  std::vector<StateId> params_;
  std::vector<Frame> frames_;
};

}  // namespace

JumpDecision jump_decision(const StAutomaton& a, StateId q, std::uint32_t nt, const TinyTIndex& ix,
                           JumpMode mode) {
  JumpDecision d;
  if (mode == JumpMode::kOff) return d;
  unsigned r = RuleWord::rank(ix.rules[nt]);
  if (row_within(ix, nt, a.class_qq(q))) {
    d.jump = true;
    d.params.assign(r, q);
    return d;
  }
  if (mode == JumpMode::kRelevant || !a.universal()) return d;
  StateId u = *a.universal();
  if (row_within(ix, nt, a.class_uu(q))) {
    d.jump = true;
    d.params.assign(r, u);
  } else if (row_within(ix, nt, a.class_uq(q))) {
    // Only the end of the right spine keeps q.
    d.jump = true;
    d.params.assign(r, u);
    if (r > 0 && ix.last_param_on_spine(nt)) d.params.back() = q;
  }
  return d;
}

std::uint64_t count(const TinyTIndex& ix, const StAutomaton& a, const CountOptions& opts,
                    CountStats* stats) {
  check_compatible(ix, a);
  return Counter(ix, a, opts, stats).run();
}

}  // namespace tinyt
