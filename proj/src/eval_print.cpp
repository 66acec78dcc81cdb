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


#include "tinyt/eval_print.hpp"

#include <algorithm>
#include <deque>
#include <ostream>
#include <unordered_map>

#include "tinyt/error.hpp"
#include "tinyt/eval_count.hpp"

namespace tinyt {

namespace {

struct MemoValue {
  std::uint64_t begin, length, texts, elements;
  std::uint32_t entry;
};

class Printer {
 public:
  Printer(const TinyTIndex& ix, const StAutomaton& a, const PrintOptions& opts, bool positions_only)
      : ix_(ix), a_(a), opts_(opts), positions_only_(positions_only) {
    if (a.num_labels() < ix.num_terminals() || a.words() < ix.jump_stride) {
      throw Error(ErrorCode::kIndexOutOfRange, "automaton was compiled over a smaller label table");
    }
    for (std::uint32_t t = 0; t < ix.num_terminals(); ++t) {
      if (ix.term_ranks[t] > 2) throw Error(ErrorCode::kUnsupportedConstruct, "terminal rank above 2");
    }
  }

  PrintTrace run() {
    if (!ix_.start_tags.empty()) walk_start();
    tr_.num_texts = texts_;
    tr_.num_elements = elems_;
    if (texts_ != ix_.num_texts() || elems_ != ix_.num_elements()) {
      throw Error(ErrorCode::kTextIndexOverflow, "node counters disagree with the index totals");
    }
    return std::move(tr_);
  }

 private:
  // Parameter states and in-result flags of a symbol entered in (q, u).
  struct Beh {
    StateId states[kMaxRank];
    bool flags[kMaxRank];
  };

  void walk_start() {
    struct Item {
      bool visit;
      std::uint32_t pos;  // start position, or symbol for a chunk
      StateId q;
      bool u;
      std::uint32_t chunk;
    };
    std::vector<Item> stack{{true, 0, a_.initial(), false, 0}};
    while (!stack.empty()) {
      Item it = stack.back();
      stack.pop_back();
      if (!it.visit) {
        chunk(it.pos, it.q, it.u, it.chunk);
        continue;
      }
      SymId s = ix_.start_tags[it.pos];
      if (s == kNullLabel) continue;
      if (opts_.skip && !it.u && a_.is_universal(it.q)) {
        texts_ += ix_.text_sskip[it.pos];
        elems_ += ix_.sskip[it.pos];
        continue;
      }
      const unsigned r = ix_.rank(s);
      const Beh& b = behaviour(s, it.q, it.u);
      std::uint32_t child[kMaxRank];
      std::uint32_t c = it.pos + 1;
      for (unsigned i = 0; i < r; ++i) {
        child[i] = c;
        c += ix_.find_close[c];
      }
      for (unsigned i = r; i > 0; --i) {
        stack.push_back({false, s, it.q, it.u, i});
        stack.push_back({true, child[i - 1], b.states[i - 1], b.flags[i - 1], 0});
      }
      chunk(s, it.q, it.u, 0);
    }
  }

  Beh terminal(SymId a, StateId q, bool u) const {
    Beh b{};
    if (a == kNullLabel) return b;
    const Transition& t = a_.delta(q, a);
    b.states[0] = t.left;
    b.states[1] = t.right;
    b.flags[0] = !positions_only_ && (u || t.select);
    b.flags[1] = u;
    return b;
  }

  const Beh& behaviour(SymId s, StateId q, bool u) {
    if (!ix_.is_nt(s)) {
      scratch_ = terminal(s, q, u);
      return scratch_;
    }
    return nt_behaviour(ix_.nt_of(s), q, u);
  }

  const Beh& nt_behaviour(std::uint32_t n, StateId q, bool u) {
    const std::uint64_t key = (std::uint64_t{q} << 33) | (std::uint64_t{n} << 1) | u;
    if (auto it = beh_memo_.find(key); it != beh_memo_.end()) return behs_[it->second];
    const std::uint64_t w = ix_.rules[n];
    const unsigned r = RuleWord::rank(w);
    Beh out{};
    if (!jumped(n, q, out)) {
      SymId x = RuleWord::x(w), y = RuleWord::y(w);
      const unsigned slot = RuleWord::slot(w), rx = ix_.rank(x), ry = ix_.rank(y);
      Beh bx = behaviour(x, q, u);
      Beh by = behaviour(y, bx.states[slot - 1], bx.flags[slot - 1]);
      unsigned k = 0;
      for (unsigned i = 0; i + 1 < slot; ++i, ++k) out.states[k] = bx.states[i], out.flags[k] = bx.flags[i];
      for (unsigned i = 0; i < ry; ++i, ++k) out.states[k] = by.states[i], out.flags[k] = by.flags[i];
      for (unsigned i = slot; i < rx; ++i, ++k) out.states[k] = bx.states[i], out.flags[k] = bx.flags[i];
    } else {
      std::fill(out.flags, out.flags + r, u);
    }
    behs_.push_back(out);
    beh_memo_.emplace(key, static_cast<std::uint32_t>(behs_.size() - 1));
    return behs_.back();
  }

  // Whether nt entered in q selects nothing; fills the parameter states.
  bool jumped(std::uint32_t n, StateId q, Beh& out) const {
    const unsigned r = RuleWord::rank(ix_.rules[n]);
    if (opts_.skip && a_.is_universal(q)) {
      std::fill(out.states, out.states + r, q);
      return true;
    }
    if (!opts_.jump) return false;
    JumpDecision d = jump_decision(a_, q, n, ix_, JumpMode::kFRelevant);
    if (!d.jump) return false;
    std::copy(d.params.begin(), d.params.end(), out.states);
    return true;
  }

  void emit(IrtToken::Kind kind, LabelId label, bool select) {
    IrtToken t{kind, label, IrtToken::kNoResult};
    if (select) {
      t.result = static_cast<std::uint32_t>(tr_.results.size());
      tr_.results.push_back({tr_.irt.size(), texts_, elems_, ix_.labels.is_element(label)});
    }
    tr_.irt.push_back(t);
  }

  void terminal_chunk(SymId a, StateId q, bool u, unsigned p) {
    if (a == kNullLabel) return;
    const Transition& t = a_.delta(q, a);
    const bool out = t.select || u;
    const bool slot = LabelTable::is_text_slot(a);
    const unsigned r = ix_.rank(a);
    if (p == 0) {
      if (out) emit(slot ? IrtToken::kText : IrtToken::kOpen, a, t.select);
      texts_ += slot;
      elems_ += ix_.labels.is_element(a);
    }
    if (p == std::min(1u, r) && out && !slot) emit(IrtToken::kClose, a, false);
  }

  void chunk(SymId s, StateId q, bool u, unsigned p) {
    if (!ix_.is_nt(s)) {
      terminal_chunk(s, q, u, p);
      return;
    }
    const std::uint32_t n = ix_.nt_of(s);
    const std::uint64_t key = (std::uint64_t{q} << 33) | (std::uint64_t{n} << 5) |
                              (std::uint64_t{p} << 1) | u;
    if (opts_.memo) {
      if (auto it = chunk_memo_.find(key); it != chunk_memo_.end()) {
        replay(it->second);
        return;
      }
    }
    Beh unused;
    if (!u && jumped(n, q, unused)) {
      texts_ += ix_.text(n)[p];
      elems_ += ix_.pr(n)[p];
      return;
    }
    const MemoValue start{tr_.irt.size(), 0, texts_, elems_, 0};
    const std::uint64_t w = ix_.rules[n];
    SymId x = RuleWord::x(w), y = RuleWord::y(w);
    const unsigned slot = RuleWord::slot(w), ry = ix_.rank(y);
    const Beh bx = behaviour(x, q, u);
    const StateId qy = bx.states[slot - 1];
    const bool uy = bx.flags[slot - 1];
    // Chunk p of X(.., Y(..), ..) is a run of X and Y chunks.
    const unsigned s1 = slot - 1;
    if (p < s1) {
      chunk(x, q, u, p);
    } else if (p == s1) {
      chunk(x, q, u, s1);
      chunk(y, qy, uy, 0);
      if (ry == 0) chunk(x, q, u, slot);
    } else if (p < s1 + ry) {
      chunk(y, qy, uy, p - s1);
    } else if (p == s1 + ry) {
      chunk(y, qy, uy, ry);
      chunk(x, q, u, slot);
    } else {
      chunk(x, q, u, p - ry + 1);
    }
    if (!opts_.memo) return;
    MemoValue v = start;
    v.length = tr_.irt.size() - start.begin;
    v.entry = static_cast<std::uint32_t>(tr_.memo.size());
    tr_.memo.push_back({n, q, p, u, v.begin, v.length});
    chunk_memo_.emplace(key, v);
  }

  void replay(const MemoValue& v) {
    tr_.copies.push_back({v.begin, v.length, tr_.irt.size()});
    for (std::uint64_t j = 0; j < v.length; ++j) {
      IrtToken t = tr_.irt[v.begin + j];
      if (t.result != IrtToken::kNoResult) {
        ResultEntry e = tr_.results[t.result];
        e.irt_begin = tr_.irt.size();
        e.text_index = e.text_index - v.texts + texts_;
        e.element_index = e.element_index - v.elements + elems_;
        t.result = static_cast<std::uint32_t>(tr_.results.size());
        tr_.results.push_back(e);
      }
      tr_.irt.push_back(t);
    }
    const ChunkMemoEntry& m = tr_.memo[v.entry];
    texts_ += ix_.text(m.nt)[m.chunk];
    elems_ += ix_.pr(m.nt)[m.chunk];
  }

  const TinyTIndex& ix_;
  const StAutomaton& a_;
  PrintOptions opts_;
  bool positions_only_;
  PrintTrace tr_;
  std::uint64_t texts_ = 0, elems_ = 0;
  Beh scratch_{};
  std::unordered_map<std::uint64_t, std::uint32_t> beh_memo_;
  std::deque<Beh> behs_;
  std::unordered_map<std::uint64_t, MemoValue> chunk_memo_;
};

}  // namespace

const ChunkMemoEntry* PrintTrace::find_memo(std::uint32_t nt, StateId q, std::uint32_t chunk,
                                            bool u) const {
  for (const ChunkMemoEntry& e : memo) {
    if (e.nt == nt && e.state == q && e.chunk == chunk && e.in_result == u) return &e;
  }
  return nullptr;
}

PrintTrace run_print(const TinyTIndex& ix, const StAutomaton& a, const PrintOptions& opts,
                     bool positions_only) {
  return Printer(ix, a, opts, positions_only).run();
}

void render_result(const PrintTrace& trace, std::size_t i, const LabelTable& labels,
                   const TextCollection& texts, std::string& out) {
  const ResultEntry& e = trace.results.at(i);
  std::uint64_t next_text = e.text_index;
  auto take = [&]() -> std::string_view {
    if (next_text >= texts.count()) {
      throw Error(ErrorCode::kTextIndexOverflow, "text index past the collection");
    }
    return texts[next_text++];
  };
  int depth = 0;
  int in_attr = 0;
  bool pending = false;  // start tag still open for attributes
  auto close_start = [&] {
    if (pending) out += '>';
    pending = false;
  };
  for (std::uint64_t p = e.irt_begin; p < trace.irt.size(); ++p) {
    const IrtToken& t = trace.irt[p];
    const std::string& name = labels.name(t.label);
    const bool attr = labels.is_attribute(t.label);
    switch (t.kind) {
      case IrtToken::kOpen:
        ++depth;
        if (t.label == kAttrListLabel) break;
        if (attr) {
          ++in_attr;
          out += ' ';
          out.append(name, 1);
          out += "=\"";
          break;
        }
        close_start();
        out += '<';
        out += name;
        pending = true;
        break;
      case IrtToken::kClose:
        --depth;
        if (t.label == kAttrListLabel) break;
        if (attr) {
          --in_attr;
          out += '"';
          break;
        }
        close_start();
        out += "</";
        out += name;
        out += '>';
        break;
      case IrtToken::kText:
        if (in_attr > 0) {
          escape_attribute(take(), out);
        } else {
          close_start();
          escape_text(take(), out);
        }
        break;
    }
    if (depth == 0) break;
  }
  close_start();
}

std::uint64_t serialize_query(const TinyTIndex& ix, const TextCollection& texts, const StAutomaton& a,
                              const PrintOptions& opts,
                              const std::function<void(std::string_view)>& sink) {
  if (texts.count() != ix.num_texts()) {
    throw Error(ErrorCode::kTextIndexOverflow, "text collection does not match the index");
  }
  PrintTrace trace = run_print(ix, a, opts, false);
  std::string buf;
  for (std::size_t i = 0; i < trace.results.size(); ++i) {
    buf.clear();
    render_result(trace, i, ix.labels, texts, buf);
    sink(buf);
  }
  return trace.results.size();
}

std::uint64_t serialize_query(const TinyTIndex& ix, const TextCollection& texts, const StAutomaton& a,
                              const PrintOptions& opts, std::ostream& sink) {
  std::uint64_t n = serialize_query(ix, texts, a, opts, [&](std::string_view s) {
    sink.write(s.data(), static_cast<std::streamsize>(s.size()));
    sink.put('\n');
    if (!sink) throw Error(ErrorCode::kSinkFailure, "write failed");
  });
  return n;
}

std::vector<std::uint64_t> materialize_query(const TinyTIndex& ix, const StAutomaton& a,
                                             const PrintOptions& opts) {
  PrintTrace trace = run_print(ix, a, opts, true);
  std::vector<std::uint64_t> out;
  out.reserve(trace.results.size());
  for (const ResultEntry& e : trace.results) out.push_back(e.is_element ? e.element_index : e.text_index);
  return out;
}

}  // namespace tinyt
