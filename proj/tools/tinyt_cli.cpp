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


#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tinyt/corpus.hpp"
#include "tinyt/error.hpp"
#include "tinyt/eval_count.hpp"
#include "tinyt/eval_print.hpp"
#include "tinyt/grammar.hpp"
#include "tinyt/index.hpp"
#include "tinyt/navigation.hpp"

using namespace tinyt;
using json = nlohmann::ordered_json;

namespace {

class Stopwatch {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0_).count();
  }
  double lap() {
    double v = ms();
    t0_ = std::chrono::steady_clock::now();
    return v;
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string default_texts_path(const std::string& index_path) { return index_path + ".txt"; }

json stats_json(const GrammarStats& s) {
  return {{"size", s.size}, {"rules", s.num_rules}, {"rank", s.rank}, {"depth", s.depth},
          {"start_rhs", s.start_rhs_size}};
}

json size_json(const std::vector<SizeRow>& rows) {
  json j = json::object();
  for (const SizeRow& r : rows) j[r.component] = {{"bits", r.bits}, {"kb", r.kb()}};
  return j;
}

void print_stats(const char* title, const GrammarStats& s) {
  std::cout << title << ": size=" << s.size << " rules=" << s.num_rules << " rank=" << s.rank
            << " depth=" << s.depth << " start_rhs=" << s.start_rhs_size << "\n";
}

struct Options {
  std::string input, out, texts, compressor = "repair", xpath, jump = "f", mode = "dflr-it";
  unsigned max_rank = 4;
  bool json = false, no_skip = false, no_jump = false, no_memo = false;
  // gen
  std::string kind = "xmark";
  std::uint64_t seed = 1, budget = 1000;
  unsigned labels = 8;
  double text_p = 0.2, repeat = 0.3, scale = 1.0;
};

int cmd_build(const Options& o) {
  Stopwatch total, sw;
  std::string xml = read_file(o.input);
  Document d = make_structure_tree(xml);
  double t_parse = sw.lap();
  BinaryTree bt = binarize(d.tree);
  SltGrammar g = o.compressor == "dag" ? build_dag(bt) : compress_repair(bt, o.max_rank);
  double t_compress = sw.lap();
  SltGrammar b = to_bcnf(g);
  double t_bcnf = sw.lap();
  TinyTIndex ix = build_index(b);
  double t_index = sw.lap();
  save_index_file(ix, o.out);
  const std::string texts = o.texts.empty() ? default_texts_path(o.out) : o.texts;
  save_texts_file(d.texts, texts);
  double t_write = sw.lap();
  auto rows = index_size_report(shape_of(ix));
  GrammarStats gs = stats(g), bs = stats(b);
  if (o.json) {
    json j = {{"input_bytes", xml.size()},
              {"nodes", d.tree.size()},
              {"grammar", stats_json(gs)},
              {"bcnf", stats_json(bs)},
              {"sizes", size_json(rows)},
              {"times_ms",
               {{"parse", t_parse}, {"compress", t_compress}, {"bcnf", t_bcnf}, {"index", t_index},
                {"write", t_write}, {"total", total.ms()}}}};
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  std::cout << "input: " << xml.size() << " bytes, " << d.tree.size() << " nodes, " << d.texts.count()
            << " texts\n";
  print_stats("grammar", gs);
  print_stats("bcnf", bs);
  std::cout << format_size_report(rows);
  std::cout << "times(ms): parse=" << t_parse << " compress=" << t_compress << " bcnf=" << t_bcnf
            << " index=" << t_index << " write=" << t_write << "\n";
  return 0;
}

JumpMode jump_mode(const std::string& s) {
  if (s == "off") return JumpMode::kOff;
  if (s == "relevant") return JumpMode::kRelevant;
  return JumpMode::kFRelevant;
}

int cmd_count(const Options& o) {
  Stopwatch sw;
  TinyTIndex ix = load_index_file(o.input);
  double t_load = sw.lap();
  StAutomaton a = compile_query(o.xpath, ix.labels);
  CountStats st;
  std::uint64_t n = count(ix, a, {jump_mode(o.jump), !o.no_skip}, &st);
  double t_query = sw.lap();
  if (o.json) {
    json j = {{"count", n},
              {"load_ms", t_load},
              {"query_ms", t_query},
              {"states", a.num_states()},
              {"evaluations", st.evaluations},
              {"memo_hits", st.memo_hits},
              {"jumps", st.jumps},
              {"skips", st.skips},
              {"transitions", st.transitions}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << n << "\n";
    std::cerr << "load_ms=" << t_load << " query_ms=" << t_query << "\n";
  }
  return 0;
}

int cmd_serialize(const Options& o) {
  Stopwatch sw;
  TinyTIndex ix = load_index_file(o.input);
  TextCollection texts = load_texts_file(o.texts.empty() ? default_texts_path(o.input) : o.texts);
  double t_load = sw.lap();
  StAutomaton a = compile_query(o.xpath, ix.labels);
  PrintOptions po{!o.no_jump, !o.no_skip, !o.no_memo};
  std::uint64_t n = 0;
  if (o.out.empty()) {
    n = serialize_query(ix, texts, a, po, std::cout);
  } else {
    std::ofstream out(o.out, std::ios::binary);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + o.out);
    n = serialize_query(ix, texts, a, po, out);
  }
  double t_query = sw.lap();
  std::cerr << "results=" << n << " load_ms=" << t_load << " query_ms=" << t_query << "\n";
  return 0;
}

int cmd_materialize(const Options& o) {
  Stopwatch sw;
  TinyTIndex ix = load_index_file(o.input);
  double t_load = sw.lap();
  StAutomaton a = compile_query(o.xpath, ix.labels);
  std::vector<std::uint64_t> pos = materialize_query(ix, a, {!o.no_jump, !o.no_skip, !o.no_memo});
  double t_query = sw.lap();
  std::string buf;
  for (std::uint64_t p : pos) buf += std::to_string(p) + "\n";
  std::cout << buf;
  std::cerr << "results=" << pos.size() << " load_ms=" << t_load << " query_ms=" << t_query << "\n";
  return 0;
}

int cmd_stats(const Options& o) {
  TinyTIndex ix = load_index_file(o.input);
  GrammarStats s = stats(index_grammar(ix));
  auto rows = index_size_report(shape_of(ix));
  if (o.json) {
    json j = {{"grammar", stats_json(s)},
              {"labels", ix.num_terminals()},
              {"elements", ix.num_elements()},
              {"texts", ix.num_texts()},
              {"sizes", size_json(rows)}};
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  print_stats("grammar", s);
  std::cout << "labels=" << ix.num_terminals() << " elements=" << ix.num_elements()
            << " texts=" << ix.num_texts() << "\n";
  std::cout << format_size_report(rows);
  return 0;
}

int cmd_traverse(const Options& o) {
  TinyTIndex ix = load_index_file(o.input);
  Navigator nav(ix);
  std::uint64_t checksum = 0, nodes = 0;
  Stopwatch sw;
  if (o.mode == "dflr-rec") {
    nodes = traverse_recursive(nav, checksum);
  } else if (o.mode == "pooled") {
    nodes = traverse_pooled(nav, checksum);
  } else {
    nodes = traverse_iterative(nav, checksum);
  }
  double ms = sw.ms();
  double rate = ms > 0 ? nodes / (ms / 1000.0) : 0.0;
  if (o.json) {
    json j = {{"mode", o.mode}, {"nodes", nodes}, {"ms", ms}, {"nodes_per_second", rate},
              {"checksum", checksum}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "nodes=" << nodes << " nodes_per_second=" << static_cast<std::uint64_t>(rate)
              << " checksum=" << checksum << "\n";
  }
  return 0;
}

int cmd_gen(const Options& o) {
  std::string xml;
  if (o.kind == "tree") {
    xml = gen_tree_xml({o.seed, o.budget, o.labels, o.text_p, o.repeat});
  } else {
    xml = gen_xmark_like(o.scale, o.seed);
  }
  if (o.out.empty()) {
    std::cout << xml << "\n";
  } else {
    std::ofstream out(o.out, std::ios::binary);
    out << xml << "\n";
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + o.out);
  }
  return 0;
}

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::kInternal:
    case ErrorCode::kNondeterministicAutomaton:
    case ErrorCode::kTextIndexOverflow:
      return 3;
    default:
      return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TinyT: grammar-compressed XML structure index"};
  app.require_subcommand(1);
  Options o;

  auto* build = app.add_subcommand("build", "Compress an XML document into an index");
  build->add_option("input", o.input, "XML file")->required()->check(CLI::ExistingFile);
  build->add_option("--out,-o", o.out, "index file")->required();
  build->add_option("--texts", o.texts, "text collection file (default: <out>.txt)");
  build->add_option("--compressor", o.compressor)->check(CLI::IsMember({"repair", "dag"}));
  build->add_option("--max-rank", o.max_rank)->check(CLI::Range(0u, kMaxRank));
  build->add_flag("--json", o.json);

  auto* cnt = app.add_subcommand("count", "Count the nodes an XPath query selects");
  cnt->add_option("index", o.input)->required()->check(CLI::ExistingFile);
  cnt->add_option("xpath", o.xpath)->required();
  cnt->add_option("--jump", o.jump)->check(CLI::IsMember({"off", "relevant", "f"}));
  cnt->add_flag("--no-skip", o.no_skip);
  cnt->add_flag("--json", o.json);

  auto* ser = app.add_subcommand("serialize", "Print the subtrees an XPath query selects");
  ser->add_option("index", o.input)->required()->check(CLI::ExistingFile);
  ser->add_option("texts", o.texts, "text collection file")->check(CLI::ExistingFile);
  ser->add_option("--xpath,-q", o.xpath)->required();
  ser->add_option("--out,-o", o.out);
  ser->add_flag("--no-jump", o.no_jump);
  ser->add_flag("--no-skip", o.no_skip);
  ser->add_flag("--no-memo", o.no_memo);

  auto* mat = app.add_subcommand("materialize", "Print pre-order numbers of selected nodes");
  mat->add_option("index", o.input)->required()->check(CLI::ExistingFile);
  mat->add_option("xpath", o.xpath)->required();
  mat->add_flag("--no-jump", o.no_jump);
  mat->add_flag("--no-skip", o.no_skip);
  mat->add_flag("--no-memo", o.no_memo);

  auto* st = app.add_subcommand("stats", "Grammar statistics and component sizes");
  st->add_option("index", o.input)->required()->check(CLI::ExistingFile);
  st->add_flag("--json", o.json);

  auto* trav = app.add_subcommand("traverse", "Full depth-first traversal over the index");
  trav->add_option("index", o.input)->required()->check(CLI::ExistingFile);
  trav->add_option("--mode", o.mode)->check(CLI::IsMember({"dflr-rec", "dflr-it", "pooled"}));
  trav->add_flag("--json", o.json);

  auto* gen = app.add_subcommand("gen", "Generate a test document");
  gen->add_option("kind", o.kind)->check(CLI::IsMember({"tree", "xmark"}));
  gen->add_option("--seed", o.seed);
  gen->add_option("--budget", o.budget)->check(CLI::PositiveNumber);
  gen->add_option("--labels", o.labels)->check(CLI::PositiveNumber);
  gen->add_option("--text-p", o.text_p)->check(CLI::Range(0.0, 1.0));
  gen->add_option("--repeat", o.repeat)->check(CLI::Range(0.0, 1.0));
  gen->add_option("--scale", o.scale)->check(CLI::PositiveNumber);
  gen->add_option("--out,-o", o.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*build) return cmd_build(o);
    if (*cnt) return cmd_count(o);
    if (*ser) return cmd_serialize(o);
    if (*mat) return cmd_materialize(o);
    if (*st) return cmd_stats(o);
    if (*trav) return cmd_traverse(o);
    if (*gen) return cmd_gen(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
