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


#include "tinyt/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace tinyt {

namespace {

constexpr const char* kWords[] = {
    "abide",  "beauty", "cunning", "dagger", "earnest", "fortune", "gentle", "honour",
    "idle",   "jest",   "kingdom", "lament", "mercy",   "noble",   "oath",   "pardon",
    "quarrel", "rogue", "sorrow",  "tempest", "uncle",  "valour",  "wisdom", "yonder",
    "amber",  "briar",  "crown",   "duke",    "envy",   "feast",   "grace",  "herald"};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : g_() % n; }
  double unit() { return std::uniform_real_distribution<double>(0, 1)(g_); }
  bool coin(double p) { return unit() < p; }
  const char* word() { return kWords[below(std::size(kWords))]; }

 private:
  std::mt19937_64 g_;
};

}  // namespace

std::string gen_tree_xml(const TreeGenSpec& spec) {
  Rng rng(spec.seed);
  const unsigned labels = std::max(1u, spec.label_count);
  const std::uint64_t budget = std::max<std::uint64_t>(1, spec.node_budget);
  struct Open {
    unsigned label;
    std::size_t start;
    std::uint64_t nodes_before;
    unsigned kids_left;
    bool last_text;
  };
  struct Graft {
    std::string xml;
    std::uint64_t nodes;
  };
  std::vector<Graft> pool;
  std::string xml;
  std::uint64_t used = 0;
  std::vector<Open> stack;
  auto open = [&] {
    unsigned l = static_cast<unsigned>(rng.below(labels));
    stack.push_back({l, xml.size(), used, 0, false});
    ++used;
    xml += "<e" + std::to_string(l) + ">";
    stack.back().kids_left = stack.size() > 24 ? 0 : static_cast<unsigned>(rng.below(4));
  };
  open();
  while (!stack.empty()) {
    Open& top = stack.back();
    if (top.kids_left == 0 || used >= budget) {
      xml += "</e" + std::to_string(top.label) + ">";
      std::uint64_t n = used - top.nodes_before;
      if (xml.size() - top.start < 2048) {
        Graft g{xml.substr(top.start), n};
        if (pool.size() < 4096) {
          pool.push_back(std::move(g));
        } else {
          pool[rng.below(pool.size())] = std::move(g);
        }
      }
      stack.pop_back();
      continue;
    }
    --top.kids_left;
    if (!pool.empty() && rng.coin(spec.repetition_bias)) {
      const Graft& g = pool[rng.below(pool.size())];
      if (used + g.nodes <= budget) {
        xml += g.xml;
        used += g.nodes;
        top.last_text = false;
        continue;
      }
    }
    if (!top.last_text && rng.coin(spec.text_probability)) {
      xml += rng.word();
      ++used;
      top.last_text = true;
      continue;
    }
    top.last_text = false;
    open();
  }
  return xml;
}

Document gen_tree(const TreeGenSpec& spec) { return make_structure_tree(gen_tree_xml(spec)); }

namespace {

class XmarkWriter {
 public:
  XmarkWriter(double scale, std::uint64_t seed) : rng_(seed) {
    auto n = [&](double per_unit) {
      return static_cast<unsigned>(std::max(1.0, std::round(per_unit * scale)));
    };
    items_per_region_ = n(120);
    people_ = n(450);
    open_ = n(210);
    closed_ = n(175);
    categories_ = n(70);
  }

  std::string run() {
    out_ += "<site>";
    out_ += "<regions>";
    unsigned item = 0;
    for (const char* region : {"africa", "asia", "australia", "europe", "namerica", "samerica"}) {
      tag_open(region);
      for (unsigned i = 0; i < items_per_region_; ++i) write_item(item++, i == 0);
      tag_close(region);
    }
    out_ += "</regions>";
    items_ = item;
    out_ += "<categories>";
    for (unsigned c = 0; c < categories_; ++c) {
      out_ += "<category id=\"category" + std::to_string(c) + "\">";
      leaf("name", phrase(2));
      out_ += "<description>";
      write_text(false);
      out_ += "</description></category>";
    }
    out_ += "</categories><catgraph>";
    for (unsigned c = 0; c < categories_; ++c) {
      out_ += "<edge from=\"category" + std::to_string(rng_.below(categories_)) + "\" to=\"category" +
              std::to_string(rng_.below(categories_)) + "\"/>";
    }
    out_ += "</catgraph><people>";
    for (unsigned p = 0; p < people_; ++p) write_person(p);
    out_ += "</people><open_auctions>";
    for (unsigned a = 0; a < open_; ++a) write_open(a);
    out_ += "</open_auctions><closed_auctions>";
    for (unsigned a = 0; a < closed_; ++a) write_closed(a);
    out_ += "</closed_auctions></site>";
    return std::move(out_);
  }

 private:
  void tag_open(const char* t) { out_ += '<', out_ += t, out_ += '>'; }
  void tag_close(const char* t) { out_ += "</", out_ += t, out_ += '>'; }
  void leaf(const char* t, const std::string& v) {
    tag_open(t);
    out_ += v;
    tag_close(t);
  }
  std::string phrase(unsigned n) {
    std::string s;
    for (unsigned i = 0; i < n; ++i) {
      if (i) s += ' ';
      s += rng_.word();
    }
    return s;
  }
  std::string ref(const char* kind, unsigned bound) {
    return std::string(kind) + std::to_string(rng_.below(std::max(1u, bound)));
  }
  std::string date() {
    return std::to_string(1 + rng_.below(12)) + "/" + std::to_string(1 + rng_.below(28)) + "/" +
           std::to_string(1998 + rng_.below(4));
  }
  std::string money() { return std::to_string(rng_.below(300)) + "." + std::to_string(10 + rng_.below(90)); }

  // Mixed content with inline markup; `keyword` forces one keyword.
  void write_text(bool keyword) {
    out_ += "<text>";
    unsigned parts = 1 + static_cast<unsigned>(rng_.below(4));
    bool have_kw = false;
    for (unsigned i = 0; i < parts; ++i) {
      out_ += phrase(1 + static_cast<unsigned>(rng_.below(6)));
      out_ += ' ';
      double r = rng_.unit();
      if ((keyword && !have_kw) || r < 0.3) {
        leaf("keyword", phrase(1 + static_cast<unsigned>(rng_.below(2))));
        have_kw = true;
      } else if (r < 0.45) {
        leaf("bold", phrase(1));
      } else if (r < 0.6) {
        out_ += "<emph>";
        out_ += phrase(1);
        out_ += ' ';
        if (rng_.coin(0.3)) leaf("keyword", phrase(1));
        out_ += "</emph>";
      }
    }
    out_ += phrase(1);
    out_ += "</text>";
  }

  void write_parlist(unsigned depth, bool deep) {
    out_ += "<parlist>";
    unsigned n = 1 + static_cast<unsigned>(rng_.below(3));
    for (unsigned i = 0; i < n; ++i) {
      out_ += "<listitem>";
      if ((deep && i == 0 && depth < 2) || (depth < 2 && rng_.coin(0.25))) {
        write_parlist(depth + 1, deep && i == 0);
      } else {
        write_text(deep && i == 0);
      }
      out_ += "</listitem>";
    }
    out_ += "</parlist>";
  }

  // mode 0: random, 1: deep parlist with keyword, 2: text with keyword.
  void write_description(int mode) {
    out_ += "<description>";
    if (mode == 1 || (mode == 0 && rng_.coin(0.5))) {
      write_parlist(0, mode == 1);
    } else {
      write_text(mode == 2);
    }
    out_ += "</description>";
  }

  void write_item(unsigned id, bool first) {
    out_ += "<item id=\"item" + std::to_string(id) + "\"";
    if (rng_.coin(0.1)) out_ += " featured=\"yes\"";
    out_ += ">";
    leaf("location", rng_.coin(0.7) ? "United States" : phrase(1));
    leaf("quantity", std::to_string(1 + rng_.below(3)));
    leaf("name", phrase(2));
    leaf("payment", rng_.coin(0.5) ? "Creditcard" : "Money order, Cash");
    write_description(0);
    leaf("shipping", rng_.coin(0.5) ? "Will ship internationally" : "Buyer pays fixed shipping charges");
    unsigned cats = 1 + static_cast<unsigned>(rng_.below(3));
    for (unsigned c = 0; c < cats; ++c) {
      out_ += "<incategory category=\"" + ref("category", categories_) + "\"/>";
    }
    out_ += "<mailbox>";
    unsigned mails = first ? 1 : static_cast<unsigned>(rng_.below(3));
    for (unsigned m = 0; m < mails; ++m) {
      out_ += "<mail>";
      leaf("from", phrase(2));
      leaf("to", phrase(2));
      leaf("date", date());
      write_text(first && m == 0);
      out_ += "</mail>";
    }
    out_ += "</mailbox></item>";
  }

  void write_person(unsigned id) {
    out_ += "<person id=\"person" + std::to_string(id) + "\">";
    leaf("name", phrase(2));
    leaf("emailaddress", std::string("mailto:") + rng_.word() + "@" + rng_.word() + ".com");
    if (rng_.coin(0.5)) leaf("phone", "+" + std::to_string(rng_.below(100)) + " " + std::to_string(rng_.below(10000000)));
    if (rng_.coin(0.4)) {
      out_ += "<address>";
      leaf("street", std::to_string(rng_.below(100)) + " " + rng_.word() + " St");
      leaf("city", rng_.word());
      leaf("country", rng_.coin(0.7) ? "United States" : rng_.word());
      leaf("zipcode", std::to_string(rng_.below(100000)));
      out_ += "</address>";
    }
    if (rng_.coin(0.5)) {
      out_ += "<profile income=\"" + money() + "\">";
      unsigned n = static_cast<unsigned>(rng_.below(3));
      for (unsigned i = 0; i < n; ++i) out_ += "<interest category=\"" + ref("category", categories_) + "\"/>";
      if (rng_.coin(0.5)) leaf("education", rng_.coin(0.5) ? "College" : "Graduate School");
      leaf("business", rng_.coin(0.5) ? "Yes" : "No");
      if (rng_.coin(0.5)) leaf("age", std::to_string(18 + rng_.below(50)));
      out_ += "</profile>";
    }
    out_ += "<watches>";
    unsigned w = static_cast<unsigned>(rng_.below(3));
    for (unsigned i = 0; i < w; ++i) out_ += "<watch open_auction=\"" + ref("open_auction", open_) + "\"/>";
    out_ += "</watches></person>";
  }

  void write_annotation(int mode) {
    out_ += "<annotation><author person=\"" + ref("person", people_) + "\"/>";
    write_description(mode);
    leaf("happiness", std::to_string(1 + rng_.below(10)));
    out_ += "</annotation>";
  }

  void write_open(unsigned id) {
    out_ += "<open_auction id=\"open_auction" + std::to_string(id) + "\">";
    leaf("initial", money());
    if (rng_.coin(0.4)) leaf("reserve", money());
    unsigned bids = static_cast<unsigned>(rng_.below(4));
    for (unsigned b = 0; b < bids; ++b) {
      out_ += "<bidder>";
      leaf("date", date());
      leaf("time", std::to_string(rng_.below(24)) + ":" + std::to_string(10 + rng_.below(50)));
      out_ += "<personref person=\"" + ref("person", people_) + "\"/>";
      leaf("increase", money());
      out_ += "</bidder>";
    }
    leaf("current", money());
    out_ += "<itemref item=\"" + ref("item", items_) + "\"/>";
    out_ += "<seller person=\"" + ref("person", people_) + "\"/>";
    write_annotation(0);
    leaf("quantity", "1");
    leaf("type", rng_.coin(0.5) ? "Regular" : "Featured");
    out_ += "<interval>";
    leaf("start", date());
    leaf("end", date());
    out_ += "</interval></open_auction>";
  }

  void write_closed(unsigned id) {
    out_ += "<closed_auction>";
    out_ += "<seller person=\"" + ref("person", people_) + "\"/>";
    out_ += "<buyer person=\"" + ref("person", people_) + "\"/>";
    out_ += "<itemref item=\"" + ref("item", items_) + "\"/>";
    leaf("price", money());
    leaf("date", date());
    leaf("quantity", "1");
    leaf("type", rng_.coin(0.5) ? "Regular" : "Featured");
    write_annotation(id % 3 == 0 ? 1 : id % 3 == 1 ? 2 : 0);
    out_ += "</closed_auction>";
  }

  Rng rng_;
  std::string out_;
  unsigned items_per_region_ = 1, people_ = 1, open_ = 1, closed_ = 1, categories_ = 1, items_ = 1;
};

}  // namespace

std::string gen_xmark_like(double scale, std::uint64_t seed) {
  return XmarkWriter(scale > 0 ? scale : 1, seed).run();
}

const std::vector<BenchmarkQuery>& benchmark_queries() {
  static const std::vector<BenchmarkQuery> q = {
      {"Q01", "/site/regions"},
      {"Q02", "/site/closed_auctions"},
      {"Q03", "/site/regions/europe/item/mailbox/mail/text/keyword"},
      {"Q04", "/site/closed_auctions/closed_auction/annotation/description/parlist/listitem"},
      {"Q05",
       "/site/closed_auctions/closed_auction/annotation/description/parlist/listitem/parlist/"
       "listitem/*//keyword"},
      {"Q06", "/site/regions/*/item"},
      {"Q07", "//listitem//keyword"},
      {"Q08", "/site/regions/*/item//keyword"},
      {"X1", "/site/closed_auctions/closed_auction/annotation/description/text/keyword"},
      {"X2", "//closed_auction//keyword"},
      {"X3", "/site/closed_auctions/closed_auction//keyword"},
      {"Q13", "//*"},
      {"Q14", "//*//*"},
      {"Q15", "//*//*//*//*"},
      {"Q16", "//*//*//*//*//*//*//*//*"},
  };
  return q;
}

}  // namespace tinyt
