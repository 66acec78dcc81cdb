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

#include <functional>
#include <random>
#include <string>

#include "tinyt/grammar.hpp"
#include "tinyt/index.hpp"
#include "tinyt/xml_model.hpp"

namespace tinyt::testing {

// Random unranked tree over labels l0..l{labels-1} with occasional text
// leaves. Repeats earlier subtrees with probability `repeat` to create
// sharing opportunities.
inline Document random_document(std::mt19937_64& rng, std::size_t budget, unsigned labels,
                                double text_p = 0.2, double repeat = 0.3) {
  std::string xml;
  std::vector<std::string> done;  // serialized closed subtrees
  std::size_t used = 0;
  std::uniform_real_distribution<double> u(0, 1);
  // Recursive-descent generator with an explicit budget; depth is bounded
  // by the budget but kept small by the fan-out choice.
  auto label = [&] { return "l" + std::to_string(rng() % labels); };
  std::function<std::string(unsigned)> gen = [&](unsigned depth) -> std::string {
    ++used;
    std::string name = label();
    std::string out = "<" + name + ">";
    unsigned kids = depth > 12 ? 0 : static_cast<unsigned>(rng() % 4);
    for (unsigned k = 0; k < kids && used < budget; ++k) {
      if (!done.empty() && u(rng) < repeat) {
        const std::string& s = done[rng() % done.size()];
        out += s;
        used += 1;
      } else if (u(rng) < text_p) {
        out += "t" + std::to_string(rng() % 1000);
        ++used;
        // Adjacent text would merge; separate it from the next item.
        if (k + 1 < kids) {
          out += "<sep/>";
          ++used;
        }
      } else {
        out += gen(depth + 1);
      }
    }
    out += "</" + name + ">";
    if (out.size() < 400) done.push_back(out);
    return out;
  };
  xml = gen(0);
  return make_structure_tree(xml);
}

inline BinaryTree random_binary(std::mt19937_64& rng, std::size_t budget, unsigned labels,
                                double repeat = 0.3) {
  return binarize(random_document(rng, budget, labels, 0.2, repeat).tree);
}

// Full indexing pipeline for a document: binarize, compress, bCNF, index.
inline TinyTIndex index_document(const Document& d, unsigned max_rank = 4) {
  return build_index(to_bcnf(compress_repair(binarize(d.tree), max_rank)));
}

}  // namespace tinyt::testing
