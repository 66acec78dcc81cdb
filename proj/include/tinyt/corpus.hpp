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
#include <string>
#include <utility>
#include <vector>

#include "tinyt/xml_model.hpp"

namespace tinyt {

struct TreeGenSpec {
  std::uint64_t seed = 1;
  std::uint64_t node_budget = 1000;
  unsigned label_count = 8;
  double text_probability = 0.2;
  double repetition_bias = 0.3;  // chance of grafting an earlier subtree
};

// Random document of at most `node_budget` nodes (elements, texts and
// grafted copies counted by their size). Labels are e0, e1, ...
std::string gen_tree_xml(const TreeGenSpec& spec);
Document gen_tree(const TreeGenSpec& spec);

// XMark-flavoured auction document. Scale 1 is roughly one megabyte.
std::string gen_xmark_like(double scale, std::uint64_t seed);

struct BenchmarkQuery {
  std::string name;
  std::string xpath;
};

// Q01-Q08, Q13-Q16 and X1-X3.
const std::vector<BenchmarkQuery>& benchmark_queries();

}  // namespace tinyt
