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
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tinyt {

using LabelId = std::uint32_t;
using NodeIdx = std::uint32_t;

inline constexpr NodeIdx kNoNode = std::numeric_limits<NodeIdx>::max();

// Reserved labels. `_N` is the null leaf of the first-child/next-sibling
// encoding and never occurs in a structure tree.
inline constexpr LabelId kTextLabel = 0;      // _T
inline constexpr LabelId kAttrListLabel = 1;  // _A
inline constexpr LabelId kAttrTextLabel = 2;  // _AT
inline constexpr LabelId kNullLabel = 3;      // _N
inline constexpr LabelId kFirstUserLabel = 4;

class LabelTable {
 public:
  LabelTable();

  LabelId intern(std::string_view name);
  std::optional<LabelId> find(std::string_view name) const;
  const std::string& name(LabelId id) const { return names_.at(id); }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  bool is_attribute(LabelId id) const {
    return id >= kFirstUserLabel && !names_[id].empty() && names_[id][0] == '@';
  }
  // Labels counted as element nodes for pre-order numbering, and matched
  // by the `*` name test.
  bool is_element(LabelId id) const {
    return id >= kFirstUserLabel && !is_attribute(id);
  }
  static bool is_text_slot(LabelId id) {
    return id == kTextLabel || id == kAttrTextLabel;
  }

  friend bool operator==(const LabelTable& a, const LabelTable& b) {
    return a.names_ == b.names_;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, LabelId> ids_;
};

// Unranked document tree with placeholder leaves for values. Nodes are
// stored in pre-order: nodes[0] is the root and a node's descendants
// occupy the indexes directly after it.
struct StructureTree {
  struct Node {
    LabelId label = 0;
    NodeIdx first_child = kNoNode;
    NodeIdx next_sibling = kNoNode;
    NodeIdx parent = kNoNode;
  };

  std::vector<Node> nodes;
  NodeIdx root = 0;
  LabelTable labels;

  std::size_t size() const { return nodes.size(); }
  const Node& operator[](NodeIdx i) const { return nodes[i]; }

  // Structural equality by label name, independent of label id assignment.
  bool same_shape(const StructureTree& other) const;
};

// Builds a StructureTree by appending nodes in pre-order.
class TreeBuilder {
 public:
  TreeBuilder() = default;
  explicit TreeBuilder(LabelTable labels) { tree_.labels = std::move(labels); }

  LabelTable& labels() { return tree_.labels; }
  // Appends `label` as the last child of `parent` (kNoNode for the root).
  NodeIdx add(LabelId label, NodeIdx parent);
  StructureTree finish() &&;

 private:
  StructureTree tree_;
  std::vector<NodeIdx> last_child_;
};

struct TextCollection {
  std::string buffer;
  std::vector<std::uint64_t> offsets;

  std::size_t count() const { return offsets.size(); }
  void append(std::string_view value);
  std::string_view operator[](std::size_t i) const;

  friend bool operator==(const TextCollection& a, const TextCollection& b) {
    return a.buffer == b.buffer && a.offsets == b.offsets;
  }
};

struct Document {
  StructureTree tree;
  TextCollection texts;
};

Document make_structure_tree(std::string_view xml);

std::string_view get_text(const TextCollection& texts, std::size_t i);

void emit_xml(const StructureTree& tree, const TextCollection& texts,
              std::ostream& sink);
std::string emit_xml(const StructureTree& tree, const TextCollection& texts);

// Serializes the subtree rooted at `node`. `first_text` is the collection
// index of the first placeholder inside the subtree.
void emit_subtree(const StructureTree& tree, const TextCollection& texts,
                  NodeIdx node, std::size_t first_text, std::ostream& sink);

void escape_text(std::string_view value, std::string& out);
void escape_attribute(std::string_view value, std::string& out);

// Checks the structure tree invariants; throws Error(kInternal) on violation.
void validate(const StructureTree& tree, const TextCollection& texts);

std::size_t count_text_slots(const StructureTree& tree);
std::size_t count_elements(const StructureTree& tree);

// Term syntax, e.g. name(_A(@id(_AT),@r(_AT)),_T).
std::string to_term(const StructureTree& tree);

}  // namespace tinyt
