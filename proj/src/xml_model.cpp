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

#include "tinyt/xml_model.hpp"

#include <sstream>
#include <utility>

#include "tinyt/error.hpp"

namespace tinyt {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedXml: return "MalformedXml";
    case ErrorCode::kUnsupportedConstruct: return "UnsupportedConstruct";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kSinkFailure: return "SinkFailure";
    case ErrorCode::kCycleDetected: return "CycleDetected";
    case ErrorCode::kInvalidGrammar: return "InvalidGrammar";
    case ErrorCode::kRankOverflow: return "RankOverflow";
    case ErrorCode::kIdOverflow: return "IdOverflow";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kInvalidNodeId: return "InvalidNodeId";
    case ErrorCode::kSyntaxError: return "SyntaxError";
    case ErrorCode::kUnsupportedFeature: return "UnsupportedFeature";
    case ErrorCode::kNondeterministicAutomaton: return "NondeterministicAutomaton";
    case ErrorCode::kTextIndexOverflow: return "TextIndexOverflow";
    case ErrorCode::kInternal: return "Internal";
  }
  return "Unknown";
}

LabelTable::LabelTable() {
  for (const char* name : {"_T", "_A", "_AT", "_N"}) intern(name);
}

LabelId LabelTable::intern(std::string_view name) {
  auto it = ids_.find(std::string(name));
  if (it != ids_.end()) return it->second;
  auto id = static_cast<LabelId>(names_.size());
  names_.emplace_back(name);
  ids_.emplace(names_.back(), id);
  return id;
}

std::optional<LabelId> LabelTable::find(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

NodeIdx TreeBuilder::add(LabelId label, NodeIdx parent) {
  auto idx = static_cast<NodeIdx>(tree_.nodes.size());
  StructureTree::Node node;
  node.label = label;
  node.parent = parent;
  tree_.nodes.push_back(node);
  last_child_.push_back(kNoNode);
  if (parent != kNoNode) {
    NodeIdx prev = last_child_[parent];
    if (prev == kNoNode) {
      tree_.nodes[parent].first_child = idx;
    } else {
      tree_.nodes[prev].next_sibling = idx;
    }
    last_child_[parent] = idx;
  }
  return idx;
}

StructureTree TreeBuilder::finish() && {
  last_child_.clear();
  return std::move(tree_);
}

bool StructureTree::same_shape(const StructureTree& other) const {
  if (nodes.size() != other.nodes.size() || root != other.root) return false;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node& a = nodes[i];
    const Node& b = other.nodes[i];
    if (a.first_child != b.first_child || a.next_sibling != b.next_sibling ||
        a.parent != b.parent) {
      return false;
    }
    if (labels.name(a.label) != other.labels.name(b.label)) return false;
  }
  return true;
}

void TextCollection::append(std::string_view value) {
  offsets.push_back(buffer.size());
  buffer.append(value);
}

std::string_view TextCollection::operator[](std::size_t i) const {
  std::size_t begin = offsets[i];
  std::size_t end = i + 1 < offsets.size() ? offsets[i + 1] : buffer.size();
  return std::string_view(buffer).substr(begin, end - begin);
}

std::string_view get_text(const TextCollection& texts, std::size_t i) {
  if (i >= texts.count()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "text index " + std::to_string(i) + " >= " +
                    std::to_string(texts.count()));
  }
  return texts[i];
}

namespace {

bool is_name_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' ||
         c == ':' || c >= 0x80;
}

bool is_name_char(unsigned char c) {
  return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

void append_utf8(std::uint32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

class XmlParser {
 public:
  explicit XmlParser(std::string_view in) : in_(in) {}

  Document parse() {
    skip_prolog();
    if (at_end() || peek() != '<') fail("expected root element");
    parse_root_element();
    skip_misc();
    if (!at_end()) fail("content after root element");
    Document doc;
    doc.tree = std::move(builder_).finish();
    doc.texts = std::move(texts_);
    return doc;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(ErrorCode::kMalformedXml, pos_, what);
  }
  [[noreturn]] void unsupported(const std::string& what) const {
    throw ParseError(ErrorCode::kUnsupportedConstruct, pos_, what);
  }

  bool at_end() const { return pos_ >= in_.size(); }
  char peek() const { return in_[pos_]; }
  bool starts_with(std::string_view s) const {
    return in_.substr(pos_, s.size()) == s;
  }
  void expect(char c) {
    if (at_end() || peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  void skip_spaces() {
    while (!at_end() && is_space(peek())) ++pos_;
  }
  void skip_past(std::string_view terminator, const char* what) {
    auto end = in_.find(terminator, pos_);
    if (end == std::string_view::npos) fail(std::string("unterminated ") + what);
    pos_ = end + terminator.size();
  }

  // Comments and processing instructions are outside the data model.
  bool skip_comment_or_pi() {
    if (starts_with("<!--")) {
      pos_ += 4;
      skip_past("-->", "comment");
      return true;
    }
    if (starts_with("<?")) {
      pos_ += 2;
      skip_past("?>", "processing instruction");
      return true;
    }
    return false;
  }

  void skip_misc() {
    for (;;) {
      skip_spaces();
      if (!skip_comment_or_pi()) return;
    }
  }

  void skip_prolog() {
    if (in_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
    for (;;) {
      skip_misc();
      if (starts_with("<!DOCTYPE")) {
        skip_doctype();
        continue;
      }
      return;
    }
  }

  void skip_doctype() {
    pos_ += 9;
    char quote = 0;
    while (!at_end()) {
      char c = in_[pos_++];
      if (quote) {
        if (c == quote) quote = 0;
      } else if (c == '"' || c == '\'') {
        quote = c;
      } else if (c == '[') {
        unsupported("DTD internal subset");
      } else if (c == '>') {
        return;
      }
    }
    fail("unterminated DOCTYPE");
  }

  std::string_view parse_name() {
    std::size_t begin = pos_;
    if (at_end() || !is_name_start(static_cast<unsigned char>(peek()))) {
      fail("expected name");
    }
    while (!at_end() && is_name_char(static_cast<unsigned char>(peek()))) ++pos_;
    return in_.substr(begin, pos_ - begin);
  }

  void parse_reference(std::string& out) {
    std::size_t begin = pos_;
    ++pos_;  // '&'
    auto semi = in_.find(';', pos_);
    if (semi == std::string_view::npos || semi - pos_ > 16) {
      pos_ = begin;
      fail("malformed entity reference");
    }
    std::string_view ref = in_.substr(pos_, semi - pos_);
    pos_ = semi + 1;
    if (ref == "lt") out.push_back('<');
    else if (ref == "gt") out.push_back('>');
    else if (ref == "amp") out.push_back('&');
    else if (ref == "quot") out.push_back('"');
    else if (ref == "apos") out.push_back('\'');
    else if (!ref.empty() && ref[0] == '#') {
      std::uint32_t cp = 0;
      bool hex = ref.size() > 1 && ref[1] == 'x';
      std::string_view digits = ref.substr(hex ? 2 : 1);
      if (digits.empty()) {
        pos_ = begin;
        fail("empty character reference");
      }
      for (char c : digits) {
        std::uint32_t d;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
        else {
          pos_ = begin;
          fail("bad character reference");
        }
        cp = cp * (hex ? 16 : 10) + d;
        if (cp > 0x10FFFF) {
          pos_ = begin;
          fail("character reference out of range");
        }
      }
      append_utf8(cp, out);
    } else {
      pos_ = begin;
      fail("undefined entity '" + std::string(ref) + "'");
    }
  }

  LabelId element_label(std::string_view name) {
    LabelId id = builder_.labels().intern(name);
    if (id < kFirstUserLabel) unsupported("reserved element name " + std::string(name));
    return id;
  }

  struct StartTag {
    NodeIdx node;
    std::string_view name;
    bool self_closing;
  };

  StartTag parse_start_tag(NodeIdx parent) {
    expect('<');
    StartTag tag;
    tag.name = parse_name();
    tag.node = builder_.add(element_label(tag.name), parent);
    NodeIdx attr_list = kNoNode;
    std::vector<std::string_view> seen;
    for (;;) {
      bool had_space = !at_end() && is_space(peek());
      skip_spaces();
      if (at_end()) fail("truncated start tag");
      if (peek() == '/') {
        ++pos_;
        expect('>');
        tag.self_closing = true;
        return tag;
      }
      if (peek() == '>') {
        ++pos_;
        tag.self_closing = false;
        return tag;
      }
      if (!had_space) fail("expected whitespace before attribute");
      std::string_view attr = parse_name();
      for (auto s : seen) {
        if (s == attr) fail("duplicate attribute " + std::string(attr));
      }
      seen.push_back(attr);
      skip_spaces();
      expect('=');
      skip_spaces();
      if (at_end() || (peek() != '"' && peek() != '\'')) fail("expected quoted value");
      char quote = in_[pos_++];
      std::string value;
      for (;;) {
        if (at_end()) fail("truncated attribute value");
        char c = peek();
        if (c == quote) {
          ++pos_;
          break;
        }
        if (c == '<') fail("'<' in attribute value");
        if (c == '&') {
          parse_reference(value);
        } else {
          value.push_back(c);
          ++pos_;
        }
      }
      if (attr_list == kNoNode) attr_list = builder_.add(kAttrListLabel, tag.node);
      std::string label = "@";
      label.append(attr);
      NodeIdx a = builder_.add(builder_.labels().intern(label), attr_list);
      builder_.add(kAttrTextLabel, a);
      texts_.append(value);
    }
  }

  void flush_text(NodeIdx parent) {
    if (pending_.empty()) return;
    builder_.add(kTextLabel, parent);
    texts_.append(pending_);
    pending_.clear();
  }

  void parse_root_element() {
    std::vector<StartTag> stack;
    StartTag root = parse_start_tag(kNoNode);
    if (root.self_closing) return;
    stack.push_back(root);
    while (!stack.empty()) {
      if (at_end()) fail("truncated document");
      char c = peek();
      if (c == '&') {
        parse_reference(pending_);
        continue;
      }
      if (c != '<') {
        pending_.push_back(c);
        ++pos_;
        continue;
      }
      if (starts_with("</")) {
        flush_text(stack.back().node);
        pos_ += 2;
        std::string_view name = parse_name();
        skip_spaces();
        expect('>');
        if (name != stack.back().name) {
          fail("mismatched end tag </" + std::string(name) + ">");
        }
        stack.pop_back();
      } else if (skip_comment_or_pi()) {
        // merged into the surrounding text
      } else if (starts_with("<![CDATA[")) {
        pos_ += 9;
        auto end = in_.find("]]>", pos_);
        if (end == std::string_view::npos) fail("unterminated CDATA section");
        pending_.append(in_.substr(pos_, end - pos_));
        pos_ = end + 3;
      } else if (starts_with("<!")) {
        unsupported("markup declaration inside content");
      } else {
        flush_text(stack.back().node);
        StartTag child = parse_start_tag(stack.back().node);
        if (!child.self_closing) stack.push_back(child);
      }
    }
  }

  std::string_view in_;
  std::size_t pos_ = 0;
  TreeBuilder builder_;
  TextCollection texts_;
  std::string pending_;
};

}  // namespace

Document make_structure_tree(std::string_view xml) {
  return XmlParser(xml).parse();
}

void escape_text(std::string_view value, std::string& out) {
  for (char c : value) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
}

void escape_attribute(std::string_view value, std::string& out) {
  for (char c : value) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '"': out += "&quot;"; break;
      case '\t': out += "&#9;"; break;
      case '\n': out += "&#10;"; break;
      case '\r': out += "&#13;"; break;
      default: out.push_back(c);
    }
  }
}

namespace {

// Iterative pre-order writer shared by whole-document and subtree output.
class XmlWriter {
 public:
  XmlWriter(const StructureTree& tree, const TextCollection& texts,
            std::size_t next_text)
      : tree_(tree), texts_(texts), next_text_(next_text) {}

  void write(NodeIdx top, std::ostream& sink) {
    struct Frame {
      NodeIdx node;
      NodeIdx next_child;
    };
    std::vector<Frame> stack;
    auto open = [&](NodeIdx n) {
      const auto& node = tree_[n];
      LabelId label = node.label;
      if (label == kTextLabel || label == kAttrTextLabel) {
        escape_text(take_text(), out_);
        return;
      }
      if (label == kAttrListLabel || tree_.labels.is_attribute(label)) {
        write_attributes(n);
        return;
      }
      out_ += '<';
      out_ += tree_.labels.name(label);
      NodeIdx child = node.first_child;
      if (child != kNoNode && tree_[child].label == kAttrListLabel) {
        write_attributes(child);
        child = tree_[child].next_sibling;
      }
      out_ += '>';
      stack.push_back({n, child});
    };
    open(top);
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next_child == kNoNode) {
        out_ += "</";
        out_ += tree_.labels.name(tree_[f.node].label);
        out_ += '>';
        stack.pop_back();
      } else {
        NodeIdx c = f.next_child;
        f.next_child = tree_[c].next_sibling;
        open(c);
      }
      if (out_.size() > (1u << 16)) flush(sink);
    }
    flush(sink);
  }

 private:
  std::string_view take_text() {
    if (next_text_ >= texts_.count()) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "structure tree has more placeholders than texts");
    }
    return texts_[next_text_++];
  }

  // `n` is an _A node (all its attributes) or a single @name node.
  void write_attributes(NodeIdx n) {
    auto one = [&](NodeIdx a) {
      out_ += ' ';
      out_.append(tree_.labels.name(tree_[a].label), 1);
      out_ += "=\"";
      escape_attribute(take_text(), out_);
      out_ += '"';
    };
    if (tree_[n].label == kAttrListLabel) {
      for (NodeIdx a = tree_[n].first_child; a != kNoNode; a = tree_[a].next_sibling) {
        one(a);
      }
    } else {
      one(n);
    }
  }

  void flush(std::ostream& sink) {
    sink.write(out_.data(), static_cast<std::streamsize>(out_.size()));
    out_.clear();
    if (!sink) throw Error(ErrorCode::kSinkFailure, "write to XML sink failed");
  }

  const StructureTree& tree_;
  const TextCollection& texts_;
  std::size_t next_text_;
  std::string out_;
};

}  // namespace

void emit_xml(const StructureTree& tree, const TextCollection& texts,
              std::ostream& sink) {
  if (tree.nodes.empty()) return;
  XmlWriter(tree, texts, 0).write(tree.root, sink);
  sink << '\n';
  if (!sink) throw Error(ErrorCode::kSinkFailure, "write to XML sink failed");
}

std::string emit_xml(const StructureTree& tree, const TextCollection& texts) {
  std::ostringstream out;
  emit_xml(tree, texts, out);
  return out.str();
}

void emit_subtree(const StructureTree& tree, const TextCollection& texts,
                  NodeIdx node, std::size_t first_text, std::ostream& sink) {
  XmlWriter(tree, texts, first_text).write(node, sink);
}

std::size_t count_text_slots(const StructureTree& tree) {
  std::size_t n = 0;
  for (const auto& node : tree.nodes) n += LabelTable::is_text_slot(node.label);
  return n;
}

std::size_t count_elements(const StructureTree& tree) {
  std::size_t n = 0;
  for (const auto& node : tree.nodes) n += tree.labels.is_element(node.label);
  return n;
}

void validate(const StructureTree& tree, const TextCollection& texts) {
  auto bad = [](const std::string& what) {
    throw Error(ErrorCode::kInternal, "invalid structure tree: " + what);
  };
  if (tree.nodes.empty()) bad("empty");
  if (tree.root != 0 || tree[0].parent != kNoNode) bad("root must be node 0");
  // Pre-order layout: walking first_child/next_sibling must visit 0,1,2,...
  std::vector<NodeIdx> stack{0};
  NodeIdx expected = 0;
  while (!stack.empty()) {
    NodeIdx n = stack.back();
    stack.pop_back();
    if (n != expected++) bad("nodes not in pre-order");
    const auto& node = tree[n];
    if (node.label >= tree.labels.size() || node.label == kNullLabel) bad("bad label");
    std::vector<NodeIdx> kids;
    for (NodeIdx c = node.first_child; c != kNoNode; c = tree[c].next_sibling) {
      if (c >= tree.size() || tree[c].parent != n) bad("parent link mismatch");
      if (kids.size() > tree.size()) bad("sibling cycle");
      kids.push_back(c);
    }
    bool text_leaf = LabelTable::is_text_slot(node.label);
    if (text_leaf && !kids.empty()) bad("placeholder with children");
    if (node.label == kAttrListLabel) {
      if (node.parent == kNoNode || tree[node.parent].first_child != n) {
        bad("_A is not the first child");
      }
      for (NodeIdx c : kids) {
        if (!tree.labels.is_attribute(tree[c].label)) bad("_A child is not an attribute");
      }
    } else {
      for (NodeIdx c : kids) {
        if (tree.labels.is_attribute(tree[c].label)) bad("attribute outside _A");
        if (tree[c].label == kAttrTextLabel && !tree.labels.is_attribute(node.label)) {
          bad("_AT outside attribute");
        }
      }
    }
    if (tree.labels.is_attribute(node.label) &&
        (kids.size() != 1 || tree[kids[0]].label != kAttrTextLabel)) {
      bad("attribute without single _AT child");
    }
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  if (expected != tree.size()) bad("unreachable nodes");
  if (count_text_slots(tree) != texts.count()) bad("placeholder/text count mismatch");
}

std::string to_term(const StructureTree& tree) {
  std::string out;
  if (tree.nodes.empty()) return out;
  struct Frame {
    NodeIdx next;
    bool first;
  };
  std::vector<Frame> stack;
  auto open = [&](NodeIdx n) {
    out += tree.labels.name(tree[n].label);
    if (tree[n].first_child != kNoNode) {
      out += '(';
      stack.push_back({tree[n].first_child, true});
    }
  };
  open(tree.root);
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next == kNoNode) {
      out += ')';
      stack.pop_back();
      continue;
    }
    if (!f.first) out += ',';
    f.first = false;
    NodeIdx n = f.next;
    f.next = tree[n].next_sibling;
    open(n);
  }
  return out;
}

}  // namespace tinyt
