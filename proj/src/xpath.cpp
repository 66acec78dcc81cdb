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

#include <cctype>

#include "tinyt/automata.hpp"
#include "tinyt/error.hpp"

namespace tinyt {

namespace {

class XPathParser {
 public:
  explicit XPathParser(std::string_view text) : s_(text) {}

  XPathQuery parse() {
    XPathQuery q;
    skip_ws();
    if (at_end()) fail("empty query");
    if (peek() != '/') fail("query must start with '/' or '//'");
    while (!at_end()) {
      Step step;
      expect('/');
      if (!at_end() && peek() == '/') {
        ++pos_;
        step.axis = Axis::kDescendant;
      }
      skip_ws();
      std::size_t axis_pos = pos_;
      std::string_view word = ncname_or_star();
      skip_ws();
      if (starts_with("::")) {
        if (word != "following-sibling") {
          unsupported(axis_pos, "axis " + std::string(word));
        }
        if (step.axis == Axis::kDescendant) unsupported(axis_pos, "'//following-sibling::'");
        if (q.steps.empty()) unsupported(axis_pos, "following-sibling as the first step");
        pos_ += 2;
        skip_ws();
        step.axis = Axis::kFollowingSibling;
        word = ncname_or_star();
        skip_ws();
      }
      step.test = make_test(word);
      q.steps.push_back(std::move(step));
      if (!at_end() && peek() == '[') unsupported(pos_, "filters");
      if (!at_end() && peek() != '/') fail("unexpected character");
    }
    return q;
  }

 private:
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }
  bool starts_with(std::string_view t) const { return s_.substr(pos_, t.size()) == t; }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) {
    throw ParseError(ErrorCode::kSyntaxError, pos_, "xpath: " + what);
  }
  [[noreturn]] void unsupported(std::size_t pos, const std::string& what) {
    throw ParseError(ErrorCode::kUnsupportedFeature, pos, "xpath: unsupported " + what);
  }

  void expect(char c) {
    if (at_end() || peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string_view ncname_or_star() {
    if (at_end()) fail("expected a name test");
    if (peek() == '*') {
      ++pos_;
      return s_.substr(pos_ - 1, 1);
    }
    if (peek() == '@') unsupported(pos_, "attribute axis");
    if (peek() == '.') unsupported(pos_, "abbreviated step");
    std::size_t b = pos_;
    auto name_start = [](char c) {
      return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || (c & 0x80);
    };
    auto name_char = [&](char c) {
      return name_start(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.';
    };
    if (!name_start(peek())) fail("expected a name test");
    while (!at_end() && name_char(peek())) ++pos_;
    std::string_view word = s_.substr(b, pos_ - b);
    if (!at_end() && peek() == ':' && !starts_with("::")) unsupported(pos_, "namespace prefixes");
    if (!at_end() && peek() == '(') {
      if (word == "text" && starts_with("()")) {
        pos_ += 2;
        return s_.substr(b, pos_ - b);
      }
      unsupported(b, "node test " + std::string(word) + "()");
    }
    return word;
  }

  static NameTest make_test(std::string_view word) {
    NameTest t;
    if (word == "*") {
      t.kind = NameTest::Kind::kStar;
    } else if (word == "text()") {
      t.kind = NameTest::Kind::kText;
    } else {
      t.kind = NameTest::Kind::kName;
      t.name = std::string(word);
    }
    return t;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

XPathQuery parse_xpath(std::string_view text) { return XPathParser(text).parse(); }

std::string to_string(const XPathQuery& q) {
  std::string out;
  for (const Step& s : q.steps) {
    switch (s.axis) {
      case Axis::kChild: out += "/"; break;
      case Axis::kDescendant: out += "//"; break;
      case Axis::kFollowingSibling: out += "/following-sibling::"; break;
    }
    switch (s.test.kind) {
      case NameTest::Kind::kName: out += s.test.name; break;
      case NameTest::Kind::kStar: out += "*"; break;
      case NameTest::Kind::kText: out += "text()"; break;
    }
  }
  return out;
}

}  // namespace tinyt
