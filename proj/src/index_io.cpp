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

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "tinyt/error.hpp"
#include "tinyt/index.hpp"

namespace tinyt {

namespace {

constexpr char kIndexMagic[4] = {'T', 'T', 'v', '1'};
constexpr char kTextsMagic[4] = {'T', 'X', 'v', '1'};
constexpr std::uint32_t kVersion = 1;

std::uint32_t crc_of(const char* data, std::size_t len) {
  uLong crc = crc32(0L, Z_NULL, 0);
  while (len > 0) {
    auto chunk = static_cast<uInt>(std::min<std::size_t>(len, 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(data), chunk);
    data += chunk;
    len -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void bytes(const void* p, std::size_t n) { buf_.append(static_cast<const char*>(p), n); }
  template <typename T>
  void array(const std::vector<T>& v) {
    u64(v.size());
    for (T x : v) {
      if constexpr (sizeof(T) == 1) u8(x);
      else if constexpr (sizeof(T) == 4) u32(x);
      else u64(x);
    }
  }
  std::string& str() { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  Reader(std::string_view data) : data_(data) {}

  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw Error(ErrorCode::kTruncatedFile, "unexpected end of data");
  }
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(data_[pos_++]);
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{static_cast<std::uint8_t>(data_[pos_++])} << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{static_cast<std::uint8_t>(data_[pos_++])} << (8 * i);
    return v;
  }
  std::string_view bytes(std::size_t n) {
    need(n);
    auto v = data_.substr(pos_, n);
    pos_ += n;
    return v;
  }
  template <typename T>
  std::vector<T> array() {
    std::uint64_t n = u64();
    if (n > (data_.size() - pos_) / sizeof(T)) throw Error(ErrorCode::kTruncatedFile, "array exceeds data");
    std::vector<T> v(n);
    for (auto& x : v) {
      if constexpr (sizeof(T) == 1) x = u8();
      else if constexpr (sizeof(T) == 4) x = u32();
      else x = u64();
    }
    return v;
  }
  bool done() const { return pos_ == data_.size(); }
  std::size_t pos() const { return pos_; }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

enum Section : std::uint32_t {
  kLabels = 1,
  kTermRanks,
  kRules,
  kStartTags,
  kFindClose,
  kJump,
  kMapOffset,
  kPrMap,
  kTextMap,
  kSSkip,
  kTextSSkip,
  kSpine,
  kSectionEnd,
};

std::string encode_section(const TinyTIndex& ix, std::uint32_t id) {
  Writer w;
  switch (id) {
    case kLabels:
      w.u64(ix.labels.size());
      for (const auto& name : ix.labels.names()) {
        w.u32(static_cast<std::uint32_t>(name.size()));
        w.bytes(name.data(), name.size());
      }
      break;
    case kTermRanks: w.array(ix.term_ranks); break;
    case kRules: w.array(ix.rules); break;
    case kStartTags: w.array(ix.start_tags); break;
    case kFindClose: w.array(ix.find_close); break;
    case kJump:
      w.u32(ix.jump_stride);
      w.array(ix.jump);
      break;
    case kMapOffset: w.array(ix.map_offset); break;
    case kPrMap: w.array(ix.pr_map); break;
    case kTextMap: w.array(ix.text_map); break;
    case kSSkip: w.array(ix.sskip); break;
    case kTextSSkip: w.array(ix.text_sskip); break;
    case kSpine: w.array(ix.spine); break;
  }
  return std::move(w.str());
}

void decode_section(TinyTIndex& ix, std::uint32_t id, std::string_view data) {
  Reader r(data);
  switch (id) {
    case kLabels: {
      std::uint64_t n = r.u64();
      LabelTable labels;
      for (std::uint64_t i = 0; i < n; ++i) {
        std::uint32_t len = r.u32();
        auto name = r.bytes(len);
        if (labels.intern(name) != i) throw Error(ErrorCode::kIoError, "label table is inconsistent");
      }
      ix.labels = std::move(labels);
      break;
    }
    case kTermRanks: ix.term_ranks = r.array<std::uint8_t>(); break;
    case kRules: ix.rules = r.array<std::uint64_t>(); break;
    case kStartTags: ix.start_tags = r.array<std::uint32_t>(); break;
    case kFindClose: ix.find_close = r.array<std::uint32_t>(); break;
    case kJump:
      ix.jump_stride = r.u32();
      ix.jump = r.array<std::uint64_t>();
      break;
    case kMapOffset: ix.map_offset = r.array<std::uint32_t>(); break;
    case kPrMap: ix.pr_map = r.array<std::uint32_t>(); break;
    case kTextMap: ix.text_map = r.array<std::uint32_t>(); break;
    case kSSkip: ix.sskip = r.array<std::uint32_t>(); break;
    case kTextSSkip: ix.text_sskip = r.array<std::uint32_t>(); break;
    case kSpine: ix.spine = r.array<std::uint64_t>(); break;
    default: throw Error(ErrorCode::kIoError, "unknown section " + std::to_string(id));
  }
  if (!r.done()) throw Error(ErrorCode::kIoError, "trailing bytes in section " + std::to_string(id));
}

void check_consistency(const TinyTIndex& ix) {
  auto bad = [](const char* what) { throw Error(ErrorCode::kIoError, std::string("inconsistent index: ") + what); };
  const std::uint32_t T = ix.num_terminals(), N = ix.num_nonterminals();
  if (ix.labels.size() != T) bad("label count");
  if (ix.find_close.size() != ix.start_tags.size()) bad("find_close size");
  if (ix.sskip.size() != ix.start_tags.size() || ix.text_sskip.size() != ix.start_tags.size()) bad("sskip size");
  if (ix.jump_stride != (T + 63) / 64 || ix.jump.size() != std::size_t{N} * ix.jump_stride) bad("jump size");
  if (ix.map_offset.size() != N + 1u || ix.map_offset.back() != ix.pr_map.size()) bad("map offsets");
  if (ix.text_map.size() != ix.pr_map.size()) bad("text map size");
  if (ix.spine.size() != (N + 63) / 64) bad("spine size");
  for (std::uint32_t n = 0; n < N; ++n) {
    if (ix.rule_x(n) >= T + n || ix.rule_y(n) >= T + n) bad("rule references");
    if (ix.map_offset[n + 1] - ix.map_offset[n] != RuleWord::rank(ix.rules[n]) + 1u) bad("map entries");
  }
  for (SymId s : ix.start_tags) {
    if (s >= T + N) bad("start tag");
  }
}

std::string read_all(std::istream& in) {
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIoError, "read failed");
  return data;
}

void check_magic(Reader& r, const char (&magic)[4]) {
  auto m = r.bytes(4);
  if (std::memcmp(m.data(), magic, 4) != 0) throw Error(ErrorCode::kBadMagic, "not a TinyT file");
  std::uint32_t version = r.u32();
  if (version != kVersion) {
    throw Error(ErrorCode::kVersionMismatch, "file version " + std::to_string(version));
  }
}

}  // namespace

// Layout: magic, version, section count, directory of {id, offset, length,
// crc32}, crc32 of everything before it, then the section payloads.
void save_index(const TinyTIndex& ix, std::ostream& out) {
  std::vector<std::string> payloads;
  for (std::uint32_t id = kLabels; id < kSectionEnd; ++id) payloads.push_back(encode_section(ix, id));
  Writer head;
  head.bytes(kIndexMagic, 4);
  head.u32(kVersion);
  head.u32(static_cast<std::uint32_t>(payloads.size()));
  std::uint64_t offset = 12 + payloads.size() * 24 + 4;
  for (std::uint32_t k = 0; k < payloads.size(); ++k) {
    head.u32(kLabels + k);
    head.u64(offset);
    head.u64(payloads[k].size());
    head.u32(crc_of(payloads[k].data(), payloads[k].size()));
    offset += payloads[k].size();
  }
  head.u32(crc_of(head.str().data(), head.str().size()));
  out.write(head.str().data(), static_cast<std::streamsize>(head.str().size()));
  for (const auto& p : payloads) out.write(p.data(), static_cast<std::streamsize>(p.size()));
  if (!out) throw Error(ErrorCode::kIoError, "write failed");
}

TinyTIndex load_index(std::istream& in) {
  std::string data = read_all(in);
  Reader r(data);
  check_magic(r, kIndexMagic);
  std::uint32_t count = r.u32();
  if (count > 1024) throw Error(ErrorCode::kChecksumMismatch, "implausible section count");
  struct Entry {
    std::uint32_t id;
    std::uint64_t offset, length;
    std::uint32_t crc;
  };
  std::vector<Entry> dir(count);
  for (auto& e : dir) {
    e.id = r.u32();
    e.offset = r.u64();
    e.length = r.u64();
    e.crc = r.u32();
  }
  std::size_t head_len = r.pos();
  if (r.u32() != crc_of(data.data(), head_len)) {
    throw Error(ErrorCode::kChecksumMismatch, "section directory checksum");
  }
  TinyTIndex ix;
  std::vector<char> seen(kSectionEnd, 0);
  for (const auto& e : dir) {
    if (e.offset > data.size() || e.length > data.size() - e.offset) {
      throw Error(ErrorCode::kTruncatedFile, "section " + std::to_string(e.id) + " exceeds file");
    }
    std::string_view payload(data.data() + e.offset, e.length);
    if (crc_of(payload.data(), payload.size()) != e.crc) {
      throw Error(ErrorCode::kChecksumMismatch, "section " + std::to_string(e.id));
    }
    if (e.id < kLabels || e.id >= kSectionEnd || seen[e.id]) {
      throw Error(ErrorCode::kIoError, "bad section id " + std::to_string(e.id));
    }
    seen[e.id] = 1;
    decode_section(ix, e.id, payload);
  }
  for (std::uint32_t id = kLabels; id < kSectionEnd; ++id) {
    if (!seen[id]) throw Error(ErrorCode::kIoError, "missing section " + std::to_string(id));
  }
  check_consistency(ix);
  return ix;
}

void save_index_file(const TinyTIndex& ix, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path);
  save_index(ix, out);
}

TinyTIndex load_index_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  return load_index(in);
}

// Layout: magic, version, count, buffer length, offsets, buffer, crc32.
void save_texts(const TextCollection& texts, std::ostream& out) {
  Writer w;
  w.bytes(kTextsMagic, 4);
  w.u32(kVersion);
  w.array(texts.offsets);
  w.u64(texts.buffer.size());
  w.bytes(texts.buffer.data(), texts.buffer.size());
  w.u32(crc_of(w.str().data(), w.str().size()));
  out.write(w.str().data(), static_cast<std::streamsize>(w.str().size()));
  if (!out) throw Error(ErrorCode::kIoError, "write failed");
}

TextCollection load_texts(std::istream& in) {
  std::string data = read_all(in);
  Reader r(data);
  check_magic(r, kTextsMagic);
  TextCollection texts;
  texts.offsets = r.array<std::uint64_t>();
  std::uint64_t len = r.u64();
  texts.buffer = std::string(r.bytes(len));
  std::size_t body = r.pos();
  if (r.u32() != crc_of(data.data(), body)) throw Error(ErrorCode::kChecksumMismatch, "text collection");
  if (!r.done()) throw Error(ErrorCode::kIoError, "trailing bytes in text collection");
  for (std::size_t i = 0; i < texts.offsets.size(); ++i) {
    std::uint64_t next = i + 1 < texts.offsets.size() ? texts.offsets[i + 1] : texts.buffer.size();
    if (texts.offsets[i] > next) throw Error(ErrorCode::kIoError, "text offsets out of order");
  }
  return texts;
}

void save_texts_file(const TextCollection& texts, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path);
  save_texts(texts, out);
}

TextCollection load_texts_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  return load_texts(in);
}

}  // namespace tinyt
