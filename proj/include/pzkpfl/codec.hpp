// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

// Canonical big-endian byte encoding shared by every on-disk format and
// ledger payload.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pzkpfl/algebra.hpp"

namespace pzkpfl::codec {

class Writer {
 public:
  void u8(uint8_t v) { buf_.push_back(v); }
  void u32(uint32_t v);
  void u64(uint64_t v);
  void i64(int64_t v) { u64(static_cast<uint64_t>(v)); }
  void raw(std::span<const uint8_t> bytes);
  // u32 length prefix followed by the bytes.
  void blob(std::span<const uint8_t> bytes);
  void str(std::string_view s);
  void scalar(const algebra::Scalar& s);
  void g1(const algebra::G1& p);
  void g2(const algebra::G2& p);

  const std::vector<uint8_t>& bytes() const { return buf_; }
  std::vector<uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<uint8_t> buf_;
};

// Bounds-checked reader. Every failure throws std::runtime_error.
class Reader {
 public:
  explicit Reader(std::span<const uint8_t> data) : data_(data) {}

  uint8_t u8();
  uint32_t u32();
  uint64_t u64();
  int64_t i64() { return static_cast<int64_t>(u64()); }
  std::span<const uint8_t> raw(size_t n);
  std::vector<uint8_t> blob();
  std::string str();
  algebra::Scalar scalar();
  algebra::G1 g1();
  algebra::G2 g2();
  // Guards element counts read from untrusted input.
  size_t count(size_t max_reasonable);

  bool done() const { return pos_ == data_.size(); }
  void expect_done() const;
  size_t remaining() const { return data_.size() - pos_; }

 private:
  std::span<const uint8_t> data_;
  size_t pos_ = 0;
};

// File header: 4-byte magic then a u32 format version.
void write_header(Writer& w, std::string_view magic, uint32_t version);
void read_header(Reader& r, std::string_view magic, uint32_t version);

std::vector<uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const uint8_t> bytes);

std::string to_hex(std::span<const uint8_t> bytes);
// Lower- or upper-case hex; throws std::invalid_argument on odd length or a bad digit.
std::vector<uint8_t> from_hex(std::string_view hex);

}  // namespace pzkpfl::codec
