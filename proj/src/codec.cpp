// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pzkpfl/codec.hpp"

#include <fstream>
#include <iterator>
#include <stdexcept>

namespace pzkpfl::codec {

void Writer::u32(uint32_t v) {
  for (int i = 3; i >= 0; --i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void Writer::u64(uint64_t v) {
  for (int i = 7; i >= 0; --i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void Writer::raw(std::span<const uint8_t> bytes) {
  buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

void Writer::blob(std::span<const uint8_t> bytes) {
  u32(static_cast<uint32_t>(bytes.size()));
  raw(bytes);
}

void Writer::str(std::string_view s) {
  blob(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(s.data()), s.size()));
}

void Writer::scalar(const algebra::Scalar& s) { raw(s.to_be_bytes()); }
void Writer::g1(const algebra::G1& p) { raw(p.compress()); }
void Writer::g2(const algebra::G2& p) { raw(p.compress()); }

std::span<const uint8_t> Reader::raw(size_t n) {
  if (n > data_.size() - pos_) throw std::runtime_error("truncated input");
  auto out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

uint8_t Reader::u8() { return raw(1)[0]; }

uint32_t Reader::u32() {
  uint32_t v = 0;
  for (uint8_t c : raw(4)) v = (v << 8) | c;
  return v;
}

uint64_t Reader::u64() {
  uint64_t v = 0;
  for (uint8_t c : raw(8)) v = (v << 8) | c;
  return v;
}

std::vector<uint8_t> Reader::blob() {
  const uint32_t n = u32();
  auto s = raw(n);
  return {s.begin(), s.end()};
}

std::string Reader::str() {
  const uint32_t n = u32();
  auto s = raw(n);
  return {s.begin(), s.end()};
}

algebra::Scalar Reader::scalar() {
  try {
    return algebra::Scalar::from_be_bytes(raw(algebra::Scalar::kBytes));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(e.what());
  }
}

algebra::G1 Reader::g1() {
  try {
    return algebra::G1::from_compressed(raw(algebra::G1::kCompressedBytes));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(e.what());
  }
}

algebra::G2 Reader::g2() {
  try {
    return algebra::G2::from_compressed(raw(algebra::G2::kCompressedBytes));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(e.what());
  }
}

size_t Reader::count(size_t max_reasonable) {
  const uint64_t n = u64();
  if (n > max_reasonable) throw std::runtime_error("element count out of range");
  return static_cast<size_t>(n);
}

void Reader::expect_done() const {
  if (!done()) throw std::runtime_error("trailing bytes after record");
}

void write_header(Writer& w, std::string_view magic, uint32_t version) {
  if (magic.size() != 4) throw std::invalid_argument("magic must be 4 bytes");
  w.raw(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(magic.data()), 4));
  w.u32(version);
}

void read_header(Reader& r, std::string_view magic, uint32_t version) {
  auto m = r.raw(4);
  if (std::string_view(reinterpret_cast<const char*>(m.data()), 4) != magic) {
    throw std::runtime_error("bad file magic, expected " + std::string(magic));
  }
  const uint32_t v = r.u32();
  if (v != version) {
    throw std::runtime_error("unsupported " + std::string(magic) + " version " + std::to_string(v));
  }
}

std::vector<uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const uint8_t> bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  // Write-then-rename so readers never observe a half-written artifact.
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed for " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string to_hex(std::span<const uint8_t> bytes) {
  static const char kHex[] = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (uint8_t c : bytes) {
    s.push_back(kHex[c >> 4]);
    s.push_back(kHex[c & 15]);
  }
  return s;
}

std::vector<uint8_t> from_hex(std::string_view hex) {
  if (hex.size() % 2) throw std::invalid_argument("odd-length hex string");
  const auto nibble = [](char c) -> uint8_t {
    if (c >= '0' && c <= '9') return static_cast<uint8_t>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<uint8_t>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<uint8_t>(c - 'A' + 10);
    throw std::invalid_argument("bad hex digit");
  };
  std::vector<uint8_t> out(hex.size() / 2);
  for (size_t i = 0; i < out.size(); ++i) out[i] = static_cast<uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
  return out;
}

}  // namespace pzkpfl::codec
