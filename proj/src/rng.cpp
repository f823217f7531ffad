// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pzkpfl/rng.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <vector>

#include "pzkpfl/algebra.hpp"

namespace pzkpfl::algebra {
namespace {

void put_u64(std::vector<uint8_t>& buf, uint64_t v) {
  for (int i = 7; i >= 0; --i) buf.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

std::array<uint8_t, 32> derive(std::string_view label, std::span<const uint8_t> material) {
  std::vector<uint8_t> buf(label.begin(), label.end());
  buf.insert(buf.end(), material.begin(), material.end());
  return sha256(buf);
}

}  // namespace

Rng::Rng() {
  std::random_device rd;
  for (size_t i = 0; i < key_.size(); i += 4) {
    const uint32_t v = rd();
    for (size_t k = 0; k < 4; ++k) key_[i + k] = static_cast<uint8_t>(v >> (8 * k));
  }
}

Rng::Rng(uint64_t seed) {
  std::vector<uint8_t> m;
  put_u64(m, seed);
  key_ = derive("pzkpfl.rng.seed", m);
}

Rng Rng::from_key(const std::array<uint8_t, 32>& key) {
  Rng r(0);
  r.key_ = key;
  return r;
}

void Rng::fill(std::span<uint8_t> out) {
  size_t pos = 0;
  while (pos < out.size()) {
    if (used_ == block_.size()) {
      std::vector<uint8_t> in(key_.begin(), key_.end());
      put_u64(in, counter_++);
      block_ = sha256(in);
      used_ = 0;
    }
    const size_t take = std::min(out.size() - pos, block_.size() - used_);
    std::copy_n(block_.begin() + static_cast<std::ptrdiff_t>(used_), take,
                out.begin() + static_cast<std::ptrdiff_t>(pos));
    used_ += take;
    pos += take;
  }
}

uint64_t Rng::next_u64() {
  std::array<uint8_t, 8> b;
  fill(b);
  uint64_t v = 0;
  for (uint8_t c : b) v = (v << 8) | c;
  return v;
}

uint64_t Rng::uniform(uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform bound must be nonzero");
  // Reject the biased tail.
  const uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  for (;;) {
    const uint64_t v = next_u64();
    if (v < limit) return v % bound;
  }
}

Rng Rng::fork(std::string_view label, uint64_t index) const {
  std::vector<uint8_t> m(key_.begin(), key_.end());
  m.insert(m.end(), label.begin(), label.end());
  put_u64(m, index);
  return from_key(derive("pzkpfl.rng.fork", m));
}

}  // namespace pzkpfl::algebra
