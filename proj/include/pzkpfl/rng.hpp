// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace pzkpfl::algebra {

// SHA-256 in counter mode. Seeded instances are fully reproducible; the
// default constructor draws its key from the OS entropy source.
// Not thread-safe: give each worker its own instance via fork().
class Rng {
 public:
  Rng();
  explicit Rng(uint64_t seed);
  static Rng from_key(const std::array<uint8_t, 32>& key);

  void fill(std::span<uint8_t> out);
  uint64_t next_u64();
  // Uniform in [0, bound). bound must be nonzero.
  uint64_t uniform(uint64_t bound);
  // Independent child stream, deterministic in (parent key, label, index).
  Rng fork(std::string_view label, uint64_t index = 0) const;

 private:
  std::array<uint8_t, 32> key_{};
  uint64_t counter_ = 0;
  std::array<uint8_t, 32> block_{};
  size_t used_ = 32;
};

}  // namespace pzkpfl::algebra
