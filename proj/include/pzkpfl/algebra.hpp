// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

// BLS12-381 scalar field, the groups G1/G2/GT, pairing, multi-scalar
// multiplication and Fiat-Shamir hashing. Backed by blst.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <blst.h>

namespace pzkpfl::algebra {

class Rng;

// Residue modulo the group order r (~2^255). Stored in Montgomery form.
class Scalar {
 public:
  static constexpr size_t kBytes = 32;

  Scalar() : v_{} {}

  static Scalar zero() { return Scalar(); }
  static Scalar one();
  static Scalar from_u64(uint64_t v);
  // Negative values embed as r - |v|.
  static Scalar from_i64(int64_t v);
  // Big-endian bytes of any length, reduced mod r.
  static Scalar from_be_bytes_reduce(std::span<const uint8_t> bytes);
  // Exactly 32 big-endian bytes that must already be < r.
  static Scalar from_be_bytes(std::span<const uint8_t> bytes);
  static Scalar random(Rng& rng);
  // Decimal or 0x-prefixed hex text, reduced mod r.
  static Scalar from_string(std::string_view text);

  Scalar operator+(const Scalar& o) const;
  Scalar operator-(const Scalar& o) const;
  Scalar operator*(const Scalar& o) const;
  Scalar operator-() const;
  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }
  bool operator==(const Scalar& o) const;
  bool operator!=(const Scalar& o) const { return !(*this == o); }

  bool is_zero() const;
  // Throws std::domain_error on zero.
  Scalar inverse() const;
  Scalar pow(uint64_t e) const;

  std::array<uint8_t, kBytes> to_be_bytes() const;
  // Little-endian canonical bytes, the layout blst expects for multiplication.
  blst_scalar to_blst_scalar() const;
  // Signed decoding with threshold r/2; nullopt if |value| does not fit int64.
  std::optional<int64_t> to_i64() const;
  std::string to_hex() const;

  const blst_fr& raw() const { return v_; }
  static Scalar from_raw(const blst_fr& v) {
    Scalar s;
    s.v_ = v;
    return s;
  }

 private:
  blst_fr v_;
};

// Batch inversion (Montgomery's trick). Zero entries are rejected.
void batch_inverse(std::vector<Scalar>& values);

class G1 {
 public:
  static constexpr size_t kCompressedBytes = 48;

  G1() : p_{} {}  // identity
  static G1 identity() { return G1(); }
  static G1 generator();
  static G1 from_affine(const blst_p1_affine& a);
  // Throws std::invalid_argument on a malformed encoding or a point outside G1.
  static G1 from_compressed(std::span<const uint8_t> bytes);
  // Hash to the curve with an explicit domain-separation tag.
  static G1 hash_to(std::span<const uint8_t> msg, std::string_view dst);

  G1 operator+(const G1& o) const;
  G1 operator-(const G1& o) const;
  G1 operator-() const;
  G1 operator*(const Scalar& s) const;
  G1& operator+=(const G1& o) { return *this = *this + o; }
  bool operator==(const G1& o) const;
  bool operator!=(const G1& o) const { return !(*this == o); }

  bool is_identity() const;
  bool in_group() const;
  std::array<uint8_t, kCompressedBytes> compress() const;
  blst_p1_affine to_affine() const;
  const blst_p1& raw() const { return p_; }

 private:
  blst_p1 p_;
};

class G2 {
 public:
  static constexpr size_t kCompressedBytes = 96;

  G2() : p_{} {}
  static G2 identity() { return G2(); }
  static G2 generator();
  static G2 from_affine(const blst_p2_affine& a);
  static G2 from_compressed(std::span<const uint8_t> bytes);

  G2 operator+(const G2& o) const;
  G2 operator-(const G2& o) const;
  G2 operator-() const;
  G2 operator*(const Scalar& s) const;
  G2& operator+=(const G2& o) { return *this = *this + o; }
  bool operator==(const G2& o) const;
  bool operator!=(const G2& o) const { return !(*this == o); }

  bool is_identity() const;
  bool in_group() const;
  std::array<uint8_t, kCompressedBytes> compress() const;
  blst_p2_affine to_affine() const;
  const blst_p2& raw() const { return p_; }

 private:
  blst_p2 p_;
};

// Element of the target group, written multiplicatively.
class Gt {
 public:
  Gt();  // one
  static Gt one() { return Gt(); }

  Gt operator*(const Gt& o) const;
  Gt inverse() const;
  Gt pow(const Scalar& e) const;
  bool operator==(const Gt& o) const;
  bool operator!=(const Gt& o) const { return !(*this == o); }
  bool is_one() const;

  const blst_fp12& raw() const { return v_; }
  static Gt from_raw(const blst_fp12& v) {
    Gt g;
    g.v_ = v;
    return g;
  }

 private:
  blst_fp12 v_;
};

Gt pairing(const G1& a, const G2& b);
// Product of pairings sharing one final exponentiation.
Gt multi_pairing(std::span<const G1> as, std::span<const G2> bs);

// Π bases_k^{scalars_k}. Throws std::invalid_argument on a length mismatch.
G1 msm(std::span<const G1> bases, std::span<const Scalar> scalars);
G2 msm(std::span<const G2> bases, std::span<const Scalar> scalars);

// Pre-normalised bases for repeated MSMs against the same points.
class G1Table {
 public:
  G1Table() = default;
  explicit G1Table(std::span<const G1> points);
  size_t size() const { return affine_.size(); }
  G1 msm(std::span<const Scalar> scalars) const;
  G1 point(size_t i) const { return G1::from_affine(affine_[i]); }

 private:
  std::vector<blst_p1_affine> affine_;
};

class G2Table {
 public:
  G2Table() = default;
  explicit G2Table(std::span<const G2> points);
  size_t size() const { return affine_.size(); }
  G2 msm(std::span<const Scalar> scalars) const;
  G2 point(size_t i) const { return G2::from_affine(affine_[i]); }

 private:
  std::vector<blst_p2_affine> affine_;
};

std::array<uint8_t, 32> sha256(std::span<const uint8_t> data);

// 256-bit hash of the bytes, reduced mod r.
Scalar hash_to_scalar(std::span<const uint8_t> transcript);

// Fiat-Shamir transcript: a one-byte domain tag followed by u32
// length-prefixed canonical encodings.
class Transcript {
 public:
  explicit Transcript(uint8_t domain_tag) { buf_.push_back(domain_tag); }
  Transcript& append(const G1& p);
  Transcript& append(const G2& p);
  Transcript& append(const Scalar& s);
  Transcript& append_bytes(std::span<const uint8_t> bytes);
  Scalar challenge() const { return hash_to_scalar(buf_); }
  const std::vector<uint8_t>& bytes() const { return buf_; }

 private:
  std::vector<uint8_t> buf_;
};

inline constexpr uint8_t kTagS1 = 0x01;
inline constexpr uint8_t kTagS2 = 0x02;
inline constexpr uint8_t kTagS3 = 0x03;

}  // namespace pzkpfl::algebra
