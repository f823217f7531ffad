// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

// Fiat-Shamir sigma protocols over G1, written additively:
//   s1  knowledge of c with C = sum c_j g_j
//   s2  one exponent vector c opening C1 over bases1 and C2 over bases2
//   s3  C1 = c g_pub and C2 = (c + d) g_ij share the same c

#pragma once

#include <span>
#include <vector>

#include "pzkpfl/algebra.hpp"
#include "pzkpfl/codec.hpp"
#include "pzkpfl/rng.hpp"

namespace pzkpfl::sigma {

using algebra::G1;
using algebra::Rng;
using algebra::Scalar;

struct SigmaS1 {
  G1 a;
  Scalar e;
  std::vector<Scalar> z;
  bool operator==(const SigmaS1&) const = default;
};

struct SigmaS2 {
  G1 a1, a2;
  Scalar e;
  std::vector<Scalar> z;
  bool operator==(const SigmaS2&) const = default;
};

struct SigmaS3 {
  G1 a1, a2, a3;
  Scalar e;
  Scalar z1, z2;
  bool operator==(const SigmaS3&) const = default;
};

// Provers throw std::invalid_argument on length mismatch. Verifiers return
// false on any failure, including malformed lengths.
SigmaS1 prove_s1(std::span<const G1> bases, std::span<const Scalar> c, const G1& C, Rng& rng);
bool verify_s1(std::span<const G1> bases, const G1& C, const SigmaS1& proof);

SigmaS2 prove_s2(std::span<const G1> bases1, std::span<const G1> bases2,
                 std::span<const Scalar> c, const G1& C1, const G1& C2, Rng& rng);
bool verify_s2(std::span<const G1> bases1, std::span<const G1> bases2, const G1& C1,
               const G1& C2, const SigmaS2& proof);

SigmaS3 prove_s3(const G1& g_pub, const G1& g_ij, const Scalar& c, const Scalar& d, const G1& C1,
                 const G1& C2, Rng& rng);
bool verify_s3(const G1& g_pub, const G1& g_ij, const G1& C1, const G1& C2, const SigmaS3& proof);

void write(codec::Writer& w, const SigmaS1& p);
void write(codec::Writer& w, const SigmaS2& p);
void write(codec::Writer& w, const SigmaS3& p);
SigmaS1 read_s1(codec::Reader& r);
SigmaS2 read_s2(codec::Reader& r);
SigmaS3 read_s3(codec::Reader& r);

}  // namespace pzkpfl::sigma
