// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

// Paillier encryption with g = n + 1 over GMP integers.

#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pzkpfl/codec.hpp"
#include "pzkpfl/rng.hpp"

namespace pzkpfl::paillier {

using algebra::Rng;
using BigNat = mpz_class;

struct PublicKey {
  BigNat n, n2, g;
  size_t bits() const { return mpz_sizeinbase(n.get_mpz_t(), 2); }
  bool operator==(const PublicKey& o) const { return n == o.n && g == o.g; }
};

struct SecretKey {
  BigNat lambda;
  BigNat mu;  // L(g^lambda mod n^2)^-1 mod n
};

struct KeyPair {
  PublicKey pk;
  SecretKey sk;
};

struct Ciphertext {
  BigNat c;
  bool operator==(const Ciphertext& o) const { return c == o.c; }
};

enum class Profile { kTest, kSecure };
unsigned modulus_bits(Profile p);  // 128 or 2048

// bits is the size of n. Throws std::invalid_argument below 16 bits.
KeyPair keygen(unsigned bits, Rng& rng);
// Throws std::invalid_argument unless p, q are distinct primes with
// gcd(pq, (p-1)(q-1)) = 1.
KeyPair keygen_from_primes(const BigNat& p, const BigNat& q);

BigNat random_below(const BigNat& bound, Rng& rng);

// m in [0, n). Throws std::invalid_argument otherwise.
Ciphertext encrypt(const PublicKey& pk, const BigNat& m, Rng& rng);
// Fixed r in Z*_n.
Ciphertext encrypt_with(const PublicKey& pk, const BigNat& m, const BigNat& r);
// Throws std::invalid_argument when c is not a unit mod n^2.
BigNat decrypt(const SecretKey& sk, const PublicKey& pk, const Ciphertext& c);
Ciphertext add(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b);
// Encryption of 0 with r = 1.
Ciphertext zero();

// Signed plaintexts: v in [-(n-1)/2, (n-1)/2], negatives as n - |v|.
// Out-of-range values throw std::overflow_error.
BigNat encode_signed(const PublicKey& pk, const BigNat& v);
BigNat decode_signed(const PublicKey& pk, const BigNat& m);

// Throws std::overflow_error unless n > trainers * 2 * max_abs.
void check_capacity(const PublicKey& pk, size_t trainers, const BigNat& max_abs);

// Bit-length-prefixed big-endian encoding.
void write_nat(codec::Writer& w, const BigNat& v);
BigNat read_nat(codec::Reader& r);
std::vector<uint8_t> serialize(const PublicKey& pk);
PublicKey deserialize_public(std::span<const uint8_t> bytes);
std::vector<uint8_t> serialize(const SecretKey& sk, const PublicKey& pk);
KeyPair deserialize_secret(std::span<const uint8_t> bytes);

}  // namespace pzkpfl::paillier
