// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pzkpfl/paillier.hpp"

#include <gtest/gtest.h>

namespace pzkpfl::paillier {
namespace {

const KeyPair& toy() {
  static const KeyPair kp = keygen_from_primes(5, 7);
  return kp;
}

const KeyPair& test_key() {
  static const KeyPair kp = [] {
    Rng rng(77);
    return keygen(modulus_bits(Profile::kTest), rng);
  }();
  return kp;
}

// Textbook formulas written out independently of the library.
BigNat oracle_encrypt(const BigNat& n, const BigNat& g, const BigNat& m, const BigNat& r) {
  const BigNat n2 = n * n;
  BigNat gm, rn;
  mpz_powm(gm.get_mpz_t(), g.get_mpz_t(), m.get_mpz_t(), n2.get_mpz_t());
  mpz_powm(rn.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t(), n2.get_mpz_t());
  return gm * rn % n2;
}

TEST(Keygen, ToyPrimes) {
  EXPECT_EQ(toy().pk.n, 35);
  EXPECT_EQ(toy().sk.lambda, 12);
  EXPECT_EQ(toy().pk.g, 36);
  EXPECT_EQ(toy().pk.n2, 1225);
}

TEST(Keygen, GcdConditionEnforced) {
  // 3 * 7 = 21 shares the factor 3 with 2 * 6 = 12.
  EXPECT_THROW(keygen_from_primes(3, 7), std::invalid_argument);
  EXPECT_THROW(keygen_from_primes(7, 7), std::invalid_argument);
  EXPECT_THROW(keygen_from_primes(9, 7), std::invalid_argument);
}

TEST(Keygen, SeededReproducibleAndSized) {
  Rng a(5), b(5);
  const auto k1 = keygen(128, a), k2 = keygen(128, b);
  EXPECT_EQ(k1.pk.n, k2.pk.n);
  EXPECT_EQ(k1.pk.bits(), 128u);
  Rng c(6);
  EXPECT_NE(keygen(128, c).pk.n, k1.pk.n);
  Rng d(7);
  EXPECT_EQ(keygen(16, d).pk.bits(), 16u);
  EXPECT_THROW(keygen(8, d), std::invalid_argument);
}

TEST(Encrypt, ZeroAndToyValue) {
  Rng rng(1);
  EXPECT_EQ(decrypt(toy().sk, toy().pk, encrypt(toy().pk, 0, rng)), 0);
  const auto c = encrypt_with(toy().pk, 4, 2);
  EXPECT_EQ(c.c, oracle_encrypt(35, 36, 4, 2));
  EXPECT_EQ(decrypt(toy().sk, toy().pk, c), 4);
}

TEST(Encrypt, Probabilistic) {
  Rng rng(2);
  const auto& k = test_key();
  const auto c1 = encrypt(k.pk, 4, rng), c2 = encrypt(k.pk, 4, rng);
  EXPECT_FALSE(c1 == c2);
  EXPECT_EQ(decrypt(k.sk, k.pk, c1), 4);
  EXPECT_EQ(decrypt(k.sk, k.pk, c2), 4);
}

TEST(Encrypt, RejectsBadInputs) {
  Rng rng(3);
  EXPECT_THROW(encrypt(toy().pk, 35, rng), std::invalid_argument);
  EXPECT_THROW(encrypt(toy().pk, -1, rng), std::invalid_argument);
  EXPECT_THROW(encrypt_with(toy().pk, 1, 5), std::invalid_argument);
}

TEST(Decrypt, RoundTripAndOracle) {
  Rng rng(4);
  const auto& k = test_key();
  for (int i = 0; i < 100; ++i) {
    const BigNat m = random_below(k.pk.n, rng);
    BigNat r;
    do r = random_below(k.pk.n, rng);
    while (r == 0);
    const auto c = encrypt_with(k.pk, m, r);
    EXPECT_EQ(c.c, oracle_encrypt(k.pk.n, k.pk.g, m, r));
    EXPECT_EQ(decrypt(k.sk, k.pk, c), m);
  }
}

TEST(Decrypt, SignedAndDegenerate) {
  Rng rng(5);
  const auto& k = test_key();
  const auto c = encrypt(k.pk, encode_signed(k.pk, -3), rng);
  EXPECT_EQ(decode_signed(k.pk, decrypt(k.sk, k.pk, c)), -3);
  EXPECT_EQ(decrypt(k.sk, k.pk, zero()), 0);
  EXPECT_THROW(decrypt(toy().sk, toy().pk, Ciphertext{0}), std::invalid_argument);
  EXPECT_THROW(decrypt(toy().sk, toy().pk, Ciphertext{14}), std::invalid_argument);  // gcd 7
  EXPECT_THROW(decrypt(toy().sk, toy().pk, Ciphertext{1225}), std::invalid_argument);
}

TEST(Add, SmallSums) {
  Rng rng(6);
  const auto& k = test_key();
  EXPECT_EQ(decrypt(k.sk, k.pk, add(k.pk, encrypt(k.pk, 2, rng), encrypt(k.pk, 3, rng))), 5);
  EXPECT_EQ(decrypt(k.sk, k.pk, add(k.pk, encrypt(k.pk, 77, rng), encrypt(k.pk, 0, rng))), 77);
  Ciphertext acc = zero();
  for (int v : {4, 8, 15, 16, 23}) acc = add(k.pk, acc, encrypt(k.pk, v, rng));
  EXPECT_EQ(decrypt(k.sk, k.pk, acc), 66);
  // A ciphertext from a larger modulus is rejected.
  EXPECT_THROW(add(toy().pk, Ciphertext{2}, Ciphertext{BigNat(5000)}), std::invalid_argument);
}

TEST(Add, HomomorphismProperty) {
  Rng rng(7);
  const auto& k = test_key();
  for (int i = 0; i < 100; ++i) {
    const BigNat x = random_below(k.pk.n, rng), y = random_below(k.pk.n, rng);
    EXPECT_EQ(decrypt(k.sk, k.pk, add(k.pk, encrypt(k.pk, x, rng), encrypt(k.pk, y, rng))),
              BigNat((x + y) % k.pk.n));
  }
}

TEST(Signed, EncodingBoundsNeverWrap) {
  const auto& pk = toy().pk;  // n = 35, range [-17, 17]
  EXPECT_EQ(encode_signed(pk, -17), 18);
  EXPECT_EQ(decode_signed(pk, 18), -17);
  EXPECT_EQ(decode_signed(pk, 17), 17);
  EXPECT_THROW(encode_signed(pk, 18), std::overflow_error);
  EXPECT_THROW(encode_signed(pk, -18), std::overflow_error);
}

TEST(Capacity, Guard) {
  const auto& pk = toy().pk;
  EXPECT_NO_THROW(check_capacity(pk, 2, 8));   // 35 > 32
  EXPECT_THROW(check_capacity(pk, 2, 9), std::overflow_error);  // 35 <= 36
  EXPECT_THROW(check_capacity(pk, 3, -6), std::overflow_error);
}

TEST(Files, KeyRoundTrip) {
  const auto& k = test_key();
  const auto pub = deserialize_public(serialize(k.pk));
  EXPECT_TRUE(pub == k.pk);
  EXPECT_EQ(pub.n2, k.pk.n2);
  const auto sec = deserialize_secret(serialize(k.sk, k.pk));
  EXPECT_EQ(sec.sk.lambda, k.sk.lambda);
  EXPECT_EQ(sec.sk.mu, k.sk.mu);
  auto bytes = serialize(k.pk);
  bytes[9] ^= 0x01;  // bit-length header
  EXPECT_THROW(deserialize_public(bytes), std::runtime_error);
}

}  // namespace
}  // namespace pzkpfl::paillier
