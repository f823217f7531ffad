// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pzkpfl/paillier.hpp"

#include <stdexcept>

namespace pzkpfl::paillier {
namespace {

constexpr uint32_t kKeyVersion = 1;
constexpr uint32_t kMaxNatBits = 1u << 16;

BigNat random_bits(unsigned bits, Rng& rng) {
  std::vector<uint8_t> buf((bits + 7) / 8);
  rng.fill(buf);
  if (bits % 8) buf[0] &= static_cast<uint8_t>((1u << (bits % 8)) - 1);
  BigNat z;
  mpz_import(z.get_mpz_t(), buf.size(), 1, 1, 1, 0, buf.data());
  return z;
}

BigNat random_prime(unsigned bits, Rng& rng) {
  for (;;) {
    BigNat z = random_bits(bits, rng);
    mpz_setbit(z.get_mpz_t(), bits - 1);
    mpz_setbit(z.get_mpz_t(), bits - 2);  // keeps p * q at full width
    BigNat p;
    mpz_nextprime(p.get_mpz_t(), z.get_mpz_t());
    if (mpz_sizeinbase(p.get_mpz_t(), 2) == bits) return p;
  }
}

BigNat L(const BigNat& x, const BigNat& n) { return (x - 1) / n; }

BigNat powm(const BigNat& b, const BigNat& e, const BigNat& m) {
  BigNat r;
  mpz_powm(r.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
  return r;
}

BigNat gcd(const BigNat& a, const BigNat& b) {
  BigNat g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

bool is_prime(const BigNat& p) { return mpz_probab_prime_p(p.get_mpz_t(), 40) > 0; }

}  // namespace

unsigned modulus_bits(Profile p) { return p == Profile::kTest ? 128 : 2048; }

KeyPair keygen_from_primes(const BigNat& p, const BigNat& q) {
  if (p == q || !is_prime(p) || !is_prime(q)) throw std::invalid_argument("need two distinct primes");
  const BigNat n = p * q;
  if (gcd(n, (p - 1) * (q - 1)) != 1) throw std::invalid_argument("gcd(pq, (p-1)(q-1)) != 1");
  KeyPair kp;
  kp.pk.n = n;
  kp.pk.n2 = n * n;
  kp.pk.g = n + 1;
  mpz_lcm(kp.sk.lambda.get_mpz_t(), BigNat(p - 1).get_mpz_t(), BigNat(q - 1).get_mpz_t());
  const BigNat u = L(powm(kp.pk.g, kp.sk.lambda, kp.pk.n2), n);
  if (mpz_invert(kp.sk.mu.get_mpz_t(), u.get_mpz_t(), n.get_mpz_t()) == 0) {
    throw std::invalid_argument("L(g^lambda) is not invertible mod n");
  }
  return kp;
}

KeyPair keygen(unsigned bits, Rng& rng) {
  if (bits < 16) throw std::invalid_argument("Paillier modulus must have at least 16 bits");
  const unsigned pbits = bits / 2, qbits = bits - bits / 2;
  for (;;) {
    const BigNat p = random_prime(pbits, rng);
    const BigNat q = random_prime(qbits, rng);
    try {
      KeyPair kp = keygen_from_primes(p, q);
      if (kp.pk.bits() == bits) return kp;
    } catch (const std::invalid_argument&) {
      // Resample on a failed gcd condition or p == q.
    }
  }
}

BigNat random_below(const BigNat& bound, Rng& rng) {
  if (bound <= 0) throw std::invalid_argument("bound must be positive");
  const auto bits = static_cast<unsigned>(mpz_sizeinbase(bound.get_mpz_t(), 2));
  for (;;) {
    BigNat z = random_bits(bits, rng);
    if (z < bound) return z;
  }
}

Ciphertext encrypt_with(const PublicKey& pk, const BigNat& m, const BigNat& r) {
  if (m < 0 || m >= pk.n) throw std::invalid_argument("plaintext outside [0, n)");
  if (r <= 0 || r >= pk.n || gcd(r, pk.n) != 1) throw std::invalid_argument("r must be a unit mod n");
  // g^m = 1 + m n mod n^2 for g = n + 1.
  const BigNat gm = pk.g == pk.n + 1 ? BigNat((1 + m * pk.n) % pk.n2) : powm(pk.g, m, pk.n2);
  return {BigNat(gm * powm(r, pk.n, pk.n2) % pk.n2)};
}

Ciphertext encrypt(const PublicKey& pk, const BigNat& m, Rng& rng) {
  for (;;) {
    const BigNat r = random_below(pk.n, rng);
    if (r != 0 && gcd(r, pk.n) == 1) return encrypt_with(pk, m, r);
  }
}

BigNat decrypt(const SecretKey& sk, const PublicKey& pk, const Ciphertext& c) {
  if (c.c <= 0 || c.c >= pk.n2 || gcd(c.c, pk.n) != 1) {
    throw std::invalid_argument("ciphertext is not a unit mod n^2");
  }
  return BigNat(L(powm(c.c, sk.lambda, pk.n2), pk.n) * sk.mu % pk.n);
}

Ciphertext add(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b) {
  if (a.c <= 0 || a.c >= pk.n2 || b.c <= 0 || b.c >= pk.n2) {
    throw std::invalid_argument("ciphertext outside Z_{n^2} for this key");
  }
  return {BigNat(a.c * b.c % pk.n2)};
}

Ciphertext zero() { return {BigNat(1)}; }

BigNat encode_signed(const PublicKey& pk, const BigNat& v) {
  const BigNat half = (pk.n - 1) / 2;
  if (v > half || v < -half) throw std::overflow_error("value does not fit the signed plaintext range");
  return v < 0 ? BigNat(pk.n + v) : v;
}

BigNat decode_signed(const PublicKey& pk, const BigNat& m) {
  if (m < 0 || m >= pk.n) throw std::invalid_argument("plaintext outside [0, n)");
  return m > (pk.n - 1) / 2 ? BigNat(m - pk.n) : m;
}

void check_capacity(const PublicKey& pk, size_t trainers, const BigNat& max_abs) {
  if (pk.n <= BigNat(static_cast<unsigned long>(trainers)) * 2 * abs(max_abs)) {
    throw std::overflow_error("Paillier modulus too small for the aggregate range");
  }
}

void write_nat(codec::Writer& w, const BigNat& v) {
  if (v < 0) throw std::invalid_argument("cannot encode a negative natural");
  const auto bits = v == 0 ? size_t{0} : mpz_sizeinbase(v.get_mpz_t(), 2);
  std::vector<uint8_t> buf((bits + 7) / 8);
  size_t count = 0;
  if (!buf.empty()) mpz_export(buf.data(), &count, 1, 1, 1, 0, v.get_mpz_t());
  w.u32(static_cast<uint32_t>(bits));
  w.raw(buf);
}

BigNat read_nat(codec::Reader& r) {
  const uint32_t bits = r.u32();
  if (bits > kMaxNatBits) throw std::runtime_error("integer too large");
  const auto bytes = r.raw((bits + 7) / 8);
  BigNat z;
  if (!bytes.empty()) mpz_import(z.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
  const size_t got = z == 0 ? 0 : mpz_sizeinbase(z.get_mpz_t(), 2);
  if (got != bits) throw std::runtime_error("integer bit length does not match its header");
  return z;
}

std::vector<uint8_t> serialize(const PublicKey& pk) {
  codec::Writer w;
  codec::write_header(w, "PAIP", kKeyVersion);
  write_nat(w, pk.n);
  write_nat(w, pk.g);
  return w.take();
}

PublicKey deserialize_public(std::span<const uint8_t> bytes) {
  codec::Reader r(bytes);
  codec::read_header(r, "PAIP", kKeyVersion);
  PublicKey pk;
  pk.n = read_nat(r);
  pk.g = read_nat(r);
  r.expect_done();
  if (pk.n < 3) throw std::runtime_error("invalid Paillier modulus");
  pk.n2 = pk.n * pk.n;
  return pk;
}

std::vector<uint8_t> serialize(const SecretKey& sk, const PublicKey& pk) {
  codec::Writer w;
  codec::write_header(w, "PAIS", kKeyVersion);
  write_nat(w, pk.n);
  write_nat(w, pk.g);
  write_nat(w, sk.lambda);
  write_nat(w, sk.mu);
  return w.take();
}

KeyPair deserialize_secret(std::span<const uint8_t> bytes) {
  codec::Reader r(bytes);
  codec::read_header(r, "PAIS", kKeyVersion);
  KeyPair kp;
  kp.pk.n = read_nat(r);
  kp.pk.g = read_nat(r);
  kp.sk.lambda = read_nat(r);
  kp.sk.mu = read_nat(r);
  r.expect_done();
  if (kp.pk.n < 3) throw std::runtime_error("invalid Paillier modulus");
  kp.pk.n2 = kp.pk.n * kp.pk.n;
  return kp;
}

}  // namespace pzkpfl::paillier
