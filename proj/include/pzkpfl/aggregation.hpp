// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

// Ring-masked Paillier secure sum with s3 linkage between a trainer's
// committed plaintext model and its noised final statement.

#pragma once

#include <cstdint>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "pzkpfl/algebra.hpp"
#include "pzkpfl/paillier.hpp"
#include "pzkpfl/sigma.hpp"

namespace pzkpfl::ledger {
class Ledger;
}

namespace pzkpfl::aggregation {

using algebra::G1;
using algebra::Rng;
using algebra::Scalar;
using paillier::BigNat;

// Who saw which bytes. Thread-safe.
class ViewLog {
 public:
  struct Entry {
    std::string viewer;
    std::string label;
    std::vector<uint8_t> bytes;
  };
  void record(std::string viewer, std::string label, std::vector<uint8_t> bytes);
  std::vector<Entry> entries() const;
  std::vector<Entry> view_of(const std::string& viewer) const;

 private:
  mutable std::mutex mu_;
  std::vector<Entry> entries_;
};

std::string trainer_name(uint32_t trainer);  // "trainer:<id>"
inline constexpr const char* kPublisher = "publisher";

// s[i - 1] holds trainer i's masks; trainer i sends them to trainer i + 1
// and the ring closes with s_0 = s_n.
struct MaskMatrix {
  std::vector<std::vector<BigNat>> s;
  size_t trainers() const { return s.size(); }
  // s_i - s_{i-1} mod n for trainer i (1-based).
  std::vector<BigNat> delta(uint32_t trainer, const BigNat& n) const;
};

// Trainer i's own masks, drawn from rng.fork("mask", i).
std::vector<BigNat> draw_masks(uint32_t trainer, size_t slots, const paillier::PublicKey& pk, const Rng& rng);
// own - prev mod n, slot-wise.
std::vector<BigNat> mask_delta(std::span<const BigNat> own, std::span<const BigNat> prev, const BigNat& n);

MaskMatrix exchange_masks(size_t trainers, size_t slots, const paillier::PublicKey& pk, Rng& rng,
                          ViewLog* log = nullptr);

G1 derive_g_pub(uint64_t round, std::span<const uint8_t> nonce);
G1 derive_generator(uint64_t round, uint32_t trainer, uint32_t slot);

struct SumProof {
  std::vector<G1> g;  // g_ij
  std::vector<G1> C;  // a_ij * g_pub
  std::vector<sigma::SigmaS3> s3;
};

// a: plaintext values of the aggregated slots; t: their noise; slots: the
// 1-based statement positions, used for generator derivation.
SumProof gen_sum_prf(uint64_t round, uint32_t trainer, std::span<const uint32_t> slots,
                     std::span<const int64_t> a, std::span<const Scalar> t, const G1& g_pub, Rng& rng);

struct Submission {
  uint64_t round = 0;
  uint32_t trainer = 0;
  std::vector<paillier::Ciphertext> c;
  std::vector<sigma::SigmaS3> s3;
  std::vector<G1> g;
  std::vector<G1> C;
  std::vector<Scalar> a_prime;  // noised final statement at the aggregated slots
};

std::vector<uint8_t> serialize(const Submission& s);
Submission deserialize_submission(std::span<const uint8_t> bytes);

struct SubmitInput {
  uint64_t round = 0;
  uint32_t trainer = 0;
  std::vector<uint32_t> slots;
  std::vector<int64_t> a;
  std::vector<Scalar> t;
};

// Throws std::overflow_error when a value leaves the signed plaintext range.
Submission submit(const SubmitInput& in, const MaskMatrix& masks, const paillier::PublicKey& pk,
                  const G1& g_pub, Rng& rng);
// delta: this trainer's s_i - s_{i-1} mod n.
Submission submit(const SubmitInput& in, std::span<const BigNat> delta, const paillier::PublicKey& pk,
                  const G1& g_pub, Rng& rng);

// Checks one submission's generators and s3 proofs against C2 = a'_ij g_ij.
bool verify_submission_proofs(const Submission& s, std::span<const uint32_t> slots, const G1& g_pub);

struct GlobalModel {
  std::vector<int64_t> sum;
  uint64_t count = 0;
  std::vector<int64_t> mean;       // round-half-away-from-zero(sum / count)
  std::vector<int64_t> remainder;  // sum - count * mean
  bool operator==(const GlobalModel&) const = default;
};

int64_t round_div(int64_t sum, uint64_t n);
GlobalModel make_global(std::vector<int64_t> sum, uint64_t count);

// Per slot, sum_i C_ij = sum_j g_pub, and every submission proof verifies.
bool vrf_sum_prf(std::span<const Submission> subs, std::span<const uint32_t> slots, const G1& g_pub,
                 std::span<const int64_t> sum);

// Decrypts the contract's folded ciphertexts, checks them against the
// commitment products and posts the sum. Throws if the round is incomplete
// or the decrypted sum fails the commitment check.
GlobalModel aggregate(ledger::Ledger& ledger, const std::string& address, const paillier::KeyPair& keys,
                      uint64_t seq, ViewLog* log = nullptr);

}  // namespace pzkpfl::aggregation
