// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

// Noised statements and modified verification keys for a chain of pieces,
// tied together with s1 / s2 proofs.
//
// For noise vector t, vk'.gamma_abc_0 = gamma_abc_0 - sum_j t_j gamma_abc_j and
// a'_j = a_j + t_j, so the public-input commitment is unchanged and the
// original proof verifies against (vk', a'). Input noise of piece i repeats
// the output noise of piece i - 1.

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pzkpfl/groth16.hpp"
#include "pzkpfl/sigma.hpp"

namespace pzkpfl::piecechain {

using algebra::G1;
using algebra::Rng;
using algebra::Scalar;
using groth16::Proof;
using groth16::ProvingKey;
using groth16::VerificationKey;

using TList = std::vector<Scalar>;

struct Checkers {
  G1 tsum1;  // -sum_{j <= l/2} t_j gamma_abc_j
  G1 tsum2;  // -sum_{j > l/2} t_j gamma_abc_j
  bool operator==(const Checkers&) const = default;
};

struct PieceBundle {
  uint64_t index = 0;  // 1-based
  Proof proof;
  VerificationKey vk_prime;
  std::vector<Scalar> phi_prime;
  Checkers checkers;
  sigma::SigmaS1 s1;
  std::optional<sigma::SigmaS2> s2;  // absent for piece 1
};

// T_0. Zero in public mode, so the first piece's inputs stay in the clear.
TList initial_tlist(size_t l, Rng& rng, bool public_t0 = false);
// Input half copied from prev's output half, output half fresh.
TList next_tlist(const TList& prev, Rng& rng);

struct Modified {
  VerificationKey vk_prime;
  std::vector<Scalar> phi_prime;
  Checkers checkers;
};
// Deterministic part of gen_g16_prf: applies noise t to (vk, phi).
Modified modify(const VerificationKey& vk, std::span<const Scalar> phi, const TList& t);

struct G16Output {
  Modified mod;
  Proof proof;
  TList t;
};
G16Output gen_g16_prf(const ProvingKey& pk, const VerificationKey& vk, std::span<const Scalar> phi,
                      std::span<const Scalar> witness, const TList& t_prev, Rng& rng);

struct ConProof {
  sigma::SigmaS1 s1;
  std::optional<sigma::SigmaS2> s2;
};
// tsum2_prev is absent for the first piece.
ConProof gen_con_prf(const VerificationKey& vk, const VerificationKey& vk_prime, const TList& t,
                     const G1& tsum1, const std::optional<G1>& tsum2_prev, Rng& rng);

enum class ConFailure { kNone, kCheckerProduct, kS1, kS2, kS2Presence };
const char* describe(ConFailure f);

ConFailure check_con_prf(const sigma::SigmaS1& s1, const std::optional<sigma::SigmaS2>& s2,
                         const VerificationKey& vk, const VerificationKey& vk_prime,
                         const Checkers& checkers, const std::optional<G1>& tsum2_prev);
bool vrf_con_prf(const sigma::SigmaS1& s1, const std::optional<sigma::SigmaS2>& s2,
                 const VerificationKey& vk, const VerificationKey& vk_prime,
                 const Checkers& checkers, const std::optional<G1>& tsum2_prev);

struct PieceInput {
  std::vector<Scalar> statement;
  std::vector<Scalar> witness;
};

struct ChainOptions {
  bool public_t0 = false;
  size_t workers = 0;
};

struct Chain {
  std::vector<PieceBundle> bundles;
  std::vector<TList> tlists;  // T_1..T_q
};

// Noise lists are drawn sequentially from rng; proofs run in parallel with
// per-piece forks of rng.
Chain prove_chain(const ProvingKey& pk, const VerificationKey& vk, std::span<const PieceInput> pieces,
                  Rng& rng, const ChainOptions& opts = {});

struct ChainReport {
  bool ok = true;
  uint64_t failing_index = 0;  // 1-based piece index, 0 when ok
  std::string reason;
};

// In public mode initial_inputs are the distributed starting parameters and
// piece 1 must carry them unnoised.
ChainReport verify_piece_chain(std::span<const PieceBundle> bundles, const VerificationKey& vk,
                               const std::optional<std::vector<Scalar>>& initial_inputs = std::nullopt,
                               size_t workers = 0);

// Bundle records store vk'.gamma_abc_0 as a difference against vk.
std::vector<uint8_t> serialize_bundle(const PieceBundle& b, const VerificationKey& vk);
PieceBundle deserialize_bundle(std::span<const uint8_t> bytes, const VerificationKey& vk);

// Packed archive with an offset index.
void write_archive(const std::filesystem::path& path, std::span<const PieceBundle> bundles,
                   const VerificationKey& vk);
std::vector<PieceBundle> read_archive(const std::filesystem::path& path, const VerificationKey& vk);

}  // namespace pzkpfl::piecechain
