// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "pzkpfl/algebra.hpp"
#include "pzkpfl/codec.hpp"
#include "pzkpfl/qap.hpp"
#include "pzkpfl/rng.hpp"

namespace pzkpfl::groth16 {

using algebra::G1;
using algebra::G2;
using algebra::Rng;
using algebra::Scalar;

using CircuitHash = std::array<uint8_t, 32>;

struct VerificationKey {
  CircuitHash circuit_hash{};
  G1 alpha1;
  G2 beta2, gamma2, delta2;
  std::vector<G1> gamma_abc;  // l + 1 entries

  size_t num_public() const { return gamma_abc.empty() ? 0 : gamma_abc.size() - 1; }
  bool operator==(const VerificationKey& o) const;
};

struct ProvingKey {
  CircuitHash circuit_hash{};
  G1 alpha1, beta1, delta1;
  G2 beta2, delta2;
  std::vector<G1> a_query;   // [u_i(x)]_1, i = 0..m
  std::vector<G1> b1_query;  // [v_i(x)]_1
  std::vector<G2> b2_query;  // [v_i(x)]_2
  std::vector<G1> l_query;   // [(beta u_i + alpha v_i + w_i)/delta]_1, i = l+1..m
  std::vector<G1> h_query;   // [x^i t(x)/delta]_1, i = 0..N-2

  // Circuit the key was generated for; attached after loading.
  std::shared_ptr<const r1cs::QapInstance> qap;

  // Normalised copies of the queries, built by prepare().
  void prepare();
  struct Tables {
    algebra::G1Table a, b1, l, h;
    algebra::G2Table b2;
  };
  std::shared_ptr<const Tables> tables;
};

struct Proof {
  G1 a;
  G2 b;
  G1 c;
  bool operator==(const Proof& o) const { return a == o.a && b == o.b && c == o.c; }
};

// Simulation trapdoor. `ic` caches (beta u_j(x) + alpha v_j(x) + w_j(x)) / gamma
// for j = 0..l so Sim needs no circuit.
struct Trapdoor {
  Scalar alpha, beta, gamma, delta, x;
  std::vector<Scalar> ic;
};

struct SetupResult {
  ProvingKey pk;
  VerificationKey vk;
  Trapdoor trapdoor;
};

// Throws std::invalid_argument when t is constant or l >= m.
SetupResult setup(std::shared_ptr<const r1cs::QapInstance> qap, const CircuitHash& circuit_hash,
                  Rng& rng);

// Throws std::invalid_argument when (statement, witness) does not satisfy the circuit.
Proof prove(const ProvingKey& pk, std::span<const Scalar> statement,
            std::span<const Scalar> witness, Rng& rng);

// e(A,B) = e(alpha,beta) e(sum a_j gamma_abc_j, gamma) e(C,delta), a_0 = 1.
bool verify(const VerificationKey& vk, std::span<const Scalar> statement, const Proof& proof);

// Π gamma_abc_j^{a_j} with a_0 = 1.
G1 public_input_commitment(const VerificationKey& vk, std::span<const Scalar> statement);

Proof sim(const Trapdoor& td, const VerificationKey& vk, std::span<const Scalar> statement,
          Rng& rng);

// Files carry a circuit hash and a version tag.
std::vector<uint8_t> serialize(const ProvingKey& pk);
ProvingKey deserialize_pk(std::span<const uint8_t> bytes);
std::vector<uint8_t> serialize(const VerificationKey& vk);
VerificationKey deserialize_vk(std::span<const uint8_t> bytes);
std::vector<uint8_t> serialize(const Proof& p, const CircuitHash& circuit_hash);
// Throws std::runtime_error if the file was made for a different circuit.
Proof deserialize_proof(std::span<const uint8_t> bytes, const CircuitHash& circuit_hash);

void write_proof(codec::Writer& w, const Proof& p);
Proof read_proof(codec::Reader& r);

}  // namespace pzkpfl::groth16
