// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pzkpfl/piecechain.hpp"

#include <gtest/gtest.h>

#include <filesystem>

#include "pzkpfl/r1cs.hpp"

namespace pzkpfl::piecechain {
namespace {

// Two accumulators per piece: (u, v) -> (u + x, v - x * u).
struct Circuit {
  std::shared_ptr<const quantize::PieceSpec> spec;
  r1cs::ConstraintSystem cs{0};
  groth16::SetupResult keys;
};

const Circuit& circuit() {
  static const Circuit c = [] {
    quantize::Program p;
    const auto u = p.input(), v = p.input();
    const auto x = p.data();
    p.output(p.add(u, x));
    p.output(p.sub(v, p.mul(x, u)));
    Circuit c;
    c.spec = std::make_shared<const quantize::PieceSpec>(quantize::lower(p, 3));
    c.cs = r1cs::synthesize_piece(*c.spec);
    auto qap = std::make_shared<const r1cs::QapInstance>(r1cs::to_qap(c.cs));
    Rng rng(2024);
    c.keys = groth16::setup(qap, c.cs.hash(), rng);
    c.keys.pk.prepare();
    return c;
  }();
  return c;
}

const VerificationKey& vk() { return circuit().keys.vk; }

// q honest pieces starting from (u0, v0) with data x_i = i mod 7 - 3.
std::vector<PieceInput> honest_pieces(size_t q) {
  std::vector<PieceInput> out;
  std::vector<int64_t> in{1000, -250};
  for (size_t i = 0; i < q; ++i) {
    const int64_t x[1] = {static_cast<int64_t>(i % 7) * 100 - 300};
    const auto t = quantize::evaluate(circuit().spec, in, x);
    const auto asg = r1cs::assign_piece(t);
    out.push_back({asg.statement(4), asg.witness(4)});
    in = t.outputs();
  }
  return out;
}

Chain honest_chain(size_t q, uint64_t seed, bool public_t0 = false) {
  Rng rng(seed);
  const auto pieces = honest_pieces(q);
  return prove_chain(circuit().keys.pk, vk(), pieces, rng, {public_t0, 0});
}

std::vector<Scalar> random_vec(size_t n, Rng& rng) {
  std::vector<Scalar> v(n);
  for (auto& s : v) s = Scalar::random(rng);
  return v;
}

TEST(GenG16, ZeroNoiseIsIdentity) {
  const auto pieces = honest_pieces(1);
  Rng rng(1);
  const TList zero(4);
  const auto m = modify(vk(), pieces[0].statement, zero);
  EXPECT_TRUE(m.vk_prime == vk());
  EXPECT_EQ(m.phi_prime, pieces[0].statement);
  const auto proof = groth16::prove(circuit().keys.pk, pieces[0].statement, pieces[0].witness, rng);
  EXPECT_EQ(groth16::verify(m.vk_prime, m.phi_prime, proof), groth16::verify(vk(), pieces[0].statement, proof));
}

TEST(GenG16, NoisedStatementVerifiesOnlyUnderModifiedKey) {
  const auto pieces = honest_pieces(1);
  Rng rng(2);
  const auto out = gen_g16_prf(circuit().keys.pk, vk(), pieces[0].statement, pieces[0].witness,
                               initial_tlist(4, rng), rng);
  EXPECT_TRUE(groth16::verify(out.mod.vk_prime, out.mod.phi_prime, out.proof));
  EXPECT_FALSE(groth16::verify(vk(), out.mod.phi_prime, out.proof));
  EXPECT_TRUE(groth16::verify(vk(), pieces[0].statement, out.proof));
  // Only gamma_abc_0 moves.
  EXPECT_FALSE(out.mod.vk_prime.gamma_abc[0] == vk().gamma_abc[0]);
  for (size_t j = 1; j < 5; ++j) EXPECT_TRUE(out.mod.vk_prime.gamma_abc[j] == vk().gamma_abc[j]);
}

TEST(GenG16, InputNoiseCopiesPreviousOutputNoise) {
  Rng rng(3);
  const TList t0 = initial_tlist(4, rng);
  const TList t1 = next_tlist(t0, rng);
  const TList t2 = next_tlist(t1, rng);
  EXPECT_EQ(t1[0], t0[2]);
  EXPECT_EQ(t1[1], t0[3]);
  EXPECT_EQ(t2[0], t1[2]);
  EXPECT_EQ(t2[1], t1[3]);
  EXPECT_NE(t2[2], t1[2]);
}

TEST(GenG16, LengthMismatchRejected) {
  const auto pieces = honest_pieces(1);
  Rng rng(4);
  const TList bad(2);
  EXPECT_THROW(gen_g16_prf(circuit().keys.pk, vk(), pieces[0].statement, pieces[0].witness, bad, rng),
               std::invalid_argument);
  auto wrong = pieces[0];
  wrong.statement[3] += Scalar::one();
  EXPECT_THROW(gen_g16_prf(circuit().keys.pk, vk(), wrong.statement, wrong.witness, initial_tlist(4, rng), rng),
               std::invalid_argument);
}

TEST(Eq2, CommitmentIdentityOnRandomPairs) {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const auto a = random_vec(4, rng);
    const auto t = random_vec(4, rng);
    const auto m = modify(vk(), a, t);
    EXPECT_EQ(groth16::public_input_commitment(m.vk_prime, m.phi_prime), groth16::public_input_commitment(vk(), a));
  }
}

TEST(GenCon, HonestProofsVerifyAndFirstPieceHasNoS2) {
  Rng rng(6);
  const TList t1 = next_tlist(initial_tlist(4, rng), rng);
  const TList t2 = next_tlist(t1, rng);
  const auto a = random_vec(4, rng);
  const auto m1 = modify(vk(), a, t1);
  const auto m2 = modify(vk(), a, t2);
  const auto c1 = gen_con_prf(vk(), m1.vk_prime, t1, m1.checkers.tsum1, std::nullopt, rng);
  EXPECT_FALSE(c1.s2.has_value());
  EXPECT_TRUE(vrf_con_prf(c1.s1, c1.s2, vk(), m1.vk_prime, m1.checkers, std::nullopt));
  const auto c2 = gen_con_prf(vk(), m2.vk_prime, t2, m2.checkers.tsum1, m1.checkers.tsum2, rng);
  ASSERT_TRUE(c2.s2.has_value());
  EXPECT_TRUE(vrf_con_prf(c2.s1, c2.s2, vk(), m2.vk_prime, m2.checkers, m1.checkers.tsum2));
  // Dropping s2 from a later piece, or adding one to the first, is rejected.
  EXPECT_EQ(check_con_prf(c2.s1, std::nullopt, vk(), m2.vk_prime, m2.checkers, m1.checkers.tsum2),
            ConFailure::kS2Presence);
}

TEST(GenCon, BrokenNoiseContinuityFailsS2) {
  Rng rng(7);
  const TList t1 = next_tlist(initial_tlist(4, rng), rng);
  TList t2 = next_tlist(t1, rng);
  t2[1] = Scalar::random(rng);
  const auto a = random_vec(4, rng);
  const auto m1 = modify(vk(), a, t1);
  const auto m2 = modify(vk(), a, t2);
  const auto c2 = gen_con_prf(vk(), m2.vk_prime, t2, m2.checkers.tsum1, m1.checkers.tsum2, rng);
  EXPECT_EQ(check_con_prf(c2.s1, c2.s2, vk(), m2.vk_prime, m2.checkers, m1.checkers.tsum2), ConFailure::kS2);
}

TEST(VrfCon, CheckerAndResponseTampers) {
  Rng rng(8);
  const TList t = next_tlist(initial_tlist(4, rng), rng);
  const auto m = modify(vk(), random_vec(4, rng), t);
  auto c = gen_con_prf(vk(), m.vk_prime, t, m.checkers.tsum1, std::nullopt, rng);
  auto bad = m.checkers;
  bad.tsum1 = bad.tsum1 + G1::generator();
  EXPECT_EQ(check_con_prf(c.s1, c.s2, vk(), m.vk_prime, bad, std::nullopt), ConFailure::kCheckerProduct);
  c.s1.z[0] += Scalar::one();
  EXPECT_EQ(check_con_prf(c.s1, c.s2, vk(), m.vk_prime, m.checkers, std::nullopt), ConFailure::kS1);
}

TEST(Chain, HonestThreePieces) {
  const auto chain = honest_chain(3, 9);
  ASSERT_EQ(chain.bundles.size(), 3u);
  EXPECT_FALSE(chain.bundles[0].s2.has_value());
  EXPECT_TRUE(chain.bundles[1].s2.has_value());
  for (size_t i = 0; i < 3; ++i) {
    const std::optional<G1> prev = i ? std::optional<G1>(chain.bundles[i - 1].checkers.tsum2) : std::nullopt;
    const auto& b = chain.bundles[i];
    EXPECT_TRUE(vrf_con_prf(b.s1, b.s2, vk(), b.vk_prime, b.checkers, prev));
  }
  EXPECT_TRUE(verify_piece_chain(chain.bundles, vk()).ok);
}

TEST(Chain, HonestNinetyPieces) {
  const auto chain = honest_chain(90, 10);
  const auto rep = verify_piece_chain(chain.bundles, vk());
  EXPECT_TRUE(rep.ok) << rep.reason;
}

TEST(Chain, NoisedStatementsStayContinuous) {
  // a'_{i,j} = a'_{i-1,j+l/2} because both value and noise carry over.
  const auto chain = honest_chain(5, 11);
  for (size_t i = 1; i < 5; ++i) {
    EXPECT_EQ(chain.bundles[i].phi_prime[0], chain.bundles[i - 1].phi_prime[2]);
    EXPECT_EQ(chain.bundles[i].phi_prime[1], chain.bundles[i - 1].phi_prime[3]);
  }
  const auto pieces = honest_pieces(5);
  for (size_t i = 1; i < 5; ++i) {
    EXPECT_EQ(r1cs::decode(pieces[i].statement[0]), r1cs::decode(pieces[i - 1].statement[2]));
    EXPECT_EQ(r1cs::decode(pieces[i].statement[1]), r1cs::decode(pieces[i - 1].statement[3]));
  }
}

TEST(Chain, SwappedBundlesRejected) {
  auto chain = honest_chain(8, 12);
  std::swap(chain.bundles[3], chain.bundles[4]);
  auto rep = verify_piece_chain(chain.bundles, vk());
  EXPECT_FALSE(rep.ok);
  EXPECT_EQ(rep.failing_index, 4u);
  // Even with indices relabelled, continuity breaks.
  std::swap(chain.bundles[3].index, chain.bundles[4].index);
  rep = verify_piece_chain(chain.bundles, vk());
  EXPECT_FALSE(rep.ok);
  EXPECT_EQ(rep.reason, describe(ConFailure::kS2));
}

TEST(Chain, SimulatedProofUnderOriginalKeyRejected) {
  auto chain = honest_chain(8, 13);
  Rng rng(14);
  auto& b = chain.bundles[6];
  b.proof = groth16::sim(circuit().keys.trapdoor, vk(), b.phi_prime, rng);
  ASSERT_TRUE(groth16::verify(vk(), b.phi_prime, b.proof));
  const auto rep = verify_piece_chain(chain.bundles, vk());
  EXPECT_FALSE(rep.ok);
  EXPECT_EQ(rep.failing_index, 7u);
}

TEST(Chain, ModifiedKeyFieldsOtherThanGamma0Rejected) {
  auto chain = honest_chain(2, 15);
  chain.bundles[1].vk_prime.gamma_abc[2] = chain.bundles[1].vk_prime.gamma_abc[2] + G1::generator();
  EXPECT_EQ(verify_piece_chain(chain.bundles, vk()).failing_index, 2u);
  EXPECT_THROW(verify_piece_chain(std::span<const PieceBundle>{}, vk()), std::invalid_argument);
}

TEST(Chain, PublicInitialInputs) {
  const auto chain = honest_chain(3, 16, true);
  const auto pieces = honest_pieces(1);
  const std::vector<Scalar> initial{pieces[0].statement[0], pieces[0].statement[1]};
  EXPECT_EQ(chain.bundles[0].phi_prime[0], initial[0]);
  EXPECT_TRUE(verify_piece_chain(chain.bundles, vk(), initial).ok);
  auto wrong = initial;
  wrong[1] += Scalar::one();
  EXPECT_EQ(verify_piece_chain(chain.bundles, vk(), wrong).failing_index, 1u);
  // A noised first piece is not in public form.
  EXPECT_FALSE(verify_piece_chain(honest_chain(3, 17).bundles, vk(), initial).ok);
}

TEST(NoiseHiding, NoisedValueLooksUniform) {
  // Bucket the low 4 bits of a + t for a fixed a; chi-square with 15 dof.
  Rng rng(18);
  const Scalar a = r1cs::embed(123456);
  std::array<int, 16> counts{};
  const int n = 10000;
  for (int i = 0; i < n; ++i) counts[(a + Scalar::random(rng)).to_be_bytes()[31] & 15]++;
  double chi = 0;
  for (int c : counts) chi += (c - n / 16.0) * (c - n / 16.0) / (n / 16.0);
  EXPECT_LT(chi, 37.7);  // 0.1% critical value
}

TEST(Archive, RoundTripWithDeltaEncoding) {
  const auto chain = honest_chain(4, 19);
  const auto bytes = serialize_bundle(chain.bundles[1], vk());
  const auto back = deserialize_bundle(bytes, vk());
  EXPECT_TRUE(back.vk_prime == chain.bundles[1].vk_prime);
  EXPECT_EQ(back.phi_prime, chain.bundles[1].phi_prime);
  EXPECT_EQ(back.s2, chain.bundles[1].s2);
  const auto dir = std::filesystem::temp_directory_path() / "pzkpfl_piecechain_test";
  write_archive(dir / "bundles.bin", chain.bundles, vk());
  const auto loaded = read_archive(dir / "bundles.bin", vk());
  ASSERT_EQ(loaded.size(), 4u);
  EXPECT_TRUE(verify_piece_chain(loaded, vk()).ok);
  auto other = vk();
  other.circuit_hash[5] ^= 1;
  EXPECT_THROW(deserialize_bundle(bytes, other), std::runtime_error);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace pzkpfl::piecechain
