// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pzkpfl/groth16.hpp"

#include <gtest/gtest.h>

#include "pzkpfl/r1cs.hpp"

namespace pzkpfl::groth16 {
namespace {

using quantize::FixedExpr;
using quantize::FixedOp;
using quantize::PieceSpec;
using quantize::SymKind;
using r1cs::embed;

struct Fixture {
  r1cs::ConstraintSystem cs{0};
  std::shared_ptr<const r1cs::QapInstance> qap;
  SetupResult keys;
};

// x * x = y; statement (dummy, y), witness (x).
Fixture square(uint64_t seed) {
  PieceSpec s;
  s.syms = {{SymKind::kInput}, {SymKind::kData}, {SymKind::kInternal}};
  FixedExpr e{FixedOp::kMul};
  e.a = 1;
  e.b = 1;
  e.out = 2;
  s.exprs = {e};
  s.inputs = {0};
  s.data = {1};
  s.outputs = {2};
  Fixture f;
  f.cs = r1cs::synthesize_piece(s);
  f.qap = std::make_shared<const r1cs::QapInstance>(r1cs::to_qap(f.cs));
  Rng rng(seed);
  f.keys = setup(f.qap, f.cs.hash(), rng);
  return f;
}

const Fixture& shared() {
  static const Fixture f = square(100);
  return f;
}

std::vector<Scalar> stmt(int64_t y, int64_t dummy = 0) { return {embed(dummy), embed(y)}; }
std::vector<Scalar> wit(int64_t x) { return {embed(x)}; }

TEST(Setup, GammaAbcLength) {
  EXPECT_EQ(shared().keys.vk.gamma_abc.size(), 3u);
  EXPECT_EQ(shared().keys.vk.num_public(), 2u);
}

TEST(Setup, SeededSetupIsDeterministic) {
  const auto a = square(7), b = square(7), c = square(8);
  EXPECT_EQ(serialize(a.keys.vk), serialize(b.keys.vk));
  EXPECT_EQ(serialize(a.keys.pk), serialize(b.keys.pk));
  EXPECT_NE(serialize(a.keys.vk), serialize(c.keys.vk));
}

TEST(Setup, DegenerateQapRejected) {
  r1cs::ConstraintSystem cs(2);
  cs.alloc_witness();
  auto q = std::make_shared<const r1cs::QapInstance>(r1cs::to_qap(cs));
  Rng rng(1);
  EXPECT_THROW(setup(q, cs.hash(), rng), std::invalid_argument);
}

TEST(Setup, GammaAbcMatchesTrapdoor) {
  // gamma_abc_j = g^{(beta u_j + alpha v_j + w_j)/gamma}, recomputed from the trapdoor.
  const auto& f = shared();
  const auto& td = f.keys.trapdoor;
  const auto ev = f.qap->evaluate_at(td.x);
  const Scalar gi = td.gamma.inverse();
  for (size_t j = 0; j < 3; ++j) {
    const Scalar e = (td.beta * ev.u[j] + td.alpha * ev.v[j] + ev.w[j]) * gi;
    EXPECT_EQ(f.keys.vk.gamma_abc[j], G1::generator() * e);
  }
  EXPECT_EQ(f.keys.vk.alpha1, G1::generator() * td.alpha);
}

TEST(Prove, HonestProofVerifies) {
  const auto& f = shared();
  Rng rng(2);
  const auto p = prove(f.keys.pk, stmt(9), wit(3), rng);
  EXPECT_TRUE(verify(f.keys.vk, stmt(9), p));
}

TEST(Prove, ProofsAreRandomized) {
  const auto& f = shared();
  Rng rng(3);
  const auto p1 = prove(f.keys.pk, stmt(9), wit(3), rng);
  const auto p2 = prove(f.keys.pk, stmt(9), wit(3), rng);
  EXPECT_FALSE(p1.a == p2.a);
  EXPECT_FALSE(p1.b == p2.b);
  EXPECT_FALSE(p1.c == p2.c);
  EXPECT_TRUE(verify(f.keys.vk, stmt(9), p1));
  EXPECT_TRUE(verify(f.keys.vk, stmt(9), p2));
}

TEST(Prove, UnsatisfyingAssignmentRejected) {
  const auto& f = shared();
  Rng rng(4);
  EXPECT_THROW(prove(f.keys.pk, stmt(8), wit(3), rng), std::invalid_argument);
}

TEST(Verify, FlippedStatementFails) {
  const auto& f = shared();
  Rng rng(5);
  const auto p = prove(f.keys.pk, stmt(9), wit(3), rng);
  EXPECT_FALSE(verify(f.keys.vk, stmt(10), p));
  EXPECT_FALSE(verify(f.keys.vk, stmt(9, 1), p));
}

TEST(Verify, IdentityAFails) {
  const auto& f = shared();
  Rng rng(6);
  auto p = prove(f.keys.pk, stmt(9), wit(3), rng);
  p.a = G1::identity();
  EXPECT_FALSE(verify(f.keys.vk, stmt(9), p));
}

TEST(Verify, WrongStatementLengthFails) {
  const auto& f = shared();
  Rng rng(7);
  const auto p = prove(f.keys.pk, stmt(9), wit(3), rng);
  const std::vector<Scalar> short_stmt{embed(9)};
  EXPECT_FALSE(verify(f.keys.vk, short_stmt, p));
}

TEST(Properties, CompletenessOnRandomAssignments) {
  const auto& f = shared();
  Rng rng(8);
  int ok = 0;
  for (int i = 0; i < 100; ++i) {
    const Scalar x = Scalar::random(rng), d = Scalar::random(rng);
    const std::vector<Scalar> phi{d, x * x};
    const std::vector<Scalar> w{x};
    ok += verify(f.keys.vk, phi, prove(f.keys.pk, phi, w, rng));
  }
  EXPECT_EQ(ok, 100);
}

TEST(Properties, SoundnessSmokeOnStatementTampers) {
  const auto& f = shared();
  Rng rng(9);
  int rejected = 0;
  for (int i = 0; i < 100; ++i) {
    const Scalar x = Scalar::random(rng);
    std::vector<Scalar> phi{Scalar::random(rng), x * x};
    const std::vector<Scalar> w{x};
    const auto p = prove(f.keys.pk, phi, w, rng);
    phi[i % 2] += Scalar::random(rng);
    rejected += !verify(f.keys.vk, phi, p);
  }
  EXPECT_EQ(rejected, 100);
}

TEST(Sim, SimulatedProofVerifies) {
  const auto& f = shared();
  Rng rng(10);
  EXPECT_TRUE(verify(f.keys.vk, stmt(9), sim(f.keys.trapdoor, f.keys.vk, stmt(9), rng)));
}

TEST(Sim, VerifiesEvenWithoutWitness) {
  // 7 is not a square of any small integer here; no witness is used.
  const auto& f = shared();
  Rng rng(11);
  EXPECT_TRUE(verify(f.keys.vk, stmt(7), sim(f.keys.trapdoor, f.keys.vk, stmt(7), rng)));
}

TEST(Sim, WrongTrapdoorFails) {
  const auto& f = shared();
  const auto other = square(12);
  Rng rng(13);
  EXPECT_FALSE(verify(f.keys.vk, stmt(9), sim(other.keys.trapdoor, f.keys.vk, stmt(9), rng)));
}

TEST(Files, KeysAndProofsRoundTrip) {
  const auto& f = shared();
  Rng rng(14);
  const auto p = prove(f.keys.pk, stmt(16), wit(-4), rng);
  const auto vk = deserialize_vk(serialize(f.keys.vk));
  EXPECT_TRUE(vk == f.keys.vk);
  auto pk = deserialize_pk(serialize(f.keys.pk));
  pk.qap = f.qap;
  pk.prepare();
  EXPECT_TRUE(verify(vk, stmt(25), prove(pk, stmt(25), wit(5), rng)));
  const auto hash = f.cs.hash();
  const auto bytes = serialize(p, hash);
  EXPECT_EQ(deserialize_proof(bytes, hash), p);
  auto other = hash;
  other[0] ^= 1;
  EXPECT_THROW(deserialize_proof(bytes, other), std::runtime_error);
  auto truncated = bytes;
  truncated.pop_back();
  EXPECT_THROW(deserialize_proof(truncated, hash), std::runtime_error);
  auto corrupt = bytes;
  corrupt[corrupt.size() - 60] ^= 0x5a;
  EXPECT_ANY_THROW(deserialize_proof(corrupt, hash));
}

TEST(Commitment, PublicInputCommitmentMatchesNaiveProduct) {
  const auto& f = shared();
  const auto phi = stmt(9, -5);
  const G1 naive = f.keys.vk.gamma_abc[0] + f.keys.vk.gamma_abc[1] * phi[0] + f.keys.vk.gamma_abc[2] * phi[1];
  EXPECT_EQ(public_input_commitment(f.keys.vk, phi), naive);
}

}  // namespace
}  // namespace pzkpfl::groth16
