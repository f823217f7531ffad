// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pzkpfl/sigma.hpp"

#include <gtest/gtest.h>

namespace pzkpfl::sigma {
namespace {

std::vector<G1> random_bases(size_t n, Rng& rng) {
  std::vector<G1> b;
  for (size_t i = 0; i < n; ++i) b.push_back(G1::generator() * Scalar::random(rng));
  return b;
}

std::vector<Scalar> random_scalars(size_t n, Rng& rng) {
  std::vector<Scalar> v(n);
  for (auto& s : v) s = Scalar::random(rng);
  return v;
}

// Naive sum c_j g_j, independent of the library MSM.
G1 naive(std::span<const G1> g, std::span<const Scalar> c) {
  G1 acc;
  for (size_t j = 0; j < g.size(); ++j) acc = acc + g[j] * c[j];
  return acc;
}

TEST(S1, ZeroExponent) {
  Rng rng(1);
  const std::vector<G1> g{G1::generator()};
  const std::vector<Scalar> c{Scalar::zero()};
  EXPECT_TRUE(verify_s1(g, G1::identity(), prove_s1(g, c, G1::identity(), rng)));
}

TEST(S1, RoundTripAndResponseTamper) {
  Rng rng(2);
  const auto g = random_bases(4, rng);
  const auto c = random_scalars(4, rng);
  const G1 C = naive(g, c);
  auto p = prove_s1(g, c, C, rng);
  EXPECT_TRUE(verify_s1(g, C, p));
  p.z[1] += Scalar::one();
  EXPECT_FALSE(verify_s1(g, C, p));
}

TEST(S1, CommitmentShiftFails) {
  Rng rng(3);
  const auto g = random_bases(4, rng);
  const auto c = random_scalars(4, rng);
  const G1 C = naive(g, c);
  const auto p = prove_s1(g, c, C, rng);
  EXPECT_FALSE(verify_s1(g, C + g[0], p));
}

TEST(S1, LengthMismatch) {
  Rng rng(4);
  const auto g = random_bases(3, rng);
  const auto c = random_scalars(2, rng);
  EXPECT_THROW(prove_s1(g, c, G1::identity(), rng), std::invalid_argument);
  auto p = prove_s1(g, random_scalars(3, rng), G1::identity(), rng);
  p.z.pop_back();
  EXPECT_FALSE(verify_s1(g, G1::identity(), p));
}

TEST(S2, ZeroExponents) {
  Rng rng(5);
  const auto g1 = random_bases(2, rng), g2 = random_bases(2, rng);
  const std::vector<Scalar> c(2);
  EXPECT_TRUE(verify_s2(g1, g2, G1::identity(), G1::identity(),
                        prove_s2(g1, g2, c, G1::identity(), G1::identity(), rng)));
}

TEST(S2, HonestRoundTrip) {
  Rng rng(6);
  const auto g1 = random_bases(3, rng), g2 = random_bases(3, rng);
  const auto c = random_scalars(3, rng);
  const G1 C1 = naive(g1, c), C2 = naive(g2, c);
  EXPECT_TRUE(verify_s2(g1, g2, C1, C2, prove_s2(g1, g2, c, C1, C2, rng)));
}

TEST(S2, DifferentExponentsFail) {
  Rng rng(7);
  const auto g1 = random_bases(3, rng), g2 = random_bases(3, rng);
  const auto c = random_scalars(3, rng);
  auto c2 = c;
  c2[2] += Scalar::one();
  const G1 C1 = naive(g1, c), C2 = naive(g2, c2);
  // The prover only knows one vector; whichever it uses, verification fails.
  EXPECT_FALSE(verify_s2(g1, g2, C1, C2, prove_s2(g1, g2, c, C1, C2, rng)));
  EXPECT_FALSE(verify_s2(g1, g2, C1, C2, prove_s2(g1, g2, c2, C1, C2, rng)));
}

TEST(S3, ZeroValues) {
  Rng rng(8);
  const G1 gp = G1::hash_to(std::vector<uint8_t>{1}, "test"), gi = G1::hash_to(std::vector<uint8_t>{2}, "test");
  EXPECT_TRUE(verify_s3(gp, gi, G1::identity(), G1::identity(),
                        prove_s3(gp, gi, Scalar::zero(), Scalar::zero(), G1::identity(), G1::identity(), rng)));
}

TEST(S3, VerifierRecomputedLinkage) {
  Rng rng(9);
  const G1 gp = G1::generator() * Scalar::random(rng), gi = G1::generator() * Scalar::random(rng);
  const Scalar a = Scalar::from_i64(-1234567), t = Scalar::random(rng);
  const G1 C1 = gp * a;
  const auto p = prove_s3(gp, gi, a, t, C1, gi * (a + t), rng);
  // The verifier recomputes C2 from the published noised value a' = a + t.
  const Scalar a_prime = a + t;
  EXPECT_TRUE(verify_s3(gp, gi, C1, gi * a_prime, p));
  EXPECT_FALSE(verify_s3(gp, gi, C1, gi * (a_prime + Scalar::one()), p));
  EXPECT_FALSE(verify_s3(gp, gi, C1 + gp, gi * a_prime, p));
}

TEST(Properties, CompletenessAllFamilies) {
  Rng rng(10);
  int ok = 0;
  for (int i = 0; i < 100; ++i) {
    const size_t n = 1 + rng.uniform(4);
    const auto g = random_bases(2 * n, rng);
    const std::span<const G1> b1(g.data(), n), b2(g.data() + n, n);
    const auto c = random_scalars(n, rng);
    const G1 C1 = naive(b1, c), C2 = naive(b2, c);
    const Scalar x = Scalar::random(rng), y = Scalar::random(rng);
    ok += verify_s1(b1, C1, prove_s1(b1, c, C1, rng)) && verify_s2(b1, b2, C1, C2, prove_s2(b1, b2, c, C1, C2, rng)) &&
          verify_s3(g[0], b2[0], g[0] * x, b2[0] * (x + y), prove_s3(g[0], b2[0], x, y, g[0] * x, b2[0] * (x + y), rng));
  }
  EXPECT_EQ(ok, 100);
}

TEST(Properties, SingleFieldMutationsFail) {
  Rng rng(11);
  int r1 = 0, r2 = 0, r3 = 0;
  for (int i = 0; i < 100; ++i) {
    const auto g = random_bases(6, rng);
    const std::span<const G1> b1(g.data(), 3), b2(g.data() + 3, 3);
    const auto c = random_scalars(3, rng);
    const G1 C1 = naive(b1, c), C2 = naive(b2, c);
    const Scalar delta = Scalar::random(rng);
    const G1 shift = G1::generator() * delta;

    auto p1 = prove_s1(b1, c, C1, rng);
    switch (i % 3) {
      case 0: p1.a = p1.a + shift; break;
      case 1: p1.e += delta; break;
      default: p1.z[i % p1.z.size()] += delta; break;
    }
    r1 += !verify_s1(b1, C1, p1);

    auto p2 = prove_s2(b1, b2, c, C1, C2, rng);
    switch (i % 4) {
      case 0: p2.a1 = p2.a1 + shift; break;
      case 1: p2.a2 = p2.a2 + shift; break;
      case 2: p2.e += delta; break;
      default: p2.z[i % p2.z.size()] += delta; break;
    }
    r2 += !verify_s2(b1, b2, C1, C2, p2);

    const Scalar x = Scalar::random(rng), y = Scalar::random(rng);
    auto p3 = prove_s3(g[0], g[1], x, y, g[0] * x, g[1] * (x + y), rng);
    switch (i % 6) {
      case 0: p3.a1 = p3.a1 + shift; break;
      case 1: p3.a2 = p3.a2 + shift; break;
      case 2: p3.a3 = p3.a3 + shift; break;
      case 3: p3.e += delta; break;
      case 4: p3.z1 += delta; break;
      default: p3.z2 += delta; break;
    }
    r3 += !verify_s3(g[0], g[1], g[0] * x, g[1] * (x + y), p3);
  }
  EXPECT_EQ(r1, 100);
  EXPECT_EQ(r2, 100);
  EXPECT_EQ(r3, 100);
}

TEST(Properties, ChallengeBindsEveryTranscriptElement) {
  // Same prover randomness, one transcript element changed: the challenge moves.
  const auto make = [](const std::vector<G1>& g, const G1& C) {
    Rng rng(12);
    const std::vector<Scalar> c(g.size(), Scalar::one());
    return prove_s1(g, c, C, rng).e;
  };
  Rng rng(13);
  const auto g = random_bases(3, rng);
  const G1 C = G1::generator();
  const Scalar e0 = make(g, C);
  for (size_t j = 0; j < g.size(); ++j) {
    auto g2 = g;
    g2[j] = g2[j] + G1::generator();
    EXPECT_NE(make(g2, C), e0) << j;
  }
  EXPECT_NE(make(g, C + G1::generator()), e0);
}

TEST(Encoding, RoundTrip) {
  Rng rng(14);
  const auto g = random_bases(4, rng);
  const auto c = random_scalars(2, rng);
  const std::span<const G1> b1(g.data(), 2), b2(g.data() + 2, 2);
  const auto p1 = prove_s1(b1, c, naive(b1, c), rng);
  const auto p2 = prove_s2(b1, b2, c, naive(b1, c), naive(b2, c), rng);
  const auto p3 = prove_s3(g[0], g[1], c[0], c[1], g[0] * c[0], g[1] * (c[0] + c[1]), rng);
  codec::Writer w;
  write(w, p1);
  write(w, p2);
  write(w, p3);
  const auto bytes = w.take();
  codec::Reader r(bytes);
  EXPECT_EQ(read_s1(r), p1);
  EXPECT_EQ(read_s2(r), p2);
  EXPECT_EQ(read_s3(r), p3);
  EXPECT_TRUE(r.done());
}

}  // namespace
}  // namespace pzkpfl::sigma
