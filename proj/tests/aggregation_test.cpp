// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pzkpfl/aggregation.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "pzkpfl/codec.hpp"
#include "pzkpfl/ledger.hpp"
#include "round_fixture.hpp"

namespace pzkpfl::aggregation {
namespace {

using testing::RoundPlan;
using testing::run_submissions;
using testing::test_keys;

GlobalModel run_round(const std::vector<std::vector<int64_t>>& values, uint64_t seed) {
  Rng rng(seed);
  RoundPlan plan(values, rng);
  ledger::Ledger l;
  const auto addr = run_submissions(l, plan);
  return aggregate(l, addr, plan.keys, 100);
}

int64_t rand_signed(Rng& rng, int64_t bound) {
  return static_cast<int64_t>(rng.next_u64() % static_cast<uint64_t>(2 * bound + 1)) - bound;
}

bool contains(std::span<const uint8_t> hay, std::span<const uint8_t> needle) {
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

TEST(Masks, SingleTrainerRingCancels) {
  Rng rng(1);
  const auto m = exchange_masks(1, 4, test_keys().pk, rng);
  for (const auto& d : m.delta(1, test_keys().pk.n)) EXPECT_EQ(d, 0);
}

TEST(Masks, RingDeltasTelescopeToZero) {
  Rng rng(2);
  const auto& n = test_keys().pk.n;
  const auto m = exchange_masks(3, 2, test_keys().pk, rng);
  for (size_t j = 0; j < 2; ++j) {
    BigNat total = 0;
    for (uint32_t i = 1; i <= 3; ++i) {
      const auto d = m.delta(i, n);
      EXPECT_LT(d[j], n);
      total += d[j];
    }
    EXPECT_EQ(total % n, 0);
    EXPECT_NE(m.s[0][j], m.s[1][j]);
  }
  EXPECT_THROW(m.delta(0, n), std::out_of_range);
  EXPECT_THROW(m.delta(4, n), std::out_of_range);
}

TEST(Masks, CancellationGivesExactSum) {
  Rng rng(3);
  for (size_t n : {1, 2, 3, 5}) {
    for (size_t l : {1, 2, 8}) {
      std::vector<std::vector<int64_t>> v(n, std::vector<int64_t>(l));
      for (auto& row : v) {
        for (auto& x : row) x = rand_signed(rng, 1'000'000'000'000);
      }
      Rng r2 = rng.fork("round", n * 10 + l);
      RoundPlan plan(v, r2);
      ledger::Ledger led;
      const auto addr = run_submissions(led, plan);
      const auto g = aggregate(led, addr, plan.keys, 100);
      EXPECT_EQ(g.sum, plan.direct_sum()) << "n=" << n << " l=" << l;
    }
  }
}

TEST(Aggregate, SpecExamples) {
  auto g = run_round({{1}, {2}, {3}}, 4);
  EXPECT_EQ(g.sum, std::vector<int64_t>{6});
  EXPECT_EQ(g.mean, std::vector<int64_t>{2});
  EXPECT_EQ(g.remainder, std::vector<int64_t>{0});

  g = run_round({{1}, {2}, {4}}, 5);
  EXPECT_EQ(g.sum, std::vector<int64_t>{7});
  EXPECT_EQ(g.mean, std::vector<int64_t>{2});
  EXPECT_EQ(g.remainder, std::vector<int64_t>{1});

  g = run_round({{0, 0}, {0, 0}}, 6);
  EXPECT_EQ(g.mean, (std::vector<int64_t>{0, 0}));

  g = run_round({{-123456789}}, 7);
  EXPECT_EQ(g.sum, std::vector<int64_t>{-123456789});
  EXPECT_EQ(g.mean, std::vector<int64_t>{-123456789});
}

TEST(Aggregate, IncompleteRoundRefused) {
  Rng rng(8);
  RoundPlan plan({{1}, {2}, {3}}, rng);
  ledger::Ledger l;
  const auto addr = l.deploy(plan.deploy_tx).address;
  l.invoke(plan.submit_tx(0, 2, addr));
  l.invoke(plan.submit_tx(2, 3, addr));
  EXPECT_THROW(aggregate(l, addr, plan.keys, 4), std::runtime_error);
  EXPECT_FALSE(l.contract(addr).published_sum);
}

TEST(Aggregate, PublishesSumAndMeanOnLedger) {
  Rng rng(9);
  RoundPlan plan({{10, -7}, {11, -8}}, rng);
  ledger::Ledger l;
  const auto addr = run_submissions(l, plan);
  const auto g = aggregate(l, addr, plan.keys, 50);
  EXPECT_EQ(*l.contract(addr).published_sum, (std::vector<int64_t>{21, -15}));
  EXPECT_EQ(*l.contract(addr).published_mean, g.mean);
  EXPECT_EQ(g.mean, (std::vector<int64_t>{11, -8}));  // 10.5 and -7.5 round away from zero
  EXPECT_THROW(aggregate(l, addr, plan.keys, 51), std::runtime_error);
}

TEST(Aggregate, TamperedCiphertextCaughtByProductCheck) {
  Rng rng(10);
  RoundPlan plan({{5}, {6}, {7}}, rng);
  // Trainer 2 swaps in an encryption of a different value; its proofs stay honest.
  BigNat m = paillier::encode_signed(plan.keys.pk, BigNat(6 + 1)) + plan.masks.delta(2, plan.keys.pk.n)[0];
  m %= plan.keys.pk.n;
  plan.subs[1].c[0] = paillier::encrypt(plan.keys.pk, m, rng);
  ledger::Ledger l;
  const auto addr = run_submissions(l, plan);
  EXPECT_THROW(aggregate(l, addr, plan.keys, 10), std::runtime_error);
}

TEST(Aggregate, PlaintextWrapDetected) {
  Rng rng(11);
  const auto small = paillier::keygen(40, rng);
  const int64_t big = (int64_t{1} << 38) + 12345;
  // max_abs understates the values so deployment passes the capacity check.
  RoundPlan plan({{big}, {big}, {big}}, rng, small, 1000);
  ledger::Ledger l;
  const auto addr = run_submissions(l, plan);
  EXPECT_THROW(aggregate(l, addr, plan.keys, 10), std::runtime_error);
}

TEST(Aggregate, ValueOutsidePlaintextRangeRaises) {
  Rng rng(12);
  const auto tiny = paillier::keygen(24, rng);
  EXPECT_THROW(RoundPlan({{int64_t{1} << 40}}, rng, tiny), std::overflow_error);
}

TEST(RoundDiv, MatchesFloatOracle) {
  Rng rng(13);
  for (int i = 0; i < 2000; ++i) {
    const int64_t s = rand_signed(rng, int64_t{1} << 40);
    const uint64_t n = 1 + rng.next_u64() % 9;
    const int64_t want = std::llround(static_cast<long double>(s) / static_cast<long double>(n));
    EXPECT_EQ(round_div(s, n), want) << s << "/" << n;
  }
  EXPECT_EQ(round_div(5, 2), 3);
  EXPECT_EQ(round_div(-5, 2), -3);
  EXPECT_EQ(round_div(7, 3), 2);
  EXPECT_EQ(round_div(-8, 3), -3);
  EXPECT_EQ(round_div(INT64_MIN, 1), INT64_MIN);
  EXPECT_THROW(round_div(1, 0), std::invalid_argument);
  const auto g = make_global({7, -7, 0}, 3);
  EXPECT_EQ(g.remainder, (std::vector<int64_t>{1, -1, 0}));
}

TEST(Generators, DeterministicAndSeparated) {
  EXPECT_EQ(derive_generator(1, 2, 3), derive_generator(1, 2, 3));
  EXPECT_FALSE(derive_generator(1, 2, 3) == derive_generator(1, 2, 4));
  EXPECT_FALSE(derive_generator(1, 2, 3) == derive_generator(1, 3, 3));
  EXPECT_FALSE(derive_generator(1, 2, 3) == derive_generator(2, 2, 3));
  const std::vector<uint8_t> a{1}, b{2};
  EXPECT_FALSE(derive_g_pub(1, a) == derive_g_pub(1, b));
  EXPECT_FALSE(derive_g_pub(1, a) == derive_generator(1, 0, 0));
  EXPECT_FALSE(derive_g_pub(1, a).is_identity());
}

TEST(SumProof, HonestRoundVerifies) {
  Rng rng(14);
  RoundPlan plan({{3, 4}, {5, -6}, {7, 8}}, rng);
  EXPECT_TRUE(vrf_sum_prf(plan.subs, plan.slots, plan.g_pub, plan.direct_sum()));
}

TEST(SumProof, SumPlusOneFails) {
  Rng rng(15);
  RoundPlan plan({{3, 4}, {5, -6}, {7, 8}}, rng);
  auto sum = plan.direct_sum();
  sum[1] += 1;
  EXPECT_FALSE(vrf_sum_prf(plan.subs, plan.slots, plan.g_pub, sum));
}

TEST(SumProof, SubstitutedModelFailsS3) {
  Rng rng(16);
  RoundPlan plan({{3, 4}, {5, -6}}, rng);
  plan.subs[0].a_prime[1] += Scalar::one();
  EXPECT_FALSE(verify_submission_proofs(plan.subs[0], plan.slots, plan.g_pub));
  EXPECT_FALSE(vrf_sum_prf(plan.subs, plan.slots, plan.g_pub, plan.direct_sum()));
}

TEST(SumProof, WrongGeneratorOrSlotFails) {
  Rng rng(17);
  RoundPlan plan({{3, 4}}, rng);
  auto s = plan.subs[0];
  s.g[0] = derive_generator(1, 2, plan.slots[0]);
  EXPECT_FALSE(verify_submission_proofs(s, plan.slots, plan.g_pub));
  std::vector<uint32_t> shifted{plan.slots[0] + 1, plan.slots[1] + 1};
  EXPECT_FALSE(verify_submission_proofs(plan.subs[0], shifted, plan.g_pub));
  s = plan.subs[0];
  s.s3.pop_back();
  EXPECT_FALSE(verify_submission_proofs(s, plan.slots, plan.g_pub));
}

TEST(SumProof, ProductCheckSoundness) {
  Rng rng(18);
  RoundPlan plan({{3, 4, 9}, {5, -6, 1}, {7, 8, -2}}, rng);
  int rejected = 0;
  for (int t = 0; t < 100; ++t) {
    auto subs = plan.subs;
    auto sum = plan.direct_sum();
    const size_t j = rng.next_u64() % sum.size();
    if (t % 2 == 0) {
      sum[j] += 1 + static_cast<int64_t>(rng.next_u64() % 1000);
    } else {
      auto& C = subs[rng.next_u64() % subs.size()].C[j];
      C = C + G1::generator() * Scalar::random(rng);
    }
    rejected += !vrf_sum_prf(subs, plan.slots, plan.g_pub, sum);
  }
  EXPECT_EQ(rejected, 100);
}

TEST(Submission, SerializationRoundTrip) {
  Rng rng(19);
  RoundPlan plan({{3, -4}}, rng);
  const auto bytes = serialize(plan.subs[0]);
  const auto back = deserialize_submission(bytes);
  EXPECT_EQ(serialize(back), bytes);
  EXPECT_EQ(back.a_prime, plan.subs[0].a_prime);
  auto truncated = bytes;
  truncated.pop_back();
  EXPECT_ANY_THROW(deserialize_submission(truncated));
  auto bad_magic = bytes;
  bad_magic[0] ^= 1;
  EXPECT_ANY_THROW(deserialize_submission(bad_magic));
}

TEST(Submission, NoisedStatementHidesPlaintext) {
  Rng rng(20);
  RoundPlan plan({{42, -42}}, rng);
  for (size_t j = 0; j < 2; ++j) {
    EXPECT_EQ(plan.subs[0].a_prime[j], Scalar::from_i64(plan.values[0][j]) + plan.noise[0][j]);
    EXPECT_FALSE(plan.subs[0].a_prime[j] == Scalar::from_i64(plan.values[0][j]));
  }
}

TEST(Privacy, NonOwnerViewsNeverContainPlaintext) {
  Rng rng(21);
  ViewLog log;
  std::vector<std::vector<int64_t>> v(4, std::vector<int64_t>(3));
  for (auto& row : v) {
    for (auto& x : row) x = rand_signed(rng, 1'000'000'000'000);
  }
  RoundPlan plan(v, rng, test_keys(), 1'000'000'000'000, &log);
  ledger::Ledger l;
  const auto addr = run_submissions(l, plan);
  aggregate(l, addr, plan.keys, 100, &log);

  // Everything on the ledger is public.
  std::vector<uint8_t> public_bytes;
  for (const auto& r : l.records()) public_bytes.insert(public_bytes.end(), r.begin(), r.end());

  for (size_t i = 0; i < v.size(); ++i) {
    for (size_t j = 0; j < v[i].size(); ++j) {
      codec::Writer as_i64, as_scalar, as_nat;
      as_i64.i64(v[i][j]);
      as_scalar.scalar(Scalar::from_i64(v[i][j]));
      paillier::write_nat(as_nat, paillier::encode_signed(plan.keys.pk, BigNat(static_cast<long>(v[i][j]))));
      for (const auto* needle : {&as_i64.bytes(), &as_scalar.bytes(), &as_nat.bytes()}) {
        EXPECT_FALSE(contains(public_bytes, *needle));
        for (const auto& e : log.entries()) EXPECT_FALSE(contains(e.bytes, *needle)) << e.viewer << " " << e.label;
      }
    }
  }

  // Trainer i only ever holds s_i and s_{i-1}.
  for (uint32_t i = 1; i <= 4; ++i) {
    const auto view = log.view_of(trainer_name(i));
    EXPECT_EQ(view.size(), 6u);
    for (const auto& e : view) {
      const uint32_t prev = i == 1 ? 4 : i - 1;
      const bool own = e.label.starts_with("mask s_" + std::to_string(i) + "[");
      const bool pred = e.label.starts_with("mask s_" + std::to_string(prev) + "[");
      EXPECT_TRUE(own || pred) << e.label;
    }
  }
  // The publisher sees folded ciphertexts and sums only.
  for (const auto& e : log.view_of(kPublisher)) {
    EXPECT_TRUE(e.label.starts_with("folded ciphertext[") || e.label.starts_with("sum[")) << e.label;
  }
}

}  // namespace
}  // namespace pzkpfl::aggregation
