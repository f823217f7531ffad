// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pzkpfl/ledger.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <random>
#include <thread>

#include "pzkpfl/codec.hpp"
#include "round_fixture.hpp"

namespace pzkpfl::ledger {
namespace {

using algebra::Rng;
using testing::RoundPlan;
using testing::run_submissions;
using testing::test_keys;

const RoundPlan& plan3() {
  static const RoundPlan p = [] {
    Rng rng(500);
    return RoundPlan({{1, 10}, {2, 20}, {4, -40}}, rng);
  }();
  return p;
}

std::vector<uint8_t> result_payload(std::span<const int64_t> sum, uint32_t n) {
  codec::Writer w;
  w.u64(sum.size());
  for (auto s : sum) {
    w.i64(s);
    w.i64(aggregation::round_div(s, n));
  }
  return w.take();
}

// A full round: deploy, three submissions, published result.
std::vector<Transaction> full_round_txs() {
  const auto& p = plan3();
  Ledger probe;
  const auto addr = probe.deploy(p.deploy_tx).address;
  std::vector<Transaction> txs{p.deploy_tx};
  for (size_t i = 0; i < 3; ++i) txs.push_back(p.submit_tx(i, 2 + i, addr));
  txs.push_back(make_tx(5, aggregation::kPublisher, TxKind::kPublishSum, addr, result_payload(p.direct_sum(), 3)));
  return txs;
}

TEST(Transaction, HashAndEncodingRoundTrip) {
  const auto tx = make_tx(9, "alice", TxKind::kSubmit, "0xab", {1, 2, 3});
  EXPECT_EQ(tx.payload_hash, algebra::sha256(tx.payload));
  const auto bytes = serialize(tx);
  const auto back = deserialize_tx(bytes);
  EXPECT_EQ(serialize(back), bytes);
  EXPECT_EQ(back.sender, "alice");
  auto bad = bytes;
  bad.pop_back();
  EXPECT_ANY_THROW(deserialize_tx(bad));
}

TEST(RoundParams, EncodingRoundTrip) {
  Ledger l;
  const auto& st = l.contract(l.deploy(plan3().deploy_tx).address);
  EXPECT_EQ(serialize(deserialize_round_params(serialize(st.params))), serialize(st.params));
  EXPECT_EQ(st.params.pk, test_keys().pk);
}

TEST(Deploy, DistinctAddresses) {
  Ledger l;
  auto tx2 = plan3().deploy_tx;
  tx2.seq = 2;
  const auto a = l.deploy(plan3().deploy_tx).address;
  const auto b = l.deploy(tx2).address;
  EXPECT_NE(a, b);
  EXPECT_TRUE(l.has_contract(a));
  EXPECT_TRUE(l.has_contract(b));
}

TEST(Deploy, ZeroTrainersRejected) {
  Rng rng(1);
  RoundPlan empty({}, rng);
  Ledger l;
  EXPECT_THROW(l.deploy(empty.deploy_tx), TxError);
  EXPECT_EQ(l.records().size(), 0u);
}

TEST(Deploy, CapacityViolationRejected) {
  Rng rng(2);
  const auto small = paillier::keygen(24, rng);
  RoundPlan p({{1}, {2}}, rng, small, 1 << 22);
  Ledger l;
  EXPECT_THROW(l.deploy(p.deploy_tx), TxError);
}

TEST(Deploy, ReplayReproducesState) {
  Ledger l;
  l.deploy(plan3().deploy_tx);
  const auto replayed = Ledger::replay(l.serialize_log());
  EXPECT_EQ(replayed.state_hash(), l.state_hash());
  EXPECT_EQ(replayed.head(), l.head());
}

TEST(Invoke, UnknownAddressRejected) {
  Ledger l;
  l.deploy(plan3().deploy_tx);
  EXPECT_THROW(l.invoke(plan3().submit_tx(0, 2, "0xdead")), TxError);
}

TEST(Invoke, NthSubmissionTriggersAggregationEvent) {
  Ledger l;
  const auto addr = l.deploy(plan3().deploy_tx).address;
  EXPECT_EQ(l.invoke(plan3().submit_tx(0, 2, addr)).event.find("complete"), std::string::npos);
  EXPECT_EQ(l.invoke(plan3().submit_tx(1, 3, addr)).event.find("complete"), std::string::npos);
  const auto rc = l.invoke(plan3().submit_tx(2, 4, addr));
  EXPECT_NE(rc.event.find("aggregation ready"), std::string::npos);
  EXPECT_TRUE(l.contract(addr).complete());
}

TEST(Invoke, DuplicateSenderLeavesStateUnchanged) {
  Ledger l;
  const auto addr = l.deploy(plan3().deploy_tx).address;
  l.invoke(plan3().submit_tx(0, 2, addr));
  const auto before = l.state_hash();
  EXPECT_THROW(l.invoke(plan3().submit_tx(0, 3, addr)), TxError);
  EXPECT_EQ(l.state_hash(), before);
  EXPECT_EQ(l.records().size(), 2u);
  EXPECT_EQ(l.last_seq(), 2u);
}

TEST(Invoke, RejectionsLeaveStateUnchanged) {
  const auto& p = plan3();
  Ledger l;
  const auto addr = l.deploy(p.deploy_tx).address;
  const auto before = l.state_hash();

  auto wrong_sender = p.submit_tx(0, 2, addr);
  wrong_sender.sender = "trainer:2";
  EXPECT_THROW(l.invoke(wrong_sender), TxError);

  auto bad_hash = p.submit_tx(0, 2, addr);
  bad_hash.payload[bad_hash.payload.size() / 2] ^= 1;
  EXPECT_THROW(l.invoke(bad_hash), TxError);

  auto sub = p.subs[0];
  sub.a_prime[0] += algebra::Scalar::one();
  EXPECT_THROW(l.invoke(make_tx(2, "trainer:1", TxKind::kSubmit, addr, aggregation::serialize(sub))), TxError);

  sub = p.subs[0];
  sub.round = 2;
  EXPECT_THROW(l.invoke(make_tx(2, "trainer:1", TxKind::kSubmit, addr, aggregation::serialize(sub))), TxError);

  sub = p.subs[0];
  sub.c[0].c = 0;
  EXPECT_THROW(l.invoke(make_tx(2, "trainer:1", TxKind::kSubmit, addr, aggregation::serialize(sub))), TxError);

  EXPECT_THROW(l.invoke(make_tx(2, "trainer:1", TxKind::kSubmit, addr, {1, 2, 3})), TxError);
  EXPECT_THROW(l.invoke(p.submit_tx(0, 1, addr)), TxError);  // seq not increasing
  EXPECT_THROW(l.invoke(make_tx(5, aggregation::kPublisher, TxKind::kPublishSum, addr,
                                result_payload(p.direct_sum(), 3))),
               TxError);  // round incomplete
  EXPECT_THROW(l.invoke(p.deploy_tx), TxError);
  EXPECT_EQ(l.state_hash(), before);
}

TEST(Invoke, PublishChecksSumMeanAndClosesRound) {
  const auto& p = plan3();
  Ledger l;
  const auto addr = run_submissions(l, p);
  auto sum = p.direct_sum();
  sum[0] += 1;
  EXPECT_THROW(l.invoke(make_tx(10, aggregation::kPublisher, TxKind::kPublishSum, addr, result_payload(sum, 3))),
               TxError);
  codec::Writer bad_mean;
  bad_mean.u64(2);
  for (auto s : p.direct_sum()) {
    bad_mean.i64(s);
    bad_mean.i64(s);
  }
  EXPECT_THROW(l.invoke(make_tx(10, aggregation::kPublisher, TxKind::kPublishSum, addr, bad_mean.take())), TxError);
  EXPECT_THROW(l.invoke(make_tx(10, "trainer:1", TxKind::kPublishSum, addr, result_payload(p.direct_sum(), 3))),
               TxError);
  l.invoke(make_tx(10, aggregation::kPublisher, TxKind::kPublishSum, addr, result_payload(p.direct_sum(), 3)));
  EXPECT_EQ(*l.contract(addr).published_sum, p.direct_sum());
  EXPECT_THROW(l.invoke(make_tx(11, aggregation::kPublisher, TxKind::kPublishSum, addr,
                                result_payload(p.direct_sum(), 3))),
               TxError);
  EXPECT_THROW(l.invoke(p.submit_tx(0, 12, addr)), TxError);
}

TEST(Sequencer, InterleavingsGiveIdenticalState) {
  const auto txs = full_round_txs();
  Ledger ref;
  for (const auto& tx : txs) ref.apply(tx);
  std::mt19937 gen(3);
  for (int trial = 0; trial < 6; ++trial) {
    auto shuffled = txs;
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    Sequencer seq;
    std::vector<std::thread> senders;
    for (const auto& tx : shuffled) senders.emplace_back([&seq, tx] { seq.enqueue(tx); });
    for (auto& t : senders) t.join();
    EXPECT_EQ(seq.pending(), txs.size());
    Ledger l;
    EXPECT_TRUE(seq.flush(l).empty());
    EXPECT_EQ(l.state_hash(), ref.state_hash());
    EXPECT_EQ(seq.pending(), 0u);
  }
}

TEST(Sequencer, ReportsRejectedTransactions) {
  auto txs = full_round_txs();
  txs.push_back(plan3().submit_tx(0, 6, txs[1].address));
  Sequencer seq;
  for (auto& tx : txs) seq.enqueue(tx);
  Ledger l;
  const auto rejected = seq.flush(l);
  ASSERT_EQ(rejected.size(), 1u);
  EXPECT_EQ(rejected[0].first.seq, 6u);
}

TEST(Audit, UntamperedLogPasses) {
  Ledger l;
  for (const auto& tx : full_round_txs()) l.apply(tx);
  EXPECT_TRUE(audit(l.serialize_log(), l.state_hash()));
  Hash other = l.state_hash();
  other[0] ^= 1;
  EXPECT_FALSE(audit(l.serialize_log(), other));
}

TEST(Audit, AnyByteFlipFails) {
  Ledger l;
  for (const auto& tx : full_round_txs()) l.apply(tx);
  const auto log = l.serialize_log();
  const auto h = l.state_hash();
  Rng rng(4);
  for (int i = 0; i < 150; ++i) {
    auto bad = log;
    const size_t pos = rng.next_u64() % bad.size();
    bad[pos] ^= static_cast<uint8_t>(1 + rng.next_u64() % 255);
    EXPECT_FALSE(audit(bad, h)) << "position " << pos;
  }
}

TEST(Audit, ResultEditedPostHocFails) {
  const auto txs = full_round_txs();
  Ledger l;
  for (const auto& tx : txs) l.apply(tx);
  const auto h = l.state_hash();

  // Rebuild the log with a re-hashed, edited result record.
  auto sum = plan3().direct_sum();
  sum[1] -= 3;
  auto edited = txs;
  edited.back() = make_tx(5, aggregation::kPublisher, TxKind::kPublishSum, txs.back().address, result_payload(sum, 3));
  codec::Writer w;
  codec::write_header(w, "LDGR", 1);
  w.u64(edited.size());
  for (const auto& tx : edited) w.blob(serialize(tx));
  EXPECT_FALSE(audit(w.bytes(), h));

  // Dropping the result record replays cleanly but changes the state.
  auto shorter = l.records();
  shorter.pop_back();
  codec::Writer w2;
  codec::write_header(w2, "LDGR", 1);
  w2.u64(shorter.size());
  for (const auto& r : shorter) w2.blob(r);
  EXPECT_FALSE(audit(w2.bytes(), h));
  EXPECT_TRUE(audit(w2.bytes(), Ledger::replay(w2.bytes()).state_hash()));
}

TEST(Audit, DirectoryRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "pzkpfl_ledger_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  Ledger l;
  for (const auto& tx : full_round_txs()) l.apply(tx);
  write_log(dir, l);
  EXPECT_TRUE(audit_dir(dir));
  auto log = codec::read_file(dir / "ledger.log");
  log[log.size() - 5] ^= 0x10;
  codec::write_file(dir / "ledger.log", log);
  EXPECT_FALSE(audit_dir(dir));
  std::filesystem::remove_all(dir);
}

TEST(Log, AppendOnlyHashChain) {
  Ledger l;
  const auto txs = full_round_txs();
  std::vector<std::vector<uint8_t>> seen;
  Hash head{};
  for (const auto& tx : txs) {
    l.apply(tx);
    const auto recs = l.records();
    for (size_t i = 0; i < seen.size(); ++i) EXPECT_EQ(recs[i], seen[i]);
    seen = recs;
    std::vector<uint8_t> buf(head.begin(), head.end());
    buf.insert(buf.end(), recs.back().begin(), recs.back().end());
    head = algebra::sha256(buf);
    EXPECT_EQ(l.head(), head);
  }
}

}  // namespace
}  // namespace pzkpfl::ledger
