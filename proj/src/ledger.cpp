// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pzkpfl/ledger.hpp"

#include <algorithm>

#include "pzkpfl/codec.hpp"

namespace pzkpfl::ledger {
namespace {

constexpr uint32_t kLogVersion = 1;
constexpr uint32_t kParamsVersion = 1;

Hash hash_bytes(std::span<const uint8_t> b) { return algebra::sha256(b); }

std::string hex_prefix(const Hash& h, size_t bytes) {
  return codec::to_hex(std::span<const uint8_t>(h.data(), bytes));
}

// PublishSum payload: per slot (sum, mean).
std::vector<uint8_t> encode_result(std::span<const int64_t> sum, std::span<const int64_t> mean) {
  codec::Writer w;
  w.u64(sum.size());
  for (size_t j = 0; j < sum.size(); ++j) {
    w.i64(sum[j]);
    w.i64(mean[j]);
  }
  return w.take();
}

void decode_result(std::span<const uint8_t> bytes, std::vector<int64_t>& sum, std::vector<int64_t>& mean) {
  codec::Reader r(bytes);
  const size_t k = r.count(1u << 20);
  sum.resize(k);
  mean.resize(k);
  for (size_t j = 0; j < k; ++j) {
    sum[j] = r.i64();
    mean[j] = r.i64();
  }
  r.expect_done();
}

}  // namespace

Transaction make_tx(uint64_t seq, std::string sender, TxKind kind, std::string address,
                    std::vector<uint8_t> payload) {
  Transaction tx;
  tx.seq = seq;
  tx.sender = std::move(sender);
  tx.kind = kind;
  tx.address = std::move(address);
  tx.payload = std::move(payload);
  tx.payload_hash = hash_bytes(tx.payload);
  return tx;
}

std::vector<uint8_t> serialize(const Transaction& tx) {
  codec::Writer w;
  w.u64(tx.seq);
  w.str(tx.sender);
  w.u8(static_cast<uint8_t>(tx.kind));
  w.str(tx.address);
  w.blob(tx.payload);
  w.raw(tx.payload_hash);
  return w.take();
}

Transaction deserialize_tx(std::span<const uint8_t> bytes) {
  codec::Reader r(bytes);
  Transaction tx;
  tx.seq = r.u64();
  tx.sender = r.str();
  const uint8_t kind = r.u8();
  if (kind < 1 || kind > 3) throw std::runtime_error("unknown transaction kind");
  tx.kind = static_cast<TxKind>(kind);
  tx.address = r.str();
  tx.payload = r.blob();
  const auto h = r.raw(32);
  std::copy(h.begin(), h.end(), tx.payload_hash.begin());
  r.expect_done();
  return tx;
}

std::vector<uint8_t> serialize(const RoundParams& p) {
  codec::Writer w;
  codec::write_header(w, "RNDP", kParamsVersion);
  w.u64(p.round);
  w.u32(p.trainers);
  w.u64(p.slots.size());
  for (auto s : p.slots) w.u32(s);
  paillier::write_nat(w, p.pk.n);
  paillier::write_nat(w, p.pk.g);
  w.g1(p.g_pub);
  w.i64(p.max_abs);
  return w.take();
}

RoundParams deserialize_round_params(std::span<const uint8_t> bytes) {
  codec::Reader r(bytes);
  codec::read_header(r, "RNDP", kParamsVersion);
  RoundParams p;
  p.round = r.u64();
  p.trainers = r.u32();
  p.slots.resize(r.count(1u << 20));
  for (auto& s : p.slots) s = r.u32();
  p.pk.n = paillier::read_nat(r);
  p.pk.g = paillier::read_nat(r);
  p.pk.n2 = p.pk.n * p.pk.n;
  p.g_pub = r.g1();
  p.max_abs = r.i64();
  r.expect_done();
  return p;
}

// ------------------------------------------------------------ Ledger

Ledger::Ledger(Ledger&& other) noexcept {
  std::lock_guard lock(other.mu_);
  contracts_ = std::move(other.contracts_);
  records_ = std::move(other.records_);
  head_ = other.head_;
  last_seq_ = other.last_seq_;
}

Receipt Ledger::deploy(const Transaction& tx) {
  if (tx.kind != TxKind::kDeploy) throw TxError("not a deployment");
  return apply(tx);
}

Receipt Ledger::invoke(const Transaction& tx) {
  if (tx.kind == TxKind::kDeploy) throw TxError("use deploy for deployments");
  return apply(tx);
}

Receipt Ledger::apply(const Transaction& tx) {
  std::lock_guard lock(mu_);
  return apply_locked(tx);
}

Receipt Ledger::apply_locked(const Transaction& tx) {
  if (tx.seq <= last_seq_) throw TxError("sequence number not increasing");
  if (hash_bytes(tx.payload) != tx.payload_hash) throw TxError("payload hash mismatch");
  Receipt rc;
  switch (tx.kind) {
    case TxKind::kDeploy: rc = do_deploy(tx); break;
    case TxKind::kSubmit: rc = do_submit(tx); break;
    case TxKind::kPublishSum: rc = do_publish(tx); break;
    default: throw TxError("unknown transaction kind");
  }
  append(tx);
  rc.seq = tx.seq;
  return rc;
}

void Ledger::append(const Transaction& tx) {
  auto rec = serialize(tx);
  std::vector<uint8_t> buf(head_.begin(), head_.end());
  buf.insert(buf.end(), rec.begin(), rec.end());
  head_ = hash_bytes(buf);
  records_.push_back(std::move(rec));
  last_seq_ = tx.seq;
}

Receipt Ledger::do_deploy(const Transaction& tx) {
  RoundParams p;
  try {
    p = deserialize_round_params(tx.payload);
  } catch (const std::exception& e) {
    throw TxError(std::string("bad deployment parameters: ") + e.what());
  }
  if (p.trainers == 0) throw TxError("a round needs at least one trainer");
  if (p.slots.empty()) throw TxError("a round needs at least one slot");
  if (p.pk.n < 3) throw TxError("invalid Paillier modulus");
  try {
    paillier::check_capacity(p.pk, p.trainers, paillier::BigNat(static_cast<long>(p.max_abs)));
  } catch (const std::overflow_error& e) {
    throw TxError(e.what());
  }
  codec::Writer w;
  w.str("pzkpfl.contract");
  w.str(tx.sender);
  w.u64(tx.seq);
  w.raw(tx.payload_hash);
  const std::string address = "0x" + hex_prefix(hash_bytes(w.bytes()), 20);
  if (contracts_.count(address)) throw TxError("duplicate contract address");
  RoundState st;
  st.cipher_sum.assign(p.slots.size(), paillier::zero());
  st.commit_sum.assign(p.slots.size(), aggregation::G1::identity());
  st.a_prime.resize(p.trainers);
  st.params = std::move(p);
  contracts_.emplace(address, std::move(st));
  return {0, address, "deployed"};
}

Receipt Ledger::do_submit(const Transaction& tx) {
  const auto it = contracts_.find(tx.address);
  if (it == contracts_.end()) throw TxError("unknown contract address");
  RoundState& st = it->second;
  if (st.published_sum || st.complete()) throw TxError("round already closed");
  aggregation::Submission sub;
  try {
    sub = aggregation::deserialize_submission(tx.payload);
  } catch (const std::exception& e) {
    throw TxError(std::string("malformed submission: ") + e.what());
  }
  const auto& p = st.params;
  if (sub.round != p.round) throw TxError("submission for another round");
  if (sub.trainer < 1 || sub.trainer > p.trainers) throw TxError("unknown trainer");
  if (tx.sender != aggregation::trainer_name(sub.trainer)) throw TxError("sender does not match trainer");
  if (st.received.count(sub.trainer)) throw TxError("duplicate submission");
  const size_t k = p.slots.size();
  if (sub.c.size() != k) throw TxError("wrong ciphertext count");
  for (const auto& c : sub.c) {
    if (c.c <= 0 || c.c >= p.pk.n2 || gcd(c.c, p.pk.n) != 1) throw TxError("ciphertext outside Z*_{n^2}");
  }
  if (!aggregation::verify_submission_proofs(sub, p.slots, p.g_pub)) throw TxError("s3 linkage proof rejected");
  for (size_t j = 0; j < k; ++j) {
    st.cipher_sum[j] = paillier::add(p.pk, st.cipher_sum[j], sub.c[j]);
    st.commit_sum[j] = st.commit_sum[j] + sub.C[j];
  }
  st.a_prime[sub.trainer - 1] = sub.a_prime;
  st.received.insert(sub.trainer);
  std::string ev = "submission " + std::to_string(st.received.size()) + "/" + std::to_string(p.trainers);
  if (st.complete()) ev += "; round complete, aggregation ready";
  return {0, tx.address, ev};
}

Receipt Ledger::do_publish(const Transaction& tx) {
  const auto it = contracts_.find(tx.address);
  if (it == contracts_.end()) throw TxError("unknown contract address");
  RoundState& st = it->second;
  if (tx.sender != aggregation::kPublisher) throw TxError("only the publisher posts the sum");
  if (st.published_sum) throw TxError("round already closed");
  if (!st.complete()) throw TxError("round incomplete");
  std::vector<int64_t> sum, mean;
  try {
    decode_result(tx.payload, sum, mean);
  } catch (const std::exception& e) {
    throw TxError(std::string("malformed sum: ") + e.what());
  }
  if (sum.size() != st.params.slots.size()) throw TxError("wrong slot count in sum");
  for (size_t j = 0; j < sum.size(); ++j) {
    if (!(st.commit_sum[j] == st.params.g_pub * algebra::Scalar::from_i64(sum[j]))) {
      throw TxError("sum does not match the commitment product at slot " + std::to_string(j));
    }
    if (mean[j] != aggregation::round_div(sum[j], st.params.trainers)) throw TxError("mean does not follow the sum");
  }
  st.published_sum = std::move(sum);
  st.published_mean = std::move(mean);
  return {0, tx.address, "sum published"};
}

const RoundState& Ledger::contract(const std::string& address) const {
  std::lock_guard lock(mu_);
  const auto it = contracts_.find(address);
  if (it == contracts_.end()) throw std::out_of_range("unknown contract address");
  return it->second;
}

bool Ledger::has_contract(const std::string& address) const {
  std::lock_guard lock(mu_);
  return contracts_.count(address) > 0;
}

uint64_t Ledger::last_seq() const {
  std::lock_guard lock(mu_);
  return last_seq_;
}

Hash Ledger::head() const {
  std::lock_guard lock(mu_);
  return head_;
}

Hash Ledger::state_hash() const {
  std::lock_guard lock(mu_);
  codec::Writer w;
  w.raw(head_);
  w.u64(contracts_.size());
  for (const auto& [addr, st] : contracts_) {
    w.str(addr);
    w.blob(serialize(st.params));
    w.u64(st.received.size());
    for (auto t : st.received) w.u32(t);
    for (const auto& c : st.cipher_sum) paillier::write_nat(w, c.c);
    for (const auto& g : st.commit_sum) w.g1(g);
    for (const auto& v : st.a_prime) {
      w.u64(v.size());
      for (const auto& s : v) w.scalar(s);
    }
    w.u8(st.published_sum ? 1 : 0);
    if (st.published_sum) w.blob(encode_result(*st.published_sum, *st.published_mean));
  }
  return hash_bytes(w.bytes());
}

std::vector<std::vector<uint8_t>> Ledger::records() const {
  std::lock_guard lock(mu_);
  return records_;
}

std::vector<uint8_t> Ledger::serialize_log() const {
  std::lock_guard lock(mu_);
  codec::Writer w;
  codec::write_header(w, "LDGR", kLogVersion);
  w.u64(records_.size());
  for (const auto& r : records_) w.blob(r);
  return w.take();
}

Ledger Ledger::replay(std::span<const uint8_t> log_bytes) {
  codec::Reader r(log_bytes);
  codec::read_header(r, "LDGR", kLogVersion);
  const size_t n = r.count(1u << 24);
  Ledger l;
  for (size_t i = 0; i < n; ++i) {
    const auto rec = r.blob();
    const Transaction tx = deserialize_tx(rec);
    if (serialize(tx) != rec) throw std::runtime_error("non-canonical log record");
    try {
      l.apply(tx);
    } catch (const TxError& e) {
      throw std::runtime_error("log record " + std::to_string(i) + " rejected on replay: " + e.what());
    }
  }
  r.expect_done();
  return l;
}

// ------------------------------------------------------------ Sequencer

void Sequencer::enqueue(Transaction tx) {
  std::lock_guard lock(mu_);
  queue_.push_back(std::move(tx));
}

size_t Sequencer::pending() const {
  std::lock_guard lock(mu_);
  return queue_.size();
}

std::vector<std::pair<Transaction, std::string>> Sequencer::flush(Ledger& ledger) {
  std::vector<Transaction> batch;
  {
    std::lock_guard lock(mu_);
    batch.swap(queue_);
  }
  std::stable_sort(batch.begin(), batch.end(),
                   [](const Transaction& a, const Transaction& b) { return a.seq < b.seq; });
  std::vector<std::pair<Transaction, std::string>> rejected;
  for (auto& tx : batch) {
    try {
      ledger.apply(tx);
    } catch (const TxError& e) {
      rejected.emplace_back(std::move(tx), e.what());
    }
  }
  return rejected;
}

// ------------------------------------------------------------ audit

bool audit(std::span<const uint8_t> log_bytes, const Hash& published_state_hash) {
  try {
    return Ledger::replay(log_bytes).state_hash() == published_state_hash;
  } catch (const std::exception&) {
    return false;
  }
}

void write_log(const std::filesystem::path& dir, const Ledger& ledger) {
  codec::write_file(dir / "ledger.log", ledger.serialize_log());
  const auto h = ledger.state_hash();
  const std::string hex = codec::to_hex(h) + "\n";
  codec::write_file(dir / "ledger.head", std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(hex.data()), hex.size()));
}

bool audit_dir(const std::filesystem::path& dir) {
  const auto log = codec::read_file(dir / "ledger.log");
  const auto head_text = codec::read_file(dir / "ledger.head");
  std::string hex(head_text.begin(), head_text.end());
  while (!hex.empty() && (hex.back() == '\n' || hex.back() == '\r' || hex.back() == ' ')) hex.pop_back();
  if (hex.size() != 64) return false;
  Hash h{};
  try {
    const auto bytes = codec::from_hex(hex);
    std::copy(bytes.begin(), bytes.end(), h.begin());
  } catch (const std::invalid_argument&) {
    return false;
  }
  return audit(log, h);
}

}  // namespace pzkpfl::ledger
