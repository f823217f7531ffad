// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

// In-process contract ledger. One sequencer orders transactions; every
// accepted transaction is appended to a hash-chained log that can be
// replayed from genesis.

#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pzkpfl/aggregation.hpp"
#include "pzkpfl/paillier.hpp"

namespace pzkpfl::ledger {

using Hash = std::array<uint8_t, 32>;

enum class TxKind : uint8_t { kDeploy = 1, kSubmit = 2, kPublishSum = 3 };

struct Transaction {
  uint64_t seq = 0;
  std::string sender;
  TxKind kind = TxKind::kDeploy;
  std::string address;  // empty for kDeploy
  std::vector<uint8_t> payload;
  Hash payload_hash{};
};

Transaction make_tx(uint64_t seq, std::string sender, TxKind kind, std::string address,
                    std::vector<uint8_t> payload);

std::vector<uint8_t> serialize(const Transaction& tx);
Transaction deserialize_tx(std::span<const uint8_t> bytes);

// Rejected transactions leave the state and the log untouched.
class TxError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RoundParams {
  uint64_t round = 0;
  uint32_t trainers = 0;
  std::vector<uint32_t> slots;  // aggregated statement positions, 1-based
  paillier::PublicKey pk;
  aggregation::G1 g_pub;
  int64_t max_abs = 0;  // capacity bound per plaintext value
};

std::vector<uint8_t> serialize(const RoundParams& p);
RoundParams deserialize_round_params(std::span<const uint8_t> bytes);

struct RoundState {
  RoundParams params;
  std::set<uint32_t> received;
  std::vector<paillier::Ciphertext> cipher_sum;
  std::vector<aggregation::G1> commit_sum;
  std::vector<std::vector<aggregation::Scalar>> a_prime;  // per trainer, by id - 1
  std::optional<std::vector<int64_t>> published_sum;
  std::optional<std::vector<int64_t>> published_mean;

  bool complete() const { return received.size() == params.trainers; }
};

struct Receipt {
  uint64_t seq = 0;
  std::string address;
  std::string event;
};

class Ledger {
 public:
  Ledger() = default;
  Ledger(Ledger&& other) noexcept;
  Ledger& operator=(Ledger&&) = delete;

  Receipt deploy(const Transaction& tx);
  Receipt invoke(const Transaction& tx);
  // Dispatches on tx.kind.
  Receipt apply(const Transaction& tx);

  const RoundState& contract(const std::string& address) const;
  bool has_contract(const std::string& address) const;

  uint64_t last_seq() const;
  Hash head() const;
  // Hash of the log head together with every contract's state.
  Hash state_hash() const;
  std::vector<std::vector<uint8_t>> records() const;

  std::vector<uint8_t> serialize_log() const;
  static Ledger replay(std::span<const uint8_t> log_bytes);

 private:
  Receipt apply_locked(const Transaction& tx);
  Receipt do_deploy(const Transaction& tx);
  Receipt do_submit(const Transaction& tx);
  Receipt do_publish(const Transaction& tx);
  void append(const Transaction& tx);

  mutable std::mutex mu_;
  std::map<std::string, RoundState> contracts_;
  std::vector<std::vector<uint8_t>> records_;
  Hash head_{};
  uint64_t last_seq_ = 0;
};

// Collects transactions from concurrent senders and applies them in
// sequence-number order.
class Sequencer {
 public:
  void enqueue(Transaction tx);
  // Applies queued transactions in seq order; rejected ones are returned
  // with their error message.
  std::vector<std::pair<Transaction, std::string>> flush(Ledger& ledger);
  size_t pending() const;

 private:
  mutable std::mutex mu_;
  std::vector<Transaction> queue_;
};

// Replays log_bytes from genesis and compares the state hash.
bool audit(std::span<const uint8_t> log_bytes, const Hash& published_state_hash);

void write_log(const std::filesystem::path& dir, const Ledger& ledger);  // ledger.log + ledger.head
bool audit_dir(const std::filesystem::path& dir);

}  // namespace pzkpfl::ledger
