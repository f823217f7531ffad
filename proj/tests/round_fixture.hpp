// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

// Shared helpers for tests that drive a full secure-sum round on a ledger.

#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "pzkpfl/aggregation.hpp"
#include "pzkpfl/ledger.hpp"

namespace pzkpfl::testing {

using aggregation::G1;
using aggregation::Scalar;
using aggregation::Submission;

inline const paillier::KeyPair& test_keys() {
  static const paillier::KeyPair k = [] {
    algebra::Rng rng(77);
    return paillier::keygen(paillier::modulus_bits(paillier::Profile::kTest), rng);
  }();
  return k;
}

inline std::vector<uint32_t> iota_slots(size_t l, uint32_t first = 1) {
  std::vector<uint32_t> s(l);
  std::iota(s.begin(), s.end(), first);
  return s;
}

// Builds the deploy transaction and the per-trainer submissions for values[i][j].
struct RoundPlan {
  uint64_t round = 1;
  std::vector<uint32_t> slots;
  G1 g_pub;
  paillier::KeyPair keys;
  aggregation::MaskMatrix masks;
  std::vector<std::vector<int64_t>> values;
  std::vector<std::vector<Scalar>> noise;
  std::vector<Submission> subs;
  ledger::Transaction deploy_tx;

  RoundPlan(std::vector<std::vector<int64_t>> v, algebra::Rng& rng, const paillier::KeyPair& k = test_keys(),
            int64_t max_abs = 1'000'000'000'000, aggregation::ViewLog* log = nullptr)
      : keys(k), values(std::move(v)) {
    const size_t n = values.size();
    const size_t l = n ? values[0].size() : 1;
    slots = iota_slots(l, 3);
    const std::vector<uint8_t> nonce{1, 2, 3};
    g_pub = aggregation::derive_g_pub(round, nonce);
    ledger::RoundParams p;
    p.round = round;
    p.trainers = static_cast<uint32_t>(n);
    p.slots = slots;
    p.pk = keys.pk;
    p.g_pub = g_pub;
    p.max_abs = max_abs;
    deploy_tx = ledger::make_tx(1, "owner", ledger::TxKind::kDeploy, "", ledger::serialize(p));
    if (n == 0) return;
    masks = aggregation::exchange_masks(n, l, keys.pk, rng, log);
    for (size_t i = 0; i < n; ++i) {
      aggregation::SubmitInput in;
      in.round = round;
      in.trainer = static_cast<uint32_t>(i + 1);
      in.slots = slots;
      in.a = values[i];
      for (size_t j = 0; j < l; ++j) in.t.push_back(Scalar::random(rng));
      noise.push_back(in.t);
      subs.push_back(aggregation::submit(in, masks, keys.pk, g_pub, rng));
    }
  }

  ledger::Transaction submit_tx(size_t i, uint64_t seq, const std::string& address) const {
    return ledger::make_tx(seq, aggregation::trainer_name(subs[i].trainer), ledger::TxKind::kSubmit, address,
                           aggregation::serialize(subs[i]));
  }

  std::vector<int64_t> direct_sum() const {
    std::vector<int64_t> s(slots.size(), 0);
    for (const auto& v : values) {
      for (size_t j = 0; j < v.size(); ++j) s[j] += v[j];
    }
    return s;
  }
};

// Deploys and submits every trainer in order; returns the contract address.
inline std::string run_submissions(ledger::Ledger& l, const RoundPlan& plan) {
  const auto addr = l.deploy(plan.deploy_tx).address;
  for (size_t i = 0; i < plan.subs.size(); ++i) l.invoke(plan.submit_tx(i, 2 + i, addr));
  return addr;
}

}  // namespace pzkpfl::testing
