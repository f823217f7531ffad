// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pzkpfl/aggregation.hpp"

#include <limits>
#include <stdexcept>

#include "pzkpfl/codec.hpp"
#include "pzkpfl/ledger.hpp"
#include "pzkpfl/parallel.hpp"

namespace pzkpfl::aggregation {
namespace {

constexpr uint32_t kSubmissionVersion = 1;

std::vector<uint8_t> nat_bytes(const BigNat& v) {
  codec::Writer w;
  paillier::write_nat(w, v);
  return w.take();
}

}  // namespace

void ViewLog::record(std::string viewer, std::string label, std::vector<uint8_t> bytes) {
  std::lock_guard lock(mu_);
  entries_.push_back({std::move(viewer), std::move(label), std::move(bytes)});
}

std::vector<ViewLog::Entry> ViewLog::entries() const {
  std::lock_guard lock(mu_);
  return entries_;
}

std::vector<ViewLog::Entry> ViewLog::view_of(const std::string& viewer) const {
  std::lock_guard lock(mu_);
  std::vector<Entry> out;
  for (const auto& e : entries_) {
    if (e.viewer == viewer) out.push_back(e);
  }
  return out;
}

std::string trainer_name(uint32_t trainer) { return "trainer:" + std::to_string(trainer); }

std::vector<BigNat> mask_delta(std::span<const BigNat> own, std::span<const BigNat> prev, const BigNat& n) {
  if (own.size() != prev.size()) throw std::invalid_argument("mask length mismatch");
  std::vector<BigNat> out(own.size());
  for (size_t j = 0; j < own.size(); ++j) {
    BigNat d = own[j] - prev[j];
    mpz_mod(d.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    out[j] = d;
  }
  return out;
}

std::vector<BigNat> MaskMatrix::delta(uint32_t trainer, const BigNat& n) const {
  const size_t k = trainers();
  if (trainer < 1 || trainer > k) throw std::out_of_range("trainer id out of range");
  return mask_delta(s[trainer - 1], s[(trainer + k - 2) % k], n);
}

std::vector<BigNat> draw_masks(uint32_t trainer, size_t slots, const paillier::PublicKey& pk, const Rng& rng) {
  Rng own = rng.fork("mask", trainer);
  std::vector<BigNat> out;
  out.reserve(slots);
  for (size_t j = 0; j < slots; ++j) out.push_back(paillier::random_below(pk.n, own));
  return out;
}

MaskMatrix exchange_masks(size_t trainers, size_t slots, const paillier::PublicKey& pk, Rng& rng,
                          ViewLog* log) {
  if (trainers == 0) throw std::invalid_argument("no trainers");
  MaskMatrix m;
  m.s.resize(trainers);
  for (size_t i = 0; i < trainers; ++i) {
    m.s[i] = draw_masks(static_cast<uint32_t>(i + 1), slots, pk, rng);
    if (log) {
      // Trainer i keeps s_i and hands it to its ring successor.
      const auto self = trainer_name(static_cast<uint32_t>(i + 1));
      const auto next = trainer_name(static_cast<uint32_t>((i + 1) % trainers + 1));
      for (size_t j = 0; j < slots; ++j) {
        const auto b = nat_bytes(m.s[i][j]);
        const auto label = "mask s_" + std::to_string(i + 1) + "[" + std::to_string(j) + "]";
        log->record(self, label, b);
        if (next != self) log->record(next, label, b);
      }
    }
  }
  return m;
}

G1 derive_g_pub(uint64_t round, std::span<const uint8_t> nonce) {
  codec::Writer w;
  w.u64(round);
  w.blob(nonce);
  return G1::hash_to(w.bytes(), "PZKPFL-GPUB-V1");
}

G1 derive_generator(uint64_t round, uint32_t trainer, uint32_t slot) {
  codec::Writer w;
  w.u64(round);
  w.u32(trainer);
  w.u32(slot);
  return G1::hash_to(w.bytes(), "PZKPFL-GIJ-V1");
}

SumProof gen_sum_prf(uint64_t round, uint32_t trainer, std::span<const uint32_t> slots,
                     std::span<const int64_t> a, std::span<const Scalar> t, const G1& g_pub, Rng& rng) {
  if (slots.size() != a.size() || slots.size() != t.size()) throw std::invalid_argument("slot length mismatch");
  SumProof out;
  for (size_t j = 0; j < slots.size(); ++j) {
    const G1 g = derive_generator(round, trainer, slots[j]);
    const Scalar c = Scalar::from_i64(a[j]);
    const G1 C1 = g_pub * c;
    const G1 C2 = g * (c + t[j]);
    out.s3.push_back(sigma::prove_s3(g_pub, g, c, t[j], C1, C2, rng));
    out.g.push_back(g);
    out.C.push_back(C1);
  }
  return out;
}

std::vector<uint8_t> serialize(const Submission& s) {
  codec::Writer w;
  codec::write_header(w, "SUBM", kSubmissionVersion);
  w.u64(s.round);
  w.u32(s.trainer);
  w.u64(s.c.size());
  for (const auto& c : s.c) paillier::write_nat(w, c.c);
  w.u64(s.s3.size());
  for (const auto& p : s.s3) sigma::write(w, p);
  w.u64(s.g.size());
  for (const auto& g : s.g) w.g1(g);
  w.u64(s.C.size());
  for (const auto& g : s.C) w.g1(g);
  w.u64(s.a_prime.size());
  for (const auto& v : s.a_prime) w.scalar(v);
  return w.take();
}

Submission deserialize_submission(std::span<const uint8_t> bytes) {
  constexpr size_t kMax = 1u << 20;
  codec::Reader r(bytes);
  codec::read_header(r, "SUBM", kSubmissionVersion);
  Submission s;
  s.round = r.u64();
  s.trainer = r.u32();
  s.c.resize(r.count(kMax));
  for (auto& c : s.c) c.c = paillier::read_nat(r);
  s.s3.resize(r.count(kMax));
  for (auto& p : s.s3) p = sigma::read_s3(r);
  s.g.resize(r.count(kMax));
  for (auto& g : s.g) g = r.g1();
  s.C.resize(r.count(kMax));
  for (auto& g : s.C) g = r.g1();
  s.a_prime.resize(r.count(kMax));
  for (auto& v : s.a_prime) v = r.scalar();
  r.expect_done();
  return s;
}

Submission submit(const SubmitInput& in, const MaskMatrix& masks, const paillier::PublicKey& pk,
                  const G1& g_pub, Rng& rng) {
  return submit(in, masks.delta(in.trainer, pk.n), pk, g_pub, rng);
}

Submission submit(const SubmitInput& in, std::span<const BigNat> delta, const paillier::PublicKey& pk,
                  const G1& g_pub, Rng& rng) {
  const size_t k = in.slots.size();
  if (in.a.size() != k || in.t.size() != k) throw std::invalid_argument("slot length mismatch");
  if (delta.size() != k) throw std::invalid_argument("mask length mismatch");
  Submission s;
  s.round = in.round;
  s.trainer = in.trainer;
  for (size_t j = 0; j < k; ++j) {
    BigNat m = paillier::encode_signed(pk, BigNat(static_cast<long>(in.a[j]))) + delta[j];
    mpz_mod(m.get_mpz_t(), m.get_mpz_t(), pk.n.get_mpz_t());
    s.c.push_back(paillier::encrypt(pk, m, rng));
    s.a_prime.push_back(Scalar::from_i64(in.a[j]) + in.t[j]);
  }
  auto prf = gen_sum_prf(in.round, in.trainer, in.slots, in.a, in.t, g_pub, rng);
  s.g = std::move(prf.g);
  s.C = std::move(prf.C);
  s.s3 = std::move(prf.s3);
  return s;
}

bool verify_submission_proofs(const Submission& s, std::span<const uint32_t> slots, const G1& g_pub) {
  const size_t k = slots.size();
  if (s.g.size() != k || s.C.size() != k || s.s3.size() != k || s.a_prime.size() != k) return false;
  for (size_t j = 0; j < k; ++j) {
    if (!(s.g[j] == derive_generator(s.round, s.trainer, slots[j]))) return false;
    if (!sigma::verify_s3(g_pub, s.g[j], s.C[j], s.g[j] * s.a_prime[j], s.s3[j])) return false;
  }
  return true;
}

int64_t round_div(int64_t sum, uint64_t n) {
  if (n == 0) throw std::invalid_argument("division by zero participants");
  const unsigned __int128 mag = sum < 0 ? static_cast<unsigned __int128>(-(static_cast<__int128>(sum)))
                                        : static_cast<unsigned __int128>(sum);
  const unsigned __int128 q = (2 * mag + n) / (2 * static_cast<unsigned __int128>(n));
  return sum < 0 ? -static_cast<int64_t>(q) : static_cast<int64_t>(q);
}

GlobalModel make_global(std::vector<int64_t> sum, uint64_t count) {
  GlobalModel g;
  g.count = count;
  for (auto v : sum) {
    const int64_t m = round_div(v, count);
    g.mean.push_back(m);
    g.remainder.push_back(static_cast<int64_t>(static_cast<__int128>(v) - static_cast<__int128>(m) * count));
  }
  g.sum = std::move(sum);
  return g;
}

bool vrf_sum_prf(std::span<const Submission> subs, std::span<const uint32_t> slots, const G1& g_pub,
                 std::span<const int64_t> sum) {
  if (sum.size() != slots.size()) return false;
  std::vector<char> ok(subs.size(), 0);
  parallel_for(subs.size(), [&](size_t i) { ok[i] = verify_submission_proofs(subs[i], slots, g_pub); });
  std::vector<G1> acc(slots.size(), G1::identity());
  for (size_t i = 0; i < subs.size(); ++i) {
    if (!ok[i]) return false;
    for (size_t j = 0; j < slots.size(); ++j) acc[j] = acc[j] + subs[i].C[j];
  }
  for (size_t j = 0; j < slots.size(); ++j) {
    if (!(acc[j] == g_pub * Scalar::from_i64(sum[j]))) return false;
  }
  return true;
}

GlobalModel aggregate(ledger::Ledger& ledger, const std::string& address, const paillier::KeyPair& keys,
                      uint64_t seq, ViewLog* log) {
  const auto& st = ledger.contract(address);
  if (!st.complete()) throw std::runtime_error("incomplete round");
  if (st.published_sum) throw std::runtime_error("round already published");
  const auto& p = st.params;
  std::vector<int64_t> sum;
  codec::Writer w;
  w.u64(p.slots.size());
  for (size_t j = 0; j < p.slots.size(); ++j) {
    if (log) log->record(kPublisher, "folded ciphertext[" + std::to_string(j) + "]", nat_bytes(st.cipher_sum[j].c));
    const BigNat m = paillier::decrypt(keys.sk, keys.pk, st.cipher_sum[j]);
    const BigNat v = paillier::decode_signed(keys.pk, m);
    if (!v.fits_slong_p()) throw std::overflow_error("aggregated value exceeds int64");
    const int64_t x = v.get_si();
    if (log) log->record(kPublisher, "sum[" + std::to_string(j) + "]", nat_bytes(m));
    if (!(st.commit_sum[j] == p.g_pub * Scalar::from_i64(x))) {
      throw std::runtime_error("sum fails the commitment check: ciphertext tampering or plaintext wrap");
    }
    sum.push_back(x);
    w.i64(x);
    w.i64(round_div(x, p.trainers));
  }
  ledger.invoke(ledger::make_tx(seq, kPublisher, ledger::TxKind::kPublishSum, address, w.take()));
  return make_global(std::move(sum), p.trainers);
}

}  // namespace pzkpfl::aggregation
