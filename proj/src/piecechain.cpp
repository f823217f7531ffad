// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pzkpfl/piecechain.hpp"

#include <algorithm>
#include <stdexcept>

#include "pzkpfl/parallel.hpp"

namespace pzkpfl::piecechain {
namespace {

constexpr uint32_t kBundleVersion = 1;
constexpr uint32_t kArchiveVersion = 1;

std::span<const G1> input_bases(const VerificationKey& vk) {
  const size_t half = vk.num_public() / 2;
  return {vk.gamma_abc.data() + 1, half};
}

std::span<const G1> output_bases(const VerificationKey& vk) {
  const size_t half = vk.num_public() / 2;
  return {vk.gamma_abc.data() + 1 + half, half};
}

std::span<const G1> all_bases(const VerificationKey& vk) {
  return {vk.gamma_abc.data() + 1, vk.num_public()};
}

std::vector<Scalar> negated(std::span<const Scalar> v) {
  std::vector<Scalar> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = -v[i];
  return out;
}

bool same_except_gamma0(const VerificationKey& a, const VerificationKey& b) {
  if (a.circuit_hash != b.circuit_hash || !(a.alpha1 == b.alpha1) || !(a.beta2 == b.beta2) ||
      !(a.gamma2 == b.gamma2) || !(a.delta2 == b.delta2) || a.gamma_abc.size() != b.gamma_abc.size()) {
    return false;
  }
  for (size_t j = 1; j < a.gamma_abc.size(); ++j) {
    if (!(a.gamma_abc[j] == b.gamma_abc[j])) return false;
  }
  return true;
}

void check_shape(const VerificationKey& vk) {
  const size_t l = vk.num_public();
  if (l == 0 || l % 2 != 0) throw std::invalid_argument("statement length must be positive and even");
}

}  // namespace

TList initial_tlist(size_t l, Rng& rng, bool public_t0) {
  if (l == 0 || l % 2 != 0) throw std::invalid_argument("statement length must be positive and even");
  TList t(l);
  if (!public_t0) {
    for (auto& x : t) x = Scalar::random(rng);
  }
  return t;
}

TList next_tlist(const TList& prev, Rng& rng) {
  const size_t l = prev.size();
  if (l == 0 || l % 2 != 0) throw std::invalid_argument("statement length must be positive and even");
  const size_t half = l / 2;
  TList t(l);
  for (size_t j = 0; j < half; ++j) t[j] = prev[j + half];
  for (size_t j = half; j < l; ++j) t[j] = Scalar::random(rng);
  return t;
}

Modified modify(const VerificationKey& vk, std::span<const Scalar> phi, const TList& t) {
  check_shape(vk);
  const size_t l = vk.num_public();
  if (phi.size() != l) throw std::invalid_argument("statement length mismatch");
  if (t.size() != l) throw std::invalid_argument("t-list length mismatch");
  const size_t half = l / 2;
  const auto neg = negated(t);
  Modified m;
  m.checkers.tsum1 = algebra::msm(input_bases(vk), std::span<const Scalar>(neg.data(), half));
  m.checkers.tsum2 = algebra::msm(output_bases(vk), std::span<const Scalar>(neg.data() + half, half));
  m.vk_prime = vk;
  m.vk_prime.gamma_abc[0] = vk.gamma_abc[0] + m.checkers.tsum1 + m.checkers.tsum2;
  m.phi_prime.resize(l);
  for (size_t j = 0; j < l; ++j) m.phi_prime[j] = phi[j] + t[j];
  return m;
}

G16Output gen_g16_prf(const ProvingKey& pk, const VerificationKey& vk, std::span<const Scalar> phi,
                      std::span<const Scalar> witness, const TList& t_prev, Rng& rng) {
  if (t_prev.size() != vk.num_public()) throw std::invalid_argument("t-list length mismatch");
  G16Output out;
  out.t = next_tlist(t_prev, rng);
  out.proof = groth16::prove(pk, phi, witness, rng);
  out.mod = modify(vk, phi, out.t);
  return out;
}

ConProof gen_con_prf(const VerificationKey& vk, const VerificationKey& vk_prime, const TList& t,
                     const G1& tsum1, const std::optional<G1>& tsum2_prev, Rng& rng) {
  check_shape(vk);
  const size_t l = vk.num_public();
  if (t.size() != l) throw std::invalid_argument("t-list length mismatch");
  const auto neg = negated(t);
  ConProof p;
  p.s1 = sigma::prove_s1(all_bases(vk), neg, vk_prime.gamma_abc[0] - vk.gamma_abc[0], rng);
  if (tsum2_prev) {
    const std::span<const Scalar> c(neg.data(), l / 2);
    p.s2 = sigma::prove_s2(input_bases(vk), output_bases(vk), c, tsum1, *tsum2_prev, rng);
  }
  return p;
}

const char* describe(ConFailure f) {
  switch (f) {
    case ConFailure::kNone: return "ok";
    case ConFailure::kCheckerProduct: return "checker product does not match vk'";
    case ConFailure::kS1: return "s1 rejected";
    case ConFailure::kS2: return "s2 rejected";
    case ConFailure::kS2Presence: return "s2 presence does not match piece position";
  }
  return "unknown";
}

ConFailure check_con_prf(const sigma::SigmaS1& s1, const std::optional<sigma::SigmaS2>& s2,
                         const VerificationKey& vk, const VerificationKey& vk_prime,
                         const Checkers& checkers, const std::optional<G1>& tsum2_prev) {
  if (vk.num_public() == 0 || vk.num_public() % 2 != 0 || vk_prime.gamma_abc.size() != vk.gamma_abc.size()) {
    return ConFailure::kCheckerProduct;
  }
  if (!(vk.gamma_abc[0] + checkers.tsum1 + checkers.tsum2 == vk_prime.gamma_abc[0])) {
    return ConFailure::kCheckerProduct;
  }
  if (!sigma::verify_s1(all_bases(vk), vk_prime.gamma_abc[0] - vk.gamma_abc[0], s1)) {
    return ConFailure::kS1;
  }
  if (s2.has_value() != tsum2_prev.has_value()) return ConFailure::kS2Presence;
  if (s2 && !sigma::verify_s2(input_bases(vk), output_bases(vk), checkers.tsum1, *tsum2_prev, *s2)) {
    return ConFailure::kS2;
  }
  return ConFailure::kNone;
}

bool vrf_con_prf(const sigma::SigmaS1& s1, const std::optional<sigma::SigmaS2>& s2,
                 const VerificationKey& vk, const VerificationKey& vk_prime,
                 const Checkers& checkers, const std::optional<G1>& tsum2_prev) {
  return check_con_prf(s1, s2, vk, vk_prime, checkers, tsum2_prev) == ConFailure::kNone;
}

Chain prove_chain(const ProvingKey& pk, const VerificationKey& vk, std::span<const PieceInput> pieces,
                  Rng& rng, const ChainOptions& opts) {
  check_shape(vk);
  if (pieces.empty()) throw std::invalid_argument("no pieces to prove");
  const size_t q = pieces.size();
  Chain chain;
  chain.tlists.reserve(q);
  TList prev = initial_tlist(vk.num_public(), rng, opts.public_t0);
  for (size_t i = 0; i < q; ++i) {
    prev = next_tlist(prev, rng);
    chain.tlists.push_back(prev);
  }
  chain.bundles.resize(q);
  // Modified keys first so each piece can read its predecessor's checkers.
  std::vector<Modified> mods(q);
  parallel_for(q, [&](size_t i) { mods[i] = modify(vk, pieces[i].statement, chain.tlists[i]); },
               opts.workers);
  parallel_for(
      q,
      [&](size_t i) {
        Rng local = rng.fork("piece", i);
        PieceBundle& b = chain.bundles[i];
        b.index = i + 1;
        b.proof = groth16::prove(pk, pieces[i].statement, pieces[i].witness, local);
        b.vk_prime = mods[i].vk_prime;
        b.phi_prime = mods[i].phi_prime;
        b.checkers = mods[i].checkers;
        const std::optional<G1> prev_tsum2 =
            i == 0 ? std::nullopt : std::optional<G1>(mods[i - 1].checkers.tsum2);
        auto con = gen_con_prf(vk, b.vk_prime, chain.tlists[i], b.checkers.tsum1, prev_tsum2, local);
        b.s1 = std::move(con.s1);
        b.s2 = std::move(con.s2);
      },
      opts.workers);
  return chain;
}

ChainReport verify_piece_chain(std::span<const PieceBundle> bundles, const VerificationKey& vk,
                               const std::optional<std::vector<Scalar>>& initial_inputs,
                               size_t workers) {
  if (bundles.empty()) throw std::invalid_argument("empty piece chain");
  check_shape(vk);
  const size_t l = vk.num_public();
  std::vector<std::string> failures(bundles.size());
  parallel_for(
      bundles.size(),
      [&](size_t i) {
        const PieceBundle& b = bundles[i];
        std::string& why = failures[i];
        if (b.index != i + 1) {
          why = "piece index out of order";
          return;
        }
        if (b.phi_prime.size() != l) {
          why = "noised statement has wrong length";
          return;
        }
        if (!same_except_gamma0(vk, b.vk_prime)) {
          why = "vk' differs from vk outside gamma_abc_0";
          return;
        }
        if (!groth16::verify(b.vk_prime, b.phi_prime, b.proof)) {
          why = "Groth16 proof rejected under vk'";
          return;
        }
        const std::optional<G1> prev =
            i == 0 ? std::nullopt : std::optional<G1>(bundles[i - 1].checkers.tsum2);
        const ConFailure f = check_con_prf(b.s1, b.s2, vk, b.vk_prime, b.checkers, prev);
        if (f != ConFailure::kNone) {
          why = describe(f);
          return;
        }
        if (i == 0 && initial_inputs) {
          if (initial_inputs->size() != l / 2 || !b.checkers.tsum1.is_identity()) {
            why = "first piece is not in public-input form";
            return;
          }
          for (size_t j = 0; j < l / 2; ++j) {
            if (b.phi_prime[j] != (*initial_inputs)[j]) {
              why = "first piece inputs differ from the distributed model";
              return;
            }
          }
        }
      },
      workers);
  for (size_t i = 0; i < failures.size(); ++i) {
    if (!failures[i].empty()) return {false, i + 1, failures[i]};
  }
  return {};
}

std::vector<uint8_t> serialize_bundle(const PieceBundle& b, const VerificationKey& vk) {
  codec::Writer w;
  codec::write_header(w, "PIEC", kBundleVersion);
  w.raw(vk.circuit_hash);
  w.u64(b.index);
  groth16::write_proof(w, b.proof);
  w.u64(b.phi_prime.size());
  for (const auto& s : b.phi_prime) w.scalar(s);
  w.g1(b.vk_prime.gamma_abc.at(0) - vk.gamma_abc.at(0));
  w.g1(b.checkers.tsum1);
  w.g1(b.checkers.tsum2);
  sigma::write(w, b.s1);
  w.u8(b.s2 ? 1 : 0);
  if (b.s2) sigma::write(w, *b.s2);
  return w.take();
}

PieceBundle deserialize_bundle(std::span<const uint8_t> bytes, const VerificationKey& vk) {
  codec::Reader r(bytes);
  codec::read_header(r, "PIEC", kBundleVersion);
  const auto hash = r.raw(32);
  if (!std::equal(hash.begin(), hash.end(), vk.circuit_hash.begin())) {
    throw std::runtime_error("bundle was produced for a different circuit");
  }
  PieceBundle b;
  b.index = r.u64();
  b.proof = groth16::read_proof(r);
  b.phi_prime.resize(r.count(1u << 20));
  for (auto& s : b.phi_prime) s = r.scalar();
  b.vk_prime = vk;
  b.vk_prime.gamma_abc.at(0) = vk.gamma_abc[0] + r.g1();
  b.checkers.tsum1 = r.g1();
  b.checkers.tsum2 = r.g1();
  b.s1 = sigma::read_s1(r);
  const uint8_t has_s2 = r.u8();
  if (has_s2 > 1) throw std::runtime_error("bad s2 flag");
  if (has_s2) b.s2 = sigma::read_s2(r);
  r.expect_done();
  return b;
}

void write_archive(const std::filesystem::path& path, std::span<const PieceBundle> bundles,
                   const VerificationKey& vk) {
  std::vector<std::vector<uint8_t>> records(bundles.size());
  parallel_for(bundles.size(), [&](size_t i) { records[i] = serialize_bundle(bundles[i], vk); });
  codec::Writer w;
  codec::write_header(w, "BNDA", kArchiveVersion);
  w.u64(records.size());
  uint64_t offset = 0;
  for (const auto& rec : records) {
    w.u64(offset);
    w.u64(rec.size());
    offset += rec.size();
  }
  for (const auto& rec : records) w.raw(rec);
  codec::write_file(path, w.bytes());
}

std::vector<PieceBundle> read_archive(const std::filesystem::path& path, const VerificationKey& vk) {
  const auto bytes = codec::read_file(path);
  codec::Reader r(bytes);
  codec::read_header(r, "BNDA", kArchiveVersion);
  const size_t n = r.count(1u << 24);
  std::vector<std::pair<uint64_t, uint64_t>> index(n);
  for (auto& [off, len] : index) {
    off = r.u64();
    len = r.u64();
  }
  const size_t base = bytes.size() - r.remaining();
  uint64_t expect = 0;
  for (const auto& [off, len] : index) {
    if (off != expect || len > bytes.size()) throw std::runtime_error("corrupt archive index");
    expect += len;
  }
  if (expect != r.remaining()) throw std::runtime_error("archive size does not match its index");
  std::vector<PieceBundle> out(n);
  parallel_for(n, [&](size_t i) {
    const auto [off, len] = index[i];
    out[i] = deserialize_bundle(std::span<const uint8_t>(bytes.data() + base + off, len), vk);
  });
  return out;
}

}  // namespace pzkpfl::piecechain
