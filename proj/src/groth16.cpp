// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pzkpfl/groth16.hpp"

#include <stdexcept>

#include "pzkpfl/parallel.hpp"

namespace pzkpfl::groth16 {
namespace {

constexpr uint32_t kKeyVersion = 1;

Scalar nonzero(Rng& rng) {
  for (;;) {
    Scalar s = Scalar::random(rng);
    if (!s.is_zero()) return s;
  }
}

std::vector<G1> mul_all(const G1& base, const std::vector<Scalar>& scalars) {
  std::vector<G1> out(scalars.size());
  parallel_for(scalars.size(), [&](size_t i) {
    if (!scalars[i].is_zero()) out[i] = base * scalars[i];
  });
  return out;
}

std::vector<G2> mul_all(const G2& base, const std::vector<Scalar>& scalars) {
  std::vector<G2> out(scalars.size());
  parallel_for(scalars.size(), [&](size_t i) {
    if (!scalars[i].is_zero()) out[i] = base * scalars[i];
  });
  return out;
}

void write_g1s(codec::Writer& w, const std::vector<G1>& v) {
  w.u64(v.size());
  for (const auto& p : v) w.g1(p);
}

void write_g2s(codec::Writer& w, const std::vector<G2>& v) {
  w.u64(v.size());
  for (const auto& p : v) w.g2(p);
}

std::vector<G1> read_g1s(codec::Reader& r) {
  const size_t n = r.count(r.remaining() / G1::kCompressedBytes);
  std::vector<G1> v;
  v.reserve(n);
  for (size_t i = 0; i < n; ++i) v.push_back(r.g1());
  return v;
}

std::vector<G2> read_g2s(codec::Reader& r) {
  const size_t n = r.count(r.remaining() / G2::kCompressedBytes);
  std::vector<G2> v;
  v.reserve(n);
  for (size_t i = 0; i < n; ++i) v.push_back(r.g2());
  return v;
}

CircuitHash read_hash(codec::Reader& r) {
  CircuitHash h;
  auto b = r.raw(h.size());
  std::copy(b.begin(), b.end(), h.begin());
  return h;
}

}  // namespace

bool VerificationKey::operator==(const VerificationKey& o) const {
  return circuit_hash == o.circuit_hash && alpha1 == o.alpha1 && beta2 == o.beta2 &&
         gamma2 == o.gamma2 && delta2 == o.delta2 && gamma_abc == o.gamma_abc;
}

void ProvingKey::prepare() {
  auto t = std::make_shared<Tables>();
  t->a = algebra::G1Table(a_query);
  t->b1 = algebra::G1Table(b1_query);
  t->l = algebra::G1Table(l_query);
  t->h = algebra::G1Table(h_query);
  t->b2 = algebra::G2Table(b2_query);
  tables = std::move(t);
}

SetupResult setup(std::shared_ptr<const r1cs::QapInstance> qap, const CircuitHash& circuit_hash,
                  Rng& rng) {
  if (!qap) throw std::invalid_argument("setup needs a QAP");
  if (qap->domain_size() == 0) throw std::invalid_argument("degenerate QAP: t(X) is constant");
  const size_t m1 = qap->num_variables();  // m + 1
  const size_t l = qap->num_public();
  if (l + 1 >= m1) throw std::invalid_argument("statement size must be below the variable count");

  SetupResult out;
  Trapdoor& td = out.trapdoor;
  td.alpha = nonzero(rng);
  td.beta = nonzero(rng);
  td.gamma = nonzero(rng);
  td.delta = nonzero(rng);
  const size_t n = qap->domain_size();
  do {
    td.x = nonzero(rng);
  } while ((td.x.pow(n) - Scalar::one()).is_zero());

  const auto ev = qap->evaluate_at(td.x);
  const Scalar gamma_inv = td.gamma.inverse();
  const Scalar delta_inv = td.delta.inverse();
  std::vector<Scalar> ic(l + 1), lq(m1 - l - 1);
  for (size_t i = 0; i < m1; ++i) {
    const Scalar k = td.beta * ev.u[i] + td.alpha * ev.v[i] + ev.w[i];
    if (i <= l) {
      ic[i] = k * gamma_inv;
    } else {
      lq[i - l - 1] = k * delta_inv;
    }
  }
  std::vector<Scalar> hq(n - 1);
  Scalar xi = ev.t * delta_inv;
  for (size_t i = 0; i + 1 < n; ++i) {
    hq[i] = xi;
    xi *= td.x;
  }
  td.ic = ic;

  const G1 g1 = G1::generator();
  const G2 g2 = G2::generator();
  ProvingKey& pk = out.pk;
  pk.circuit_hash = circuit_hash;
  pk.alpha1 = g1 * td.alpha;
  pk.beta1 = g1 * td.beta;
  pk.delta1 = g1 * td.delta;
  pk.beta2 = g2 * td.beta;
  pk.delta2 = g2 * td.delta;
  pk.a_query = mul_all(g1, ev.u);
  pk.b1_query = mul_all(g1, ev.v);
  pk.b2_query = mul_all(g2, ev.v);
  pk.l_query = mul_all(g1, lq);
  pk.h_query = mul_all(g1, hq);
  pk.qap = std::move(qap);
  pk.prepare();

  VerificationKey& vk = out.vk;
  vk.circuit_hash = circuit_hash;
  vk.alpha1 = pk.alpha1;
  vk.beta2 = pk.beta2;
  vk.gamma2 = g2 * td.gamma;
  vk.delta2 = pk.delta2;
  vk.gamma_abc = mul_all(g1, ic);
  return out;
}

Proof prove(const ProvingKey& pk, std::span<const Scalar> statement,
            std::span<const Scalar> witness, Rng& rng) {
  if (!pk.qap) throw std::invalid_argument("proving key has no circuit attached");
  const auto& qap = *pk.qap;
  const size_t l = qap.num_public();
  if (statement.size() != l) throw std::invalid_argument("statement length mismatch");
  if (1 + l + witness.size() != qap.num_variables()) throw std::invalid_argument("witness length mismatch");

  std::vector<Scalar> a;
  a.reserve(qap.num_variables());
  a.push_back(Scalar::one());
  a.insert(a.end(), statement.begin(), statement.end());
  a.insert(a.end(), witness.begin(), witness.end());
  if (!qap.is_satisfied(a)) throw std::invalid_argument("assignment does not satisfy the circuit");
  const auto h = qap.compute_h(a);

  std::shared_ptr<const ProvingKey::Tables> tables = pk.tables;
  if (!tables) {
    ProvingKey copy = pk;
    copy.prepare();
    tables = copy.tables;
  }
  const Scalar r = Scalar::random(rng);
  const Scalar s = Scalar::random(rng);

  const G1 a1 = pk.alpha1 + tables->a.msm(a) + pk.delta1 * r;
  const G2 b2 = pk.beta2 + tables->b2.msm(a) + pk.delta2 * s;
  const G1 b1 = pk.beta1 + tables->b1.msm(a) + pk.delta1 * s;
  const std::span<const Scalar> priv(a.data() + l + 1, a.size() - l - 1);
  G1 c = tables->l.msm(priv) + tables->h.msm(h);
  c = c + a1 * s + b1 * r - pk.delta1 * (r * s);
  return {a1, b2, c};
}

G1 public_input_commitment(const VerificationKey& vk, std::span<const Scalar> statement) {
  if (statement.size() + 1 != vk.gamma_abc.size()) throw std::invalid_argument("statement length mismatch");
  std::vector<Scalar> coeffs;
  coeffs.reserve(vk.gamma_abc.size());
  coeffs.push_back(Scalar::one());
  coeffs.insert(coeffs.end(), statement.begin(), statement.end());
  return algebra::msm(vk.gamma_abc, coeffs);
}

bool verify(const VerificationKey& vk, std::span<const Scalar> statement, const Proof& proof) {
  if (statement.size() + 1 != vk.gamma_abc.size()) return false;
  if (!proof.a.in_group() || !proof.b.in_group() || !proof.c.in_group()) return false;
  const G1 ic = public_input_commitment(vk, statement);
  const G1 as[4] = {proof.a, -vk.alpha1, -ic, -proof.c};
  const G2 bs[4] = {proof.b, vk.beta2, vk.gamma2, vk.delta2};
  return algebra::multi_pairing(as, bs).is_one();
}

Proof sim(const Trapdoor& td, const VerificationKey& vk, std::span<const Scalar> statement,
          Rng& rng) {
  if (statement.size() + 1 != td.ic.size() || td.ic.size() != vk.gamma_abc.size()) {
    throw std::invalid_argument("statement length mismatch");
  }
  const Scalar a = nonzero(rng);
  const Scalar b = nonzero(rng);
  Scalar ic = td.ic[0];
  for (size_t j = 0; j < statement.size(); ++j) ic += statement[j] * td.ic[j + 1];
  const Scalar c = (a * b - td.alpha * td.beta - ic * td.gamma) * td.delta.inverse();
  return {G1::generator() * a, G2::generator() * b, G1::generator() * c};
}

// ------------------------------------------------------------ files

std::vector<uint8_t> serialize(const ProvingKey& pk) {
  codec::Writer w;
  codec::write_header(w, "PKEY", kKeyVersion);
  w.raw(pk.circuit_hash);
  w.g1(pk.alpha1);
  w.g1(pk.beta1);
  w.g1(pk.delta1);
  w.g2(pk.beta2);
  w.g2(pk.delta2);
  write_g1s(w, pk.a_query);
  write_g1s(w, pk.b1_query);
  write_g2s(w, pk.b2_query);
  write_g1s(w, pk.l_query);
  write_g1s(w, pk.h_query);
  return w.take();
}

ProvingKey deserialize_pk(std::span<const uint8_t> bytes) {
  codec::Reader r(bytes);
  codec::read_header(r, "PKEY", kKeyVersion);
  ProvingKey pk;
  pk.circuit_hash = read_hash(r);
  pk.alpha1 = r.g1();
  pk.beta1 = r.g1();
  pk.delta1 = r.g1();
  pk.beta2 = r.g2();
  pk.delta2 = r.g2();
  pk.a_query = read_g1s(r);
  pk.b1_query = read_g1s(r);
  pk.b2_query = read_g2s(r);
  pk.l_query = read_g1s(r);
  pk.h_query = read_g1s(r);
  r.expect_done();
  if (pk.a_query.size() != pk.b1_query.size() || pk.a_query.size() != pk.b2_query.size()) {
    throw std::runtime_error("inconsistent proving key query lengths");
  }
  return pk;
}

std::vector<uint8_t> serialize(const VerificationKey& vk) {
  codec::Writer w;
  codec::write_header(w, "VKEY", kKeyVersion);
  w.raw(vk.circuit_hash);
  w.g1(vk.alpha1);
  w.g2(vk.beta2);
  w.g2(vk.gamma2);
  w.g2(vk.delta2);
  write_g1s(w, vk.gamma_abc);
  return w.take();
}

VerificationKey deserialize_vk(std::span<const uint8_t> bytes) {
  codec::Reader r(bytes);
  codec::read_header(r, "VKEY", kKeyVersion);
  VerificationKey vk;
  vk.circuit_hash = read_hash(r);
  vk.alpha1 = r.g1();
  vk.beta2 = r.g2();
  vk.gamma2 = r.g2();
  vk.delta2 = r.g2();
  vk.gamma_abc = read_g1s(r);
  r.expect_done();
  if (vk.gamma_abc.empty()) throw std::runtime_error("verification key without gamma_abc");
  return vk;
}

void write_proof(codec::Writer& w, const Proof& p) {
  w.g1(p.a);
  w.g2(p.b);
  w.g1(p.c);
}

Proof read_proof(codec::Reader& r) {
  Proof p;
  p.a = r.g1();
  p.b = r.g2();
  p.c = r.g1();
  return p;
}

std::vector<uint8_t> serialize(const Proof& p, const CircuitHash& circuit_hash) {
  codec::Writer w;
  codec::write_header(w, "PROF", kKeyVersion);
  w.raw(circuit_hash);
  write_proof(w, p);
  return w.take();
}

Proof deserialize_proof(std::span<const uint8_t> bytes, const CircuitHash& circuit_hash) {
  codec::Reader r(bytes);
  codec::read_header(r, "PROF", kKeyVersion);
  if (read_hash(r) != circuit_hash) throw std::runtime_error("proof was made for a different circuit");
  Proof p = read_proof(r);
  r.expect_done();
  return p;
}

}  // namespace pzkpfl::groth16
