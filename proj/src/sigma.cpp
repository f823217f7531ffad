// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pzkpfl/sigma.hpp"

#include <stdexcept>

namespace pzkpfl::sigma {
namespace {

constexpr size_t kMaxResponses = 1u << 20;

std::vector<Scalar> random_vector(size_t n, Rng& rng) {
  std::vector<Scalar> r(n);
  for (auto& x : r) x = Scalar::random(rng);
  return r;
}

std::vector<Scalar> responses(std::span<const Scalar> r, std::span<const Scalar> c, const Scalar& e) {
  std::vector<Scalar> z(r.size());
  for (size_t j = 0; j < r.size(); ++j) z[j] = r[j] + e * c[j];
  return z;
}

Scalar challenge_s1(std::span<const G1> bases, const G1& C, const G1& a) {
  algebra::Transcript t(algebra::kTagS1);
  for (const auto& g : bases) t.append(g);
  t.append(C).append(a);
  return t.challenge();
}

Scalar challenge_s2(std::span<const G1> bases1, std::span<const G1> bases2, const G1& C1,
                    const G1& C2, const G1& a1, const G1& a2) {
  algebra::Transcript t(algebra::kTagS2);
  for (const auto& g : bases1) t.append(g);
  for (const auto& g : bases2) t.append(g);
  t.append(C1).append(C2).append(a1).append(a2);
  return t.challenge();
}

Scalar challenge_s3(const G1& g_pub, const G1& g_ij, const G1& C1, const G1& C2, const G1& a1,
                    const G1& a2, const G1& a3) {
  algebra::Transcript t(algebra::kTagS3);
  t.append(g_pub).append(g_ij).append(C1).append(C2).append(a1).append(a2).append(a3);
  return t.challenge();
}

void write_scalars(codec::Writer& w, const std::vector<Scalar>& v) {
  w.u64(v.size());
  for (const auto& s : v) w.scalar(s);
}

std::vector<Scalar> read_scalars(codec::Reader& r) {
  std::vector<Scalar> v(r.count(kMaxResponses));
  for (auto& s : v) s = r.scalar();
  return v;
}

}  // namespace

SigmaS1 prove_s1(std::span<const G1> bases, std::span<const Scalar> c, const G1& C, Rng& rng) {
  if (bases.size() != c.size() || bases.empty()) throw std::invalid_argument("s1: length mismatch");
  const auto r = random_vector(c.size(), rng);
  SigmaS1 p;
  p.a = algebra::msm(bases, r);
  p.e = challenge_s1(bases, C, p.a);
  p.z = responses(r, c, p.e);
  return p;
}

bool verify_s1(std::span<const G1> bases, const G1& C, const SigmaS1& p) {
  if (bases.empty() || p.z.size() != bases.size()) return false;
  if (p.e != challenge_s1(bases, C, p.a)) return false;
  return algebra::msm(bases, p.z) == p.a + C * p.e;
}

SigmaS2 prove_s2(std::span<const G1> bases1, std::span<const G1> bases2,
                 std::span<const Scalar> c, const G1& C1, const G1& C2, Rng& rng) {
  if (bases1.size() != c.size() || bases2.size() != c.size() || c.empty()) {
    throw std::invalid_argument("s2: length mismatch");
  }
  const auto r = random_vector(c.size(), rng);
  SigmaS2 p;
  p.a1 = algebra::msm(bases1, r);
  p.a2 = algebra::msm(bases2, r);
  p.e = challenge_s2(bases1, bases2, C1, C2, p.a1, p.a2);
  p.z = responses(r, c, p.e);
  return p;
}

bool verify_s2(std::span<const G1> bases1, std::span<const G1> bases2, const G1& C1,
               const G1& C2, const SigmaS2& p) {
  if (bases1.empty() || bases1.size() != bases2.size() || p.z.size() != bases1.size()) return false;
  if (p.e != challenge_s2(bases1, bases2, C1, C2, p.a1, p.a2)) return false;
  return algebra::msm(bases1, p.z) == p.a1 + C1 * p.e &&
         algebra::msm(bases2, p.z) == p.a2 + C2 * p.e;
}

SigmaS3 prove_s3(const G1& g_pub, const G1& g_ij, const Scalar& c, const Scalar& d, const G1& C1,
                 const G1& C2, Rng& rng) {
  const Scalar r1 = Scalar::random(rng), r2 = Scalar::random(rng);
  SigmaS3 p;
  p.a1 = g_pub * r1;
  p.a2 = g_ij * r1;
  p.a3 = g_ij * r2;
  p.e = challenge_s3(g_pub, g_ij, C1, C2, p.a1, p.a2, p.a3);
  p.z1 = r1 + p.e * c;
  p.z2 = r2 + p.e * d;
  return p;
}

bool verify_s3(const G1& g_pub, const G1& g_ij, const G1& C1, const G1& C2, const SigmaS3& p) {
  if (p.e != challenge_s3(g_pub, g_ij, C1, C2, p.a1, p.a2, p.a3)) return false;
  return g_pub * p.z1 == p.a1 + C1 * p.e && g_ij * (p.z1 + p.z2) == p.a2 + p.a3 + C2 * p.e;
}

void write(codec::Writer& w, const SigmaS1& p) {
  w.g1(p.a);
  w.scalar(p.e);
  write_scalars(w, p.z);
}

void write(codec::Writer& w, const SigmaS2& p) {
  w.g1(p.a1);
  w.g1(p.a2);
  w.scalar(p.e);
  write_scalars(w, p.z);
}

void write(codec::Writer& w, const SigmaS3& p) {
  w.g1(p.a1);
  w.g1(p.a2);
  w.g1(p.a3);
  w.scalar(p.e);
  w.scalar(p.z1);
  w.scalar(p.z2);
}

SigmaS1 read_s1(codec::Reader& r) {
  SigmaS1 p;
  p.a = r.g1();
  p.e = r.scalar();
  p.z = read_scalars(r);
  return p;
}

SigmaS2 read_s2(codec::Reader& r) {
  SigmaS2 p;
  p.a1 = r.g1();
  p.a2 = r.g1();
  p.e = r.scalar();
  p.z = read_scalars(r);
  return p;
}

SigmaS3 read_s3(codec::Reader& r) {
  SigmaS3 p;
  p.a1 = r.g1();
  p.a2 = r.g1();
  p.a3 = r.g1();
  p.e = r.scalar();
  p.z1 = r.scalar();
  p.z2 = r.scalar();
  return p;
}

}  // namespace pzkpfl::sigma
