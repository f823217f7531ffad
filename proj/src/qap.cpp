// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pzkpfl/qap.hpp"

#include <bit>
#include <stdexcept>
#include <utility>

namespace pzkpfl::r1cs {
namespace {

// (r - 1) / 2^32 for the BLS12-381 scalar field, big-endian hex.
constexpr char kOddPartHex[] = "73eda753299d7d483339d80809a1d80553bda402fffe5bfeffffffff";

Scalar pow_hex(const Scalar& base, const char* hex) {
  Scalar acc = Scalar::one();
  for (const char* p = hex; *p; ++p) {
    const int d = (*p >= 'a') ? (*p - 'a' + 10) : (*p - '0');
    for (int bit = 3; bit >= 0; --bit) {
      acc *= acc;
      if ((d >> bit) & 1) acc *= base;
    }
  }
  return acc;
}

}  // namespace

Scalar poly_eval(const Polynomial& p, const Scalar& x) {
  Scalar acc;
  for (size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
  return acc;
}

Polynomial poly_mul(const Polynomial& a, const Polynomial& b) {
  if (a.empty() || b.empty()) return {};
  Polynomial out(a.size() + b.size() - 1);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_zero()) continue;
    for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

Polynomial poly_sub(const Polynomial& a, const Polynomial& b) {
  Polynomial out(std::max(a.size(), b.size()));
  for (size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) out[i] -= b[i];
  return out;
}

void poly_trim(Polynomial& p) {
  while (!p.empty() && p.back().is_zero()) p.pop_back();
}

// ------------------------------------------------------------ domain

Scalar EvaluationDomain::root_of_unity_2_32() {
  static const Scalar root = pow_hex(Scalar::from_u64(7), kOddPartHex);
  return root;
}

Scalar EvaluationDomain::coset_generator() { return Scalar::from_u64(7); }

EvaluationDomain::EvaluationDomain(size_t min_size) {
  if (min_size > (size_t{1} << 32)) throw std::invalid_argument("domain too large");
  n_ = std::bit_ceil(std::max<size_t>(min_size, 1));
  log_n_ = static_cast<unsigned>(std::countr_zero(n_));
  omega_ = root_of_unity_2_32();
  for (unsigned i = log_n_; i < 32; ++i) omega_ *= omega_;
  omega_inv_ = omega_.inverse();
  n_inv_ = Scalar::from_u64(n_).inverse();
  tw_.resize(n_ / 2 + 1);
  tw_inv_.resize(n_ / 2 + 1);
  Scalar w = Scalar::one(), wi = Scalar::one();
  for (size_t k = 0; k < tw_.size(); ++k) {
    tw_[k] = w;
    tw_inv_[k] = wi;
    w *= omega_;
    wi *= omega_inv_;
  }
}

void EvaluationDomain::transform(std::vector<Scalar>& v, const std::vector<Scalar>& tw) const {
  if (v.size() != n_) throw std::invalid_argument("transform length must equal the domain size");
  if (n_ == 1) return;
  for (size_t i = 1, j = 0; i < n_; ++i) {
    size_t bit = n_ >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(v[i], v[j]);
  }
  for (size_t len = 2; len <= n_; len <<= 1) {
    const size_t half = len >> 1;
    const size_t step = n_ / len;
    for (size_t start = 0; start < n_; start += len) {
      for (size_t k = 0; k < half; ++k) {
        const Scalar t = v[start + k + half] * tw[k * step];
        v[start + k + half] = v[start + k] - t;
        v[start + k] += t;
      }
    }
  }
}

void EvaluationDomain::ntt(std::vector<Scalar>& v) const { transform(v, tw_); }

void EvaluationDomain::intt(std::vector<Scalar>& v) const {
  transform(v, tw_inv_);
  for (auto& x : v) x *= n_inv_;
}

void EvaluationDomain::coset_ntt(std::vector<Scalar>& v) const {
  const Scalar g = coset_generator();
  Scalar gi = Scalar::one();
  for (auto& x : v) {
    x *= gi;
    gi *= g;
  }
  ntt(v);
}

void EvaluationDomain::coset_intt(std::vector<Scalar>& v) const {
  intt(v);
  const Scalar g_inv = coset_generator().inverse();
  Scalar gi = Scalar::one();
  for (auto& x : v) {
    x *= gi;
    gi *= g_inv;
  }
}

std::vector<Scalar> EvaluationDomain::lagrange_at(const Scalar& x) const {
  std::vector<Scalar> out(n_);
  const Scalar zx = x.pow(n_) - Scalar::one();
  if (zx.is_zero()) {
    // x lies in the domain: the basis is an indicator.
    Scalar w = Scalar::one();
    for (size_t k = 0; k < n_; ++k, w *= omega_) {
      if (w == x) out[k] = Scalar::one();
    }
    return out;
  }
  std::vector<Scalar> den(n_);
  Scalar w = Scalar::one();
  for (size_t k = 0; k < n_; ++k, w *= omega_) den[k] = x - w;
  batch_inverse(den);
  const Scalar common = zx * n_inv_;
  w = Scalar::one();
  for (size_t k = 0; k < n_; ++k, w *= omega_) out[k] = w * common * den[k];
  return out;
}

// ------------------------------------------------------------ QAP

QapInstance to_qap(const ConstraintSystem& cs) {
  QapInstance q;
  q.num_public_ = cs.num_public();
  q.num_constraints_ = cs.num_constraints();
  q.u_.resize(cs.num_variables());
  q.v_.resize(cs.num_variables());
  q.w_.resize(cs.num_variables());
  if (q.num_constraints_ == 0) return q;
  q.domain_ = std::make_shared<const EvaluationDomain>(q.num_constraints_);
  const auto& rows = cs.constraints();
  for (uint32_t k = 0; k < rows.size(); ++k) {
    for (const auto& t : rows[k].a) q.u_[t.var].emplace_back(k, t.coeff);
    for (const auto& t : rows[k].b) q.v_[t.var].emplace_back(k, t.coeff);
    for (const auto& t : rows[k].c) q.w_[t.var].emplace_back(k, t.coeff);
  }
  return q;
}

Polynomial QapInstance::t() const {
  if (!domain_) return {Scalar::one()};
  Polynomial p(domain_->size() + 1);
  p.front() = -Scalar::one();
  p.back() = Scalar::one();
  return p;
}

Polynomial QapInstance::column_poly(const Column& col) const {
  if (!domain_) return {};
  Polynomial evals(domain_->size());
  for (const auto& [k, c] : col) evals[k] += c;
  domain_->intt(evals);
  poly_trim(evals);
  return evals;
}

QapInstance::Evaluations QapInstance::evaluate_at(const Scalar& x) const {
  Evaluations e;
  const size_t m = num_variables();
  e.u.assign(m, Scalar());
  e.v.assign(m, Scalar());
  e.w.assign(m, Scalar());
  if (!domain_) {
    e.t = Scalar::one();
    return e;
  }
  const auto lag = domain_->lagrange_at(x);
  for (size_t i = 0; i < m; ++i) {
    for (const auto& [k, c] : u_[i]) e.u[i] += c * lag[k];
    for (const auto& [k, c] : v_[i]) e.v[i] += c * lag[k];
    for (const auto& [k, c] : w_[i]) e.w[i] += c * lag[k];
  }
  e.t = x.pow(domain_->size()) - Scalar::one();
  return e;
}

void QapInstance::row_values(std::span<const Scalar> values, std::vector<Scalar>& a,
                             std::vector<Scalar>& b, std::vector<Scalar>& c) const {
  if (values.size() != num_variables()) throw std::invalid_argument("assignment length mismatch");
  const size_t n = domain_size();
  a.assign(n, Scalar());
  b.assign(n, Scalar());
  c.assign(n, Scalar());
  const Scalar one = Scalar::one();
  for (size_t i = 0; i < values.size(); ++i) {
    const Scalar& x = values[i];
    if (x.is_zero()) continue;
    const bool unit = x == one;
    for (const auto& [k, co] : u_[i]) a[k] += unit ? co : co * x;
    for (const auto& [k, co] : v_[i]) b[k] += unit ? co : co * x;
    for (const auto& [k, co] : w_[i]) c[k] += unit ? co : co * x;
  }
}

bool QapInstance::is_satisfied(std::span<const Scalar> values) const {
  std::vector<Scalar> a, b, c;
  row_values(values, a, b, c);
  for (size_t k = 0; k < a.size(); ++k) {
    if (a[k] * b[k] != c[k]) return false;
  }
  return true;
}

std::vector<Scalar> QapInstance::compute_h(std::span<const Scalar> values) const {
  if (!domain_) {
    if (values.size() != num_variables()) throw std::invalid_argument("assignment length mismatch");
    return {};
  }
  std::vector<Scalar> a, b, c;
  row_values(values, a, b, c);
  for (size_t k = 0; k < a.size(); ++k) {
    if (a[k] * b[k] != c[k]) throw std::invalid_argument("assignment does not satisfy the QAP");
  }
  const auto& d = *domain_;
  for (auto* p : {&a, &b, &c}) {
    d.intt(*p);
    d.coset_ntt(*p);
  }
  // t is constant on the coset: (g w^k)^N - 1 = g^N - 1.
  const Scalar t_inv = (EvaluationDomain::coset_generator().pow(d.size()) - Scalar::one()).inverse();
  std::vector<Scalar> h(d.size());
  for (size_t k = 0; k < h.size(); ++k) h[k] = (a[k] * b[k] - c[k]) * t_inv;
  d.coset_intt(h);
  if (!h.back().is_zero()) throw std::logic_error("quotient polynomial degree too high");
  h.pop_back();
  return h;
}

}  // namespace pzkpfl::r1cs
