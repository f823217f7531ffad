// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "pzkpfl/algebra.hpp"
#include "pzkpfl/r1cs.hpp"

namespace pzkpfl::r1cs {

using Polynomial = std::vector<Scalar>;  // coefficients, lowest degree first

Scalar poly_eval(const Polynomial& p, const Scalar& x);
Polynomial poly_mul(const Polynomial& a, const Polynomial& b);  // schoolbook
Polynomial poly_sub(const Polynomial& a, const Polynomial& b);
void poly_trim(Polynomial& p);

// Multiplicative subgroup of order N = 2^k with radix-2 NTTs.
class EvaluationDomain {
 public:
  explicit EvaluationDomain(size_t min_size);

  size_t size() const { return n_; }
  const Scalar& omega() const { return omega_; }
  Scalar element(size_t k) const { return omega_.pow(k); }

  void ntt(std::vector<Scalar>& v) const;
  void intt(std::vector<Scalar>& v) const;
  // Evaluations on the coset g * <omega> and back.
  void coset_ntt(std::vector<Scalar>& v) const;
  void coset_intt(std::vector<Scalar>& v) const;
  static Scalar coset_generator();

  // L_k(x) for every k.
  std::vector<Scalar> lagrange_at(const Scalar& x) const;

  // Primitive 2^32-th root of unity of the scalar field.
  static Scalar root_of_unity_2_32();

 private:
  void transform(std::vector<Scalar>& v, const std::vector<Scalar>& twiddles) const;
  size_t n_;
  unsigned log_n_;
  Scalar omega_, omega_inv_, n_inv_;
  std::vector<Scalar> tw_, tw_inv_;
};

// u_i, v_i, w_i in Lagrange form over the domain: column i lists the
// (row, coefficient) pairs of variable i in the A, B and C matrices. Rows past
// the constraint count are zero padding, and t(X) = X^N - 1. A system with no
// constraints has t = 1.
class QapInstance {
 public:
  using Column = std::vector<std::pair<uint32_t, Scalar>>;

  size_t num_variables() const { return u_.size(); }
  size_t num_public() const { return num_public_; }
  size_t num_constraints() const { return num_constraints_; }
  size_t domain_size() const { return domain_ ? domain_->size() : 0; }
  const EvaluationDomain& domain() const { return *domain_; }

  Polynomial t() const;
  Polynomial u(size_t i) const { return column_poly(u_[i]); }
  Polynomial v(size_t i) const { return column_poly(v_[i]); }
  Polynomial w(size_t i) const { return column_poly(w_[i]); }

  struct Evaluations {
    std::vector<Scalar> u, v, w;
    Scalar t;
  };
  Evaluations evaluate_at(const Scalar& x) const;

  // Row values <A_k,a>, <B_k,a>, <C_k,a> over the padded domain.
  void row_values(std::span<const Scalar> values, std::vector<Scalar>& a,
                  std::vector<Scalar>& b, std::vector<Scalar>& c) const;
  bool is_satisfied(std::span<const Scalar> values) const;
  // Coefficients of h = (A*B - C) / t, degree <= N - 2. Requires a
  // satisfying assignment.
  std::vector<Scalar> compute_h(std::span<const Scalar> values) const;

  friend QapInstance to_qap(const ConstraintSystem& cs);

 private:
  Polynomial column_poly(const Column& col) const;
  size_t num_public_ = 0;
  size_t num_constraints_ = 0;
  std::shared_ptr<const EvaluationDomain> domain_;
  std::vector<Column> u_, v_, w_;
};

QapInstance to_qap(const ConstraintSystem& cs);

}  // namespace pzkpfl::r1cs
