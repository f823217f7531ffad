// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pzkpfl/algebra.hpp"
#include "pzkpfl/quantize.hpp"

namespace pzkpfl::r1cs {

using algebra::Scalar;

struct Term {
  uint32_t var;
  Scalar coeff;
};
using LinearCombination = std::vector<Term>;

struct Constraint {
  LinearCombination a, b, c;
};

Scalar evaluate_lc(const LinearCombination& lc, std::span<const Scalar> values);

// Variables a_0..a_m: a_0 is the constant one, a_1..a_l the statement and the
// rest the witness.
class ConstraintSystem {
 public:
  explicit ConstraintSystem(size_t num_public);

  size_t num_public() const { return num_public_; }
  size_t num_variables() const { return num_variables_; }  // m + 1
  size_t num_constraints() const { return constraints_.size(); }
  const std::vector<Constraint>& constraints() const { return constraints_; }

  uint32_t alloc_witness();
  void add(Constraint c);
  // Appends a_j * 0 = 0 for j = 0..l so the statement columns of the QAP are
  // linearly independent and every slot is bound by verification.
  void bind_public_inputs();
  // Throws std::invalid_argument unless 1 <= l < m and l is even.
  void validate_piece_shape() const;

  std::optional<size_t> first_unsatisfied(std::span<const Scalar> values) const;

  std::vector<uint8_t> serialize() const;
  static ConstraintSystem deserialize(std::span<const uint8_t> bytes);
  std::array<uint8_t, 32> hash() const;

 private:
  size_t num_public_;
  size_t num_variables_;
  std::vector<Constraint> constraints_;
};

struct Assignment {
  std::vector<Scalar> values;  // a_0..a_m

  std::vector<Scalar> statement(size_t l) const;
  std::vector<Scalar> witness(size_t l) const;
  static Assignment from_parts(std::span<const Scalar> statement, std::span<const Scalar> witness);
};

// Throws std::invalid_argument on a length mismatch.
bool check_satisfied(const ConstraintSystem& cs, const Assignment& asg);

// Constraint budget of a piece, broken down for reports.
struct PieceStats {
  size_t expressions = 0;
  size_t range_bits = 0;
  size_t range_checks = 0;
  size_t binding = 0;
};

// One constraint per binary expression, range checks for every rescale and
// reciprocal remainder/quotient, equality rows for outputs that are not
// produced directly, then the public binding rows. Statement layout: slots
// 1..l/2 take the piece inputs, l/2+1..l the outputs; data lands in the
// witness.
ConstraintSystem synthesize_piece(const quantize::PieceSpec& spec, PieceStats* stats = nullptr);

// Full assignment for a trace, laid out exactly as synthesize_piece allocates
// variables. Values are taken from the trace as-is, so a corrupted trace
// yields an unsatisfied constraint (or std::invalid_argument when a range
// decomposition is impossible).
Assignment assign_piece(const quantize::FixedTrace& trace);

// Field embedding of signed integers and its inverse with threshold r/2.
Scalar embed(int64_t v);
int64_t decode(const Scalar& s);  // throws std::overflow_error if |v| exceeds int64

}  // namespace pzkpfl::r1cs
