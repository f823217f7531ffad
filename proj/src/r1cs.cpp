// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pzkpfl/r1cs.hpp"

#include <bit>
#include <limits>
#include <stdexcept>
#include <string>

#include "pzkpfl/codec.hpp"

namespace pzkpfl::r1cs {
namespace {

constexpr uint32_t kCircuitVersion = 1;

Scalar pow2(unsigned i) { return Scalar::from_u64(uint64_t{1} << i); }  // i <= 63

void write_lc(codec::Writer& w, const LinearCombination& lc) {
  w.u32(static_cast<uint32_t>(lc.size()));
  for (const auto& t : lc) {
    w.u32(t.var);
    w.scalar(t.coeff);
  }
}

LinearCombination read_lc(codec::Reader& r, size_t num_vars) {
  const uint32_t n = r.u32();
  if (n > num_vars + 1) throw std::runtime_error("linear combination too long");
  LinearCombination lc;
  lc.reserve(n);
  for (uint32_t i = 0; i < n; ++i) {
    const uint32_t var = r.u32();
    if (var >= num_vars) throw std::runtime_error("variable index out of range");
    lc.push_back({var, r.scalar()});
  }
  return lc;
}

}  // namespace

Scalar evaluate_lc(const LinearCombination& lc, std::span<const Scalar> values) {
  Scalar acc;
  for (const auto& t : lc) acc += t.coeff * values[t.var];
  return acc;
}

Scalar embed(int64_t v) { return Scalar::from_i64(v); }

int64_t decode(const Scalar& s) {
  const auto v = s.to_i64();
  if (!v) throw std::overflow_error("field element does not decode to int64");
  return *v;
}

// ------------------------------------------------------------ ConstraintSystem

ConstraintSystem::ConstraintSystem(size_t num_public)
    : num_public_(num_public), num_variables_(num_public + 1) {}

uint32_t ConstraintSystem::alloc_witness() {
  if (num_variables_ >= std::numeric_limits<uint32_t>::max()) {
    throw std::length_error("too many variables");
  }
  return static_cast<uint32_t>(num_variables_++);
}

void ConstraintSystem::add(Constraint c) {
  for (const auto* lc : {&c.a, &c.b, &c.c}) {
    for (const auto& t : *lc) {
      if (t.var >= num_variables_) throw std::invalid_argument("constraint references unknown variable");
    }
  }
  constraints_.push_back(std::move(c));
}

void ConstraintSystem::bind_public_inputs() {
  for (uint32_t j = 0; j <= num_public_; ++j) {
    constraints_.push_back({{{j, Scalar::one()}}, {}, {}});
  }
}

void ConstraintSystem::validate_piece_shape() const {
  const size_t m = num_variables_ - 1;
  if (num_public_ < 1 || num_public_ % 2 != 0) {
    throw std::invalid_argument("statement size must be positive and even");
  }
  if (num_public_ >= m) throw std::invalid_argument("statement must leave room for a witness");
}

std::optional<size_t> ConstraintSystem::first_unsatisfied(std::span<const Scalar> values) const {
  if (values.size() != num_variables_) throw std::invalid_argument("assignment length mismatch");
  for (size_t k = 0; k < constraints_.size(); ++k) {
    const auto& c = constraints_[k];
    if (evaluate_lc(c.a, values) * evaluate_lc(c.b, values) != evaluate_lc(c.c, values)) return k;
  }
  return std::nullopt;
}

std::vector<uint8_t> ConstraintSystem::serialize() const {
  codec::Writer w;
  codec::write_header(w, "CIRC", kCircuitVersion);
  w.u64(num_public_);
  w.u64(num_variables_);
  w.u64(constraints_.size());
  for (const auto& c : constraints_) {
    write_lc(w, c.a);
    write_lc(w, c.b);
    write_lc(w, c.c);
  }
  return w.take();
}

ConstraintSystem ConstraintSystem::deserialize(std::span<const uint8_t> bytes) {
  codec::Reader r(bytes);
  codec::read_header(r, "CIRC", kCircuitVersion);
  const size_t l = r.count(1u << 24);
  const size_t vars = r.count(1u << 28);
  if (vars < l + 1) throw std::runtime_error("variable count below statement size");
  ConstraintSystem cs(l);
  cs.num_variables_ = vars;
  const size_t n = r.count(1u << 28);
  cs.constraints_.reserve(n);
  for (size_t k = 0; k < n; ++k) {
    Constraint c;
    c.a = read_lc(r, vars);
    c.b = read_lc(r, vars);
    c.c = read_lc(r, vars);
    cs.constraints_.push_back(std::move(c));
  }
  r.expect_done();
  return cs;
}

std::array<uint8_t, 32> ConstraintSystem::hash() const { return algebra::sha256(serialize()); }

// ------------------------------------------------------------ Assignment

std::vector<Scalar> Assignment::statement(size_t l) const {
  if (values.size() < l + 1) throw std::invalid_argument("assignment shorter than statement");
  return {values.begin() + 1, values.begin() + 1 + static_cast<std::ptrdiff_t>(l)};
}

std::vector<Scalar> Assignment::witness(size_t l) const {
  if (values.size() < l + 1) throw std::invalid_argument("assignment shorter than statement");
  return {values.begin() + 1 + static_cast<std::ptrdiff_t>(l), values.end()};
}

Assignment Assignment::from_parts(std::span<const Scalar> statement,
                                  std::span<const Scalar> witness) {
  Assignment a;
  a.values.reserve(1 + statement.size() + witness.size());
  a.values.push_back(Scalar::one());
  a.values.insert(a.values.end(), statement.begin(), statement.end());
  a.values.insert(a.values.end(), witness.begin(), witness.end());
  return a;
}

bool check_satisfied(const ConstraintSystem& cs, const Assignment& asg) {
  if (asg.values.size() != cs.num_variables()) throw std::invalid_argument("assignment length mismatch");
  if (asg.values[0] != Scalar::one()) return false;
  return !cs.first_unsatisfied(asg.values).has_value();
}

// ------------------------------------------------------------ piece synthesis

namespace {

using quantize::FixedExpr;
using quantize::FixedOp;
using quantize::PieceSpec;
using quantize::SymKind;

// Allocates variables and constraints for a PieceSpec; when a trace is given
// it also fills the assignment in the same order.
class PieceBuilder {
 public:
  PieceBuilder(const PieceSpec& spec, const quantize::FixedTrace* trace)
      : spec_(spec), trace_(trace), cs_(spec.statement_size()) {}

  void build(PieceStats* stats) {
    if (spec_.exprs.empty()) throw std::invalid_argument("piece has no expressions");
    if (spec_.inputs.empty() || spec_.inputs.size() != spec_.outputs.size()) {
      throw std::invalid_argument("public slot count odd: inputs and outputs must pair up");
    }
    if (trace_ && trace_->syms.size() != spec_.syms.size()) {
      throw std::invalid_argument("trace does not match piece");
    }
    const size_t half = spec_.inputs.size();
    const size_t l = 2 * half;
    values_.assign(l + 1, Scalar());
    values_[0] = Scalar::one();

    var_of_.assign(spec_.syms.size(), kUnmapped);
    for (size_t j = 0; j < half; ++j) {
      const uint32_t s = spec_.inputs[j];
      if (spec_.syms.at(s).kind != SymKind::kInput) throw std::invalid_argument("input slot is not an input symbol");
      var_of_[s] = static_cast<uint32_t>(1 + j);
      set(1 + j, value(s));
    }
    // Outputs produced directly by an expression occupy their statement slot.
    std::vector<bool> needs_copy(half, false);
    for (size_t j = 0; j < half; ++j) {
      const uint32_t s = spec_.outputs[j];
      if (spec_.syms.at(s).kind == SymKind::kInternal && var_of_[s] == kUnmapped) {
        var_of_[s] = static_cast<uint32_t>(1 + half + j);
        set(1 + half + j, value(s));
      } else {
        needs_copy[j] = true;
      }
    }
    for (size_t s = 0; s < spec_.syms.size(); ++s) {
      const auto kind = spec_.syms[s].kind;
      if (var_of_[s] != kUnmapped || kind == SymKind::kConst) continue;
      if (kind == SymKind::kInput) throw std::invalid_argument("input symbol outside the statement");
      var_of_[s] = alloc(value(s));
    }

    size_t expressions = 0;
    for (const FixedExpr& e : spec_.exprs) {
      emit(e);
      ++expressions;
    }
    for (size_t j = 0; j < half; ++j) {
      if (!needs_copy[j]) continue;
      const uint32_t slot = static_cast<uint32_t>(1 + half + j);
      set(slot, value(spec_.outputs[j]));
      cs_.add({lc(spec_.outputs[j]), one(), {{slot, Scalar::one()}}});
      ++expressions;
    }
    const size_t before = cs_.num_constraints();
    cs_.bind_public_inputs();
    if (stats) {
      stats->expressions = expressions;
      stats->range_bits = range_bits_;
      stats->range_checks = range_checks_;
      stats->binding = cs_.num_constraints() - before;
    }
    cs_.validate_piece_shape();
  }

  ConstraintSystem take_cs() { return std::move(cs_); }
  Assignment take_assignment() { return {std::move(values_)}; }

 private:
  static constexpr uint32_t kUnmapped = std::numeric_limits<uint32_t>::max();

  int64_t value(uint32_t sym) const { return trace_ ? trace_->syms.at(sym) : 0; }

  void set(size_t var, int64_t v) {
    if (trace_) values_[var] = embed(v);
  }

  uint32_t alloc(int64_t v) {
    const uint32_t var = cs_.alloc_witness();
    values_.push_back(trace_ ? embed(v) : Scalar());
    return var;
  }

  uint32_t alloc_scalar(const Scalar& v) {
    const uint32_t var = cs_.alloc_witness();
    values_.push_back(v);
    return var;
  }

  static LinearCombination one() { return {{0, Scalar::one()}}; }

  LinearCombination lc(uint32_t sym, const Scalar& coeff = Scalar::one()) const {
    if (sym >= spec_.syms.size()) throw std::invalid_argument("expression operand out of range");
    if (spec_.syms[sym].kind == SymKind::kConst) return {{0, coeff * embed(spec_.syms[sym].value)}};
    return {{var_of_[sym], coeff}};
  }

  static void append(LinearCombination& dst, const LinearCombination& src) {
    dst.insert(dst.end(), src.begin(), src.end());
  }

  // x = sum(coeff * var) + offset must lie in [0, 2^width).
  void range_check(LinearCombination x, __int128 x_value, unsigned width) {
    if (width == 0 || width > 64) throw std::invalid_argument("unsupported range width");
    if (trace_ && (x_value < 0 || (width < 64 && x_value >= (static_cast<__int128>(1) << width)) ||
                   (width == 64 && x_value > static_cast<__int128>(UINT64_MAX)))) {
      throw std::invalid_argument("range check violated: value outside [0, 2^" +
                                  std::to_string(width) + ")");
    }
    const auto bits = static_cast<unsigned __int128>(x_value);
    LinearCombination packed;
    for (unsigned i = 0; i < width; ++i) {
      const bool bit = trace_ && ((bits >> i) & 1);
      const uint32_t b = alloc_scalar(bit ? Scalar::one() : Scalar());
      cs_.add({{{b, Scalar::one()}}, {{b, Scalar::one()}}, {{b, Scalar::one()}}});
      packed.push_back({b, pow2(i)});
    }
    cs_.add({std::move(packed), one(), std::move(x)});
    range_bits_ += width;
    ++range_checks_;
  }

  void emit(const FixedExpr& e) {
    switch (e.op) {
      case FixedOp::kAdd:
      case FixedOp::kSub: {
        LinearCombination a = lc(e.a);
        append(a, lc(e.b, e.op == FixedOp::kAdd ? Scalar::one() : -Scalar::one()));
        cs_.add({std::move(a), one(), lc(e.out)});
        break;
      }
      case FixedOp::kMul:
        cs_.add({lc(e.a), lc(e.b), lc(e.out)});
        break;
      case FixedOp::kRescale: {
        if (e.div <= 0) throw std::invalid_argument("rescale divisor must be positive");
        // div * out + rem - num * a = 0
        LinearCombination a = lc(e.out, embed(e.div));
        append(a, lc(e.rem));
        append(a, lc(e.a, -embed(e.num)));
        cs_.add({std::move(a), one(), {}});
        const int64_t half = e.div / 2;
        const auto width = static_cast<unsigned>(std::bit_width(static_cast<uint64_t>(e.div - 1)));
        const __int128 rem = value(e.rem);
        if (width > 0) {
          LinearCombination lo = lc(e.rem);
          lo.push_back({0, embed(half)});
          range_check(std::move(lo), rem + half, width);
          LinearCombination hi = lc(e.rem, -Scalar::one());
          hi.push_back({0, embed(e.div - 1 - half)});
          range_check(std::move(hi), static_cast<__int128>(e.div - 1 - half) - rem, width);
        } else {
          cs_.add({lc(e.rem), one(), {}});  // div == 1 forces rem == 0
        }
        LinearCombination q = lc(e.out);
        q.push_back({0, pow2(63)});
        range_check(std::move(q), static_cast<__int128>(value(e.out)) + (static_cast<__int128>(1) << 63), 64);
        break;
      }
      case FixedOp::kRecip: {
        // a * out = num - rem, 0 <= rem < a, out >= 0
        LinearCombination c = lc(e.rem, -Scalar::one());
        c.push_back({0, embed(e.num)});
        cs_.add({lc(e.a), lc(e.out), std::move(c)});
        const __int128 a = value(e.a), rem = value(e.rem);
        range_check(lc(e.rem), rem, 64);
        LinearCombination gap = lc(e.a);
        append(gap, lc(e.rem, -Scalar::one()));
        gap.push_back({0, -Scalar::one()});
        range_check(std::move(gap), a - 1 - rem, 64);
        range_check(lc(e.out), value(e.out), 64);
        break;
      }
      default:
        throw std::invalid_argument("non-quadratic or unknown expression");
    }
  }

  const PieceSpec& spec_;
  const quantize::FixedTrace* trace_;
  ConstraintSystem cs_;
  std::vector<Scalar> values_;
  std::vector<uint32_t> var_of_;
  size_t range_bits_ = 0;
  size_t range_checks_ = 0;
};

}  // namespace

ConstraintSystem synthesize_piece(const PieceSpec& spec, PieceStats* stats) {
  PieceBuilder b(spec, nullptr);
  b.build(stats);
  return b.take_cs();
}

Assignment assign_piece(const quantize::FixedTrace& trace) {
  PieceBuilder b(*trace.spec, &trace);
  b.build(nullptr);
  return b.take_assignment();
}

}  // namespace pzkpfl::r1cs
