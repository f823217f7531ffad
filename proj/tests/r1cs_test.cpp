// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <bit>

#include "pzkpfl/qap.hpp"
#include "pzkpfl/r1cs.hpp"
#include "pzkpfl/rng.hpp"

namespace pzkpfl::r1cs {
namespace {

using algebra::Rng;
using quantize::FixedExpr;
using quantize::FixedOp;
using quantize::PieceSpec;
using quantize::SymKind;

// x * x = y with a dummy public input: syms 0 = dummy, 1 = x, 2 = y.
std::shared_ptr<const PieceSpec> square_spec() {
  auto s = std::make_shared<PieceSpec>();
  s->syms = {{SymKind::kInput}, {SymKind::kData}, {SymKind::kInternal}};
  FixedExpr e{FixedOp::kMul};
  e.a = 1;
  e.b = 1;
  e.out = 2;
  s->exprs = {e};
  s->inputs = {0};
  s->data = {1};
  s->outputs = {2};
  return s;
}

// Variables: a0 = 1, a1 = dummy, a2 = y, a3 = x.
Assignment square_assignment(int64_t x, int64_t y) {
  return {{Scalar::one(), Scalar::zero(), embed(y), embed(x)}};
}

// Schoolbook long division; returns the remainder.
Polynomial poly_rem(Polynomial num, Polynomial den) {
  poly_trim(num);
  poly_trim(den);
  if (den.empty()) throw std::invalid_argument("division by zero polynomial");
  const Scalar lead_inv = den.back().inverse();
  while (num.size() >= den.size()) {
    const Scalar f = num.back() * lead_inv;
    const size_t shift = num.size() - den.size();
    for (size_t i = 0; i < den.size(); ++i) num[shift + i] -= f * den[i];
    num.pop_back();
    poly_trim(num);
  }
  return num;
}

// p(X) = (sum a_i u_i)(sum a_i v_i) - sum a_i w_i from coefficient forms.
Polynomial qap_p(const QapInstance& q, std::span<const Scalar> a) {
  Polynomial A, B, C;
  for (size_t i = 0; i < a.size(); ++i) {
    const auto scale_add = [&](Polynomial& acc, const Polynomial& p) {
      if (acc.size() < p.size()) acc.resize(p.size());
      for (size_t k = 0; k < p.size(); ++k) acc[k] += a[i] * p[k];
    };
    scale_add(A, q.u(i));
    scale_add(B, q.v(i));
    scale_add(C, q.w(i));
  }
  return poly_sub(poly_mul(A, B), C);
}

bool divisible(const QapInstance& q, std::span<const Scalar> a) {
  return poly_rem(qap_p(q, a), q.t()).empty();
}

TEST(Synthesize, MinimalSquareCircuit) {
  PieceStats st;
  const auto cs = synthesize_piece(*square_spec(), &st);
  EXPECT_EQ(cs.num_public(), 2u);
  EXPECT_EQ(st.expressions, 1u);
  EXPECT_EQ(st.range_checks, 0u);
  EXPECT_EQ(st.binding, 3u);
  EXPECT_EQ(cs.num_constraints(), 4u);
  EXPECT_EQ(cs.num_variables(), 4u);
}

TEST(Synthesize, EmptyExpressionListRejected) {
  auto s = std::make_shared<PieceSpec>(*square_spec());
  s->exprs.clear();
  EXPECT_THROW(synthesize_piece(*s), std::invalid_argument);
}

TEST(Synthesize, UnpairedPublicSlotsRejected) {
  auto s = std::make_shared<PieceSpec>(*square_spec());
  s->outputs.push_back(1);
  EXPECT_THROW(synthesize_piece(*s), std::invalid_argument);
}

TEST(Synthesize, GradientStepCountMatchesFlatteningOracle) {
  // w' = w - lr * (w * x - y) * x for a single-feature linear model.
  quantize::Program p;
  const auto w = p.input();
  const auto x = p.data(), y = p.data();
  const auto err = p.sub(p.mul(w, x), y);
  p.output(p.sub(w, p.scale_mul(err, x, quantize::Ratio{1, 20})));
  const auto spec = quantize::lower(p, 7);
  // Oracle: count rows per lowered expression.
  size_t want = 0;
  for (const auto& e : spec.exprs) {
    switch (e.op) {
      case FixedOp::kAdd:
      case FixedOp::kSub:
      case FixedOp::kMul:
        want += 1;
        break;
      case FixedOp::kRescale: {
        const size_t width = std::bit_width(static_cast<uint64_t>(e.div - 1));
        want += 1 + 2 * (width + 1) + 65;
        break;
      }
      case FixedOp::kRecip:
        want += 1 + 3 * 65;
        break;
    }
  }
  want += spec.statement_size() + 1;
  PieceStats st;
  const auto cs = synthesize_piece(spec, &st);
  EXPECT_EQ(st.expressions, spec.exprs.size());
  EXPECT_EQ(cs.num_constraints(), want);
}

TEST(Synthesize, HonestTraceSatisfiesAndEditsDoNot) {
  quantize::Program p;
  const auto w = p.input();
  const auto x = p.data();
  p.output(p.recip(p.add(p.constant(1.0), p.mul(w, x))));
  const auto t = quantize::scale_trace(p, 7, std::vector<double>{0.4}, std::vector<double>{-0.3});
  const auto cs = synthesize_piece(*t.spec);
  const auto asg = assign_piece(t);
  EXPECT_TRUE(check_satisfied(cs, asg));
  for (size_t i = 1; i < asg.values.size(); i += 7) {
    auto bad = asg;
    bad.values[i] += Scalar::one();
    EXPECT_FALSE(check_satisfied(cs, bad)) << i;
  }
  // A trace whose remainder leaves its range cannot be assigned.
  auto forged = t;
  const auto& rs = forged.spec->exprs[1];
  ASSERT_EQ(rs.op, FixedOp::kRescale);
  forged.syms[rs.out] += 1;
  forged.syms[rs.rem] -= rs.div;
  EXPECT_THROW(assign_piece(forged), std::invalid_argument);
}

TEST(CheckSatisfied, DirectEvaluation) {
  const auto cs = synthesize_piece(*square_spec());
  EXPECT_TRUE(check_satisfied(cs, square_assignment(3, 9)));
  EXPECT_FALSE(check_satisfied(cs, square_assignment(3, 8)));
  auto no_one = square_assignment(3, 9);
  no_one.values[0] = Scalar::from_u64(2);
  EXPECT_FALSE(check_satisfied(cs, no_one));
  EXPECT_THROW(check_satisfied(cs, Assignment{{Scalar::one()}}), std::invalid_argument);
}

TEST(CheckSatisfied, ConstantOneConstraint) {
  // 1 * 1 = a_1, with a_1 = 1 and an all-zero witness.
  ConstraintSystem cs(1);
  cs.alloc_witness();
  cs.add({{{0, Scalar::one()}}, {{0, Scalar::one()}}, {{1, Scalar::one()}}});
  EXPECT_TRUE(check_satisfied(cs, Assignment{{Scalar::one(), Scalar::one(), Scalar::zero()}}));
  EXPECT_THROW(cs.add({{{9, Scalar::one()}}, {}, {}}), std::invalid_argument);
}

TEST(Qap, SatisfyingAssignmentIsDivisible) {
  const auto q = to_qap(synthesize_piece(*square_spec()));
  EXPECT_TRUE(divisible(q, square_assignment(3, 9).values));
  EXPECT_TRUE(q.is_satisfied(square_assignment(3, 9).values));
}

TEST(Qap, UnsatisfyingAssignmentLeavesRemainder) {
  const auto q = to_qap(synthesize_piece(*square_spec()));
  EXPECT_FALSE(divisible(q, square_assignment(3, 10).values));
  EXPECT_THROW(q.compute_h(square_assignment(3, 10).values), std::invalid_argument);
}

TEST(Qap, ZeroConstraintsGiveUnitT) {
  ConstraintSystem cs(2);
  cs.alloc_witness();
  const auto q = to_qap(cs);
  EXPECT_EQ(q.t(), Polynomial{Scalar::one()});
  EXPECT_TRUE(q.compute_h(std::vector<Scalar>(4, Scalar::one())).empty());
}

TEST(Qap, DegreesBelowT) {
  const auto q = to_qap(synthesize_piece(*square_spec()));
  const size_t deg_t = q.t().size() - 1;
  for (size_t i = 0; i < q.num_variables(); ++i) {
    EXPECT_LT(q.u(i).size(), deg_t + 1);
    EXPECT_LT(q.v(i).size(), deg_t + 1);
    EXPECT_LT(q.w(i).size(), deg_t + 1);
  }
}

TEST(Qap, QuotientMatchesLongDivision) {
  const auto q = to_qap(synthesize_piece(*square_spec()));
  const auto a = square_assignment(5, 25).values;
  auto h = q.compute_h(a);
  // p = h * t exactly.
  auto lhs = qap_p(q, a);
  auto rhs = poly_mul(h, q.t());
  poly_trim(lhs);
  poly_trim(rhs);
  EXPECT_EQ(lhs, rhs);
}

TEST(Qap, EvaluateAtMatchesCoefficientForms) {
  Rng rng(21);
  const auto q = to_qap(synthesize_piece(*square_spec()));
  const Scalar x = Scalar::random(rng);
  const auto ev = q.evaluate_at(x);
  for (size_t i = 0; i < q.num_variables(); ++i) {
    EXPECT_EQ(ev.u[i], poly_eval(q.u(i), x));
    EXPECT_EQ(ev.v[i], poly_eval(q.v(i), x));
    EXPECT_EQ(ev.w[i], poly_eval(q.w(i), x));
  }
  EXPECT_EQ(ev.t, poly_eval(q.t(), x));
}

// Exhaustive check over tiny random circuits with small assignments:
// satisfaction and divisibility agree.
TEST(Qap, SoundnessExhaustiveSmallCircuits) {
  Rng rng(22);
  for (int circuit = 0; circuit < 12; ++circuit) {
    ConstraintSystem cs(2);
    cs.alloc_witness();
    const size_t rows = 1 + rng.uniform(10);
    const auto rand_lc = [&] {
      LinearCombination lc;
      for (uint32_t v = 0; v < 4; ++v) {
        if (rng.uniform(2)) lc.push_back({v, Scalar::from_i64(static_cast<int64_t>(rng.uniform(5)) - 2)});
      }
      return lc;
    };
    for (size_t k = 0; k < rows; ++k) cs.add({rand_lc(), rand_lc(), rand_lc()});
    const auto q = to_qap(cs);
    for (int a1 = 0; a1 < 4; ++a1) {
      for (int a2 = 0; a2 < 4; ++a2) {
        for (int a3 = 0; a3 < 4; ++a3) {
          const Assignment asg{{Scalar::one(), Scalar::from_u64(a1), Scalar::from_u64(a2),
                                Scalar::from_u64(a3)}};
          const bool s = check_satisfied(cs, asg);
          ASSERT_EQ(s, divisible(q, asg.values)) << circuit;
        }
      }
    }
  }
}

TEST(Assignment, StatementSplitIgnoresWitnessOrder) {
  Rng rng(23);
  std::vector<Scalar> phi{Scalar::random(rng), Scalar::random(rng)};
  std::vector<Scalar> w{Scalar::random(rng), Scalar::random(rng), Scalar::random(rng)};
  const auto a = Assignment::from_parts(phi, w);
  std::swap(w[0], w[2]);
  const auto b = Assignment::from_parts(phi, w);
  EXPECT_EQ(a.statement(2), phi);
  EXPECT_EQ(a.statement(2), b.statement(2));
  EXPECT_EQ(a.witness(2).size(), 3u);
  EXPECT_EQ(a.values[0], Scalar::one());
}

TEST(Circuit, SerializationRoundTripAndHash) {
  const auto cs = synthesize_piece(*square_spec());
  const auto bytes = cs.serialize();
  const auto back = ConstraintSystem::deserialize(bytes);
  EXPECT_EQ(back.serialize(), bytes);
  EXPECT_EQ(back.hash(), cs.hash());
  auto bad = bytes;
  bad[0] ^= 1;
  EXPECT_THROW(ConstraintSystem::deserialize(bad), std::runtime_error);
  bad = bytes;
  bad.resize(bytes.size() - 3);
  EXPECT_THROW(ConstraintSystem::deserialize(bad), std::runtime_error);
}

TEST(Embedding, SignedRoundTrip) {
  for (int64_t v : {int64_t{0}, int64_t{-1}, int64_t{42}, INT64_MIN, INT64_MAX}) EXPECT_EQ(decode(embed(v)), v);
  EXPECT_THROW(decode(Scalar::from_u64(UINT64_MAX)), std::overflow_error);
}

TEST(Domain, RootOfUnityConstant) {
  const Scalar w = EvaluationDomain::root_of_unity_2_32();
  EXPECT_EQ(w.to_hex(), "16a2a19edfe81f20d09b681922c813b4b63683508c2280b93829971f439f0d2b");
  // Primitive: w^(2^32) = 1, w^(2^31) = -1.
  Scalar x = w;
  for (int i = 0; i < 31; ++i) x *= x;
  EXPECT_EQ(x, -Scalar::one());
  EXPECT_EQ(x * x, Scalar::one());
}

TEST(Domain, NttMatchesNaiveEvaluation) {
  Rng rng(24);
  for (size_t n : {1u, 2u, 8u, 32u}) {
    const EvaluationDomain d(n);
    Polynomial p(n);
    for (auto& c : p) c = Scalar::random(rng);
    auto e = p;
    d.ntt(e);
    for (size_t k = 0; k < n; ++k) EXPECT_EQ(e[k], poly_eval(p, d.element(k)));
    d.intt(e);
    EXPECT_EQ(e, p);
    auto c = p;
    d.coset_ntt(c);
    for (size_t k = 0; k < n; ++k) {
      EXPECT_EQ(c[k], poly_eval(p, EvaluationDomain::coset_generator() * d.element(k)));
    }
    d.coset_intt(c);
    EXPECT_EQ(c, p);
  }
  EXPECT_EQ(EvaluationDomain(5).size(), 8u);
}

TEST(Domain, LagrangeBasis) {
  Rng rng(25);
  const EvaluationDomain d(8);
  const Scalar x = Scalar::random(rng);
  const auto lag = d.lagrange_at(x);
  Polynomial p(8);
  for (auto& c : p) c = Scalar::random(rng);
  auto evals = p;
  d.ntt(evals);
  Scalar interp;
  for (size_t k = 0; k < 8; ++k) interp += lag[k] * evals[k];
  EXPECT_EQ(interp, poly_eval(p, x));
  const auto ind = d.lagrange_at(d.element(3));
  for (size_t k = 0; k < 8; ++k) EXPECT_EQ(ind[k], k == 3 ? Scalar::one() : Scalar::zero());
}

}  // namespace
}  // namespace pzkpfl::r1cs
