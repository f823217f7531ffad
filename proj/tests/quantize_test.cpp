// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "pzkpfl/quantize.hpp"
#include "pzkpfl/rng.hpp"

namespace pzkpfl::quantize {
namespace {

using algebra::Rng;

// Independent rounding oracle: nearest, ties toward +inf, from the floor
// quotient and remainder.
int64_t oracle_round(__int128 n, int64_t d) {
  __int128 q = n / d;
  __int128 r = n % d;
  if (r < 0) {
    q -= 1;
    r += d;
  }
  if (2 * r >= d) q += 1;
  return static_cast<int64_t>(q);
}

FixedTrace run(const Program& p, int rat, std::vector<double> in, std::vector<double> data = {}) {
  return scale_trace(p, rat, in, data);
}

TEST(ScaleTrace, ExactAddition) {
  Program p;
  const auto a = p.input(), b = p.input();
  p.output(p.add(a, b));
  const auto t = run(p, 7, {0.5, 0.25});
  EXPECT_EQ(t.outputs().front(), 7'500'000);
  EXPECT_TRUE(check_trace(t));
}

TEST(ScaleTrace, MultiplicationIsRescaled) {
  Program p;
  const auto a = p.input(), b = p.input();
  p.output(p.mul(a, b));
  const auto t = run(p, 7, {0.5, 0.5});
  ASSERT_EQ(t.exprs().size(), 2u);
  EXPECT_EQ(t.exprs()[0].op, FixedOp::kMul);
  EXPECT_EQ(t.syms[t.exprs()[0].out], 25'000'000'000'000);
  EXPECT_EQ(t.exprs()[1].op, FixedOp::kRescale);
  EXPECT_EQ(t.outputs().front(), 2'500'000);
  EXPECT_EQ(t.syms[t.exprs()[1].rem], 0);
}

TEST(ScaleTrace, SignedRescale) {
  Program p;
  const auto a = p.input(), b = p.input();
  p.output(p.mul(a, b));
  const auto t = run(p, 7, {-0.3, 0.2});
  EXPECT_EQ(t.outputs().front(), -600'000);
  EXPECT_EQ(t.syms[t.exprs()[1].rem], 0);
}

TEST(ScaleTrace, RescaleMatchesIntegerOracleWithBoundedRemainder) {
  Rng rng(11);
  Program p;
  const auto a = p.input(), b = p.input();
  p.output(p.scale_mul(a, b, Ratio{-3, 7}));
  auto spec = std::make_shared<const PieceSpec>(lower(p, 6));
  const int64_t D = pow10(6);
  for (int i = 0; i < 500; ++i) {
    const int64_t x = static_cast<int64_t>(rng.uniform(4'000'000)) - 2'000'000;
    const int64_t y = static_cast<int64_t>(rng.uniform(4'000'000)) - 2'000'000;
    const int64_t in[2] = {x, y};
    const auto t = evaluate(spec, in, {});
    const __int128 prod = static_cast<__int128>(x) * y * -3;
    const int64_t div = D * 7;
    EXPECT_EQ(t.outputs().front(), oracle_round(prod, div));
    const int64_t rem = t.syms[spec->exprs.back().rem];
    EXPECT_LE(-div / 2, rem);
    EXPECT_LT(rem, div - div / 2);
    EXPECT_TRUE(check_trace(t));
  }
}

TEST(ScaleTrace, OverflowInProductIsReported) {
  Program p;
  const auto a = p.input(), b = p.input();
  p.output(p.mul(a, b));
  auto spec = std::make_shared<const PieceSpec>(lower(p, 7));
  const int64_t in[2] = {int64_t{4} << 40, int64_t{4} << 40};
  EXPECT_THROW(evaluate(spec, in, {}), std::overflow_error);
}

TEST(ScaleTrace, GuardAndReciprocalDomain) {
  Program p;
  const auto a = p.input();
  p.guard(a, -1.0, 1.0, "a");
  p.output(p.recip(a));
  auto spec = std::make_shared<const PieceSpec>(lower(p, 4));
  const int64_t big[1] = {20'000};
  EXPECT_THROW(evaluate(spec, big, {}), std::domain_error);
  const int64_t zero[1] = {0};
  EXPECT_THROW(evaluate(spec, zero, {}), std::domain_error);
  const int64_t q[1] = {3'000};  // 1 / 0.3
  const auto t = evaluate(spec, q, {});
  EXPECT_EQ(t.outputs().front(), 100'000'000 / 3'000);
  EXPECT_TRUE(check_trace(t));
}

TEST(ScaleTrace, CheckTraceRejectsEditedValue) {
  Program p;
  const auto a = p.input(), b = p.input();
  p.output(p.mul(a, b));
  auto t = run(p, 7, {0.5, 0.5});
  t.syms[t.spec->outputs.front()] += 1;
  EXPECT_FALSE(check_trace(t));
}

TEST(ScaleTrace, SerializationRoundTrip) {
  Program p;
  const auto a = p.input(), x = p.data();
  p.output(p.sub(a, p.mul(a, x)));
  const auto t = run(p, 7, {0.75}, {-0.125});
  const auto bytes = serialize_trace(t);
  const auto back = deserialize_trace(bytes);
  EXPECT_EQ(back.rat, t.rat);
  EXPECT_EQ(back.syms, t.syms);
  EXPECT_EQ(back.outputs(), t.outputs());
  auto broken = bytes;
  broken.pop_back();
  EXPECT_THROW(deserialize_trace(broken), std::runtime_error);
}

TEST(ComputeRatio, ArgmaxAgainstInt64Bounds) {
  const double v1[] = {3.2, -1.5};
  EXPECT_EQ(compute_ratio(v1), 18);
  // 1000 * 10^15 <= 2^63 - 1 < 1000 * 10^16.
  const double v2[] = {1000.0, -1.0};
  EXPECT_EQ(compute_ratio(v2), 15);
  // Negative side dominates: -50000 * 10^14 >= -2^63 > -50000 * 10^15.
  const double v3[] = {1.0, -50000.0};
  EXPECT_EQ(compute_ratio(v3), 14);
  for (int r = 0; r <= 18; ++r) {
    // Brute-force oracle over a sweep of magnitudes.
    const double m = std::ldexp(1.0, 3 * r);
    const double vals[] = {m, -m};
    const int got = compute_ratio(vals);
    const long double lim = 9223372036854775807.0L;
    int want = 0;
    for (int k = 0; k <= 18; ++k) {
      if (static_cast<long double>(m) * std::pow(10.0L, k) <= lim) want = k;
    }
    EXPECT_EQ(got, want) << m;
  }
}

TEST(ComputeRatio, AllZeroIsCapped) {
  const double z[] = {0.0, 0.0};
  EXPECT_EQ(compute_ratio(z), 18);
  EXPECT_EQ(compute_ratio(z, 9), 9);
}

TEST(ComputeRatio, OverflowAtZeroThrows) {
  const double v[] = {1e19};
  EXPECT_THROW(compute_ratio(v), std::overflow_error);
  const double empty[] = {0.0};
  EXPECT_NO_THROW(compute_ratio(std::span<const double>(empty, 1)));
  EXPECT_THROW(compute_ratio(std::span<const double>{}), std::invalid_argument);
}

TEST(ComputeRatio, DefaultExpansionRatio) { EXPECT_EQ(pow10(7), 10'000'000); }

TEST(Taylor, SigmoidAtZeroIsExactlyHalf) {
  for (int order = 0; order <= 8; ++order) EXPECT_EQ(taylor_eval("sigmoid", order, 0.0), 0.5);
  const double pts[] = {0.0};
  EXPECT_EQ(taylor_select("sigmoid", pts, 1e-4).order, 0);
}

TEST(Taylor, FifthOrderAtHalf) {
  const double err = std::fabs(taylor_eval("sigmoid", 5, 0.5) - exact_eval("sigmoid", 0.5));
  EXPECT_LT(err, 1e-5);
  EXPECT_GT(err, 1e-6);
  const double pts[] = {0.5};
  const auto a = taylor_select("sigmoid", pts, 1e-4);
  EXPECT_LE(a.order, 5);
  EXPECT_LE(a.max_error, 1e-4);
}

TEST(Taylor, SelectionIsMinimal) {
  std::vector<double> pts;
  for (int i = -10; i <= 10; ++i) pts.push_back(i * 0.1);
  const auto a = taylor_select("sigmoid", pts, 1e-4);
  // Oracle: smallest order whose worst-case error meets E.
  int want = 0;
  for (;; ++want) {
    double worst = 0;
    for (double x : pts) worst = std::max(worst, std::fabs(taylor_eval("sigmoid", want, x) - 1 / (1 + std::exp(-x))));
    if (worst <= 1e-4) break;
  }
  EXPECT_EQ(a.order, want);
  EXPECT_GT(a.order, 5);  // x = 1 needs more than the fifth order
  EXPECT_DOUBLE_EQ(a.domain, 1.0);
}

TEST(Taylor, CeilingAndBadArguments) {
  const double pts[] = {8.0};
  EXPECT_THROW(taylor_select("sigmoid", pts, 1e-12, 1e9, 4), std::runtime_error);
  EXPECT_THROW(taylor_select("sigmoid", pts, 0.0), std::invalid_argument);
  EXPECT_THROW(taylor_select("tanh", pts, 1e-4), std::invalid_argument);
  EXPECT_THROW(make_taylor("sigmoid", 21), std::invalid_argument);
}

TEST(Taylor, CoefficientsAreInverseFactorials) {
  const auto a = make_taylor("exp", 5);
  ASSERT_EQ(a.coefficients.size(), 6u);
  EXPECT_EQ(a.coefficients[5].den, 120);
  EXPECT_EQ(a.coefficients[5].num, 1);
}

TEST(ApproxEval, FixedPointSigmoid) {
  const double pts[] = {-0.5, 0.5};
  const auto a = taylor_select("sigmoid", pts, 1e-4);
  const int rat = 7;
  EXPECT_EQ(approx_eval(a, 0, rat), 5'000'000);
  const auto five = [&] {
    auto t = make_taylor("sigmoid", 5);
    t.domain = 0.5;
    return t;
  }();
  const int64_t half = to_fixed(0.5, rat);
  EXPECT_LE(std::llabs(approx_eval(five, half, rat) - to_fixed(exact_eval("sigmoid", 0.5), rat)),
            1'000);
  EXPECT_THROW(approx_eval(a, half + 1, rat), std::domain_error);
  // Sweep: fixed point tracks the float reference within E.
  for (int i = -50; i <= 50; ++i) {
    const int64_t x = half * i / 50;
    const double got = from_fixed(approx_eval(a, x, rat), rat);
    EXPECT_LE(std::fabs(got - exact_eval("sigmoid", from_fixed(x, rat))), 1e-4) << i;
  }
}

TEST(Conversions, FixedRoundTripAndRatio) {
  EXPECT_EQ(to_fixed(-0.06, 7), -600'000);
  EXPECT_DOUBLE_EQ(from_fixed(2'500'000, 7), 0.25);
  const auto r = ratio_from_decimal(0.05);
  EXPECT_EQ(r.num, 1);
  EXPECT_EQ(r.den, 20);
  EXPECT_EQ(div_round(-5, 10), 0);
  EXPECT_EQ(div_round(-6, 10), -1);
  EXPECT_EQ(div_round(5, 10), 1);
  EXPECT_THROW(pow10(19), std::invalid_argument);
}

TEST(ScaleFidelity, FixedTracksFloatWithinAccumulationBound) {
  // Ten chained multiply-adds; the fixed trace stays within m * 10^-rat.
  Rng rng(12);
  Program p;
  auto acc = p.input();
  for (int i = 0; i < 10; ++i) acc = p.add(p.mul(acc, p.data()), p.constant(0.1));
  p.output(acc);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> d;
    for (int i = 0; i < 10; ++i) d.push_back((static_cast<double>(rng.uniform(2000)) - 1000) / 1000);
    const std::vector<double> in{0.3};
    const auto t = run(p, 7, in, d);
    const double fl = p.eval_outputs(in, d).front();
    EXPECT_LE(std::fabs(from_fixed(t.outputs().front(), 7) - fl), 20 * 1e-7);
  }
}

}  // namespace
}  // namespace pzkpfl::quantize
