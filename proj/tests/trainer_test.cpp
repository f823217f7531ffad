// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pzkpfl/trainer.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "pzkpfl/groth16.hpp"
#include "pzkpfl/r1cs.hpp"

namespace pzkpfl::trainer {
namespace {

using algebra::Rng;

const std::filesystem::path kData = PZKPFL_DATA_DIR;

const Dataset& iris() {
  static const Dataset d = load_csv(kData / "iris_binary.csv");
  return d;
}

const Dataset& house() {
  static const Dataset d = load_csv(kData / "house_price.csv");
  return d;
}

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << body;
  return p;
}

TEST(Split, PaperAndDeskPieceCounts) {
  EXPECT_EQ(total_steps(75, 1200), 90'000u);
  const auto reference_scale = split(logistic_task(), 75, 1200, 0, 7);
  EXPECT_EQ(reference_scale.q, 90'000u);
  EXPECT_EQ(reference_scale.steps_per_piece, 1u);
  const auto desk = split(logistic_task(), 8, 10, 0, 7);
  EXPECT_EQ(desk.q, 80u);
  const auto halves = split(regression_task(), 8, 10, 40, 7);
  EXPECT_EQ(halves.steps_per_piece, 2u);
}

TEST(Split, PieceCountMustDivideSteps) {
  EXPECT_THROW(split(logistic_task(), 8, 10, 7, 7), std::invalid_argument);
  EXPECT_THROW(split(logistic_task(), 8, 10, 160, 7), std::invalid_argument);
  EXPECT_THROW(split(logistic_task(), 0, 10, 0, 7), std::invalid_argument);
}

TEST(Split, StatementShape) {
  const auto lg = split(logistic_task(), 8, 10, 0, 7);
  EXPECT_EQ(lg.spec->inputs.size(), 5u);
  EXPECT_EQ(lg.spec->outputs.size(), 5u);
  EXPECT_EQ(lg.spec->data.size(), 5u);  // 4 features + label
  const auto rg = split(regression_task(1), 8, 10, 20, 7);
  EXPECT_EQ(rg.spec->statement_size(), 4u);
  EXPECT_EQ(rg.spec->data.size(), 4u * 2);
}

TEST(Split, ConstraintCountScalesWithPieceSize) {
  const auto one = r1cs::synthesize_piece(*split(regression_task(), 8, 10, 80, 7).spec).num_constraints();
  const auto two = r1cs::synthesize_piece(*split(regression_task(), 8, 10, 40, 7).spec).num_constraints();
  EXPECT_NEAR(static_cast<double>(two) / static_cast<double>(one), 2.0, 0.1);
}

TEST(Csv, LoadsBundledData) {
  EXPECT_EQ(iris().features(), 4u);
  EXPECT_EQ(iris().size(), 100u);
  EXPECT_EQ(house().features(), 2u);
  EXPECT_EQ(house().size(), 40u);
  const auto r = iris().rows(10, 5);
  EXPECT_EQ(r.size(), 5u);
  EXPECT_EQ(r.x[0], iris().x[10]);
  EXPECT_THROW(iris().rows(99, 2), std::out_of_range);
}

TEST(Csv, RejectsMalformedFiles) {
  EXPECT_THROW(load_csv("/nonexistent/file.csv"), std::runtime_error);
  EXPECT_THROW(load_csv(temp_file("pz_cols.csv", "a,b,y\n1,2,3\n1,2\n")), std::runtime_error);
  EXPECT_THROW(load_csv(temp_file("pz_nan.csv", "a,y\n1,x\n")), std::runtime_error);
  EXPECT_THROW(load_csv(temp_file("pz_hdr.csv", "y\n1\n")), std::runtime_error);
  const auto ok = load_csv(temp_file("pz_ok.csv", "a,y\r\n0.5,1\r\n\r\n-2,0\r\n"));
  EXPECT_EQ(ok.size(), 2u);
  EXPECT_EQ(ok.x[1][0], -2.0);
}

TEST(RunPiece, ZeroLearningRateIsIdentity) {
  auto task = logistic_task();
  task.lr = {0, 1};
  const auto sp = split(task, 1, 1, 0, 7);
  const std::vector<int64_t> p{1200000, -3000000, 50000, 0, 700000};
  const std::vector<int64_t> d{1000000, -2000000, 3000000, 4000000, 10000000};
  EXPECT_EQ(run_piece(sp, p, d).outputs(), p);
}

TEST(RunPiece, RegressionStepMatchesHandOracle) {
  const auto task = regression_task(1);
  const auto sp = split(task, 1, 1, 0, 7);
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto u = [&] { return (static_cast<double>(rng.next_u64() % 2000001) - 1e6) / 1e6; };
    const double w = u(), b = u(), x = u(), y = u();
    const int64_t p[2] = {quantize::to_fixed(w, 7), quantize::to_fixed(b, 7)};
    const int64_t d[2] = {quantize::to_fixed(x, 7), quantize::to_fixed(y, 7)};
    const auto out = decode_params(run_piece(sp, p, d).outputs(), 7);
    const double err = w * x + b - y;
    EXPECT_NEAR(out[0], w - 0.1 * err * x, 1e-6);
    EXPECT_NEAR(out[1], b - 0.1 * err, 1e-6);
  }
}

TEST(RunPiece, LogisticStepWithinCombinedBound) {
  const auto task = logistic_task();
  const auto sp = split(task, 1, 1, 0, 7);
  const double E = std::abs(quantize::taylor_eval("sigmoid", 4, 0.5) - quantize::exact_eval("sigmoid", 0.5));
  Rng rng(6);
  for (int i = 0; i < 100; ++i) {
    const auto u = [&] { return (static_cast<double>(rng.next_u64() % 200001) - 1e5) / 1e6; };  // |v| <= 0.1
    std::vector<double> w(5), x(4);
    for (auto& v : w) v = u();
    for (auto& v : x) v = u();
    const double y = static_cast<double>(i % 2);
    std::vector<int64_t> p, d;
    for (double v : w) p.push_back(quantize::to_fixed(v, 7));
    for (double v : x) d.push_back(quantize::to_fixed(v, 7));
    d.push_back(quantize::to_fixed(y, 7));
    const auto out = decode_params(run_piece(sp, p, d).outputs(), 7);
    double z = w[4];
    for (int k = 0; k < 4; ++k) z += w[k] * x[k];
    const double err = 1.0 / (1.0 + std::exp(-z)) - y;
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(out[k], w[k] - 0.05 * err * x[k], 0.05 * 0.1 * E + 1e-6);
    EXPECT_NEAR(out[4], w[4] - 0.05 * err, 0.05 * E + 1e-6);
  }
}

TEST(RunPiece, OverflowAndGuardRaise) {
  const auto rg = split(regression_task(1), 1, 1, 0, 9);
  const int64_t p[2] = {quantize::to_fixed(1e5, 9), 0};
  const int64_t d[2] = {quantize::to_fixed(0.5, 9), 0};
  EXPECT_THROW(run_piece(rg, p, d), std::overflow_error);
  const auto lg = split(logistic_task(), 1, 1, 0, 7);
  const std::vector<int64_t> big{10000000, 0, 0, 0, 0};  // w1 = 1, x1 = 0.9: z outside the Taylor domain
  const std::vector<int64_t> dx{9000000, 0, 0, 0, 0};
  EXPECT_THROW(run_piece(lg, big, dx), std::domain_error);
}

TEST(TrainLocal, ChainContinuityAndModel) {
  const auto sp = split(logistic_task(), 8, 10, 0, 7);
  const auto lt = train_local(logistic_task(), sp, iris().rows(0, 8), 10, std::vector<double>(5, 0.0));
  ASSERT_EQ(lt.traces.size(), 80u);
  for (size_t i = 0; i + 1 < lt.traces.size(); ++i) EXPECT_EQ(lt.traces[i].outputs(), lt.traces[i + 1].inputs());
  EXPECT_EQ(lt.model.params, lt.traces.back().outputs());
  EXPECT_EQ(lt.traces.front().inputs(), std::vector<int64_t>(5, 0));
  for (const auto& t : lt.traces) EXPECT_TRUE(quantize::check_trace(t));
}

TEST(TrainLocal, PieceDataFollowsSampleSchedule) {
  const auto sp = split(regression_task(), 4, 3, 6, 7);
  const auto data = house().rows(0, 4);
  const auto lt = train_local(regression_task(), sp, data, 3, std::vector<double>(3, 0.0));
  // Piece 2 covers steps 2 and 3: samples 2 and 3.
  const auto& t = lt.traces[1];
  EXPECT_EQ(t.syms[t.spec->data[0]], quantize::to_fixed(data.x[2][0], 7));
  EXPECT_EQ(t.syms[t.spec->data[3]], quantize::to_fixed(data.x[3][0], 7));
}

TEST(TrainLocal, DeterministicTraces) {
  const auto sp = split(regression_task(), 8, 4, 0, 7);
  const auto a = train_local(regression_task(), sp, house().rows(8, 8), 4, std::vector<double>(3, 0.1));
  const auto b = train_local(regression_task(), sp, house().rows(8, 8), 4, std::vector<double>(3, 0.1));
  for (size_t i = 0; i < a.traces.size(); ++i) {
    EXPECT_EQ(quantize::serialize_trace(a.traces[i]), quantize::serialize_trace(b.traces[i]));
  }
}

TEST(TrainLocal, IntegerAgreesWithFloatPipeline) {
  const auto task = logistic_task();
  const auto sp = split(task, 8, 10, 0, 7);
  const auto hold = iris().rows(60, 40);
  for (int t = 0; t < 3; ++t) {
    const auto local = iris().rows(t * 8, 8);
    const auto lt = train_local(task, sp, local, 10, std::vector<double>(5, 0.0));
    const auto fixed = decode_params(lt.model.params, 7);
    for (size_t k = 0; k < fixed.size(); ++k) EXPECT_LE(std::abs(fixed[k] - lt.float_params[k]), 10e-7);
    EXPECT_GE(agreement(task, fixed, lt.float_params, hold), 0.95);
    EXPECT_GE(agreement(task, fixed, train_exact(task, local, 10, std::vector<double>(5, 0.0)), hold), 0.95);
    for (double a : lt.activations) EXPECT_LE(std::abs(a), task.z_bound);
  }
}

TEST(TrainLocal, StepSignsMatchFloat) {
  const auto task = regression_task();
  const auto sp = split(task, 8, 10, 0, 7);
  const auto lt = train_local(task, sp, house().rows(0, 8), 10, std::vector<double>(3, 0.0));
  size_t mismatches = 0;
  for (size_t i = 0; i < lt.traces.size(); ++i) {
    const auto in = decode_params(lt.traces[i].inputs(), 7), out = decode_params(lt.traces[i].outputs(), 7);
    for (size_t k = 0; k < in.size(); ++k) {
      const double f = lt.float_steps[i][k];
      if (std::abs(f) >= 1e-6) mismatches += (f > 0) != (out[k] - in[k] > 0);
    }
  }
  EXPECT_EQ(mismatches, 0u);
}

TEST(TrainLocal, ArgumentChecks) {
  const auto sp = split(logistic_task(), 8, 10, 0, 7);
  EXPECT_THROW(train_local(logistic_task(), sp, house().rows(0, 8), 10, std::vector<double>(5, 0.0)),
               std::invalid_argument);
  EXPECT_THROW(train_local(logistic_task(), sp, iris().rows(0, 8), 10, std::vector<double>(4, 0.0)),
               std::invalid_argument);
  EXPECT_THROW(train_local(logistic_task(), sp, iris().rows(0, 8), 9, std::vector<double>(5, 0.0)),
               std::invalid_argument);
}

TEST(TrainLocal, CorruptedTraceRejectedByProver) {
  const auto sp = split(regression_task(), 2, 1, 0, 7);
  const auto lt = train_local(regression_task(), sp, house().rows(0, 2), 1, std::vector<double>(3, 0.0));
  const auto cs = r1cs::synthesize_piece(*sp.spec);
  auto qap = std::make_shared<const r1cs::QapInstance>(r1cs::to_qap(cs));
  Rng rng(9);
  auto keys = groth16::setup(qap, cs.hash(), rng);
  keys.pk.prepare();
  auto bad = lt.traces[0];
  bad.syms[bad.spec->outputs[0]] += 1;
  EXPECT_ANY_THROW({
    const auto asg = r1cs::assign_piece(bad);
    groth16::prove(keys.pk, asg.statement(6), asg.witness(6), rng);
  });
  const auto good = r1cs::assign_piece(lt.traces[0]);
  EXPECT_TRUE(groth16::verify(keys.vk, good.statement(6), groth16::prove(keys.pk, good.statement(6), good.witness(6), rng)));
}

TEST(Rat, MaxSafeRat) {
  EXPECT_EQ(max_safe_rat(0.3), 9);
  EXPECT_EQ(max_safe_rat(1000), 6);
  EXPECT_EQ(max_safe_rat(-1000), 6);
  EXPECT_EQ(max_safe_rat(1e9), 0);
}

TEST(Tasks, Lookup) {
  EXPECT_EQ(task_by_name("logistic").features, 4u);
  EXPECT_EQ(task_by_name("regression").kind, TaskKind::kRegression);
  EXPECT_THROW(task_by_name("resnet"), std::invalid_argument);
  EXPECT_THROW(regression_task(4), std::invalid_argument);
}

}  // namespace
}  // namespace pzkpfl::trainer
