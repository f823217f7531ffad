// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pzkpfl/pipeline.hpp"

#include <gtest/gtest.h>

#include "pzkpfl/codec.hpp"
#include "pzkpfl/groth16.hpp"
#include "pzkpfl/piecechain.hpp"

namespace pzkpfl::pipeline {
namespace {

const fs::path kSource = PZKPFL_SOURCE_DIR;

RunConfig small_config() {
  RunConfig c;
  c.task = "logistic";
  c.dataset = "data/iris_binary.csv";
  c.trainers = 2;
  c.samples_per_trainer = 4;
  c.rounds = 2;
  c.holdout = 20;
  c.seed = 11;
  return c;
}

fs::path fresh_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("pzkpfl_pipeline_" + name);
  fs::remove_all(d);
  return d;
}

TEST(Config, DefaultsAndRoundTrip) {
  const auto c = RunConfig::from_json(Json::object());
  EXPECT_EQ(c.trainers, 3u);
  EXPECT_EQ(c.rat, 7);
  const auto back = RunConfig::from_json(small_config().to_json());
  EXPECT_EQ(back.to_json(), small_config().to_json());
  Json unseeded = small_config().to_json();
  unseeded["seed"] = nullptr;
  EXPECT_FALSE(RunConfig::from_json(unseeded).seed.has_value());
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(RunConfig::from_json(Json{{"version", 2}}), std::invalid_argument);
  EXPECT_THROW(RunConfig::from_json(Json{{"trainerz", 2}}), std::invalid_argument);
  EXPECT_THROW(RunConfig::from_json(Json{{"trainers", "three"}}), std::invalid_argument);
  EXPECT_THROW(RunConfig::from_json(Json::array()), std::invalid_argument);
  EXPECT_THROW(RunConfig::load("/nonexistent.json"), std::runtime_error);
}

TEST(Config, ShippedConfigsLoad) {
  for (const auto* name : {"desk_logistic.json", "desk_regression.json"}) {
    const auto c = RunConfig::load(kSource / "configs" / name);
    EXPECT_EQ(c.trainers, 3u) << name;
    EXPECT_EQ(c.samples_per_trainer * c.rounds, 80u) << name;
  }
}

TEST(Setup, ValidationErrors) {
  auto c = small_config();
  c.trainers = 0;
  EXPECT_THROW(cmd_setup(c, fresh_dir("v0"), kSource), std::invalid_argument);
  c = small_config();
  c.samples_per_trainer = 50;
  EXPECT_THROW(cmd_setup(c, fresh_dir("v1"), kSource), std::invalid_argument);
  c = small_config();
  c.pieces = 3;
  EXPECT_THROW(cmd_setup(c, fresh_dir("v2"), kSource), std::invalid_argument);
  c = small_config();
  c.task = "regression";  // iris has 4 features
  EXPECT_THROW(cmd_setup(c, fresh_dir("v3"), kSource), std::invalid_argument);
  c = small_config();
  c.initial_model = {3, 3, 3, 3, 3};  // activations leave the Taylor domain
  EXPECT_THROW(cmd_setup(c, fresh_dir("v4"), kSource), std::domain_error);
  c = small_config();
  c.initial_model = {0, 0, 0, 0, 0.3};
  c.rat = 9;
  EXPECT_NO_THROW(cmd_setup(c, fresh_dir("v5"), kSource));
}

TEST(Setup, RatTooLargeFailsFast) {
  auto c = small_config();
  c.task = "regression";
  c.dataset = "data/house_price.csv";
  c.holdout = 10;
  c.initial_model = {2000, 0, 0};
  c.rat = 7;
  EXPECT_THROW(cmd_setup(c, fresh_dir("rat"), kSource), std::invalid_argument);
  c.rat = 0;
  const auto r = cmd_setup(c, fresh_dir("rat"), kSource);
  EXPECT_LT(r.rat, 7);
  EXPECT_EQ(r.rat, r.rat_cap);
}

TEST(Setup, StructureAndDeterminism) {
  const auto a = fresh_dir("det_a"), b = fresh_dir("det_b");
  const auto ra = cmd_setup(small_config(), a, kSource);
  cmd_setup(small_config(), b, kSource);
  const auto vk = groth16::deserialize_vk(codec::read_file(a / "groth16.vk"));
  EXPECT_EQ(vk.gamma_abc.size(), ra.statement_size + 1);
  EXPECT_EQ(ra.statement_size, 10u);
  EXPECT_EQ(ra.pieces, 8u);
  EXPECT_EQ(ra.taylor_order, 4);
  for (const auto* f : {"groth16.vk", "groth16.pk", "circuit.bin", "paillier.pub", "ledger.log", "manifest.json"}) {
    EXPECT_EQ(codec::read_file(a / f), codec::read_file(b / f)) << f;
  }
}

TEST(TrainProve, NeedsPredecessorMask) {
  const auto d = fresh_dir("mailbox");
  cmd_setup(small_config(), d, kSource);
  EXPECT_THROW(cmd_train_prove(d, 2), std::runtime_error);
  EXPECT_THROW(cmd_masks(d, 3), std::invalid_argument);
  cmd_masks(d, 1);
  const auto r = cmd_train_prove(d, 2);
  EXPECT_EQ(r.pieces, 8u);
  EXPECT_TRUE(fs::exists(d / "trainer_2" / "bundles.bnda"));
}

TEST(VerifyAggregate, EmptyDirectoryIsAnError) {
  const auto d = fresh_dir("empty");
  fs::create_directories(d);
  EXPECT_THROW(cmd_verify_aggregate(d), std::runtime_error);
  EXPECT_THROW(cmd_verify_aggregate(fresh_dir("missing")), std::runtime_error);
}

TEST(EndToEnd, HonestRunMatchesOracleAndIsDeterministic) {
  const auto a = fresh_dir("e2e_a"), b = fresh_dir("e2e_b");
  const auto ra = cmd_e2e(small_config(), a, kSource);
  ASSERT_TRUE(ra.ok()) << ra.aggregate.error;
  EXPECT_TRUE(ra.oracle_match);
  EXPECT_EQ(ra.aggregate.global->count, 2u);
  EXPECT_EQ(ra.aggregate.metrics.at("proof_count").get<size_t>(), 16u);
  EXPECT_TRUE(cmd_audit(a));
  const auto rb = cmd_e2e(small_config(), b, kSource);
  ASSERT_TRUE(rb.ok());
  EXPECT_EQ(codec::read_file(a / "global.json"), codec::read_file(b / "global.json"));
  EXPECT_EQ(codec::read_file(a / "ledger.head"), codec::read_file(b / "ledger.head"));
  // The round is closed; a second aggregation is refused by the contract.
  EXPECT_FALSE(cmd_verify_aggregate(a).ok);
}

TEST(EndToEnd, WholeStatementMode) {
  auto c = small_config();
  c.aggregate_statement = true;
  const auto r = cmd_e2e(c, fresh_dir("stmt"), kSource);
  ASSERT_TRUE(r.ok()) << r.aggregate.error;
  EXPECT_EQ(r.aggregate.global->sum.size(), 10u);
}

class Tampered : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fresh_dir("tamper");
    cmd_setup(small_config(), dir, kSource);
    for (uint32_t i = 1; i <= 2; ++i) cmd_masks(dir, i);
    for (uint32_t i = 1; i <= 2; ++i) cmd_train_prove(dir, i);
  }
  fs::path dir;
};

TEST_F(Tampered, CorruptBundleNamesTrainer) {
  const auto vk = groth16::deserialize_vk(codec::read_file(dir / "groth16.vk"));
  auto bundles = piecechain::read_archive(dir / "trainer_2" / "bundles.bnda", vk);
  bundles[4].phi_prime[7] += algebra::Scalar::one();
  piecechain::write_archive(dir / "trainer_2" / "bundles.bnda", bundles, vk);
  const auto r = cmd_verify_aggregate(dir);
  EXPECT_FALSE(r.ok);
  EXPECT_NE(r.error.find("trainer 2"), std::string::npos) << r.error;
  EXPECT_TRUE(r.trainers[0].ok);
  EXPECT_FALSE(r.trainers[1].ok);
  EXPECT_NE(r.trainers[1].reason.find("piece 5"), std::string::npos) << r.trainers[1].reason;
  EXPECT_FALSE(r.global.has_value());
}

TEST_F(Tampered, MissingBundleRefused) {
  const auto vk = groth16::deserialize_vk(codec::read_file(dir / "groth16.vk"));
  auto bundles = piecechain::read_archive(dir / "trainer_1" / "bundles.bnda", vk);
  bundles.pop_back();
  piecechain::write_archive(dir / "trainer_1" / "bundles.bnda", bundles, vk);
  const auto r = cmd_verify_aggregate(dir);
  EXPECT_FALSE(r.ok);
  EXPECT_NE(r.error.find("trainer 1"), std::string::npos) << r.error;
}

TEST_F(Tampered, SubstitutedSubmissionRefused) {
  const auto path = dir / "trainer_1" / "submission.bin";
  auto sub = aggregation::deserialize_submission(codec::read_file(path));
  sub.a_prime[0] += algebra::Scalar::one();
  codec::write_file(path, aggregation::serialize(sub));
  const auto r = cmd_verify_aggregate(dir);
  EXPECT_FALSE(r.ok);
  EXPECT_NE(r.error.find("trainer 1"), std::string::npos) << r.error;
}

TEST_F(Tampered, EditedLedgerHeadRefused) {
  auto head = codec::read_file(dir / "ledger.head");
  head[0] = head[0] == '0' ? '1' : '0';
  codec::write_file(dir / "ledger.head", head);
  EXPECT_FALSE(cmd_audit(dir));
  EXPECT_FALSE(cmd_verify_aggregate(dir).ok);
}

}  // namespace
}  // namespace pzkpfl::pipeline
