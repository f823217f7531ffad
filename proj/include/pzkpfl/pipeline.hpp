// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

// Publisher and trainer roles over a shared artifact directory:
// setup -> masks -> train-prove (per trainer) -> verify-aggregate -> audit.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pzkpfl/aggregation.hpp"

namespace pzkpfl::pipeline {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

struct RunConfig {
  static constexpr int kVersion = 1;
  std::string task = "logistic";
  std::string dataset = "data/iris_binary.csv";
  uint32_t trainers = 3;
  size_t samples_per_trainer = 8;
  size_t rounds = 10;
  size_t pieces = 0;         // q; 0 = one (sample, iteration) per piece
  size_t holdout = 40;       // last rows of the dataset
  int rat = 7;               // 0 = largest safe value
  double taylor_error = 1e-4;
  std::string paillier_profile = "test";
  std::optional<uint64_t> seed = 42;
  size_t workers = 0;
  bool aggregate_statement = false;  // false: output slots only
  std::vector<double> initial_model;  // empty = zeros
  uint64_t round = 1;

  static RunConfig from_json(const Json& j);
  Json to_json() const;
  static RunConfig load(const fs::path& path);
};

struct SetupReport {
  double seconds = 0;
  size_t constraints = 0;
  size_t statement_size = 0;
  size_t pieces = 0;
  size_t steps_per_piece = 0;
  int rat = 0;
  int rat_cap = 0;
  int taylor_order = 0;
  double taylor_max_error = 0;      // over the selection points
  double activation_max_error = 0;  // over activations observed in the float run
  std::string contract;
};

// Writes config snapshot, manifest, circuit, Groth16 and Paillier keys, and
// deploys the round contract. Relative dataset paths resolve against base.
SetupReport cmd_setup(const RunConfig& cfg, const fs::path& dir, const fs::path& base = fs::current_path());

// Trainer i draws its masks and posts s_i to its ring successor's mailbox.
void cmd_masks(const fs::path& dir, uint32_t trainer);

struct TrainReport {
  uint32_t trainer = 0;
  size_t pieces = 0;
  double train_seconds = 0;
  double prove_seconds = 0;
  std::vector<int64_t> params;  // local model, fixed point
  std::vector<double> float_params;
  double max_param_diff = 0;  // |fixed - float| over slots
  double accuracy = 0;        // held-out, integer model
  double float_accuracy = 0;
  double exact_accuracy = 0;  // float training with the exact sigmoid
  double agreement = 0;       // integer vs float predictions, held-out
  double exact_agreement = 0;
  double max_activation = 0;
  double activation_max_error = 0;
  size_t sign_mismatches = 0;  // gradient steps whose sign differs from float beyond 10^(1-rat)
};

// Trains, proves the chain and writes the bundle archive and submission.
// Needs the predecessor's mask in the mailbox; draws its own masks when absent.
TrainReport cmd_train_prove(const fs::path& dir, uint32_t trainer);

struct TrainerStatus {
  uint32_t trainer = 0;
  bool ok = false;
  std::string reason;
  size_t bundles = 0;
};

struct AggregateReport {
  bool ok = false;
  std::string error;
  std::vector<TrainerStatus> trainers;
  std::optional<aggregation::GlobalModel> global;
  std::vector<double> global_params;
  bool sum_proof = false;
  bool audit = false;
  double global_accuracy = 0;
  Json metrics;
};

// Verifies every chain, runs the ledger round, aggregates, checks the sum
// proof and audits the log. Writes global.json, metrics.json, report.json.
AggregateReport cmd_verify_aggregate(const fs::path& dir);

struct E2EReport {
  SetupReport setup;
  std::vector<TrainReport> trainers;
  AggregateReport aggregate;
  aggregation::GlobalModel oracle;  // direct plaintext average of the local models
  bool oracle_match = false;
  bool ok() const { return aggregate.ok && aggregate.sum_proof && aggregate.audit && oracle_match; }
};

E2EReport cmd_e2e(const RunConfig& cfg, const fs::path& dir, const fs::path& base = fs::current_path());

bool cmd_audit(const fs::path& dir);

// Aggregated statement positions (1-based) for a statement of size l.
std::vector<uint32_t> aggregated_slots(size_t l, bool whole_statement);

Json to_json(const SetupReport& r);
Json to_json(const TrainReport& r);
Json to_json(const AggregateReport& r);

}  // namespace pzkpfl::pipeline
