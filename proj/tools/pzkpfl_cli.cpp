// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

// pzkpfl: publisher and trainer roles from the command line.
// Exit codes: 0 success, 1 verification failure, 2 usage or runtime error.

#include <CLI11.hpp>

#include <iostream>

#include "pzkpfl/pipeline.hpp"

namespace pp = pzkpfl::pipeline;

namespace {

int run(CLI::App& app, int argc, char** argv) {
  std::string config, out = "out", phase = "prove";
  uint32_t trainer = 0;
  std::optional<uint64_t> seed;
  size_t workers = 0;

  auto* setup = app.add_subcommand("setup", "Generate circuit, CRS and Paillier keys; deploy the round contract");
  setup->add_option("-c,--config", config, "Run config (JSON)")->required()->check(CLI::ExistingFile);
  setup->add_option("-o,--out", out, "Artifact directory");
  setup->add_option("--seed", seed, "Override the config seed");

  auto* train = app.add_subcommand("train-prove", "Train one trainer's local model and prove every piece");
  train->add_option("-o,--out", out, "Artifact directory")->required();
  train->add_option("-t,--trainer", trainer, "Trainer id (1-based)")->required();
  train->add_option("--phase", phase, "masks: post masks to the mailbox; prove: train, prove, submit")
      ->check(CLI::IsMember({"masks", "prove"}));

  auto* verify = app.add_subcommand("verify-aggregate", "Verify all chains, run the ledger round and aggregate");
  verify->add_option("-o,--out", out, "Artifact directory")->required();

  auto* e2e = app.add_subcommand("e2e", "Run every role in one process");
  e2e->add_option("-c,--config", config, "Run config (JSON)")->required()->check(CLI::ExistingFile);
  e2e->add_option("-o,--out", out, "Artifact directory");
  e2e->add_option("--seed", seed, "Override the config seed");
  e2e->add_option("--workers", workers, "Proving/verifying threads (0 = all cores)");

  auto* audit = app.add_subcommand("audit", "Replay the ledger log and compare the published state hash");
  audit->add_option("-o,--out", out, "Artifact directory")->required();

  app.require_subcommand(1);
  CLI11_PARSE(app, argc, argv);

  const auto load = [&] {
    auto cfg = pp::RunConfig::load(config);
    if (seed) cfg.seed = seed;
    if (workers) cfg.workers = workers;
    return cfg;
  };

  if (*setup) {
    const auto r = pp::cmd_setup(load(), out);
    std::cout << pp::to_json(r).dump(2) << '\n';
    return 0;
  }
  if (*train) {
    if (phase == "masks") {
      pp::cmd_masks(out, trainer);
      std::cout << "trainer " << trainer << ": masks posted\n";
      return 0;
    }
    const auto r = pp::cmd_train_prove(out, trainer);
    std::cout << pp::to_json(r).dump(2) << '\n';
    return 0;
  }
  if (*verify) {
    const auto r = pp::cmd_verify_aggregate(out);
    std::cout << pp::to_json(r).dump(2) << '\n';
    if (!r.ok) std::cerr << "verification failed: " << r.error << '\n';
    return r.ok ? 0 : 1;
  }
  if (*e2e) {
    const auto r = pp::cmd_e2e(load(), out);
    pp::Json j = pp::to_json(r.aggregate);
    j["oracle_match"] = r.oracle_match;
    j["metrics"] = r.aggregate.metrics;
    std::cout << j.dump(2) << '\n';
    if (!r.ok()) std::cerr << "end-to-end run failed: " << (r.aggregate.error.empty() ? "oracle mismatch" : r.aggregate.error) << '\n';
    return r.ok() ? 0 : 1;
  }
  if (*audit) {
    const bool ok = pp::cmd_audit(out);
    std::cout << (ok ? "audit: PASS" : "audit: FAIL") << '\n';
    return ok ? 0 : 1;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Privacy-preserving verifiable federated learning with piece-wise Groth16 proofs"};
  try {
    return run(app, argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
