// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

// Desk-scale training tasks, piece splitting and local training with a
// recorded fixed-point trace per piece.

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pzkpfl/quantize.hpp"

namespace pzkpfl::trainer {

enum class TaskKind : uint8_t { kLogistic, kRegression };

struct Task {
  std::string name;
  TaskKind kind = TaskKind::kLogistic;
  size_t features = 0;
  quantize::Ratio lr{1, 20};
  int taylor_order = 4;  // logistic only
  double z_bound = 0.5;  // logistic only: guarded sigmoid argument range

  size_t params() const { return features + 1; }  // weights then bias
  size_t statement_size() const { return 2 * params(); }
};

Task logistic_task();                      // 4 features, sigmoid
Task regression_task(size_t features = 2);  // squared loss
Task task_by_name(const std::string& name);

struct Dataset {
  std::vector<std::string> header;
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  size_t features() const { return header.empty() ? 0 : header.size() - 1; }
  size_t size() const { return y.size(); }
  Dataset rows(size_t begin, size_t count) const;
};

// Header line, then features followed by the label on every row.
Dataset load_csv(const std::filesystem::path& path);

// Real-valued program for one piece running `steps` consecutive gradient steps.
quantize::Program build_program(const Task& task, size_t steps);

struct Split {
  size_t q = 0;                // piece count
  size_t steps_per_piece = 0;  // (sample, iteration) units per piece
  std::shared_ptr<const quantize::PieceSpec> spec;
};

// pieces = samples * rounds gradient steps grouped into q pieces. q = 0
// selects one step per piece. Throws std::invalid_argument unless q divides
// samples * rounds.
size_t total_steps(size_t samples, size_t rounds);
Split split(const Task& task, size_t samples, size_t rounds, size_t q, int rat);

// Sample index feeding step s of the local schedule.
inline size_t sample_of_step(size_t step, size_t samples) { return step % samples; }

// One piece in exact integer arithmetic. data holds per step the features
// followed by the label, already in fixed point.
quantize::FixedTrace run_piece(const Split& split, std::span<const int64_t> params,
                               std::span<const int64_t> data);

struct LocalModel {
  std::vector<int64_t> params;  // fixed point, equals the last piece's outputs
  int rat = 0;
  size_t rounds = 0;
  size_t pieces = 0;
};

struct LocalTraining {
  LocalModel model;
  std::vector<quantize::FixedTrace> traces;
  std::vector<double> float_params;         // same program in floating point
  std::vector<double> activations;          // sigmoid arguments seen by the float run
  std::vector<std::vector<double>> float_steps;  // per piece: float output - float input
};

// Runs the fixed-point pipeline and the float reference side by side.
// Throws std::overflow_error on fixed-point overflow and std::domain_error
// when a guard (e.g. the sigmoid range) is violated.
LocalTraining train_local(const Task& task, const Split& split, const Dataset& data, size_t rounds,
                          std::span<const double> p0);

// Float training with the exact activation, for accuracy reporting.
std::vector<double> train_exact(const Task& task, const Dataset& data, size_t rounds, std::span<const double> p0);

double predict(const Task& task, std::span<const double> params, std::span<const double> x);
// Classification: fraction of correct labels. Regression: fraction with
// |prediction - label| <= 0.1.
double accuracy(const Task& task, std::span<const double> params, const Dataset& data);
// Fraction of points where both models make the same decision (logistic) or
// predict within 1e-3 of each other (regression).
double agreement(const Task& task, std::span<const double> a, std::span<const double> b, const Dataset& data);

// Largest rat whose pre-rescale products stay inside int64 for values of
// magnitude up to max_abs.
int max_safe_rat(double max_abs);

std::vector<double> decode_params(std::span<const int64_t> fixed, int rat);

}  // namespace pzkpfl::trainer
