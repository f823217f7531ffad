// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pzkpfl/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pzkpfl::trainer {

using quantize::Program;

Task logistic_task() {
  Task t;
  t.name = "logistic";
  t.kind = TaskKind::kLogistic;
  t.features = 4;
  t.lr = {1, 20};
  return t;
}

Task regression_task(size_t features) {
  if (features < 1 || features > 3) throw std::invalid_argument("regression task supports 1 to 3 features");
  Task t;
  t.name = "regression";
  t.kind = TaskKind::kRegression;
  t.features = features;
  t.lr = {1, 10};
  return t;
}

Task task_by_name(const std::string& name) {
  if (name == "logistic") return logistic_task();
  if (name == "regression") return regression_task();
  throw std::invalid_argument("unknown task: " + name);
}

Dataset Dataset::rows(size_t begin, size_t count) const {
  if (begin + count > size()) throw std::out_of_range("dataset slice out of range");
  Dataset d;
  d.header = header;
  d.x.assign(x.begin() + begin, x.begin() + begin + count);
  d.y.assign(y.begin() + begin, y.begin() + begin + count);
  return d;
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset " + path.string());
  const auto split_line = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  Dataset d;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("dataset has no header");
  d.header = split_line(line);
  if (d.header.size() < 2) throw std::runtime_error("dataset needs at least one feature and a label");
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != d.header.size()) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": wrong column count");
    }
    std::vector<double> row;
    for (const auto& c : cells) {
      size_t used = 0;
      double v = 0;
      try {
        v = std::stod(c, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != c.size() || !std::isfinite(v)) {
        throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": not a number: " + c);
      }
      row.push_back(v);
    }
    d.y.push_back(row.back());
    row.pop_back();
    d.x.push_back(std::move(row));
  }
  return d;
}

Program build_program(const Task& task, size_t steps) {
  if (steps == 0) throw std::invalid_argument("a piece needs at least one step");
  Program p;
  std::vector<Program::Var> w(task.features);
  for (auto& v : w) v = p.input();
  Program::Var b = p.input();
  for (size_t s = 0; s < steps; ++s) {
    std::vector<Program::Var> x(task.features);
    for (auto& v : x) v = p.data();
    const auto y = p.data();
    Program::Var z = b;
    for (size_t k = 0; k < task.features; ++k) z = p.add(z, p.mul(w[k], x[k]));
    Program::Var err;
    if (task.kind == TaskKind::kLogistic) {
      p.guard(z, -task.z_bound, task.z_bound, "sigmoid argument");
      err = p.sub(quantize::emit_sigmoid(p, z, task.taylor_order), y);
    } else {
      err = p.sub(z, y);
    }
    for (size_t k = 0; k < task.features; ++k) w[k] = p.sub(w[k], p.scale_mul(err, x[k], task.lr));
    b = p.sub(b, p.scale(err, task.lr));
  }
  for (auto v : w) p.output(v);
  p.output(b);
  return p;
}

size_t total_steps(size_t samples, size_t rounds) {
  if (samples == 0 || rounds == 0) throw std::invalid_argument("samples and rounds must be positive");
  return samples * rounds;
}

Split split(const Task& task, size_t samples, size_t rounds, size_t q, int rat) {
  const size_t steps = total_steps(samples, rounds);
  if (q == 0) q = steps;
  if (steps % q != 0) {
    throw std::invalid_argument("piece count " + std::to_string(q) + " does not divide " + std::to_string(steps) +
                                " training steps");
  }
  Split s;
  s.q = q;
  s.steps_per_piece = steps / q;
  s.spec = std::make_shared<const quantize::PieceSpec>(quantize::lower(build_program(task, s.steps_per_piece), rat));
  return s;
}

quantize::FixedTrace run_piece(const Split& split, std::span<const int64_t> params, std::span<const int64_t> data) {
  return quantize::evaluate(split.spec, params, data);
}

namespace {

// Per-step data (features then label) for piece `piece`, in step order.
std::vector<double> piece_data(const Dataset& data, size_t piece, size_t steps_per_piece) {
  std::vector<double> out;
  for (size_t t = 0; t < steps_per_piece; ++t) {
    const size_t i = sample_of_step(piece * steps_per_piece + t, data.size());
    out.insert(out.end(), data.x[i].begin(), data.x[i].end());
    out.push_back(data.y[i]);
  }
  return out;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

LocalTraining train_local(const Task& task, const Split& split, const Dataset& data, size_t rounds,
                          std::span<const double> p0) {
  if (data.features() != task.features) throw std::invalid_argument("dataset feature count does not match task");
  if (p0.size() != task.params()) throw std::invalid_argument("initial model has the wrong length");
  if (split.q * split.steps_per_piece != total_steps(data.size(), rounds)) {
    throw std::invalid_argument("split does not match the dataset schedule");
  }
  const int rat = split.spec->rat;
  const Program prog = build_program(task, split.steps_per_piece);

  LocalTraining out;
  std::vector<int64_t> fixed;
  for (double v : p0) fixed.push_back(quantize::to_fixed(v, rat));
  std::vector<double> fl(p0.begin(), p0.end());

  // Nodes holding sigmoid arguments are the guarded ones.
  std::vector<uint32_t> act_nodes;
  for (const auto& g : prog.guards()) act_nodes.push_back(g.node);

  out.traces.reserve(split.q);
  for (size_t i = 0; i < split.q; ++i) {
    const auto d = piece_data(data, i, split.steps_per_piece);
    std::vector<int64_t> dfix;
    for (double v : d) dfix.push_back(quantize::to_fixed(v, rat));
    auto trace = run_piece(split, fixed, dfix);
    fixed = trace.outputs();
    out.traces.push_back(std::move(trace));

    const auto values = prog.eval(fl, d);
    std::vector<double> next;
    for (auto o : prog.outputs()) next.push_back(values[o]);
    for (auto a : act_nodes) out.activations.push_back(values[a]);
    std::vector<double> step(next.size());
    for (size_t k = 0; k < next.size(); ++k) step[k] = next[k] - fl[k];
    out.float_steps.push_back(std::move(step));
    fl = std::move(next);
  }
  out.model.params = std::move(fixed);
  out.model.rat = rat;
  out.model.rounds = rounds;
  out.model.pieces = split.q;
  out.float_params = std::move(fl);
  return out;
}

std::vector<double> train_exact(const Task& task, const Dataset& data, size_t rounds, std::span<const double> p0) {
  std::vector<double> p(p0.begin(), p0.end());
  const double lr = static_cast<double>(task.lr.num) / static_cast<double>(task.lr.den);
  for (size_t s = 0; s < total_steps(data.size(), rounds); ++s) {
    const size_t i = sample_of_step(s, data.size());
    double z = p.back();
    for (size_t k = 0; k < task.features; ++k) z += p[k] * data.x[i][k];
    const double err = (task.kind == TaskKind::kLogistic ? sigmoid(z) : z) - data.y[i];
    for (size_t k = 0; k < task.features; ++k) p[k] -= lr * err * data.x[i][k];
    p.back() -= lr * err;
  }
  return p;
}

double predict(const Task& task, std::span<const double> params, std::span<const double> x) {
  double z = params.back();
  for (size_t k = 0; k < task.features; ++k) z += params[k] * x[k];
  return task.kind == TaskKind::kLogistic ? sigmoid(z) : z;
}

double accuracy(const Task& task, std::span<const double> params, const Dataset& data) {
  if (data.size() == 0) return 0;
  size_t ok = 0;
  for (size_t i = 0; i < data.size(); ++i) {
    const double p = predict(task, params, data.x[i]);
    if (task.kind == TaskKind::kLogistic) {
      ok += (p >= 0.5) == (data.y[i] >= 0.5);
    } else {
      ok += std::abs(p - data.y[i]) <= 0.1;
    }
  }
  return static_cast<double>(ok) / static_cast<double>(data.size());
}

double agreement(const Task& task, std::span<const double> a, std::span<const double> b, const Dataset& data) {
  if (data.size() == 0) return 0;
  size_t ok = 0;
  for (size_t i = 0; i < data.size(); ++i) {
    const double pa = predict(task, a, data.x[i]), pb = predict(task, b, data.x[i]);
    if (task.kind == TaskKind::kLogistic) {
      ok += (pa >= 0.5) == (pb >= 0.5);
    } else {
      ok += std::abs(pa - pb) <= 1e-3;
    }
  }
  return static_cast<double>(ok) / static_cast<double>(data.size());
}

int max_safe_rat(double max_abs) {
  const double m = std::max(1.0, std::abs(max_abs));
  const double sq[1] = {m * m};
  return quantize::compute_ratio(sq) / 2;
}

std::vector<double> decode_params(std::span<const int64_t> fixed, int rat) {
  std::vector<double> out;
  out.reserve(fixed.size());
  for (auto v : fixed) out.push_back(quantize::from_fixed(v, rat));
  return out;
}

}  // namespace pzkpfl::trainer
