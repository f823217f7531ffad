// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

// Fixed-point mapping of real-valued training programs and Taylor
// replacement of the sigmoid.
//
// A Program records real operations once. lower() turns it into a PieceSpec:
// a list of integer binary expressions at scale D = 10^rat in which every
// product is followed by an explicit rescale with a remainder witness.
// evaluate() runs a PieceSpec in exact 64-bit integer arithmetic and yields
// the FixedTrace consumed by the circuit synthesiser.

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace pzkpfl::quantize {

struct Ratio {
  int64_t num = 1;
  int64_t den = 1;
};

// Exact decimal conversion: v is rounded to `digits` decimals and reduced.
Ratio ratio_from_decimal(double v, int digits = 6);

// ------------------------------------------------------------ real programs

enum class RealOp : uint8_t {
  kInput,     // public incoming parameter
  kData,      // private sample value
  kConst,
  kAdd,
  kSub,
  kMul,       // a * b
  kScaleMul,  // a * b * ratio
  kScale,     // a * ratio
  kRecip,     // 1 / a, a > 0
};

struct RealNode {
  RealOp op;
  uint32_t a = 0;
  uint32_t b = 0;
  double value = 0;  // kConst
  Ratio ratio{};     // kScaleMul, kScale
};

// Domain guard checked during evaluation: lo <= value(node) <= hi.
struct RangeGuard {
  uint32_t node;
  double lo;
  double hi;
  std::string what;
};

class Program {
 public:
  using Var = uint32_t;

  Var input();
  Var data();
  Var constant(double v);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale_mul(Var a, Var b, Ratio r);
  Var scale(Var a, Ratio r);
  Var recip(Var a);
  void output(Var v) { outputs_.push_back(v); }
  void guard(Var v, double lo, double hi, std::string what);

  const std::vector<RealNode>& nodes() const { return nodes_; }
  const std::vector<Var>& inputs() const { return inputs_; }
  const std::vector<Var>& data_vars() const { return data_; }
  const std::vector<Var>& outputs() const { return outputs_; }
  const std::vector<RangeGuard>& guards() const { return guards_; }

  // Float reference run. Returns the value of every node.
  std::vector<double> eval(std::span<const double> inputs, std::span<const double> data) const;
  std::vector<double> eval_outputs(std::span<const double> inputs,
                                   std::span<const double> data) const;

 private:
  Var push(RealNode n);
  std::vector<RealNode> nodes_;
  std::vector<Var> inputs_, data_, outputs_;
  std::vector<RangeGuard> guards_;
};

// ------------------------------------------------------------ fixed point

enum class SymKind : uint8_t { kInput, kData, kConst, kInternal };

struct Sym {
  SymKind kind;
  int64_t value = 0;  // kConst only
};

enum class FixedOp : uint8_t {
  kAdd,      // out = a + b
  kSub,      // out = a - b
  kMul,      // out = a * b (raw product, scale D^2)
  kRescale,  // out = round(num * a / div), rem = num * a - div * out
  kRecip,    // out = floor(num / a), rem = num - a * out, a >= 1
};

struct FixedExpr {
  FixedOp op;
  uint32_t a = 0;
  uint32_t b = 0;  // unused by kRescale / kRecip
  uint32_t out = 0;
  uint32_t rem = 0;  // kRescale / kRecip
  int64_t num = 0;   // kRescale / kRecip
  int64_t div = 0;   // kRescale
};

struct FixedGuard {
  uint32_t sym;
  int64_t lo;
  int64_t hi;
  std::string what;
};

// The integer circuit for one piece. Structure only; values live in FixedTrace.
struct PieceSpec {
  int rat = 0;
  std::vector<Sym> syms;
  std::vector<FixedExpr> exprs;
  std::vector<uint32_t> inputs;   // statement slots 1..l/2
  std::vector<uint32_t> data;     // private sample values
  std::vector<uint32_t> outputs;  // statement slots l/2+1..l
  std::vector<FixedGuard> guards;

  size_t statement_size() const { return inputs.size() + outputs.size(); }
};

int64_t pow10(int rat);

// Round-to-nearest (ties toward +inf) integer division; div > 0.
int64_t div_round(__int128 num, int64_t div);

PieceSpec lower(const Program& program, int rat);

struct FixedTrace {
  std::shared_ptr<const PieceSpec> spec;
  int rat = 0;
  std::vector<int64_t> syms;

  const std::vector<FixedExpr>& exprs() const { return spec->exprs; }
  std::vector<int64_t> inputs() const;
  std::vector<int64_t> outputs() const;
};

// Exact integer evaluation. Throws std::overflow_error when any value or
// pre-rescale product leaves int64, std::domain_error on a guard or a
// non-positive reciprocal denominator.
FixedTrace evaluate(std::shared_ptr<const PieceSpec> spec, std::span<const int64_t> inputs,
                    std::span<const int64_t> data);

// Re-checks every expression of a trace in exact integer arithmetic.
bool check_trace(const FixedTrace& trace);

FixedTrace scale_trace(const Program& program, int rat, std::span<const double> inputs,
                       std::span<const double> data);

int64_t to_fixed(double v, int rat);
double from_fixed(int64_t v, int rat);

// Largest rat with max * 10^rat <= 2^63 - 1 and min * 10^rat >= -2^63,
// compared exactly. An all-zero trace returns max_rat.
int compute_ratio(std::span<const double> values, int max_rat = 18);

// Trace files: versioned records of (rat, syms, exprs).
std::vector<uint8_t> serialize_trace(const FixedTrace& trace);
FixedTrace deserialize_trace(std::span<const uint8_t> bytes);

// ------------------------------------------------------------ Taylor

struct TaylorApprox {
  std::string op;
  int order = 0;
  std::vector<Ratio> coefficients;  // of the expanded series, lowest degree first
  double error_bound = 0;           // E
  std::vector<double> points;
  double max_error = 0;             // achieved over points
  double domain = 0;                // validated |x| bound
};

// Exact reference evaluator for a supported op ("sigmoid", "exp").
double exact_eval(const std::string& op, double x);
// Float evaluation of the truncated expansion in the same Horner form the
// circuit uses.
double taylor_eval(const std::string& op, int order, double x);

TaylorApprox make_taylor(const std::string& op, int order);
TaylorApprox taylor_select(const std::string& op, std::span<const double> points, double E,
                           double max_error_init = 1e9, int max_order = 30);

// Appends sigmoid(z) in Horner form: acc = 1 + (-z) * acc / k for
// k = order..1, then 1 / (1 + acc).
Program::Var emit_sigmoid(Program& p, Program::Var z, int order);

// Fixed-point sigmoid through the same expression path the circuit uses.
int64_t approx_eval(const TaylorApprox& approx, int64_t x, int rat);

}  // namespace pzkpfl::quantize
