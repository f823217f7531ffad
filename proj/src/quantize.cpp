// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pzkpfl/quantize.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "pzkpfl/codec.hpp"

namespace pzkpfl::quantize {
namespace {

constexpr int64_t kI64Max = std::numeric_limits<int64_t>::max();
constexpr int64_t kI64Min = std::numeric_limits<int64_t>::min();

int64_t narrow(__int128 v, const char* what) {
  if (v > kI64Max || v < kI64Min) throw std::overflow_error(std::string("int64 overflow in ") + what);
  return static_cast<int64_t>(v);
}

__int128 floor_div(__int128 a, __int128 b) {
  __int128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

int64_t checked_mul(int64_t a, int64_t b, const char* what) {
  return narrow(static_cast<__int128>(a) * b, what);
}

}  // namespace

Ratio ratio_from_decimal(double v, int digits) {
  if (!std::isfinite(v)) throw std::invalid_argument("ratio from non-finite value");
  const int64_t den0 = pow10(digits);
  const double scaled = std::round(v * static_cast<double>(den0));
  if (std::fabs(scaled) > 9e15) throw std::overflow_error("ratio too large");
  int64_t num = static_cast<int64_t>(scaled);
  int64_t den = den0;
  const int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (num == 0) den = 1;
  return {num, den};
}

int64_t pow10(int rat) {
  if (rat < 0 || rat > 18) throw std::invalid_argument("rat must lie in [0, 18]");
  int64_t d = 1;
  for (int i = 0; i < rat; ++i) d *= 10;
  return d;
}

int64_t div_round(__int128 num, int64_t div) {
  if (div <= 0) throw std::invalid_argument("rescale divisor must be positive");
  return narrow(floor_div(num + div / 2, div), "rescale");
}

int64_t to_fixed(double v, int rat) {
  const double s = v * static_cast<double>(pow10(rat));
  if (!std::isfinite(s) || std::fabs(s) >= 9.2e18) throw std::overflow_error("fixed-point overflow");
  return std::llround(s);
}

double from_fixed(int64_t v, int rat) { return static_cast<double>(v) / static_cast<double>(pow10(rat)); }

// ------------------------------------------------------------ Program

Program::Var Program::push(RealNode n) {
  const auto check = [&](Var v) {
    if (v >= nodes_.size()) throw std::invalid_argument("program operand out of range");
  };
  switch (n.op) {
    case RealOp::kAdd:
    case RealOp::kSub:
    case RealOp::kMul:
    case RealOp::kScaleMul:
      check(n.a);
      check(n.b);
      break;
    case RealOp::kScale:
    case RealOp::kRecip:
      check(n.a);
      break;
    default:
      break;
  }
  nodes_.push_back(n);
  return static_cast<Var>(nodes_.size() - 1);
}

Program::Var Program::input() {
  const Var v = push({RealOp::kInput});
  inputs_.push_back(v);
  return v;
}

Program::Var Program::data() {
  const Var v = push({RealOp::kData});
  data_.push_back(v);
  return v;
}

Program::Var Program::constant(double value) {
  RealNode n{RealOp::kConst};
  n.value = value;
  return push(n);
}

Program::Var Program::add(Var a, Var b) { return push({RealOp::kAdd, a, b}); }
Program::Var Program::sub(Var a, Var b) { return push({RealOp::kSub, a, b}); }
Program::Var Program::mul(Var a, Var b) { return push({RealOp::kMul, a, b}); }

Program::Var Program::scale_mul(Var a, Var b, Ratio r) {
  if (r.den <= 0) throw std::invalid_argument("ratio denominator must be positive");
  RealNode n{RealOp::kScaleMul, a, b};
  n.ratio = r;
  return push(n);
}

Program::Var Program::scale(Var a, Ratio r) {
  if (r.den <= 0) throw std::invalid_argument("ratio denominator must be positive");
  RealNode n{RealOp::kScale, a};
  n.ratio = r;
  return push(n);
}

Program::Var Program::recip(Var a) { return push({RealOp::kRecip, a}); }

void Program::guard(Var v, double lo, double hi, std::string what) {
  if (v >= nodes_.size()) throw std::invalid_argument("guard on unknown node");
  guards_.push_back({v, lo, hi, std::move(what)});
}

std::vector<double> Program::eval(std::span<const double> inputs,
                                  std::span<const double> data) const {
  if (inputs.size() != inputs_.size() || data.size() != data_.size()) {
    throw std::invalid_argument("program input count mismatch");
  }
  std::vector<double> v(nodes_.size());
  size_t in = 0, dt = 0;
  for (size_t i = 0; i < nodes_.size(); ++i) {
    const RealNode& n = nodes_[i];
    const auto r = [&] { return static_cast<double>(n.ratio.num) / static_cast<double>(n.ratio.den); };
    switch (n.op) {
      case RealOp::kInput: v[i] = inputs[in++]; break;
      case RealOp::kData: v[i] = data[dt++]; break;
      case RealOp::kConst: v[i] = n.value; break;
      case RealOp::kAdd: v[i] = v[n.a] + v[n.b]; break;
      case RealOp::kSub: v[i] = v[n.a] - v[n.b]; break;
      case RealOp::kMul: v[i] = v[n.a] * v[n.b]; break;
      case RealOp::kScaleMul: v[i] = v[n.a] * v[n.b] * r(); break;
      case RealOp::kScale: v[i] = v[n.a] * r(); break;
      case RealOp::kRecip:
        if (v[n.a] <= 0) throw std::domain_error("reciprocal of non-positive value");
        v[i] = 1.0 / v[n.a];
        break;
    }
  }
  for (const auto& g : guards_) {
    if (v[g.node] < g.lo || v[g.node] > g.hi) throw std::domain_error(g.what + " out of range");
  }
  return v;
}

std::vector<double> Program::eval_outputs(std::span<const double> inputs,
                                          std::span<const double> data) const {
  const auto v = eval(inputs, data);
  std::vector<double> out;
  out.reserve(outputs_.size());
  for (Var o : outputs_) out.push_back(v[o]);
  return out;
}

// ------------------------------------------------------------ lowering

PieceSpec lower(const Program& program, int rat) {
  const int64_t D = pow10(rat);
  PieceSpec spec;
  spec.rat = rat;
  std::vector<uint32_t> map(program.nodes().size());

  const auto new_sym = [&](SymKind k, int64_t value = 0) {
    spec.syms.push_back({k, value});
    return static_cast<uint32_t>(spec.syms.size() - 1);
  };
  const auto rescale = [&](uint32_t in, int64_t num, int64_t div) {
    FixedExpr e{FixedOp::kRescale};
    e.a = in;
    e.num = num;
    e.div = div;
    e.rem = new_sym(SymKind::kInternal);
    e.out = new_sym(SymKind::kInternal);
    spec.exprs.push_back(e);
    return e.out;
  };
  const auto binary = [&](FixedOp op, uint32_t a, uint32_t b) {
    FixedExpr e{op};
    e.a = a;
    e.b = b;
    e.out = new_sym(SymKind::kInternal);
    spec.exprs.push_back(e);
    return e.out;
  };

  for (size_t i = 0; i < program.nodes().size(); ++i) {
    const RealNode& n = program.nodes()[i];
    switch (n.op) {
      case RealOp::kInput:
        map[i] = new_sym(SymKind::kInput);
        spec.inputs.push_back(map[i]);
        break;
      case RealOp::kData:
        map[i] = new_sym(SymKind::kData);
        spec.data.push_back(map[i]);
        break;
      case RealOp::kConst:
        map[i] = new_sym(SymKind::kConst, to_fixed(n.value, rat));
        break;
      case RealOp::kAdd:
        map[i] = binary(FixedOp::kAdd, map[n.a], map[n.b]);
        break;
      case RealOp::kSub:
        map[i] = binary(FixedOp::kSub, map[n.a], map[n.b]);
        break;
      case RealOp::kMul:
        map[i] = rescale(binary(FixedOp::kMul, map[n.a], map[n.b]), 1, D);
        break;
      case RealOp::kScaleMul:
        map[i] = rescale(binary(FixedOp::kMul, map[n.a], map[n.b]), n.ratio.num,
                         checked_mul(D, n.ratio.den, "rescale divisor"));
        break;
      case RealOp::kScale:
        map[i] = rescale(map[n.a], n.ratio.num, n.ratio.den);
        break;
      case RealOp::kRecip: {
        FixedExpr e{FixedOp::kRecip};
        e.a = map[n.a];
        e.num = checked_mul(D, D, "reciprocal numerator");
        e.rem = new_sym(SymKind::kInternal);
        e.out = new_sym(SymKind::kInternal);
        spec.exprs.push_back(e);
        map[i] = e.out;
        break;
      }
    }
  }
  for (auto o : program.outputs()) spec.outputs.push_back(map[o]);
  for (const auto& g : program.guards()) {
    spec.guards.push_back({map[g.node], to_fixed(g.lo, rat), to_fixed(g.hi, rat), g.what});
  }
  return spec;
}

// ------------------------------------------------------------ evaluation

std::vector<int64_t> FixedTrace::inputs() const {
  std::vector<int64_t> v;
  for (auto s : spec->inputs) v.push_back(syms[s]);
  return v;
}

std::vector<int64_t> FixedTrace::outputs() const {
  std::vector<int64_t> v;
  for (auto s : spec->outputs) v.push_back(syms[s]);
  return v;
}

FixedTrace evaluate(std::shared_ptr<const PieceSpec> spec, std::span<const int64_t> inputs,
                    std::span<const int64_t> data) {
  if (inputs.size() != spec->inputs.size() || data.size() != spec->data.size()) {
    throw std::invalid_argument("piece input count mismatch");
  }
  FixedTrace t;
  t.rat = spec->rat;
  t.syms.assign(spec->syms.size(), 0);
  for (size_t i = 0; i < spec->syms.size(); ++i) {
    if (spec->syms[i].kind == SymKind::kConst) t.syms[i] = spec->syms[i].value;
  }
  for (size_t i = 0; i < inputs.size(); ++i) t.syms[spec->inputs[i]] = inputs[i];
  for (size_t i = 0; i < data.size(); ++i) t.syms[spec->data[i]] = data[i];

  auto& v = t.syms;
  for (const FixedExpr& e : spec->exprs) {
    switch (e.op) {
      case FixedOp::kAdd:
        v[e.out] = narrow(static_cast<__int128>(v[e.a]) + v[e.b], "addition");
        break;
      case FixedOp::kSub:
        v[e.out] = narrow(static_cast<__int128>(v[e.a]) - v[e.b], "subtraction");
        break;
      case FixedOp::kMul:
        v[e.out] = narrow(static_cast<__int128>(v[e.a]) * v[e.b], "pre-rescale product");
        break;
      case FixedOp::kRescale: {
        const __int128 num = static_cast<__int128>(e.num) * v[e.a];
        const int64_t q = div_round(num, e.div);
        v[e.out] = q;
        v[e.rem] = narrow(num - static_cast<__int128>(q) * e.div, "rescale remainder");
        break;
      }
      case FixedOp::kRecip: {
        const int64_t den = v[e.a];
        if (den <= 0) throw std::domain_error("reciprocal of non-positive value");
        v[e.out] = e.num / den;
        v[e.rem] = e.num % den;
        break;
      }
    }
  }
  for (const auto& g : spec->guards) {
    if (v[g.sym] < g.lo || v[g.sym] > g.hi) throw std::domain_error(g.what + " out of range");
  }
  t.spec = std::move(spec);
  return t;
}

bool check_trace(const FixedTrace& trace) {
  const auto& v = trace.syms;
  const auto& spec = *trace.spec;
  if (v.size() != spec.syms.size()) return false;
  for (size_t i = 0; i < spec.syms.size(); ++i) {
    if (spec.syms[i].kind == SymKind::kConst && v[i] != spec.syms[i].value) return false;
  }
  for (const FixedExpr& e : spec.exprs) {
    const __int128 a = v[e.a];
    switch (e.op) {
      case FixedOp::kAdd:
        if (a + v[e.b] != v[e.out]) return false;
        break;
      case FixedOp::kSub:
        if (a - v[e.b] != v[e.out]) return false;
        break;
      case FixedOp::kMul:
        if (a * v[e.b] != v[e.out]) return false;
        break;
      case FixedOp::kRescale: {
        const __int128 shifted = static_cast<__int128>(v[e.rem]) + e.div / 2;
        if (shifted < 0 || shifted >= e.div) return false;
        if (static_cast<__int128>(e.num) * a !=
            static_cast<__int128>(e.div) * v[e.out] + v[e.rem]) {
          return false;
        }
        break;
      }
      case FixedOp::kRecip:
        if (a < 1 || v[e.rem] < 0 || v[e.rem] >= a || v[e.out] < 0) return false;
        if (a * v[e.out] + v[e.rem] != e.num) return false;
        break;
    }
  }
  return true;
}

FixedTrace scale_trace(const Program& program, int rat, std::span<const double> inputs,
                       std::span<const double> data) {
  auto spec = std::make_shared<const PieceSpec>(lower(program, rat));
  std::vector<int64_t> in, dt;
  for (double x : inputs) in.push_back(to_fixed(x, rat));
  for (double x : data) dt.push_back(to_fixed(x, rat));
  return evaluate(std::move(spec), in, dt);
}

int compute_ratio(std::span<const double> values, int max_rat) {
  if (values.empty()) throw std::invalid_argument("compute_ratio on empty trace");
  mpq_class hi = 0, lo = 0;
  bool first = true;
  for (double x : values) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite value in trace");
    const mpq_class q(x);  // exact binary value of the double
    if (first || q > hi) hi = q;
    if (first || q < lo) lo = q;
    first = false;
  }
  const mpz_class kMax = (mpz_class(1) << 63) - 1;
  const mpz_class kMin = -(mpz_class(1) << 63);
  const auto fits = [&](int rat) {
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(rat));
    return mpq_class(hi * scale) <= mpq_class(kMax) && mpq_class(lo * scale) >= mpq_class(kMin);
  };
  if (!fits(0)) throw std::overflow_error("trace overflows int64 before scaling");
  if (hi == 0 && lo == 0) return max_rat;
  int rat = 0;
  while (fits(rat + 1)) ++rat;
  return rat;
}

// ------------------------------------------------------------ trace files

namespace {
constexpr uint32_t kTraceVersion = 1;
}

std::vector<uint8_t> serialize_trace(const FixedTrace& trace) {
  const auto& s = *trace.spec;
  codec::Writer w;
  codec::write_header(w, "TRCE", kTraceVersion);
  w.u32(static_cast<uint32_t>(trace.rat));
  w.u64(s.syms.size());
  for (size_t i = 0; i < s.syms.size(); ++i) {
    w.u8(static_cast<uint8_t>(s.syms[i].kind));
    w.i64(s.syms[i].value);
    w.i64(trace.syms[i]);
  }
  w.u64(s.exprs.size());
  for (const auto& e : s.exprs) {
    w.u8(static_cast<uint8_t>(e.op));
    w.u32(e.a);
    w.u32(e.b);
    w.u32(e.out);
    w.u32(e.rem);
    w.i64(e.num);
    w.i64(e.div);
  }
  for (const auto* list : {&s.inputs, &s.data, &s.outputs}) {
    w.u64(list->size());
    for (auto x : *list) w.u32(x);
  }
  w.u64(s.guards.size());
  for (const auto& g : s.guards) {
    w.u32(g.sym);
    w.i64(g.lo);
    w.i64(g.hi);
    w.str(g.what);
  }
  return w.take();
}

FixedTrace deserialize_trace(std::span<const uint8_t> bytes) {
  codec::Reader r(bytes);
  codec::read_header(r, "TRCE", kTraceVersion);
  auto spec = std::make_shared<PieceSpec>();
  FixedTrace t;
  t.rat = static_cast<int>(r.u32());
  spec->rat = t.rat;
  const size_t n = r.count(1u << 26);
  for (size_t i = 0; i < n; ++i) {
    const uint8_t kind = r.u8();
    if (kind > static_cast<uint8_t>(SymKind::kInternal)) throw std::runtime_error("bad sym kind");
    const int64_t value = r.i64();
    spec->syms.push_back({static_cast<SymKind>(kind), value});
    t.syms.push_back(r.i64());
  }
  const size_t ne = r.count(1u << 26);
  for (size_t i = 0; i < ne; ++i) {
    FixedExpr e;
    const uint8_t op = r.u8();
    if (op > static_cast<uint8_t>(FixedOp::kRecip)) throw std::runtime_error("bad expression op");
    e.op = static_cast<FixedOp>(op);
    e.a = r.u32();
    e.b = r.u32();
    e.out = r.u32();
    e.rem = r.u32();
    e.num = r.i64();
    e.div = r.i64();
    for (uint32_t idx : {e.a, e.b, e.out, e.rem}) {
      if (idx >= n) throw std::runtime_error("expression operand out of range");
    }
    spec->exprs.push_back(e);
  }
  for (auto* list : {&spec->inputs, &spec->data, &spec->outputs}) {
    const size_t k = r.count(n);
    for (size_t i = 0; i < k; ++i) {
      const uint32_t idx = r.u32();
      if (idx >= n) throw std::runtime_error("symbol index out of range");
      list->push_back(idx);
    }
  }
  const size_t ng = r.count(n);
  for (size_t i = 0; i < ng; ++i) {
    FixedGuard g;
    g.sym = r.u32();
    if (g.sym >= n) throw std::runtime_error("guard index out of range");
    g.lo = r.i64();
    g.hi = r.i64();
    g.what = r.str();
    spec->guards.push_back(std::move(g));
  }
  r.expect_done();
  t.spec = std::move(spec);
  return t;
}

// ------------------------------------------------------------ Taylor

double exact_eval(const std::string& op, double x) {
  if (op == "sigmoid") return 1.0 / (1.0 + std::exp(-x));
  if (op == "exp") return std::exp(x);
  throw std::invalid_argument("no reference evaluator for " + op);
}

namespace {
double horner_exp(int order, double x) {
  double acc = 1.0;
  for (int k = order; k >= 1; --k) acc = 1.0 + x * acc / k;
  return acc;
}
}  // namespace

double taylor_eval(const std::string& op, int order, double x) {
  if (op == "sigmoid") return 1.0 / (1.0 + horner_exp(order, -x));
  if (op == "exp") return horner_exp(order, x);
  throw std::invalid_argument("no Taylor expansion for " + op);
}

TaylorApprox make_taylor(const std::string& op, int order) {
  exact_eval(op, 0.0);  // rejects unknown ops
  if (order < 0 || order > 20) throw std::invalid_argument("Taylor order must lie in [0, 20]");
  TaylorApprox a;
  a.op = op;
  a.order = order;
  int64_t fact = 1;
  for (int k = 0; k <= order; ++k) {
    if (k > 0) fact *= k;
    a.coefficients.push_back({1, fact});
  }
  return a;
}

TaylorApprox taylor_select(const std::string& op, std::span<const double> points, double E,
                           double max_error_init, int max_order) {
  if (!(E > 0)) throw std::invalid_argument("error bound must be positive");
  if (points.empty()) throw std::invalid_argument("no evaluation points");
  max_order = std::min(max_order, 20);
  double error = max_error_init;
  int order = 0;
  for (;;) {
    error = 0;
    for (double x : points) {
      error = std::max(error, std::fabs(taylor_eval(op, order, x) - exact_eval(op, x)));
    }
    if (error <= E) break;
    if (++order > max_order) {
      throw std::runtime_error("Taylor order ceiling reached without meeting the error bound");
    }
  }
  TaylorApprox a = make_taylor(op, order);
  a.error_bound = E;
  a.points.assign(points.begin(), points.end());
  a.max_error = error;
  for (double x : points) a.domain = std::max(a.domain, std::fabs(x));
  return a;
}

Program::Var emit_sigmoid(Program& p, Program::Var z, int order) {
  const auto one = p.constant(1.0);
  auto acc = one;
  for (int k = order; k >= 1; --k) {
    acc = p.add(one, p.scale_mul(z, acc, Ratio{-1, k}));
  }
  return p.recip(p.add(one, acc));
}

int64_t approx_eval(const TaylorApprox& approx, int64_t x, int rat) {
  if (approx.op != "sigmoid") throw std::invalid_argument("fixed-point evaluation supports sigmoid only");
  const int64_t bound = to_fixed(approx.domain, rat);
  if (x > bound || x < -bound) throw std::domain_error("argument outside the validated Taylor domain");
  Program p;
  const auto z = p.input();
  p.output(emit_sigmoid(p, z, approx.order));
  auto spec = std::make_shared<const PieceSpec>(lower(p, rat));
  const int64_t in[1] = {x};
  return evaluate(spec, in, {}).outputs().front();
}

}  // namespace pzkpfl::quantize
