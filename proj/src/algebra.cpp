// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pzkpfl/algebra.hpp"

#include <cstring>
#include <limits>
#include <stdexcept>

#include "pzkpfl/rng.hpp"

namespace pzkpfl::algebra {
namespace {

constexpr size_t kScalarBits = 255;

const char kHex[] = "0123456789abcdef";

Scalar small(uint64_t v) {
  const uint64_t limbs[4] = {v, 0, 0, 0};
  blst_fr f;
  blst_fr_from_uint64(&f, limbs);
  return Scalar::from_raw(f);
}

}  // namespace

// ---------------------------------------------------------------- Scalar

Scalar Scalar::one() { return small(1); }

Scalar Scalar::from_u64(uint64_t v) { return small(v); }

Scalar Scalar::from_i64(int64_t v) {
  if (v >= 0) return small(static_cast<uint64_t>(v));
  // -(v + 1) cannot overflow, so INT64_MIN is handled too.
  return -(small(static_cast<uint64_t>(-(v + 1))) + one());
}

Scalar Scalar::from_be_bytes_reduce(std::span<const uint8_t> bytes) {
  blst_scalar s;
  blst_scalar_from_be_bytes(&s, bytes.data(), bytes.size());
  blst_fr f;
  blst_fr_from_scalar(&f, &s);
  return from_raw(f);
}

Scalar Scalar::from_be_bytes(std::span<const uint8_t> bytes) {
  if (bytes.size() != kBytes) throw std::invalid_argument("scalar encoding must be 32 bytes");
  blst_scalar s;
  blst_scalar_from_bendian(&s, bytes.data());
  if (!blst_scalar_fr_check(&s)) throw std::invalid_argument("scalar encoding not reduced");
  blst_fr f;
  blst_fr_from_scalar(&f, &s);
  return from_raw(f);
}

Scalar Scalar::random(Rng& rng) {
  // Rejection sampling on 255-bit strings keeps the distribution exactly uniform.
  std::array<uint8_t, kBytes> buf;
  for (;;) {
    rng.fill(buf);
    buf[0] &= 0x7f;
    blst_scalar s;
    blst_scalar_from_bendian(&s, buf.data());
    if (blst_scalar_fr_check(&s)) {
      blst_fr f;
      blst_fr_from_scalar(&f, &s);
      return from_raw(f);
    }
  }
}

Scalar Scalar::from_string(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty scalar literal");
  bool neg = false;
  if (text.front() == '-') {
    neg = true;
    text.remove_prefix(1);
  }
  uint64_t base = 10;
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    base = 16;
    text.remove_prefix(2);
  }
  if (text.empty()) throw std::invalid_argument("empty scalar literal");
  const Scalar b = small(base);
  Scalar acc;
  for (char c : text) {
    uint64_t d;
    if (c >= '0' && c <= '9') {
      d = static_cast<uint64_t>(c - '0');
    } else if (base == 16 && c >= 'a' && c <= 'f') {
      d = static_cast<uint64_t>(c - 'a' + 10);
    } else if (base == 16 && c >= 'A' && c <= 'F') {
      d = static_cast<uint64_t>(c - 'A' + 10);
    } else {
      throw std::invalid_argument("bad digit in scalar literal");
    }
    if (d >= base) throw std::invalid_argument("bad digit in scalar literal");
    acc = acc * b + small(d);
  }
  return neg ? -acc : acc;
}

Scalar Scalar::operator+(const Scalar& o) const {
  Scalar r;
  blst_fr_add(&r.v_, &v_, &o.v_);
  return r;
}

Scalar Scalar::operator-(const Scalar& o) const {
  Scalar r;
  blst_fr_sub(&r.v_, &v_, &o.v_);
  return r;
}

Scalar Scalar::operator*(const Scalar& o) const {
  Scalar r;
  blst_fr_mul(&r.v_, &v_, &o.v_);
  return r;
}

Scalar Scalar::operator-() const {
  Scalar r;
  blst_fr_cneg(&r.v_, &v_, true);
  return r;
}

bool Scalar::operator==(const Scalar& o) const {
  return std::memcmp(&v_, &o.v_, sizeof(v_)) == 0;
}

bool Scalar::is_zero() const {
  static const blst_fr kZero{};
  return std::memcmp(&v_, &kZero, sizeof(v_)) == 0;
}

Scalar Scalar::inverse() const {
  if (is_zero()) throw std::domain_error("inverse of zero scalar");
  Scalar r;
  blst_fr_eucl_inverse(&r.v_, &v_);
  return r;
}

Scalar Scalar::pow(uint64_t e) const {
  Scalar result = one();
  Scalar base = *this;
  while (e != 0) {
    if (e & 1) result *= base;
    base *= base;
    e >>= 1;
  }
  return result;
}

std::array<uint8_t, Scalar::kBytes> Scalar::to_be_bytes() const {
  blst_scalar s;
  blst_scalar_from_fr(&s, &v_);
  std::array<uint8_t, kBytes> out;
  blst_bendian_from_scalar(out.data(), &s);
  return out;
}

blst_scalar Scalar::to_blst_scalar() const {
  blst_scalar s;
  blst_scalar_from_fr(&s, &v_);
  return s;
}

std::optional<int64_t> Scalar::to_i64() const {
  uint64_t limbs[4];
  blst_uint64_from_fr(limbs, &v_);
  if (limbs[1] == 0 && limbs[2] == 0 && limbs[3] == 0 &&
      limbs[0] <= static_cast<uint64_t>(std::numeric_limits<int64_t>::max())) {
    return static_cast<int64_t>(limbs[0]);
  }
  uint64_t neg[4];
  const Scalar n = -*this;
  blst_uint64_from_fr(neg, &n.v_);
  if (neg[1] == 0 && neg[2] == 0 && neg[3] == 0 && neg[0] != 0 &&
      neg[0] <= (uint64_t{1} << 63)) {
    if (neg[0] == (uint64_t{1} << 63)) return std::numeric_limits<int64_t>::min();
    return -static_cast<int64_t>(neg[0]);
  }
  return std::nullopt;
}

std::string Scalar::to_hex() const {
  const auto b = to_be_bytes();
  std::string s;
  s.reserve(2 * b.size());
  for (uint8_t c : b) {
    s.push_back(kHex[c >> 4]);
    s.push_back(kHex[c & 15]);
  }
  return s;
}

void batch_inverse(std::vector<Scalar>& values) {
  if (values.empty()) return;
  std::vector<Scalar> prefix(values.size());
  Scalar acc = Scalar::one();
  for (size_t i = 0; i < values.size(); ++i) {
    if (values[i].is_zero()) throw std::domain_error("batch inverse of zero scalar");
    prefix[i] = acc;
    acc *= values[i];
  }
  Scalar inv = acc.inverse();
  for (size_t i = values.size(); i-- > 0;) {
    const Scalar v = values[i];
    values[i] = inv * prefix[i];
    inv *= v;
  }
}

// ---------------------------------------------------------------- G1

G1 G1::generator() {
  G1 g;
  g.p_ = *blst_p1_generator();
  return g;
}

G1 G1::from_affine(const blst_p1_affine& a) {
  G1 g;
  if (!blst_p1_affine_is_inf(&a)) blst_p1_from_affine(&g.p_, &a);
  return g;
}

G1 G1::from_compressed(std::span<const uint8_t> bytes) {
  if (bytes.size() != kCompressedBytes) throw std::invalid_argument("G1 encoding must be 48 bytes");
  blst_p1_affine a;
  if (blst_p1_uncompress(&a, bytes.data()) != BLST_SUCCESS) {
    throw std::invalid_argument("malformed G1 encoding");
  }
  if (!blst_p1_affine_in_g1(&a)) throw std::invalid_argument("point not in G1");
  return from_affine(a);
}

G1 G1::hash_to(std::span<const uint8_t> msg, std::string_view dst) {
  G1 g;
  blst_hash_to_g1(&g.p_, msg.data(), msg.size(), reinterpret_cast<const uint8_t*>(dst.data()),
                  dst.size(), nullptr, 0);
  return g;
}

G1 G1::operator+(const G1& o) const {
  G1 r;
  blst_p1_add_or_double(&r.p_, &p_, &o.p_);
  return r;
}

G1 G1::operator-() const {
  G1 r = *this;
  blst_p1_cneg(&r.p_, true);
  return r;
}

G1 G1::operator-(const G1& o) const { return *this + (-o); }

G1 G1::operator*(const Scalar& s) const {
  const blst_scalar b = s.to_blst_scalar();
  G1 r;
  blst_p1_mult(&r.p_, &p_, b.b, kScalarBits);
  return r;
}

bool G1::operator==(const G1& o) const { return blst_p1_is_equal(&p_, &o.p_); }
bool G1::is_identity() const { return blst_p1_is_inf(&p_); }
bool G1::in_group() const { return blst_p1_in_g1(&p_); }

std::array<uint8_t, G1::kCompressedBytes> G1::compress() const {
  std::array<uint8_t, kCompressedBytes> out;
  blst_p1_compress(out.data(), &p_);
  return out;
}

blst_p1_affine G1::to_affine() const {
  blst_p1_affine a;
  blst_p1_to_affine(&a, &p_);
  return a;
}

// ---------------------------------------------------------------- G2

G2 G2::generator() {
  G2 g;
  g.p_ = *blst_p2_generator();
  return g;
}

G2 G2::from_affine(const blst_p2_affine& a) {
  G2 g;
  if (!blst_p2_affine_is_inf(&a)) blst_p2_from_affine(&g.p_, &a);
  return g;
}

G2 G2::from_compressed(std::span<const uint8_t> bytes) {
  if (bytes.size() != kCompressedBytes) throw std::invalid_argument("G2 encoding must be 96 bytes");
  blst_p2_affine a;
  if (blst_p2_uncompress(&a, bytes.data()) != BLST_SUCCESS) {
    throw std::invalid_argument("malformed G2 encoding");
  }
  if (!blst_p2_affine_in_g2(&a)) throw std::invalid_argument("point not in G2");
  return from_affine(a);
}

G2 G2::operator+(const G2& o) const {
  G2 r;
  blst_p2_add_or_double(&r.p_, &p_, &o.p_);
  return r;
}

G2 G2::operator-() const {
  G2 r = *this;
  blst_p2_cneg(&r.p_, true);
  return r;
}

G2 G2::operator-(const G2& o) const { return *this + (-o); }

G2 G2::operator*(const Scalar& s) const {
  const blst_scalar b = s.to_blst_scalar();
  G2 r;
  blst_p2_mult(&r.p_, &p_, b.b, kScalarBits);
  return r;
}

bool G2::operator==(const G2& o) const { return blst_p2_is_equal(&p_, &o.p_); }
bool G2::is_identity() const { return blst_p2_is_inf(&p_); }
bool G2::in_group() const { return blst_p2_in_g2(&p_); }

std::array<uint8_t, G2::kCompressedBytes> G2::compress() const {
  std::array<uint8_t, kCompressedBytes> out;
  blst_p2_compress(out.data(), &p_);
  return out;
}

blst_p2_affine G2::to_affine() const {
  blst_p2_affine a;
  blst_p2_to_affine(&a, &p_);
  return a;
}

// ---------------------------------------------------------------- GT

Gt::Gt() : v_(*blst_fp12_one()) {}

Gt Gt::operator*(const Gt& o) const {
  Gt r;
  blst_fp12_mul(&r.v_, &v_, &o.v_);
  return r;
}

Gt Gt::inverse() const {
  Gt r;
  blst_fp12_inverse(&r.v_, &v_);
  return r;
}

Gt Gt::pow(const Scalar& e) const {
  const auto bytes = e.to_be_bytes();
  Gt acc;
  for (uint8_t byte : bytes) {
    for (int bit = 7; bit >= 0; --bit) {
      blst_fp12_sqr(&acc.v_, &acc.v_);
      if ((byte >> bit) & 1) blst_fp12_mul(&acc.v_, &acc.v_, &v_);
    }
  }
  return acc;
}

bool Gt::operator==(const Gt& o) const { return blst_fp12_is_equal(&v_, &o.v_); }
bool Gt::is_one() const { return blst_fp12_is_one(&v_); }

Gt pairing(const G1& a, const G2& b) {
  const G1 as[1] = {a};
  const G2 bs[1] = {b};
  return multi_pairing(as, bs);
}

Gt multi_pairing(std::span<const G1> as, std::span<const G2> bs) {
  if (as.size() != bs.size()) throw std::invalid_argument("multi_pairing length mismatch");
  blst_fp12 acc = *blst_fp12_one();
  bool any = false;
  for (size_t i = 0; i < as.size(); ++i) {
    if (as[i].is_identity() || bs[i].is_identity()) continue;
    const blst_p1_affine p = as[i].to_affine();
    const blst_p2_affine q = bs[i].to_affine();
    blst_fp12 ml;
    blst_miller_loop(&ml, &q, &p);
    if (any) {
      blst_fp12_mul(&acc, &acc, &ml);
    } else {
      acc = ml;
      any = true;
    }
  }
  if (!any) return Gt::one();
  blst_fp12 out;
  blst_final_exp(&out, &acc);
  return Gt::from_raw(out);
}

// ---------------------------------------------------------------- MSM

namespace {

struct G1Ops {
  using Point = blst_p1;
  using Affine = blst_p1_affine;
  static bool affine_is_inf(const Affine& a) { return blst_p1_affine_is_inf(&a); }
  static void add_affine(Point* out, const Point* a, const Affine* b) {
    blst_p1_add_or_double_affine(out, a, b);
  }
  static void add(Point* out, const Point* a, const Point* b) { blst_p1_add_or_double(out, a, b); }
  static size_t scratch(size_t n) { return blst_p1s_mult_pippenger_scratch_sizeof(n); }
  static void pippenger(Point* out, const Affine* pts, size_t n, const uint8_t* scalars,
                        limb_t* scratch) {
    const Affine* pp[2] = {pts, nullptr};
    const uint8_t* sp[2] = {scalars, nullptr};
    blst_p1s_mult_pippenger(out, pp, n, sp, kScalarBits, scratch);
  }
  static void to_affine(Affine* dst, const Point* src, size_t n) {
    const Point* sp[2] = {src, nullptr};
    blst_p1s_to_affine(dst, sp, n);
  }
};

struct G2Ops {
  using Point = blst_p2;
  using Affine = blst_p2_affine;
  static bool affine_is_inf(const Affine& a) { return blst_p2_affine_is_inf(&a); }
  static void add_affine(Point* out, const Point* a, const Affine* b) {
    blst_p2_add_or_double_affine(out, a, b);
  }
  static void add(Point* out, const Point* a, const Point* b) { blst_p2_add_or_double(out, a, b); }
  static size_t scratch(size_t n) { return blst_p2s_mult_pippenger_scratch_sizeof(n); }
  static void pippenger(Point* out, const Affine* pts, size_t n, const uint8_t* scalars,
                        limb_t* scratch) {
    const Affine* pp[2] = {pts, nullptr};
    const uint8_t* sp[2] = {scalars, nullptr};
    blst_p2s_mult_pippenger(out, pp, n, sp, kScalarBits, scratch);
  }
  static void to_affine(Affine* dst, const Point* src, size_t n) {
    const Point* sp[2] = {src, nullptr};
    blst_p2s_to_affine(dst, sp, n);
  }
};

// Zero scalars are skipped and unit scalars become plain additions; the
// remainder goes through Pippenger. Witnesses full of bits make this pay off.
template <typename Ops>
typename Ops::Point msm_affine(std::span<const typename Ops::Affine> points,
                               std::span<const Scalar> scalars) {
  using Point = typename Ops::Point;
  using Affine = typename Ops::Affine;
  if (points.size() != scalars.size()) throw std::invalid_argument("msm length mismatch");
  const Scalar one = Scalar::one();
  Point acc{};
  std::vector<Affine> heavy_points;
  std::vector<uint8_t> heavy_scalars;
  for (size_t i = 0; i < points.size(); ++i) {
    if (scalars[i].is_zero() || Ops::affine_is_inf(points[i])) continue;
    if (scalars[i] == one) {
      Ops::add_affine(&acc, &acc, &points[i]);
      continue;
    }
    heavy_points.push_back(points[i]);
    const blst_scalar s = scalars[i].to_blst_scalar();
    heavy_scalars.insert(heavy_scalars.end(), s.b, s.b + sizeof(s.b));
  }
  if (!heavy_points.empty()) {
    std::vector<limb_t> scratch(Ops::scratch(heavy_points.size()) / sizeof(limb_t) + 1);
    Point part;
    Ops::pippenger(&part, heavy_points.data(), heavy_points.size(), heavy_scalars.data(),
                   scratch.data());
    Ops::add(&acc, &acc, &part);
  }
  return acc;
}

template <typename Ops, typename Elem>
std::vector<typename Ops::Affine> normalise(std::span<const Elem> points) {
  std::vector<typename Ops::Point> raw(points.size());
  for (size_t i = 0; i < points.size(); ++i) raw[i] = points[i].raw();
  std::vector<typename Ops::Affine> out(points.size());
  if (!raw.empty()) Ops::to_affine(out.data(), raw.data(), raw.size());
  return out;
}

}  // namespace

G1 msm(std::span<const G1> bases, std::span<const Scalar> scalars) {
  if (bases.size() != scalars.size()) throw std::invalid_argument("msm length mismatch");
  return G1Table(bases).msm(scalars);
}

G2 msm(std::span<const G2> bases, std::span<const Scalar> scalars) {
  if (bases.size() != scalars.size()) throw std::invalid_argument("msm length mismatch");
  return G2Table(bases).msm(scalars);
}

G1Table::G1Table(std::span<const G1> points) : affine_(normalise<G1Ops>(points)) {}

G1 G1Table::msm(std::span<const Scalar> scalars) const {
  blst_p1 p = msm_affine<G1Ops>(std::span<const blst_p1_affine>(affine_), scalars);
  blst_p1_affine a;
  blst_p1_to_affine(&a, &p);
  return G1::from_affine(a);
}

G2Table::G2Table(std::span<const G2> points) : affine_(normalise<G2Ops>(points)) {}

G2 G2Table::msm(std::span<const Scalar> scalars) const {
  blst_p2 p = msm_affine<G2Ops>(std::span<const blst_p2_affine>(affine_), scalars);
  blst_p2_affine a;
  blst_p2_to_affine(&a, &p);
  return G2::from_affine(a);
}

// ---------------------------------------------------------------- hashing

std::array<uint8_t, 32> sha256(std::span<const uint8_t> data) {
  std::array<uint8_t, 32> out;
  blst_sha256(out.data(), data.data(), data.size());
  return out;
}

Scalar hash_to_scalar(std::span<const uint8_t> transcript) {
  const auto digest = sha256(transcript);
  return Scalar::from_be_bytes_reduce(digest);
}

namespace {
void put_len(std::vector<uint8_t>& buf, size_t n) {
  const auto v = static_cast<uint32_t>(n);
  buf.push_back(static_cast<uint8_t>(v >> 24));
  buf.push_back(static_cast<uint8_t>(v >> 16));
  buf.push_back(static_cast<uint8_t>(v >> 8));
  buf.push_back(static_cast<uint8_t>(v));
}
}  // namespace

Transcript& Transcript::append(const G1& p) {
  const auto b = p.compress();
  return append_bytes(b);
}

Transcript& Transcript::append(const G2& p) {
  const auto b = p.compress();
  return append_bytes(b);
}

Transcript& Transcript::append(const Scalar& s) {
  const auto b = s.to_be_bytes();
  return append_bytes(b);
}

Transcript& Transcript::append_bytes(std::span<const uint8_t> bytes) {
  put_len(buf_, bytes.size());
  buf_.insert(buf_.end(), bytes.begin(), bytes.end());
  return *this;
}

}  // namespace pzkpfl::algebra
