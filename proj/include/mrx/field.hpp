#pragma once

// Exact arithmetic in F_q for prime q and a fixed set of small prime powers.

#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "mrx/error.hpp"

namespace mrx {

/// Canonical element encoding: coefficient vector of the residue polynomial, read base p.
using Elem = std::uint32_t;

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

/// Largest prime order we accept for plain modular arithmetic.
inline constexpr std::uint32_t kMaxPrimeOrder = 1u << 16;

/// Orders up to this size use full q x q lookup tables.
inline constexpr std::uint32_t kTableOrderLimit = 32;

struct FieldSpec {
  std::uint32_t characteristic = 0;
  std::uint32_t degree = 1;
  /// Monic modulus, coefficients low to high (size degree+1). Empty for prime fields.
  std::vector<std::uint32_t> modulus;
  std::uint32_t order = 0;

  bool operator==(const FieldSpec&) const = default;

  std::string modulus_string() const {
    if (modulus.empty()) return "none";
    std::string s;
    for (std::size_t i = 0; i < modulus.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(modulus[i]);
    }
    return s;
  }
};

namespace detail {

// Polynomials over F_p as coefficient vectors, low to high, trailing zeros trimmed.
using Poly = std::vector<std::uint32_t>;

inline void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline std::uint32_t inv_mod_prime(std::uint32_t a, std::uint32_t p) {
  // Fermat; p is prime and small.
  std::uint64_t r = 1, b = a % p;
  for (std::uint32_t e = p - 2; e; e >>= 1) {
    if (e & 1) r = r * b % p;
    b = b * b % p;
  }
  return static_cast<std::uint32_t>(r);
}

inline Poly poly_mod(Poly a, const Poly& m, std::uint32_t p) {
  trim(a);
  const std::size_t dm = m.size() - 1;
  const std::uint32_t lead_inv = inv_mod_prime(m.back(), p);
  while (a.size() > dm) {
    const std::size_t shift = a.size() - 1 - dm;
    const std::uint64_t f = static_cast<std::uint64_t>(a.back()) * lead_inv % p;
    for (std::size_t i = 0; i <= dm; ++i) {
      const std::uint64_t sub = f * m[i] % p;
      a[shift + i] = static_cast<std::uint32_t>((a[shift + i] + p - sub) % p);
    }
    trim(a);
  }
  return a;
}

inline bool is_irreducible(const Poly& m, std::uint32_t p) {
  const std::size_t k = m.size() - 1;
  if (k <= 1) return k == 1;
  // Trial division by every monic polynomial of degree 1..k/2.
  for (std::size_t d = 1; d <= k / 2; ++d) {
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < d; ++i) count *= p;
    for (std::uint64_t code = 0; code < count; ++code) {
      Poly g(d + 1);
      std::uint64_t c = code;
      for (std::size_t i = 0; i < d; ++i) {
        g[i] = static_cast<std::uint32_t>(c % p);
        c /= p;
      }
      g[d] = 1;
      if (poly_mod(m, g, p).empty()) return false;
    }
  }
  return true;
}

}  // namespace detail

/// Builds and validates a spec. Prime q is accepted up to kMaxPrimeOrder;
/// prime powers must come from the built-in modulus table.
inline FieldSpec make_field_spec(std::uint32_t q) {
  struct Entry {
    std::uint32_t q, p, k;
    std::vector<std::uint32_t> modulus;
  };
  static const std::vector<Entry> table = {
      {4, 2, 2, {1, 1, 1}},       // x^2 + x + 1
      {8, 2, 3, {1, 1, 0, 1}},    // x^3 + x + 1
      {9, 3, 2, {1, 0, 1}},       // x^2 + 1
      {16, 2, 4, {1, 1, 0, 0, 1}},  // x^4 + x + 1
      {25, 5, 2, {2, 0, 1}},      // x^2 + 2
      {27, 3, 3, {1, 2, 0, 1}},   // x^3 + 2x + 1
  };
  if (q < 2) throw Error(ErrorKind::domain, "field order must be at least 2");
  if (is_prime(q)) {
    if (q > kMaxPrimeOrder)
      throw Error(ErrorKind::resource_limit, "prime order " + std::to_string(q) + " too large");
    return FieldSpec{q, 1, {}, q};
  }
  for (const auto& e : table)
    if (e.q == q) return FieldSpec{e.p, e.k, e.modulus, e.q};
  throw Error(ErrorKind::domain,
              "unsupported field order " + std::to_string(q) +
                  " (prime, or one of 4, 8, 9, 16, 25, 27)");
}

inline void validate(const FieldSpec& s) {
  if (!is_prime(s.characteristic))
    throw Error(ErrorKind::domain, "characteristic is not prime");
  std::uint64_t order = 1;
  for (std::uint32_t i = 0; i < s.degree; ++i) order *= s.characteristic;
  if (order != s.order) throw Error(ErrorKind::domain, "order != p^k");
  if (s.degree == 1) {
    if (!s.modulus.empty()) throw Error(ErrorKind::domain, "prime field carries no modulus");
    return;
  }
  if (s.modulus.size() != s.degree + 1 || s.modulus.back() != 1)
    throw Error(ErrorKind::domain, "modulus must be monic of degree k");
  for (auto c : s.modulus)
    if (c >= s.characteristic) throw Error(ErrorKind::domain, "modulus coefficient out of range");
  if (!detail::is_irreducible(s.modulus, s.characteristic))
    throw Error(ErrorKind::domain, "modulus is reducible");
}

/// Immutable after construction; share freely across threads.
class Field {
 public:
  explicit Field(FieldSpec spec) : spec_(std::move(spec)) {
    validate(spec_);
    q_ = spec_.order;
    p_ = spec_.characteristic;
    if (spec_.degree > 1 && q_ > kTableOrderLimit)
      throw Error(ErrorKind::resource_limit, "prime-power fields limited to small q");
    if (q_ <= kTableOrderLimit) build_tables();
  }

  static std::shared_ptr<const Field> make(std::uint32_t q) {
    return std::make_shared<const Field>(make_field_spec(q));
  }

  const FieldSpec& spec() const noexcept { return spec_; }
  std::uint32_t q() const noexcept { return q_; }
  std::uint32_t p() const noexcept { return p_; }
  std::uint32_t degree() const noexcept { return spec_.degree; }
  bool tabled() const noexcept { return !mul_.empty(); }

  Elem add(Elem a, Elem b) const {
    if (tabled()) return add_[a * q_ + b];
    return static_cast<Elem>((std::uint64_t{a} + b) % q_);
  }
  Elem sub(Elem a, Elem b) const {
    if (tabled()) return sub_[a * q_ + b];
    return static_cast<Elem>((std::uint64_t{a} + q_ - b) % q_);
  }
  Elem neg(Elem a) const { return sub(0, a); }
  Elem mul(Elem a, Elem b) const {
    if (tabled()) return mul_[a * q_ + b];
    return static_cast<Elem>(std::uint64_t{a} * b % q_);
  }
  Elem inv(Elem a) const {
    if (a == 0) throw Error(ErrorKind::division_by_zero, "inverse of zero");
    if (tabled()) return inv_[a];
    return detail::inv_mod_prime(a, q_);
  }

  /// Absolute trace F_q -> F_p, returned as an element of the prime subfield (rep < p).
  Elem trace(Elem a) const {
    Elem t = 0, x = a;
    for (std::uint32_t i = 0; i < spec_.degree; ++i) {
      t = add(t, x);
      if (i + 1 < spec_.degree) x = frobenius(x);
    }
    return t;
  }

  /// x -> x^p.
  Elem frobenius(Elem x) const {
    Elem r = 1;
    for (std::uint32_t i = 0; i < p_; ++i) r = mul(r, x);
    return r;
  }

 private:
  void build_tables() {
    const std::size_t qq = std::size_t{q_} * q_;
    add_.resize(qq);
    sub_.resize(qq);
    mul_.resize(qq);
    inv_.assign(q_, 0);
    for (Elem a = 0; a < q_; ++a)
      for (Elem b = 0; b < q_; ++b) {
        add_[a * q_ + b] = slow_add(a, b, false);
        sub_[a * q_ + b] = slow_add(a, b, true);
        mul_[a * q_ + b] = slow_mul(a, b);
      }
    for (Elem a = 1; a < q_; ++a)
      for (Elem b = 1; b < q_; ++b)
        if (mul_[a * q_ + b] == 1) inv_[a] = b;
  }

  detail::Poly unpack(Elem a) const {
    detail::Poly v(spec_.degree);
    for (auto& c : v) {
      c = a % p_;
      a /= p_;
    }
    return v;
  }
  Elem pack(const detail::Poly& v) const {
    Elem r = 0;
    for (std::size_t i = v.size(); i-- > 0;) r = r * p_ + v[i];
    return r;
  }

  Elem slow_add(Elem a, Elem b, bool subtract) const {
    auto x = unpack(a), y = unpack(b);
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] = subtract ? (x[i] + p_ - y[i]) % p_ : (x[i] + y[i]) % p_;
    return pack(x);
  }

  Elem slow_mul(Elem a, Elem b) const {
    if (spec_.degree == 1) return static_cast<Elem>(std::uint64_t{a} * b % p_);
    auto x = unpack(a), y = unpack(b);
    detail::Poly prod(2 * spec_.degree - 1, 0);
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = 0; j < y.size(); ++j)
        prod[i + j] = static_cast<std::uint32_t>((prod[i + j] + std::uint64_t{x[i]} * y[j]) % p_);
    auto r = detail::poly_mod(prod, spec_.modulus, p_);
    r.resize(spec_.degree, 0);
    return pack(r);
  }

  FieldSpec spec_;
  std::uint32_t q_ = 0, p_ = 0;
  std::vector<Elem> add_, sub_, mul_, inv_;
};

using FieldPtr = std::shared_ptr<const Field>;

/// Checked element: arithmetic across different fields raises spec-mismatch.
class FieldElement {
 public:
  FieldElement(FieldPtr field, Elem rep) : field_(std::move(field)), rep_(rep) {
    if (!field_) throw Error(ErrorKind::domain, "null field");
    if (rep_ >= field_->q()) throw Error(ErrorKind::domain, "element out of range");
  }

  Elem rep() const noexcept { return rep_; }
  const FieldPtr& field() const noexcept { return field_; }

  FieldElement operator+(const FieldElement& o) const { return {field_, field_->add(rep_, check(o))}; }
  FieldElement operator-(const FieldElement& o) const { return {field_, field_->sub(rep_, check(o))}; }
  FieldElement operator*(const FieldElement& o) const { return {field_, field_->mul(rep_, check(o))}; }
  FieldElement inv() const { return {field_, field_->inv(rep_)}; }

  bool operator==(const FieldElement& o) const {
    return rep_ == o.rep_ && field_->spec() == o.field_->spec();
  }

 private:
  Elem check(const FieldElement& o) const {
    if (field_ != o.field_ && !(field_->spec() == o.field_->spec()))
      throw Error(ErrorKind::spec_mismatch, "operands from different fields");
    return o.rep_;
  }

  FieldPtr field_;
  Elem rep_;
};

enum class ArithKind { add, sub, mul };

inline FieldElement ff_arith(const FieldElement& a, const FieldElement& b, ArithKind kind) {
  switch (kind) {
    case ArithKind::add: return a + b;
    case ArithKind::sub: return a - b;
    case ArithKind::mul: return a * b;
  }
  throw Error(ErrorKind::domain, "bad arithmetic kind");
}

inline FieldElement ff_inv(const FieldElement& a) { return a.inv(); }

/// Raw complex Kloosterman sum  sum_{x != 0} e(Tr(a x + b / x) / p).
inline std::complex<double> kloosterman_complex(const Field& f, Elem a, Elem b) {
  std::complex<double> s{0.0, 0.0};
  const double w = 2.0 * std::numbers::pi / f.p();
  for (Elem x = 1; x < f.q(); ++x) {
    const Elem arg = f.add(f.mul(a, x), f.mul(b, f.inv(x)));
    const double t = w * f.trace(arg);
    s += std::complex<double>{std::cos(t), std::sin(t)};
  }
  return s;
}

/// The sum is real (x -> -x conjugates each term); |Im| above 1e-9 means a bug.
inline double kloosterman(const Field& f, Elem a, Elem b) {
  const auto s = kloosterman_complex(f, a, b);
  if (std::abs(s.imag()) >= 1e-9)
    throw Error(ErrorKind::domain, "Kloosterman sum has non-negligible imaginary part");
  return s.real();
}

}  // namespace mrx
