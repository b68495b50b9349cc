#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "mrx/field.hpp"

using namespace mrx;

namespace {

// Independent polynomial multiplication mod (p, modulus), coefficient lists low-first.
Elem poly_mul_ref(Elem a, Elem b, const FieldSpec& s) {
  const std::uint32_t p = s.characteristic, k = s.degree;
  std::vector<std::int64_t> x(k), y(k), z(2 * k, 0);
  for (std::uint32_t i = 0; i < k; ++i) x[i] = a % p, a /= p;
  for (std::uint32_t i = 0; i < k; ++i) y[i] = b % p, b /= p;
  for (std::uint32_t i = 0; i < k; ++i)
    for (std::uint32_t j = 0; j < k; ++j) z[i + j] += x[i] * y[j];
  for (std::uint32_t d = 2 * k - 1; d >= k; --d) {
    const std::int64_t c = z[d] % p;
    z[d] = 0;
    for (std::uint32_t i = 0; i < k; ++i) z[d - k + i] -= c * s.modulus[i];
  }
  Elem r = 0;
  for (std::uint32_t i = k; i-- > 0;) r = r * p + static_cast<Elem>(((z[i] % p) + p) % p);
  return r;
}

}  // namespace

TEST(FieldSpecTest, PrimeAndPrimePowerOrders) {
  for (std::uint32_t q : {2u, 3u, 5u, 7u, 11u, 13u, 65521u}) {
    const auto s = make_field_spec(q);
    EXPECT_EQ(s.degree, 1u);
    EXPECT_EQ(s.order, q);
  }
  for (std::uint32_t q : {4u, 8u, 9u, 16u, 25u, 27u}) {
    const auto s = make_field_spec(q);
    EXPECT_GT(s.degree, 1u);
    std::uint32_t o = 1;
    for (std::uint32_t i = 0; i < s.degree; ++i) o *= s.characteristic;
    EXPECT_EQ(o, q);
    EXPECT_NO_THROW(validate(s));
  }
}

TEST(FieldSpecTest, RejectsBadOrders) {
  EXPECT_THROW(make_field_spec(6), Error);
  EXPECT_THROW(make_field_spec(1), Error);
  EXPECT_THROW(make_field_spec(32), Error);
  try {
    make_field_spec(99991);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::resource_limit);
  }
}

TEST(FieldSpecTest, ReducibleModulusRejected) {
  FieldSpec s{2, 2, {1, 0, 1}, 4};  // x^2 + 1 = (x + 1)^2 over F_2
  EXPECT_THROW(validate(s), Error);
  FieldSpec t{3, 2, {2, 0, 1}, 9};  // x^2 - 1
  EXPECT_THROW(validate(t), Error);
}

TEST(FieldArith, Examples) {
  auto f5 = Field::make(5);
  EXPECT_EQ(ff_arith({f5, 3}, {f5, 4}, ArithKind::add).rep(), 2u);
  auto f4 = Field::make(4);
  EXPECT_EQ(ff_arith({f4, 2}, {f4, 2}, ArithKind::mul).rep(), 3u);
  auto f7 = Field::make(7);
  EXPECT_EQ(ff_inv({f7, 3}).rep(), 5u);
  auto f2 = Field::make(2);
  EXPECT_EQ(ff_inv({f2, 1}).rep(), 1u);
  for (std::uint32_t q : {2u, 3u, 4u, 5u, 7u, 8u, 9u, 101u}) {
    auto f = Field::make(q);
    for (Elem a = 0; a < std::min(q, 50u); ++a) EXPECT_EQ(f->mul(a, 1), a);
  }
}

TEST(FieldArith, ProductsMatchPolynomialReference) {
  for (std::uint32_t q : {4u, 8u, 9u, 16u, 25u, 27u}) {
    auto f = Field::make(q);
    for (Elem a = 0; a < q; ++a)
      for (Elem b = 0; b < q; ++b) ASSERT_EQ(f->mul(a, b), poly_mul_ref(a, b, f->spec())) << q << " " << a << " " << b;
  }
}

TEST(FieldArith, InverseExhaustive) {
  for (std::uint32_t q : {2u, 3u, 4u, 5u, 7u, 8u, 9u, 11u, 16u, 25u, 27u, 257u}) {
    auto f = Field::make(q);
    for (Elem a = 1; a < q; ++a) {
      ASSERT_EQ(f->mul(a, f->inv(a)), 1u);
      ASSERT_EQ(f->inv(f->inv(a)), a);
    }
  }
}

TEST(FieldArith, InverseOfZeroThrows) {
  auto f = Field::make(7);
  try {
    ff_inv({f, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::division_by_zero);
  }
}

TEST(FieldArith, MismatchedFieldsThrow) {
  auto f5 = Field::make(5), f7 = Field::make(7);
  try {
    ff_arith({f5, 1}, {f7, 1}, ArithKind::add);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::spec_mismatch);
  }
  // Same spec from two constructions is fine.
  EXPECT_EQ(ff_arith({Field::make(5), 2}, {Field::make(5), 4}, ArithKind::mul).rep(), 3u);
}

TEST(FieldArith, DistributivityAndCommutativity) {
  for (std::uint32_t q : {2u, 3u, 4u, 5u, 7u, 8u, 9u}) {
    auto f = Field::make(q);
    for (Elem a = 0; a < q; ++a)
      for (Elem b = 0; b < q; ++b) {
        ASSERT_EQ(f->mul(a, b), f->mul(b, a));
        ASSERT_EQ(f->add(f->sub(a, b), b), a);
        for (Elem c = 0; c < q; ++c) ASSERT_EQ(f->mul(a, f->add(b, c)), f->add(f->mul(a, b), f->mul(a, c)));
      }
  }
}

TEST(FieldArith, UntabledPrimeAgreesWithModularArithmetic) {
  auto f = Field::make(65521);
  EXPECT_FALSE(f->tabled());
  EXPECT_EQ(f->mul(65520, 65520), 1u);
  EXPECT_EQ(f->add(65520, 2), 1u);
  EXPECT_EQ(f->sub(0, 1), 65520u);
}

TEST(Trace, PrimeSubfieldAndLinearity) {
  for (std::uint32_t q : {4u, 8u, 9u, 27u}) {
    auto f = Field::make(q);
    for (Elem a = 0; a < q; ++a) {
      EXPECT_LT(f->trace(a), f->p());
      for (Elem b = 0; b < q; ++b) EXPECT_EQ(f->trace(f->add(a, b)), f->add(f->trace(a), f->trace(b)));
    }
  }
  auto f7 = Field::make(7);
  EXPECT_EQ(f7->trace(4), 4u);
}

TEST(Kloosterman, Examples) {
  for (std::uint32_t q : {2u, 3u, 4u, 5u, 9u}) EXPECT_NEAR(kloosterman(*Field::make(q), 0, 0), q - 1.0, 1e-12);
  EXPECT_NEAR(kloosterman(*Field::make(5), 1, 0), -1.0, 1e-12);
  EXPECT_NEAR(kloosterman(*Field::make(3), 1, 1), -1.0, 1e-12);
}

TEST(Kloosterman, MatchesDirectSumAndWeilBound) {
  for (std::uint32_t q : {3u, 5u, 7u}) {
    auto f = Field::make(q);
    for (Elem a = 1; a < q; ++a)
      for (Elem b = 1; b < q; ++b) {
        std::complex<double> s = 0;
        for (std::uint32_t x = 1; x < q; ++x) {
          std::uint32_t xi = 1;
          while (xi * x % q != 1) ++xi;
          s += std::polar(1.0, 2 * std::numbers::pi * ((a * x + b * xi) % q) / q);
        }
        EXPECT_LT(std::abs(s.imag()), 1e-9);
        EXPECT_NEAR(kloosterman(*f, a, b), s.real(), 1e-9);
        EXPECT_LE(std::abs(kloosterman(*f, a, b)), 2 * std::sqrt(double(q)) + 1e-12);
      }
  }
}
