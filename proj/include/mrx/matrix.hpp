#pragma once

// The ring M_2(F_q): arithmetic, det/rank classification, the integer
// encoding of matrices, and enumeration of SL_2, GL_2 and determinant slices.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mrx/error.hpp"
#include "mrx/field.hpp"

namespace mrx {

/// Row-major [[a, b], [c, d]].
struct Mat2 {
  Elem a = 0, b = 0, c = 0, d = 0;
  bool operator==(const Mat2&) const = default;
};

/// ((a q + b) q + c) q + d, a bijection M_2(F_q) <-> [0, q^4).
using MatIndex = std::uint32_t;

/// Enumeration is capped here; q^4 = 531441 at q = 27.
inline constexpr std::uint32_t kMaxTableOrder = 27;

enum class MatOp { add, sub, mul };
enum class ScaleSide { row, column };
enum class Rank1Orientation { row_form, swapped_row_form };

/// For rank-1 x: row_form means row2 = factor * row1 with row1 != 0;
/// swapped_row_form means row1 = 0 (factor is the infinity marker, i.e. empty).
struct Rank1Profile {
  std::optional<Elem> factor;
  Rank1Orientation orientation = Rank1Orientation::row_form;
  bool operator==(const Rank1Profile&) const = default;
};

class MatrixRing {
 public:
  explicit MatrixRing(FieldPtr field) : field_(std::move(field)), q_(field_->q()) {
    const std::uint64_t n = std::uint64_t{q_} * q_ * q_ * q_;
    if (n > 0xffffffffull) throw Error(ErrorKind::resource_limit, "q^4 exceeds 32-bit indices");
    size_ = static_cast<std::uint32_t>(n);
  }

  const Field& field() const noexcept { return *field_; }
  const FieldPtr& field_ptr() const noexcept { return field_; }
  std::uint32_t q() const noexcept { return q_; }
  /// q^4.
  std::uint32_t size() const noexcept { return size_; }

  Mat2 identity() const { return {1, 0, 0, 1}; }
  Mat2 zero() const { return {}; }

  void check(const Mat2& x) const {
    if (x.a >= q_ || x.b >= q_ || x.c >= q_ || x.d >= q_)
      throw Error(ErrorKind::spec_mismatch, "matrix entry outside F_" + std::to_string(q_));
  }

  Mat2 add(const Mat2& x, const Mat2& y) const {
    const Field& f = *field_;
    return {f.add(x.a, y.a), f.add(x.b, y.b), f.add(x.c, y.c), f.add(x.d, y.d)};
  }
  Mat2 sub(const Mat2& x, const Mat2& y) const {
    const Field& f = *field_;
    return {f.sub(x.a, y.a), f.sub(x.b, y.b), f.sub(x.c, y.c), f.sub(x.d, y.d)};
  }
  Mat2 neg(const Mat2& x) const { return sub(zero(), x); }
  Mat2 mul(const Mat2& x, const Mat2& y) const {
    const Field& f = *field_;
    return {f.add(f.mul(x.a, y.a), f.mul(x.b, y.c)), f.add(f.mul(x.a, y.b), f.mul(x.b, y.d)),
            f.add(f.mul(x.c, y.a), f.mul(x.d, y.c)), f.add(f.mul(x.c, y.b), f.mul(x.d, y.d))};
  }
  Mat2 scale(Elem s, const Mat2& x) const {
    const Field& f = *field_;
    return {f.mul(s, x.a), f.mul(s, x.b), f.mul(s, x.c), f.mul(s, x.d)};
  }

  Mat2 op(const Mat2& x, const Mat2& y, MatOp kind) const {
    check(x);
    check(y);
    switch (kind) {
      case MatOp::add: return add(x, y);
      case MatOp::sub: return sub(x, y);
      case MatOp::mul: return mul(x, y);
    }
    throw Error(ErrorKind::domain, "bad matrix op");
  }

  Elem det(const Mat2& x) const {
    const Field& f = *field_;
    return f.sub(f.mul(x.a, x.d), f.mul(x.b, x.c));
  }

  int rank(const Mat2& x) const {
    if (x == zero()) return 0;
    return det(x) != 0 ? 2 : 1;
  }

  Mat2 inv(const Mat2& x) const {
    const Elem dt = det(x);
    if (dt == 0) throw Error(ErrorKind::singular_matrix, "inverse of singular matrix");
    const Field& f = *field_;
    const Elem s = f.inv(dt);
    return scale(s, {x.d, f.neg(x.b), f.neg(x.c), x.a});
  }

  /// Divides the first row (or first column) by det(x); the result lies in SL_2.
  Mat2 scale_to_sl2(const Mat2& x, ScaleSide side) const {
    const Elem dt = det(x);
    if (dt == 0) throw Error(ErrorKind::singular_matrix, "scale_to_sl2 needs det != 0");
    const Field& f = *field_;
    const Elem s = f.inv(dt);
    if (side == ScaleSide::row) return {f.mul(s, x.a), f.mul(s, x.b), x.c, x.d};
    return {f.mul(s, x.a), x.b, f.mul(s, x.c), x.d};
  }

  Rank1Profile rank1_profile(const Mat2& x) const {
    if (rank(x) != 1) throw Error(ErrorKind::domain, "rank1_profile needs a rank-1 matrix");
    if (x.a == 0 && x.b == 0) return {std::nullopt, Rank1Orientation::swapped_row_form};
    const Field& f = *field_;
    // row2 = alpha * row1; read alpha off a nonzero coordinate of row1.
    const Elem alpha = x.a != 0 ? f.mul(x.c, f.inv(x.a)) : f.mul(x.d, f.inv(x.b));
    return {alpha, Rank1Orientation::row_form};
  }

  MatIndex encode(const Mat2& x) const { return ((x.a * q_ + x.b) * q_ + x.c) * q_ + x.d; }

  Mat2 decode(MatIndex i) const {
    Mat2 x;
    x.d = i % q_;
    i /= q_;
    x.c = i % q_;
    i /= q_;
    x.b = i % q_;
    x.a = i / q_;
    return x;
  }

 private:
  FieldPtr field_;
  std::uint32_t q_;
  std::uint32_t size_;
};

/// Enumerated group data for one field; immutable once built.
struct GroupTable {
  FieldSpec field;
  std::uint32_t q = 0;
  std::vector<MatIndex> all;
  std::vector<MatIndex> sl2;
  std::vector<MatIndex> gl2;
  /// det_slices[alpha] = sorted indices of determinant alpha.
  std::vector<std::vector<MatIndex>> det_slices;
  /// det_of[idx] = determinant of the matrix with that index.
  std::vector<std::uint8_t> det_of;

  std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(all.size()); }
  Elem det(MatIndex i) const { return det_of[i]; }
  bool in_sl2(MatIndex i) const { return det_of[i] == 1; }
  bool in_gl2(MatIndex i) const { return det_of[i] != 0; }
  const std::vector<MatIndex>& slice(Elem alpha) const { return det_slices.at(alpha); }
};

inline GroupTable enumerate_tables(const MatrixRing& ring) {
  const std::uint32_t q = ring.q();
  if (q > kMaxTableOrder)
    throw Error(ErrorKind::resource_limit,
                "enumeration limited to q <= " + std::to_string(kMaxTableOrder));
  GroupTable t;
  t.field = ring.field().spec();
  t.q = q;
  const std::uint32_t n = ring.size();
  t.all.resize(n);
  t.det_of.resize(n);
  t.det_slices.assign(q, {});
  for (MatIndex i = 0; i < n; ++i) {
    t.all[i] = i;
    const Elem dt = ring.det(ring.decode(i));
    t.det_of[i] = static_cast<std::uint8_t>(dt);
    t.det_slices[dt].push_back(i);
    if (dt != 0) t.gl2.push_back(i);
  }
  t.sl2 = t.det_slices[1];
  return t;
}

}  // namespace mrx
