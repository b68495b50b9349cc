#pragma once

// Index-level arithmetic on M_2(F_q) backed by an enumerated GroupTable.
// Graph construction and image computations work entirely on MatIndex values.

#include <cstdint>
#include <memory>
#include <vector>

#include "mrx/matrix.hpp"

namespace mrx {

/// Full q^4 x q^4 product/sum tables are built when q^8 stays below this.
inline constexpr std::uint64_t kFullOpTableLimit = 6'000'000;

class IndexedRing {
 public:
  explicit IndexedRing(FieldPtr field) : ring_(std::move(field)), table_(enumerate_tables(ring_)) {
    init_digits();
  }
  IndexedRing(FieldPtr field, GroupTable table) : ring_(std::move(field)), table_(std::move(table)) {
    if (!(table_.field == ring_.field().spec()))
      throw Error(ErrorKind::spec_mismatch, "group table built for a different field");
    init_digits();
  }

  static std::shared_ptr<const IndexedRing> make(std::uint32_t q) {
    return std::make_shared<const IndexedRing>(Field::make(q));
  }

  const MatrixRing& ring() const noexcept { return ring_; }
  const Field& field() const noexcept { return ring_.field(); }
  const GroupTable& table() const noexcept { return table_; }
  std::uint32_t q() const noexcept { return ring_.q(); }
  std::uint32_t size() const noexcept { return ring_.size(); }

  Mat2 decode(MatIndex i) const { return ring_.decode(i); }
  MatIndex encode(const Mat2& x) const { return ring_.encode(x); }

  MatIndex add(MatIndex x, MatIndex y) const {
    if (!add_table_.empty()) return add_table_[std::size_t{x} * size() + y];
    return digitwise(x, y, false);
  }
  MatIndex sub(MatIndex x, MatIndex y) const { return digitwise(x, y, true); }
  MatIndex mul(MatIndex x, MatIndex y) const {
    if (!mul_table_.empty()) return mul_table_[std::size_t{x} * size() + y];
    return encode(ring_.mul(decode(x), decode(y)));
  }
  Elem det(MatIndex x) const { return table_.det(x); }
  int rank(MatIndex x) const { return x == 0 ? 0 : (table_.det(x) != 0 ? 2 : 1); }

  /// Builds the full product and sum tables when they fit; otherwise a no-op.
  void build_product_table() {
    const std::uint64_t n = size();
    if (n * n > kFullOpTableLimit || !mul_table_.empty()) return;
    mul_table_.resize(n * n);
    std::vector<MatIndex> sums(n * n);
    for (MatIndex x = 0; x < n; ++x) {
      const Mat2 mx = decode(x);
      for (MatIndex y = 0; y < n; ++y) {
        mul_table_[x * n + y] = encode(ring_.mul(mx, decode(y)));
        sums[x * n + y] = digitwise(x, y, false);
      }
    }
    add_table_ = std::move(sums);
  }
  bool has_op_tables() const noexcept { return !mul_table_.empty(); }

 private:
  void init_digits() {
    const std::uint32_t q = ring_.q();
    pow_[0] = 1;
    for (int i = 1; i < 4; ++i) pow_[i] = pow_[i - 1] * q;
  }

  MatIndex digitwise(MatIndex x, MatIndex y, bool subtract) const {
    const Field& f = ring_.field();
    const std::uint32_t q = ring_.q();
    MatIndex r = 0;
    for (int i = 0; i < 4; ++i) {
      const Elem a = x % q, b = y % q;
      x /= q;
      y /= q;
      r += (subtract ? f.sub(a, b) : f.add(a, b)) * pow_[i];
    }
    return r;
  }

  MatrixRing ring_;
  GroupTable table_;
  std::uint32_t pow_[4] = {};
  std::vector<MatIndex> mul_table_;
  std::vector<MatIndex> add_table_;
};

using RingPtr = std::shared_ptr<const IndexedRing>;

inline RingPtr make_ring(std::uint32_t q, bool product_table = true) {
  auto r = std::make_shared<IndexedRing>(Field::make(q));
  if (product_table) r->build_product_table();
  return r;
}

}  // namespace mrx
