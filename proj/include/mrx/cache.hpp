#pragma once

// On-disk cache for enumeration tables and spectra.
// Layout: 4-byte magic, u32 version, u32 q, u32 modulus length + coefficients, then length-prefixed
// little-endian u32 arrays. Anything that fails to parse is ignored and recomputed.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "mrx/indexed_ring.hpp"
#include "mrx/spectral.hpp"

namespace mrx {

inline constexpr std::uint32_t kCacheVersion = 1;

namespace detail {

static_assert(std::endian::native == std::endian::little, "cache format assumes a little-endian host");

class ByteWriter {
 public:
  void magic(const char (&m)[5]) { buf_.append(m, 4); }
  void u32(std::uint32_t v) { buf_.append(reinterpret_cast<const char*>(&v), 4); }
  void f64(double v) { buf_.append(reinterpret_cast<const char*>(&v), 8); }
  void array(const std::vector<std::uint32_t>& v) {
    u32(static_cast<std::uint32_t>(v.size()));
    buf_.append(reinterpret_cast<const char*>(v.data()), v.size() * 4);
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    buf_.append(s);
  }
  const std::string& bytes() const { return buf_; }

 private:
  std::string buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string data) : d_(std::move(data)) {}
  bool magic(const char (&m)[5]) {
    if (!take(4)) return false;
    return std::memcmp(d_.data() + pos_ - 4, m, 4) == 0;
  }
  std::optional<std::uint32_t> u32() {
    if (!take(4)) return std::nullopt;
    std::uint32_t v;
    std::memcpy(&v, d_.data() + pos_ - 4, 4);
    return v;
  }
  std::optional<double> f64() {
    if (!take(8)) return std::nullopt;
    double v;
    std::memcpy(&v, d_.data() + pos_ - 8, 8);
    return v;
  }
  std::optional<std::vector<std::uint32_t>> array() {
    auto n = u32();
    if (!n || !take(std::uint64_t{*n} * 4)) return std::nullopt;
    std::vector<std::uint32_t> v(*n);
    std::memcpy(v.data(), d_.data() + pos_ - std::uint64_t{*n} * 4, std::uint64_t{*n} * 4);
    return v;
  }
  std::optional<std::string> str() {
    auto n = u32();
    if (!n || !take(*n)) return std::nullopt;
    return d_.substr(pos_ - *n, *n);
  }
  bool done() const { return pos_ == d_.size(); }

 private:
  bool take(std::uint64_t k) {
    if (d_.size() - pos_ < k) return false;
    pos_ += k;
    return true;
  }
  std::string d_;
  std::size_t pos_ = 0;
};

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex(std::uint64_t v) {
  std::ostringstream o;
  o << std::hex << v;
  return o.str();
}

}  // namespace detail

/// Writes `bytes` to `path` via a sibling temp file and rename.
inline void atomic_write(const std::filesystem::path& path, const std::string& bytes) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::resource_limit, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error(ErrorKind::resource_limit, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorKind::resource_limit, "cannot rename into " + path.string());
  }
}

inline std::optional<std::string> read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CacheManager {
 public:
  explicit CacheManager(std::filesystem::path dir, std::uint32_t version = kCacheVersion)
      : dir_(std::move(dir)), version_(version) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec || !std::filesystem::is_directory(dir_))
      throw Error(ErrorKind::resource_limit, "cache directory not usable: " + dir_.string());
    // probe writability up front
    const auto probe = dir_ / (".probe." + std::to_string(::getpid()));
    std::ofstream t(probe);
    if (!t) throw Error(ErrorKind::resource_limit, "cache directory not writable: " + dir_.string());
    t.close();
    std::filesystem::remove(probe, ec);
  }

  const std::filesystem::path& dir() const { return dir_; }
  std::uint32_t version() const { return version_; }
  const std::vector<std::string>& log() const { return log_; }

  std::filesystem::path tables_path(const FieldSpec& f) const {
    return dir_ / ("tables-q" + std::to_string(f.order) + "-" + detail::hex(detail::fnv1a(f.modulus_string())) + ".bin");
  }
  std::filesystem::path spectrum_path(const FieldSpec& f, const std::string& family) const {
    const std::string key = std::to_string(f.order) + "|" + f.modulus_string() + "|" + family;
    return dir_ / ("spectrum-" + detail::hex(detail::fnv1a(key)) + ".bin");
  }

  /// Ring with tables loaded from the cache, or enumerated and stored. `hit` reports which.
  RingPtr ring(std::uint32_t q, bool* hit = nullptr, bool product_table = true) {
    auto field = Field::make(q);
    auto table = load_tables(field->spec());
    const bool found = table.has_value();
    if (!found) {
      table = enumerate_tables(MatrixRing(field));
      store_tables(*table);
    }
    if (hit) *hit = found;
    auto r = std::make_shared<IndexedRing>(field, std::move(*table));
    if (product_table) r->build_product_table();
    return r;
  }

  std::optional<GroupTable> load_tables(const FieldSpec& f) {
    const auto path = tables_path(f);
    auto bytes = read_file(path);
    if (!bytes) {
      note("miss " + path.filename().string());
      return std::nullopt;
    }
    auto t = parse_tables(*bytes, f);
    if (!t) {
      note("warning: ignoring unreadable or stale cache file " + path.filename().string());
      return std::nullopt;
    }
    note("hit " + path.filename().string());
    return t;
  }

  void store_tables(const GroupTable& t) {
    detail::ByteWriter w;
    header(w, "MRXL", t.field);
    w.array(std::vector<std::uint32_t>(t.det_of.begin(), t.det_of.end()));
    w.array(t.sl2);
    w.array(t.gl2);
    atomic_write(tables_path(t.field), w.bytes());
    note("stored " + tables_path(t.field).filename().string());
  }

  std::optional<SpectralReport> load_spectrum(const FieldSpec& f, const std::string& family) {
    const auto path = spectrum_path(f, family);
    auto bytes = read_file(path);
    if (!bytes) {
      note("miss " + path.filename().string());
      return std::nullopt;
    }
    auto rep = parse_spectrum(*bytes, f, family);
    if (!rep) {
      note("warning: ignoring unreadable or stale cache file " + path.filename().string());
      return std::nullopt;
    }
    note("hit " + path.filename().string());
    return rep;
  }

  void store_spectrum(const FieldSpec& f, const SpectralReport& r) {
    detail::ByteWriter w;
    header(w, "MRXS", f);
    w.str(r.family);
    w.u32(static_cast<std::uint32_t>(r.n));
    w.u32(static_cast<std::uint32_t>(r.degree));
    w.u32(static_cast<std::uint32_t>(r.method));
    w.u32(static_cast<std::uint32_t>(r.normality));
    w.f64(r.lambda2);
    w.f64(r.tolerance);
    w.u32(static_cast<std::uint32_t>(r.spectrum.size()));
    for (double x : r.spectrum) w.f64(x);
    atomic_write(spectrum_path(f, r.family), w.bytes());
    note("stored " + spectrum_path(f, r.family).filename().string());
  }

 private:
  void note(std::string s) { log_.push_back(std::move(s)); }

  void header(detail::ByteWriter& w, const char (&magic)[5], const FieldSpec& f) const {
    w.magic(magic);
    w.u32(version_);
    w.u32(f.order);
    w.array(f.modulus);
  }

  bool check_header(detail::ByteReader& rd, const char (&magic)[5], const FieldSpec& f) const {
    if (!rd.magic(magic)) return false;
    auto v = rd.u32();
    auto q = rd.u32();
    auto m = rd.array();
    return v && *v == version_ && q && *q == f.order && m && *m == f.modulus;
  }

  std::optional<GroupTable> parse_tables(const std::string& bytes, const FieldSpec& f) const {
    detail::ByteReader rd(bytes);
    if (!check_header(rd, "MRXL", f)) return std::nullopt;
    auto det = rd.array();
    auto sl2 = rd.array();
    auto gl2 = rd.array();
    if (!det || !sl2 || !gl2 || !rd.done()) return std::nullopt;
    const std::uint64_t q = f.order, n = q * q * q * q;
    if (det->size() != n) return std::nullopt;
    GroupTable t;
    t.field = f;
    t.q = f.order;
    t.all.resize(n);
    t.det_of.resize(n);
    t.det_slices.assign(q, {});
    for (MatIndex i = 0; i < n; ++i) {
      if ((*det)[i] >= q) return std::nullopt;
      t.all[i] = i;
      t.det_of[i] = static_cast<std::uint8_t>((*det)[i]);
      t.det_slices[(*det)[i]].push_back(i);
    }
    t.sl2 = t.det_slices[1];
    for (MatIndex i = 0; i < n; ++i)
      if (t.det_of[i] != 0) t.gl2.push_back(i);
    // stored group lists must agree with the determinant column
    if (t.sl2 != *sl2 || t.gl2 != *gl2) return std::nullopt;
    return t;
  }

  std::optional<SpectralReport> parse_spectrum(const std::string& bytes, const FieldSpec& f,
                                               const std::string& family) const {
    detail::ByteReader rd(bytes);
    if (!check_header(rd, "MRXS", f)) return std::nullopt;
    auto fam = rd.str();
    auto n = rd.u32();
    auto d = rd.u32();
    auto method = rd.u32();
    auto normality = rd.u32();
    auto lam = rd.f64();
    auto tol = rd.f64();
    auto len = rd.u32();
    if (!fam || *fam != family || !n || !d || !method || !normality || !lam || !tol || !len) return std::nullopt;
    if (*method > static_cast<std::uint32_t>(SpectralMethod::tensor_composed) ||
        *normality > static_cast<std::uint32_t>(NormalityStatus::violated_overridden))
      return std::nullopt;
    SpectralReport r;
    r.family = *fam;
    r.q = f.order;
    r.n = *n;
    r.degree = *d;
    r.method = static_cast<SpectralMethod>(*method);
    r.normality = static_cast<NormalityStatus>(*normality);
    r.lambda2 = *lam;
    r.tolerance = *tol;
    for (std::uint32_t i = 0; i < *len; ++i) {
      auto x = rd.f64();
      if (!x) return std::nullopt;
      r.spectrum.push_back(*x);
    }
    if (!rd.done()) return std::nullopt;
    return r;
  }

  std::filesystem::path dir_;
  std::uint32_t version_;
  std::vector<std::string> log_;
};

}  // namespace mrx
