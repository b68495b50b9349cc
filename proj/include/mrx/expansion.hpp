#pragma once

// Image-size experiments for matrix polynomials over M_2(F_q).
// Sets are sampled from enumerated domains; images are counted exactly with a q^4-bit presence buffer.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mrx/graph.hpp"
#include "mrx/indexed_ring.hpp"
#include "mrx/parallel.hpp"

namespace mrx {

enum class Polynomial { sum, product, x_plus_yz, x_times_y_plus_z, xy_plus_z_plus_t, sumproduct_max };
enum class Domain { M2, SL2, GL2, D0 };
enum class Theorem { t1_2, t1_3, t1_6, t1_9, t1_12, t1_13, t1_16, c1_4, c1_7, c1_8, c1_10, c1_11 };

inline const char* to_string(Polynomial p) {
  switch (p) {
    case Polynomial::sum: return "sum";
    case Polynomial::product: return "product";
    case Polynomial::x_plus_yz: return "x_plus_yz";
    case Polynomial::x_times_y_plus_z: return "x_times_y_plus_z";
    case Polynomial::xy_plus_z_plus_t: return "xy_plus_z_plus_t";
    case Polynomial::sumproduct_max: return "sumproduct_max";
  }
  return "?";
}

inline const char* to_string(Domain d) {
  switch (d) {
    case Domain::M2: return "M2";
    case Domain::SL2: return "SL2";
    case Domain::GL2: return "GL2";
    case Domain::D0: return "D0";
  }
  return "?";
}

inline const char* to_string(Theorem t) {
  switch (t) {
    case Theorem::t1_2: return "1.2";
    case Theorem::t1_3: return "1.3";
    case Theorem::t1_6: return "1.6";
    case Theorem::t1_9: return "1.9";
    case Theorem::t1_12: return "1.12";
    case Theorem::t1_13: return "1.13";
    case Theorem::t1_16: return "1.16";
    case Theorem::c1_4: return "cor1.4";
    case Theorem::c1_7: return "cor1.7";
    case Theorem::c1_8: return "cor1.8";
    case Theorem::c1_10: return "cor1.10";
    case Theorem::c1_11: return "cor1.11";
  }
  return "?";
}

inline Polynomial parse_polynomial(const std::string& s) {
  for (Polynomial p : {Polynomial::sum, Polynomial::product, Polynomial::x_plus_yz, Polynomial::x_times_y_plus_z,
                       Polynomial::xy_plus_z_plus_t, Polynomial::sumproduct_max})
    if (s == to_string(p)) return p;
  throw Error(ErrorKind::usage, "unknown polynomial '" + s + "'");
}

inline Domain parse_domain(const std::string& s) {
  for (Domain d : {Domain::M2, Domain::SL2, Domain::GL2, Domain::D0})
    if (s == to_string(d)) return d;
  throw Error(ErrorKind::usage, "unknown domain '" + s + "'");
}

inline Theorem parse_theorem(const std::string& s) {
  for (Theorem t : {Theorem::t1_2, Theorem::t1_3, Theorem::t1_6, Theorem::t1_9, Theorem::t1_12, Theorem::t1_13,
                    Theorem::t1_16, Theorem::c1_4, Theorem::c1_7, Theorem::c1_8, Theorem::c1_10, Theorem::c1_11})
    if (s == to_string(t)) return t;
  throw Error(ErrorKind::unknown_theorem, "unknown theorem id '" + s + "'");
}

/// Number of distinct sets a polynomial takes.
inline std::size_t arity(Polynomial p) {
  switch (p) {
    case Polynomial::sum:
    case Polynomial::product: return 2;
    case Polynomial::x_plus_yz:
    case Polynomial::x_times_y_plus_z: return 3;
    case Polynomial::xy_plus_z_plus_t: return 4;
    case Polynomial::sumproduct_max: return 1;
  }
  return 0;
}

struct TheoremSetup {
  Polynomial polynomial;
  /// Per variable.
  std::vector<Domain> domains;
  /// Variable -> distinct set.
  std::vector<std::size_t> aliases;
};

inline TheoremSetup theorem_setup(Theorem t) {
  using D = Domain;
  using P = Polynomial;
  switch (t) {
    case Theorem::t1_2: return {P::product, {D::SL2, D::SL2}, {0, 1}};
    case Theorem::t1_3: return {P::sum, {D::SL2, D::M2}, {0, 1}};
    case Theorem::t1_6: return {P::x_plus_yz, {D::M2, D::SL2, D::SL2}, {0, 1, 2}};
    case Theorem::t1_9: return {P::x_times_y_plus_z, {D::SL2, D::SL2, D::M2}, {0, 1, 2}};
    case Theorem::t1_12: return {P::x_times_y_plus_z, {D::M2, D::M2, D::M2}, {0, 1, 2}};
    case Theorem::t1_13: return {P::x_plus_yz, {D::M2, D::M2, D::M2}, {0, 1, 2}};
    case Theorem::t1_16: return {P::sumproduct_max, {D::M2}, {0}};
    case Theorem::c1_4: return {P::sum, {D::SL2, D::SL2}, {0, 0}};
    case Theorem::c1_7: return {P::x_plus_yz, {D::SL2, D::SL2, D::SL2}, {0, 0, 0}};
    case Theorem::c1_8: return {P::x_plus_yz, {D::M2, D::M2, D::M2}, {0, 0, 0}};
    case Theorem::c1_10: return {P::x_times_y_plus_z, {D::SL2, D::SL2, D::SL2}, {0, 0, 0}};
    case Theorem::c1_11: return {P::x_times_y_plus_z, {D::M2, D::M2, D::M2}, {0, 0, 0}};
  }
  throw Error(ErrorKind::unknown_theorem, "unknown theorem");
}

/// Formula value with implied constant 1. `eps` is only read by Cor 1.4.
inline double predicted_bound(Theorem t, const std::vector<double>& s, std::uint32_t q, double eps = 0.25) {
  const double Q = q;
  auto need = [&](std::size_t k) {
    if (s.size() != k) throw Error(ErrorKind::domain, std::string("theorem ") + to_string(t) + " takes " +
                                                          std::to_string(k) + " sizes");
  };
  switch (t) {
    case Theorem::t1_2:
      need(2);
      return std::min(Q * Q * Q, s[0] * s[1] / (Q * Q));
    case Theorem::t1_3:
      need(2);
      return std::min(s[0] * s[0] * s[1] / (Q * Q * Q), s[0] * Q);
    case Theorem::t1_6:
      need(3);
      return std::min({std::pow(Q, 4), Q * Q * Q * s[0], s[0] * s[1] * s[1] * s[2] * s[2] / std::pow(Q, 7),
                       s[1] * s[2] / Q});
    case Theorem::t1_9:
      need(3);
      return std::min({std::pow(Q, 4), s[0] * s[1] * s[1] * s[2] / std::pow(Q, 5), s[0] * s[1] / Q});
    case Theorem::t1_12:
    case Theorem::t1_13:
      need(3);
      return std::min(s[0] * s[1] * s[2] / std::pow(Q, 7), std::pow(Q, 4));
    case Theorem::t1_16:
      need(1);
      return std::min(s[0] * s[0] / std::pow(Q, 3.5), Q * Q * std::sqrt(s[0]));
    case Theorem::c1_4:
      need(1);
      return std::min(std::pow(s[0], 1.0 + eps), std::pow(s[0], 4.0 / 3.0));
    case Theorem::c1_7:
    case Theorem::c1_10:
      // threshold statements: q^4 once |A| >= q^{5/2}, no prediction below
      need(1);
      return s[0] >= std::pow(Q, 2.5) ? std::pow(Q, 4) : 0.0;
    case Theorem::c1_8:
    case Theorem::c1_11:
      need(1);
      return s[0] >= std::pow(Q, 3.5) ? std::pow(Q, 4) : 0.0;
  }
  throw Error(ErrorKind::unknown_theorem, "unknown theorem");
}

inline const std::vector<MatIndex>& domain_list(const IndexedRing& r, Domain d) {
  switch (d) {
    case Domain::M2: return r.table().all;
    case Domain::SL2: return r.table().sl2;
    case Domain::GL2: return r.table().gl2;
    case Domain::D0: return r.table().slice(0);
  }
  throw Error(ErrorKind::domain, "unknown domain");
}

/// q^e rounded up, so thresholds like q^{5/2} are honoured.
inline std::uint64_t size_from_exponent(std::uint32_t q, double e) {
  return static_cast<std::uint64_t>(std::ceil(std::pow(static_cast<double>(q), e) - 1e-9));
}

/// Stream for set `k` of trial `trial`; independent of thread layout.
inline std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial, std::uint64_t k) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                    static_cast<std::uint32_t>(k)};
  return std::mt19937_64(seq);
}

/// Partial Fisher-Yates: the first `size` entries of a random permutation of `domain`.
/// Larger sizes from the same rng state extend smaller ones.
inline std::vector<MatIndex> sample_subset(const std::vector<MatIndex>& domain, std::uint64_t size,
                                           std::mt19937_64& rng) {
  if (size > domain.size())
    throw Error(ErrorKind::domain, "sample size " + std::to_string(size) + " exceeds domain size " +
                                       std::to_string(domain.size()));
  std::vector<MatIndex> v(domain);
  for (std::uint64_t i = 0; i < size; ++i) {
    std::uniform_int_distribution<std::uint64_t> pick(i, v.size() - 1);
    std::swap(v[i], v[pick(rng)]);
  }
  v.resize(size);
  return v;
}

/// q^4-bit presence buffer.
class Presence {
 public:
  explicit Presence(std::uint32_t n = 0) : n_(n), words_((n + 63) / 64, 0) {}
  void reset() { std::fill(words_.begin(), words_.end(), 0); }
  void set(MatIndex i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  bool test(MatIndex i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  std::uint64_t count() const {
    std::uint64_t c = 0;
    for (auto w : words_) c += static_cast<std::uint64_t>(__builtin_popcountll(w));
    return c;
  }
  std::vector<MatIndex> members() const {
    std::vector<MatIndex> out;
    for (std::size_t k = 0; k < words_.size(); ++k)
      for (std::uint64_t w = words_[k]; w; w &= w - 1)
        out.push_back(static_cast<MatIndex>(k * 64 + static_cast<std::size_t>(__builtin_ctzll(w))));
    return out;
  }
  std::uint32_t universe() const { return n_; }

 private:
  std::uint32_t n_;
  std::vector<std::uint64_t> words_;
};

namespace detail {

template <class Op>
void fill_op(const std::vector<MatIndex>& x, const std::vector<MatIndex>& y, Presence& out, Op op) {
  out.reset();
  for (MatIndex a : x)
    for (MatIndex b : y) out.set(op(a, b));
}

inline void sumset(const IndexedRing& r, const std::vector<MatIndex>& x, const std::vector<MatIndex>& y,
                   Presence& out) {
  // commutative: smaller set outermost
  if (x.size() <= y.size())
    fill_op(x, y, out, [&](MatIndex a, MatIndex b) { return r.add(a, b); });
  else
    fill_op(y, x, out, [&](MatIndex a, MatIndex b) { return r.add(a, b); });
}

inline void prodset(const IndexedRing& r, const std::vector<MatIndex>& x, const std::vector<MatIndex>& y,
                    Presence& out) {
  out.reset();
  if (x.size() <= y.size()) {
    for (MatIndex a : x)
      for (MatIndex b : y) out.set(r.mul(a, b));
  } else {
    for (MatIndex b : y)
      for (MatIndex a : x) out.set(r.mul(a, b));
  }
}

}  // namespace detail

struct ImageResult {
  std::uint64_t size = 0;
  /// sumproduct_max only: |A+A| and |AA|.
  std::uint64_t sum_size = 0, product_size = 0;
};

/// Reusable buffers for one worker.
struct ImageWorkspace {
  Presence out, tmp;
  explicit ImageWorkspace(std::uint32_t n = 0) : out(n), tmp(n) {}
};

inline ImageResult image_size(const IndexedRing& r, Polynomial p, const std::vector<const std::vector<MatIndex>*>& sets,
                              ImageWorkspace& ws) {
  if (sets.size() != arity(p))
    throw Error(ErrorKind::domain, std::string(to_string(p)) + " takes " + std::to_string(arity(p)) +
                                       " operand sets, got " + std::to_string(sets.size()));
  if (ws.out.universe() != r.size()) ws = ImageWorkspace(r.size());
  ImageResult res;
  switch (p) {
    case Polynomial::sum: detail::sumset(r, *sets[0], *sets[1], ws.out); break;
    case Polynomial::product: detail::prodset(r, *sets[0], *sets[1], ws.out); break;
    case Polynomial::x_plus_yz:
      detail::prodset(r, *sets[1], *sets[2], ws.tmp);
      detail::sumset(r, *sets[0], ws.tmp.members(), ws.out);
      break;
    case Polynomial::x_times_y_plus_z:
      detail::sumset(r, *sets[1], *sets[2], ws.tmp);
      detail::prodset(r, *sets[0], ws.tmp.members(), ws.out);
      break;
    case Polynomial::xy_plus_z_plus_t: {
      detail::prodset(r, *sets[0], *sets[1], ws.tmp);
      const auto ab = ws.tmp.members();
      detail::sumset(r, *sets[2], *sets[3], ws.tmp);
      const auto cd = ws.tmp.members();
      detail::sumset(r, ab, cd, ws.out);
      break;
    }
    case Polynomial::sumproduct_max:
      detail::sumset(r, *sets[0], *sets[0], ws.out);
      res.sum_size = ws.out.count();
      detail::prodset(r, *sets[0], *sets[0], ws.out);
      res.product_size = ws.out.count();
      res.size = std::max(res.sum_size, res.product_size);
      return res;
  }
  res.size = ws.out.count();
  return res;
}

inline ImageResult image_size(const IndexedRing& r, Polynomial p, const std::vector<const std::vector<MatIndex>*>& sets) {
  ImageWorkspace ws(r.size());
  return image_size(r, p, sets, ws);
}

/// One requested set size: absolute, or an exponent e meaning ceil(q^e).
struct SizeSpec {
  bool exponent = false;
  double value = 0;
  std::uint64_t resolve(std::uint32_t q) const {
    return exponent ? size_from_exponent(q, value) : static_cast<std::uint64_t>(value);
  }
  std::string str() const {
    std::ostringstream o;
    if (exponent) o << "q^" << value;
    else o << static_cast<std::uint64_t>(value);
    return o.str();
  }
};

struct ExperimentConfig {
  std::uint32_t q = 3;
  Polynomial polynomial = Polynomial::sum;
  /// One entry per variable.
  std::vector<Domain> domains;
  /// One entry per distinct set.
  std::vector<SizeSpec> sizes;
  /// Variable -> set; empty means one set per variable. {0,0,1,1} gives f(A,A,B,B).
  std::vector<std::size_t> aliases;
  std::uint32_t trials = 1;
  std::uint64_t seed = 0;
  std::optional<Theorem> theorem;
  double eps = 0.25;
  unsigned threads = 1;
  bool timing = true;
};

struct ExperimentRecord {
  std::uint32_t q = 0;
  std::string poly;
  std::string domains;
  std::vector<std::uint64_t> sizes;
  std::uint64_t image = 0;
  std::uint64_t sum_size = 0, product_size = 0;
  std::uint64_t q4 = 0;
  double ratio = 0;
  double predicted_bound = 0;
  double bound_ratio = 0;
  bool covered = false;
  std::uint64_t seed = 0;
  std::uint32_t trial = 0;
  double exponent = 0;
  double ms = 0;
};

namespace detail {

inline std::vector<std::size_t> resolved_aliases(const ExperimentConfig& c) {
  const std::size_t nv = arity(c.polynomial) == 1 ? 1 : arity(c.polynomial);
  std::vector<std::size_t> a = c.aliases;
  if (a.empty())
    for (std::size_t i = 0; i < nv; ++i) a.push_back(i);
  if (a.size() != nv) throw Error(ErrorKind::domain, "alias list does not match the polynomial's arity");
  return a;
}

inline std::string join_domains(const std::vector<Domain>& d) {
  std::string s;
  for (std::size_t i = 0; i < d.size(); ++i) s += (i ? "x" : "") + std::string(to_string(d[i]));
  return s;
}

/// Domain of each distinct set, taken from its first variable; aliased variables must agree.
inline std::vector<Domain> set_domains(const ExperimentConfig& c, const std::vector<std::size_t>& alias) {
  std::size_t nsets = 0;
  for (auto k : alias) nsets = std::max(nsets, k + 1);
  if (c.domains.size() != alias.size()) throw Error(ErrorKind::domain, "one domain per variable required");
  std::vector<std::optional<Domain>> d(nsets);
  for (std::size_t v = 0; v < alias.size(); ++v) {
    if (d[alias[v]] && *d[alias[v]] != c.domains[v])
      throw Error(ErrorKind::domain, "aliased variables drawn from different domains");
    d[alias[v]] = c.domains[v];
  }
  std::vector<Domain> out;
  for (auto& x : d) {
    if (!x) throw Error(ErrorKind::domain, "alias list skips a set");
    out.push_back(*x);
  }
  return out;
}

inline double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

/// Runs `trials` independent trials. Records are ordered by trial and independent of `threads`.
inline std::vector<ExperimentRecord> run_experiment(const IndexedRing& r, const ExperimentConfig& c) {
  if (c.q != r.q()) throw Error(ErrorKind::spec_mismatch, "config q does not match ring");
  if (c.trials < 1) throw Error(ErrorKind::domain, "trials must be >= 1");
  const auto alias = detail::resolved_aliases(c);
  const auto sd = detail::set_domains(c, alias);
  if (c.sizes.size() != sd.size())
    throw Error(ErrorKind::domain, "expected " + std::to_string(sd.size()) + " set sizes");
  std::vector<std::uint64_t> sizes;
  for (std::size_t k = 0; k < sd.size(); ++k) {
    sizes.push_back(c.sizes[k].resolve(c.q));
    if (sizes.back() > domain_list(r, sd[k]).size())
      throw Error(ErrorKind::domain, "size " + std::to_string(sizes.back()) + " exceeds |" + to_string(sd[k]) + "|");
  }
  std::vector<ExperimentRecord> out(c.trials);
  const double q4 = static_cast<double>(r.size());
  parallel_chunks(c.trials, c.threads, [&](std::uint64_t b, std::uint64_t e, unsigned) {
    ImageWorkspace ws(r.size());
    for (std::uint64_t t = b; t < e; ++t) {
      const auto t0 = std::chrono::steady_clock::now();
      std::vector<std::vector<MatIndex>> sets;
      for (std::size_t k = 0; k < sd.size(); ++k) {
        auto rng = trial_rng(c.seed, t, k);
        sets.push_back(sample_subset(domain_list(r, sd[k]), sizes[k], rng));
      }
      std::vector<const std::vector<MatIndex>*> args;
      if (c.polynomial == Polynomial::sumproduct_max) args.push_back(&sets[0]);
      else
        for (auto k : alias) args.push_back(&sets[k]);
      const auto img = image_size(r, c.polynomial, args, ws);
      ExperimentRecord& rec = out[t];
      rec.q = c.q;
      rec.poly = to_string(c.polynomial);
      rec.domains = detail::join_domains(c.domains);
      rec.sizes = sizes;
      rec.image = img.size;
      rec.sum_size = img.sum_size;
      rec.product_size = img.product_size;
      rec.q4 = r.size();
      rec.ratio = static_cast<double>(img.size) / q4;
      rec.covered = img.size == r.size();
      if (c.theorem) {
        std::vector<double> s(sizes.begin(), sizes.end());
        rec.predicted_bound = predicted_bound(*c.theorem, s, c.q, c.eps);
        rec.bound_ratio = rec.predicted_bound > 0 ? static_cast<double>(img.size) / rec.predicted_bound : 0.0;
      }
      rec.seed = c.seed;
      rec.trial = static_cast<std::uint32_t>(t);
      rec.exponent = c.sizes[0].exponent ? c.sizes[0].value : 0.0;
      rec.ms = c.timing ? detail::elapsed_ms(t0) : 0.0;
    }
  });
  return out;
}

struct CoverageReport {
  std::vector<ExperimentRecord> records;
  std::uint32_t covered = 0;
  double frequency() const { return records.empty() ? 0.0 : static_cast<double>(covered) / records.size(); }
};

/// f = xy + z + t; full coverage tested per trial.
inline CoverageReport coverage_experiment(const IndexedRing& r, const ExperimentConfig& c) {
  if (c.polynomial != Polynomial::xy_plus_z_plus_t)
    throw Error(ErrorKind::domain, "coverage experiments take xy_plus_z_plus_t");
  CoverageReport rep;
  rep.records = run_experiment(r, c);
  for (const auto& rec : rep.records) rep.covered += rec.covered;
  return rep;
}

/// f(A,A,A,A) with A drawn from M2.
inline ExperimentConfig coverage_config_same_set(std::uint32_t q, SizeSpec a, std::uint32_t trials, std::uint64_t seed) {
  ExperimentConfig c;
  c.q = q;
  c.polynomial = Polynomial::xy_plus_z_plus_t;
  c.domains = {Domain::M2, Domain::M2, Domain::M2, Domain::M2};
  c.aliases = {0, 0, 0, 0};
  c.sizes = {a};
  c.trials = trials;
  c.seed = seed;
  return c;
}

/// f(A,A,B,B) with A from SL2 and B from M2.
inline ExperimentConfig coverage_config_split(std::uint32_t q, SizeSpec a, SizeSpec b, std::uint32_t trials,
                                              std::uint64_t seed) {
  ExperimentConfig c = coverage_config_same_set(q, a, trials, seed);
  c.domains = {Domain::SL2, Domain::SL2, Domain::M2, Domain::M2};
  c.aliases = {0, 0, 1, 1};
  c.sizes = {a, b};
  return c;
}

struct SharpnessReport {
  std::uint32_t q = 0;
  std::uint64_t image = 0;
  std::uint64_t expected = 0;
  bool inside_d0 = false;
  bool equals_d0 = false;
};

/// A = D0, B = C = M2: the image of x(y+z) is exactly the singular matrices.
inline SharpnessReport sharpness_check(const IndexedRing& r) {
  if (r.q() > 5) throw Error(ErrorKind::domain, "sharpness check limited to q <= 5");
  ImageWorkspace ws(r.size());
  const auto& d0 = r.table().slice(0);
  const auto& all = r.table().all;
  SharpnessReport rep;
  rep.q = r.q();
  rep.image = image_size(r, Polynomial::x_times_y_plus_z, {&d0, &all, &all}, ws).size;
  const std::uint64_t q = r.q();
  rep.expected = q * q * q + q * q - q;
  rep.inside_d0 = true;
  for (MatIndex m : ws.out.members())
    if (r.det(m) != 0) rep.inside_d0 = false;
  rep.equals_d0 = rep.inside_d0 && rep.image == d0.size();
  return rep;
}

struct SweepConfig {
  Theorem theorem = Theorem::t1_2;
  std::vector<std::uint32_t> qs;
  std::vector<double> exponents;
  std::uint32_t trials = 20;
  std::uint64_t seed = 0;
  double eps = 0.25;
  unsigned threads = 1;
  bool timing = true;
};

struct SweepCell {
  std::uint32_t q = 0;
  double e = 0;
  std::vector<std::uint64_t> sizes;
  double mean_ratio = 0, min_ratio = 0;
  double mean_bound_ratio = 0, min_bound_ratio = 0;
  std::uint32_t trials = 0;
};

struct SweepResult {
  Theorem theorem = Theorem::t1_2;
  std::vector<ExperimentRecord> records;
  std::vector<SweepCell> cells;
  /// Mean ratio nondecreasing in e for every q.
  bool monotone() const {
    for (std::size_t i = 1; i < cells.size(); ++i)
      if (cells[i].q == cells[i - 1].q && cells[i].mean_ratio + 1e-12 < cells[i - 1].mean_ratio) return false;
    return true;
  }
};

/// Exponent cap of a domain: e is clipped so ceil(q^e) never exceeds the domain.
inline std::uint64_t sweep_size(const IndexedRing& r, Domain d, double e) {
  return std::min<std::uint64_t>(size_from_exponent(r.q(), e), domain_list(r, d).size());
}

/// Every set of one trial grows as a prefix of a single permutation, so images are monotone in e per trial.
inline SweepResult threshold_sweep(const SweepConfig& cfg, const std::map<std::uint32_t, RingPtr>& rings = {}) {
  for (double e : cfg.exponents)
    if (e < 1.0 || e > 4.0) throw Error(ErrorKind::domain, "sweep exponents must lie in [1, 4]");
  std::vector<double> grid = cfg.exponents;
  std::sort(grid.begin(), grid.end());
  const auto setup = theorem_setup(cfg.theorem);
  SweepResult res;
  res.theorem = cfg.theorem;
  for (std::uint32_t q : cfg.qs) {
    auto it = rings.find(q);
    const RingPtr ring = it != rings.end() ? it->second : make_ring(q);
    const IndexedRing& r = *ring;
    ExperimentConfig shape;
    shape.polynomial = setup.polynomial;
    shape.domains = setup.domains;
    shape.aliases = setup.aliases;
    const auto set_dom = detail::set_domains(shape, setup.aliases);
    const std::size_t nsets = set_dom.size();
    std::vector<std::vector<ExperimentRecord>> per_trial(cfg.trials);
    parallel_chunks(cfg.trials, cfg.threads, [&](std::uint64_t b, std::uint64_t e, unsigned) {
      ImageWorkspace ws(r.size());
      for (std::uint64_t t = b; t < e; ++t) {
        std::vector<std::vector<MatIndex>> full;
        for (std::size_t k = 0; k < nsets; ++k) {
          auto rng = trial_rng(cfg.seed ^ (std::uint64_t{q} << 40), t, k);
          const auto& dom = domain_list(r, set_dom[k]);
          full.push_back(sample_subset(dom, sweep_size(r, set_dom[k], grid.back()), rng));
        }
        for (double ex : grid) {
          const auto t0 = std::chrono::steady_clock::now();
          std::vector<std::vector<MatIndex>> sets(nsets);
          std::vector<std::uint64_t> sizes;
          for (std::size_t k = 0; k < nsets; ++k) {
            const auto sz = sweep_size(r, set_dom[k], ex);
            sets[k].assign(full[k].begin(), full[k].begin() + static_cast<std::ptrdiff_t>(sz));
            sizes.push_back(sz);
          }
          std::vector<const std::vector<MatIndex>*> args;
          if (setup.polynomial == Polynomial::sumproduct_max) args.push_back(&sets[0]);
          else
            for (auto k : setup.aliases) args.push_back(&sets[k]);
          const auto img = image_size(r, setup.polynomial, args, ws);
          ExperimentRecord rec;
          rec.q = q;
          rec.poly = to_string(setup.polynomial);
          rec.domains = detail::join_domains(setup.domains);
          rec.sizes = sizes;
          rec.image = img.size;
          rec.sum_size = img.sum_size;
          rec.product_size = img.product_size;
          rec.q4 = r.size();
          rec.ratio = static_cast<double>(img.size) / static_cast<double>(r.size());
          rec.covered = img.size == r.size();
          std::vector<double> s(sizes.begin(), sizes.end());
          rec.predicted_bound = predicted_bound(cfg.theorem, s, q, cfg.eps);
          rec.bound_ratio = rec.predicted_bound > 0 ? static_cast<double>(img.size) / rec.predicted_bound : 0.0;
          rec.seed = cfg.seed;
          rec.trial = static_cast<std::uint32_t>(t);
          rec.exponent = ex;
          rec.ms = cfg.timing ? detail::elapsed_ms(t0) : 0.0;
          per_trial[t].push_back(std::move(rec));
        }
      }
    });
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
      SweepCell cell;
      cell.q = q;
      cell.e = grid[gi];
      cell.trials = cfg.trials;
      cell.min_ratio = cell.min_bound_ratio = 1e300;
      for (std::uint32_t t = 0; t < cfg.trials; ++t) {
        const auto& rec = per_trial[t][gi];
        cell.sizes = rec.sizes;
        cell.mean_ratio += rec.ratio;
        cell.min_ratio = std::min(cell.min_ratio, rec.ratio);
        cell.mean_bound_ratio += rec.bound_ratio;
        cell.min_bound_ratio = std::min(cell.min_bound_ratio, rec.bound_ratio);
      }
      cell.mean_ratio /= cfg.trials;
      cell.mean_bound_ratio /= cfg.trials;
      res.cells.push_back(cell);
    }
    // rows grouped by exponent, then trial
    for (std::size_t gi = 0; gi < grid.size(); ++gi)
      for (std::uint32_t t = 0; t < cfg.trials; ++t) res.records.push_back(per_trial[t][gi]);
  }
  return res;
}

/// Exact restatement of the mixing argument for A+B, A in SL2: with N = e(A+B, B) >= |A||B|,
/// (d/n)|B| x^2 + lambda sqrt|B| x - |A||B| >= 0 at x = sqrt|A+B|.
struct MixingConsistency {
  std::uint64_t sum_size = 0;
  std::uint64_t edges = 0;
  double root = 0;
  double implied_min = 0;
  bool holds = false;
};

inline MixingConsistency mixing_consistency(const IndexedRing& r, double lambda, const std::vector<MatIndex>& A,
                                            const std::vector<MatIndex>& B) {
  for (MatIndex a : A)
    if (!r.table().in_sl2(a)) throw Error(ErrorKind::domain, "A must lie in SL2");
  ImageWorkspace ws(r.size());
  MixingConsistency m;
  m.sum_size = image_size(r, Polynomial::sum, {&A, &B}, ws).size;
  const double n = r.size();
  const double d = static_cast<double>(r.table().sl2.size());
  const double a = d / n * static_cast<double>(B.size());
  const double b = lambda * std::sqrt(static_cast<double>(B.size()));
  const double c = -static_cast<double>(A.size()) * static_cast<double>(B.size());
  m.root = (-b + std::sqrt(b * b - 4 * a * c)) / (2 * a);
  m.implied_min = m.root * m.root;
  // e(A+B, B) directly, as a sanity count
  std::vector<bool> inB(r.size(), false);
  for (MatIndex x : B) inB[x] = true;
  for (MatIndex s : ws.out.members())
    for (MatIndex x : r.table().sl2)
      if (inB[r.sub(s, x)]) ++m.edges;
  m.holds = static_cast<double>(m.sum_size) >= m.implied_min * (1 - 1e-9) &&
            m.edges >= static_cast<std::uint64_t>(A.size()) * B.size();
  return m;
}

inline std::string fmt_double(double v) {
  std::ostringstream o;
  o.precision(10);
  o << v;
  return o.str();
}

inline std::string sizes_field(const std::vector<std::uint64_t>& s) {
  std::string o;
  for (std::size_t i = 0; i < s.size(); ++i) o += (i ? ";" : "") + std::to_string(s[i]);
  return o;
}

inline std::string records_csv(const std::vector<ExperimentRecord>& recs) {
  std::ostringstream o;
  o << "q,poly,domains,sizes,image,q4,ratio,predicted_bound,bound_ratio,seed,trial,ms\n";
  for (const auto& r : recs)
    o << r.q << ',' << r.poly << ',' << r.domains << ',' << sizes_field(r.sizes) << ',' << r.image << ',' << r.q4
      << ',' << fmt_double(r.ratio) << ',' << fmt_double(r.predicted_bound) << ',' << fmt_double(r.bound_ratio) << ','
      << r.seed << ',' << r.trial << ',' << fmt_double(r.ms) << '\n';
  return o.str();
}

inline std::string summary_csv(const std::vector<SweepCell>& cells) {
  std::ostringstream o;
  o << "q,e,mean_ratio,min_ratio,trials\n";
  for (const auto& c : cells)
    o << c.q << ',' << fmt_double(c.e) << ',' << fmt_double(c.mean_ratio) << ',' << fmt_double(c.min_ratio) << ','
      << c.trials << '\n';
  return o.str();
}

}  // namespace mrx
