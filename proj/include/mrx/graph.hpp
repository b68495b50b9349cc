#pragma once

// Every graph family used in the (n, d, lambda) audits, with exact adjacency
// oracles, neighbour generators and optional dense bitset storage.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "mrx/error.hpp"
#include "mrx/indexed_ring.hpp"

namespace mrx {

using Vertex = std::uint32_t;

enum class Family {
  unit_cayley,          // M2, det(a-b) = 1
  det_alpha,            // M2, det(a-b) = alpha
  gl_diff_m2,           // G12: M2, a-b in GL2
  singular_diff_m2,     // G41: M2, det(a-b) = 0, a != b
  sl2_invertible_diff,  // G11: SL2, a-b in GL2
  sl2_singular_diff,    // G31: SL2, det(a-b) = 0, a != b
  sl2_sl2_diff,         // G212: SL2, a-b in SL2
  sp_digraph_m2,        // G1: M2 x M2, (A,C) -> (B,D) iff AB = C + D
  sp_digraph_sl2,       // G2: SL2 x M2, same rule
  aux_e,                // E11..E15 on M2 x M2
  aux_m,                // M1 (G'1) and M3..M8 on SL2 x M2
  aux_m2,               // M_{2i} on SL2 x M2: det(A-B) = det(C-D) = i
  tensor,
  custom,  // explicit adjacency lists, used for controls and small test graphs
};

struct GraphSpec {
  Family family = Family::unit_cayley;
  std::uint32_t q = 2;
  /// alpha for det_alpha, i for aux_m2, the component number for aux_e / aux_m.
  std::uint32_t param = 0;
  std::shared_ptr<const GraphSpec> left, right;

  static GraphSpec of(Family f, std::uint32_t q, std::uint32_t param = 0) { return {f, q, param, {}, {}}; }
  static GraphSpec tensor_of(const GraphSpec& a, const GraphSpec& b) {
    return {Family::tensor, a.q, 0, std::make_shared<GraphSpec>(a), std::make_shared<GraphSpec>(b)};
  }
};

inline std::string family_name(const GraphSpec& s) {
  switch (s.family) {
    case Family::unit_cayley: return "unit-cayley";
    case Family::det_alpha: return "det-alpha:" + std::to_string(s.param);
    case Family::gl_diff_m2: return "gl-diff-m2";
    case Family::singular_diff_m2: return "singular-diff-m2";
    case Family::sl2_invertible_diff: return "sl2-invertible-diff";
    case Family::sl2_singular_diff: return "sl2-singular-diff";
    case Family::sl2_sl2_diff: return "sl2-sl2-diff";
    case Family::sp_digraph_m2: return "sp-digraph-m2";
    case Family::sp_digraph_sl2: return "sp-digraph-sl2";
    case Family::aux_e: return "aux-e:" + std::to_string(s.param);
    case Family::aux_m: return "aux-m:" + std::to_string(s.param);
    case Family::aux_m2: return "aux-m2:" + std::to_string(s.param);
    case Family::tensor: return "tensor:" + family_name(*s.left) + "," + family_name(*s.right);
    case Family::custom: return "custom";
  }
  return "unknown";
}

/// Parses the names produced by family_name.
inline GraphSpec parse_family(const std::string& text, std::uint32_t q) {
  auto param_of = [&](const std::string& rest) -> std::uint32_t {
    try {
      std::size_t used = 0;
      const unsigned long v = std::stoul(rest, &used);
      if (used != rest.size()) throw Error(ErrorKind::usage, "bad family parameter '" + rest + "'");
      return static_cast<std::uint32_t>(v);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::usage, "bad family parameter '" + rest + "'");
    }
  };
  if (text.rfind("tensor:", 0) == 0) {
    const std::string rest = text.substr(7);
    // Split on the comma that is not inside a nested tensor (only one level supported).
    const auto comma = rest.find(',');
    if (comma == std::string::npos) throw Error(ErrorKind::usage, "tensor needs two families");
    return GraphSpec::tensor_of(parse_family(rest.substr(0, comma), q),
                                parse_family(rest.substr(comma + 1), q));
  }
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::uint32_t param = colon == std::string::npos ? 0 : param_of(text.substr(colon + 1));
  static const std::vector<std::pair<std::string, Family>> names = {
      {"unit-cayley", Family::unit_cayley},
      {"det-alpha", Family::det_alpha},
      {"gl-diff-m2", Family::gl_diff_m2},
      {"singular-diff-m2", Family::singular_diff_m2},
      {"sl2-invertible-diff", Family::sl2_invertible_diff},
      {"sl2-singular-diff", Family::sl2_singular_diff},
      {"sl2-sl2-diff", Family::sl2_sl2_diff},
      {"sp-digraph-m2", Family::sp_digraph_m2},
      {"sp-digraph-sl2", Family::sp_digraph_sl2},
      {"aux-e", Family::aux_e},
      {"aux-m", Family::aux_m},
      {"aux-m2", Family::aux_m2},
  };
  for (const auto& [name, fam] : names)
    if (name == head) return GraphSpec::of(fam, q, param);
  throw Error(ErrorKind::usage, "unknown graph family '" + text + "'");
}

struct DegreeClaim {
  enum class Kind { exact, at_most, unspecified };
  Kind kind = Kind::unspecified;
  std::uint64_t value = 0;

  static DegreeClaim exact(std::uint64_t v) { return {Kind::exact, v}; }
  static DegreeClaim at_most(std::uint64_t v) { return {Kind::at_most, v}; }
  static DegreeClaim none() { return {}; }

  bool satisfied_by(std::uint64_t lo, std::uint64_t hi) const {
    switch (kind) {
      case Kind::exact: return lo == value && hi == value;
      case Kind::at_most: return hi <= value;
      case Kind::unspecified: return true;
    }
    return false;
  }
};

enum class Storage { dense_bitset, implicit_oracle };

struct DegreeAudit {
  std::uint64_t vertices_checked = 0;
  std::uint64_t min_out = 0, max_out = 0, min_in = 0, max_in = 0;
  bool regular() const { return min_out == max_out && min_in == max_in && min_out == min_in; }
};

struct BuildOptions {
  std::uint64_t budget_bytes = 1ull << 30;
  bool prefer_dense = true;
  std::uint32_t audit_samples = 512;
};

inline constexpr std::uint64_t kDenseUndirectedLimit = 10'000;
inline constexpr std::uint64_t kDenseDirectedLimit = 7'000;

class RegularGraph {
 public:
  using Sink = std::vector<Vertex>;
  using Predicate = std::function<bool(Vertex, Vertex)>;
  using Generator = std::function<void(Vertex, Sink&)>;

  RegularGraph(GraphSpec spec, std::uint64_t n, bool directed, DegreeClaim claim, Predicate adj,
               Generator out, Generator in)
      : spec_(std::move(spec)),
        n_(n),
        directed_(directed),
        claim_(claim),
        adj_(std::move(adj)),
        out_(std::move(out)),
        in_(std::move(in)) {}

  const GraphSpec& spec() const noexcept { return spec_; }
  std::string name() const { return family_name(spec_); }
  std::uint64_t n() const noexcept { return n_; }
  bool directed() const noexcept { return directed_; }
  const DegreeClaim& claimed_degree() const noexcept { return claim_; }
  Storage storage() const noexcept { return dense_.empty() ? Storage::implicit_oracle : Storage::dense_bitset; }
  const DegreeAudit& audit() const noexcept { return audit_; }
  /// Set when dense storage was requested but the budget forced the oracle backend.
  const std::string& storage_note() const noexcept { return storage_note_; }

  bool adjacent(Vertex u, Vertex v) const {
    if (!dense_.empty()) return (dense_[std::size_t{u} * words_ + v / 64] >> (v % 64)) & 1u;
    return adj_(u, v);
  }

  /// Sorted out-neighbours.
  std::vector<Vertex> out_neighbors(Vertex u) const {
    Sink s;
    out_(u, s);
    std::sort(s.begin(), s.end());
    return s;
  }
  /// Sorted in-neighbours (equal to out_neighbors for undirected graphs).
  std::vector<Vertex> in_neighbors(Vertex u) const {
    Sink s;
    (directed_ ? in_ : out_)(u, s);
    std::sort(s.begin(), s.end());
    return s;
  }

  /// Degree when the audit found the graph regular; otherwise the largest out-degree seen.
  std::uint64_t degree() const noexcept { return audit_.max_out; }

  /// Measures out/in degrees on `samples` evenly spaced vertices (all when samples >= n).
  void run_audit(std::uint64_t samples) {
    DegreeAudit a;
    a.min_out = a.min_in = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t count = std::min<std::uint64_t>(samples, n_);
    for (std::uint64_t k = 0; k < count; ++k) {
      const Vertex u = static_cast<Vertex>(count == n_ ? k : k * n_ / count);
      Sink s;
      out_(u, s);
      const std::uint64_t od = s.size();
      s.clear();
      (directed_ ? in_ : out_)(u, s);
      const std::uint64_t id = s.size();
      a.min_out = std::min(a.min_out, od);
      a.max_out = std::max(a.max_out, od);
      a.min_in = std::min(a.min_in, id);
      a.max_in = std::max(a.max_in, id);
    }
    a.vertices_checked = count;
    if (count == 0) a.min_out = a.min_in = 0;
    audit_ = a;
  }

  void materialize_dense() {
    words_ = (n_ + 63) / 64;
    dense_.assign(n_ * words_, 0);
    Sink s;
    for (Vertex u = 0; u < n_; ++u) {
      s.clear();
      out_(u, s);
      for (Vertex v : s) dense_[std::size_t{u} * words_ + v / 64] |= std::uint64_t{1} << (v % 64);
    }
  }

  void set_storage_note(std::string note) { storage_note_ = std::move(note); }

  /// Full adjacency lists (CSR). Only for graphs whose edge count fits in memory.
  struct Csr {
    std::vector<std::uint64_t> offsets;
    std::vector<Vertex> targets;
  };
  Csr csr() const {
    Csr c;
    c.offsets.reserve(n_ + 1);
    c.offsets.push_back(0);
    Sink s;
    for (Vertex u = 0; u < n_; ++u) {
      s.clear();
      out_(u, s);
      std::sort(s.begin(), s.end());
      c.targets.insert(c.targets.end(), s.begin(), s.end());
      c.offsets.push_back(c.targets.size());
    }
    return c;
  }

 private:
  GraphSpec spec_;
  std::uint64_t n_;
  bool directed_;
  DegreeClaim claim_;
  Predicate adj_;
  Generator out_, in_;
  std::vector<std::uint64_t> dense_;
  std::uint64_t words_ = 0;
  DegreeAudit audit_;
  std::string storage_note_;
};

namespace detail {

/// Rank-1 profile of an index, or nullopt when rank != 1.
inline std::optional<Rank1Profile> profile_of(const IndexedRing& r, MatIndex x) {
  if (r.rank(x) != 1) return std::nullopt;
  return r.ring().rank1_profile(r.decode(x));
}

/// Same rank-1 profile: equal (alpha, orientation), i.e. equal column spaces.
inline bool same_profile(const IndexedRing& r, MatIndex x, MatIndex y) {
  const auto px = profile_of(r, x), py = profile_of(r, y);
  return px && py && *px == *py;
}

inline std::vector<std::int64_t> positions_of(const std::vector<MatIndex>& list, std::uint32_t universe) {
  std::vector<std::int64_t> pos(universe, -1);
  for (std::size_t i = 0; i < list.size(); ++i) pos[list[i]] = static_cast<std::int64_t>(i);
  return pos;
}

}  // namespace detail

/// Edge predicate of an auxiliary graph on pairs, evaluated on (A1-A2, C1-C2).
inline std::function<bool(MatIndex, MatIndex)> aux_pair_predicate(const RingPtr& ring, Family fam,
                                                                  std::uint32_t param) {
  const IndexedRing& r = *ring;
  auto rk = [ring](MatIndex x) { return ring->rank(x); };
  auto same = [ring](MatIndex a, MatIndex c) { return detail::same_profile(*ring, a, c); };
  if (fam == Family::aux_e) {
    switch (param) {
      case 11: return [ring, rk](MatIndex a, MatIndex c) { return rk(a) < 2 && rk(c) == 2; };
      case 12: return [ring, rk](MatIndex a, MatIndex c) { return rk(a) == 0 && rk(c) == 1; };
      case 13: return [ring, rk](MatIndex a, MatIndex c) { return rk(a) == 1 && rk(c) == 0; };
      case 14:
        return [ring, rk, same](MatIndex a, MatIndex c) { return rk(a) == 1 && rk(c) == 1 && same(a, c); };
      case 15:
        return [ring, rk, same](MatIndex a, MatIndex c) { return rk(a) == 1 && rk(c) == 1 && !same(a, c); };
      default: break;
    }
    throw Error(ErrorKind::domain, "aux-e index must be 11..15");
  }
  if (fam == Family::aux_m2) {
    if (param == 0 || param >= r.q()) throw Error(ErrorKind::domain, "aux-m2 needs 0 < i < q");
    return [ring, param](MatIndex a, MatIndex c) {
      return a != 0 && c != 0 && ring->det(a) == param && ring->det(c) == param;
    };
  }
  switch (param) {
    case 1: return [ring, rk](MatIndex a, MatIndex c) { return rk(a) == 2 && rk(c) == 2; };
    case 3: return [ring, rk](MatIndex a, MatIndex c) { return rk(a) < 2 && rk(c) == 2; };
    case 4: return [ring, rk](MatIndex a, MatIndex c) { return rk(a) == 2 && rk(c) < 2; };
    case 5: return [ring, rk](MatIndex a, MatIndex c) { return rk(a) == 0 && rk(c) == 1; };
    case 6: return [ring, rk](MatIndex a, MatIndex c) { return rk(a) == 1 && rk(c) == 0; };
    case 7:
      return [ring, rk, same](MatIndex a, MatIndex c) { return rk(a) == 1 && rk(c) == 1 && same(a, c); };
    case 8:
      return [ring, rk, same](MatIndex a, MatIndex c) { return rk(a) == 1 && rk(c) == 1 && !same(a, c); };
    default: break;
  }
  throw Error(ErrorKind::domain, "aux-m index must be 1 or 3..8");
}

/// Builder for one field; reuses the enumerated ring across families.
class GraphFactory {
 public:
  explicit GraphFactory(RingPtr ring, BuildOptions opts = {}) : ring_(std::move(ring)), opts_(opts) {
    sl2_pos_ = detail::positions_of(ring_->table().sl2, ring_->size());
  }

  const RingPtr& ring() const noexcept { return ring_; }
  const BuildOptions& options() const noexcept { return opts_; }

  /// Vertex id of the pair (A, C) in a product-type family.
  Vertex pair_vertex(const GraphSpec& s, MatIndex a, MatIndex c) const {
    const std::uint64_t m = ring_->size();
    const bool sl2_first = s.family == Family::sp_digraph_sl2 || s.family == Family::aux_m ||
                           s.family == Family::aux_m2;
    const std::uint64_t first = sl2_first ? static_cast<std::uint64_t>(sl2_pos_.at(a)) : a;
    if (sl2_first && sl2_pos_.at(a) < 0) throw Error(ErrorKind::domain, "first component not in SL2");
    return static_cast<Vertex>(first * m + c);
  }
  /// Inverse of pair_vertex.
  std::pair<MatIndex, MatIndex> vertex_pair(const GraphSpec& s, Vertex v) const {
    const std::uint64_t m = ring_->size();
    const bool sl2_first = s.family == Family::sp_digraph_sl2 || s.family == Family::aux_m ||
                           s.family == Family::aux_m2;
    const MatIndex first = static_cast<MatIndex>(v / m);
    return {sl2_first ? ring_->table().sl2.at(first) : first, static_cast<MatIndex>(v % m)};
  }
  /// Matrix behind a vertex of a single-matrix family.
  MatIndex vertex_matrix(const GraphSpec& s, Vertex v) const {
    return on_sl2(s.family) ? ring_->table().sl2.at(v) : v;
  }

  static bool on_sl2(Family f) {
    return f == Family::sl2_invertible_diff || f == Family::sl2_singular_diff || f == Family::sl2_sl2_diff;
  }

  RegularGraph build(const GraphSpec& spec) const {
    if (spec.q != ring_->q()) throw Error(ErrorKind::spec_mismatch, "graph spec q differs from factory field");
    RegularGraph g = make(spec);
    finish(g);
    return g;
  }

 private:
  void finish(RegularGraph& g) const {
    const std::uint64_t n = g.n();
    const std::uint64_t limit = g.directed() ? kDenseDirectedLimit : kDenseUndirectedLimit;
    if (opts_.prefer_dense && n <= limit) {
      const std::uint64_t bytes = n * ((n + 63) / 64) * 8;
      if (bytes <= opts_.budget_bytes)
        g.materialize_dense();
      else
        g.set_storage_note("dense storage over budget; using implicit oracle");
    }
    g.run_audit(opts_.audit_samples);
  }

  RegularGraph cayley_m2(const GraphSpec& spec, std::vector<MatIndex> connection, DegreeClaim claim) const {
    const RingPtr ring = ring_;
    auto conn = std::make_shared<const std::vector<MatIndex>>(std::move(connection));
    auto member = std::make_shared<std::vector<bool>>(ring->size(), false);
    for (MatIndex s : *conn) (*member)[s] = true;
    auto adj = [ring, member](Vertex u, Vertex v) { return (*member)[ring->sub(u, v)]; };
    auto out = [ring, conn](Vertex u, RegularGraph::Sink& s) {
      for (MatIndex c : *conn) s.push_back(ring->add(u, c));
    };
    return RegularGraph(spec, ring->size(), false, claim, adj, out, out);
  }

  RegularGraph on_sl2_graph(const GraphSpec& spec, std::function<bool(MatIndex)> diff_pred,
                            DegreeClaim claim) const {
    const RingPtr ring = ring_;
    auto pred = std::make_shared<std::function<bool(MatIndex)>>(std::move(diff_pred));
    auto adj = [ring, pred](Vertex u, Vertex v) {
      if (u == v) return false;
      const auto& sl2 = ring->table().sl2;
      return (*pred)(ring->sub(sl2[u], sl2[v]));
    };
    auto out = [ring, pred](Vertex u, RegularGraph::Sink& s) {
      const auto& sl2 = ring->table().sl2;
      for (Vertex v = 0; v < sl2.size(); ++v)
        if (v != u && (*pred)(ring->sub(sl2[u], sl2[v]))) s.push_back(v);
    };
    return RegularGraph(spec, ring->table().sl2.size(), false, claim, adj, out, out);
  }

  RegularGraph sp_digraph(const GraphSpec& spec, bool sl2_first) const {
    const RingPtr ring = ring_;
    const std::uint64_t m = ring->size();
    const auto& dom = sl2_first ? ring->table().sl2 : ring->table().all;
    const std::uint64_t n = dom.size() * m;
    if (n > std::numeric_limits<Vertex>::max()) throw Error(ErrorKind::resource_limit, "vertex count overflow");
    auto pos = std::make_shared<const std::vector<std::int64_t>>(sl2_pos_);
    auto first_of = [ring, sl2_first, m](Vertex v) -> MatIndex {
      const MatIndex k = static_cast<MatIndex>(v / m);
      return sl2_first ? ring->table().sl2[k] : k;
    };
    auto vertex = [pos, sl2_first, m](MatIndex a, MatIndex c) -> Vertex {
      const std::uint64_t k = sl2_first ? static_cast<std::uint64_t>((*pos)[a]) : a;
      return static_cast<Vertex>(k * m + c);
    };
    auto adj = [ring, first_of, m, sl2_first](Vertex u, Vertex v) {
      const MatIndex a = first_of(u), c = static_cast<MatIndex>(u % m);
      const MatIndex b = first_of(v), d = static_cast<MatIndex>(v % m);
      (void)sl2_first;
      return ring->mul(a, b) == ring->add(c, d);
    };
    // (A, C) -> (B, AB - C) for every B in the domain.
    auto out = [ring, first_of, vertex, m, sl2_first](Vertex u, RegularGraph::Sink& s) {
      const MatIndex a = first_of(u), c = static_cast<MatIndex>(u % m);
      const auto& dom = sl2_first ? ring->table().sl2 : ring->table().all;
      for (MatIndex b : dom) s.push_back(vertex(b, ring->sub(ring->mul(a, b), c)));
    };
    // (A, AB - D) -> (B, D) for every A in the domain.
    auto in = [ring, first_of, vertex, m, sl2_first](Vertex v, RegularGraph::Sink& s) {
      const MatIndex b = first_of(v), d = static_cast<MatIndex>(v % m);
      const auto& dom = sl2_first ? ring->table().sl2 : ring->table().all;
      for (MatIndex a : dom) s.push_back(vertex(a, ring->sub(ring->mul(a, b), d)));
    };
    return RegularGraph(spec, n, true, DegreeClaim::exact(dom.size()), adj, out, in);
  }

  RegularGraph aux_graph(const GraphSpec& spec) const {
    const RingPtr ring = ring_;
    const std::uint64_t m = ring->size();
    const bool sl2_first = spec.family != Family::aux_e;
    auto pred = std::make_shared<const std::function<bool(MatIndex, MatIndex)>>(
        aux_pair_predicate(ring, spec.family, spec.param));
    const auto& dom = sl2_first ? ring->table().sl2 : ring->table().all;
    const std::uint64_t n = dom.size() * m;
    if (n > std::numeric_limits<Vertex>::max()) throw Error(ErrorKind::resource_limit, "vertex count overflow");
    auto first_of = [ring, sl2_first, m](Vertex v) -> MatIndex {
      const MatIndex k = static_cast<MatIndex>(v / m);
      return sl2_first ? ring->table().sl2[k] : k;
    };
    auto adj = [ring, pred, first_of, m](Vertex u, Vertex v) {
      return (*pred)(ring->sub(first_of(u), first_of(v)),
                     ring->sub(static_cast<MatIndex>(u % m), static_cast<MatIndex>(v % m)));
    };
    RegularGraph::Generator out;
    if (!sl2_first) {
      // Cayley graph on the additive group M2 x M2: neighbours are u - s over the connection set.
      auto conn = std::make_shared<std::vector<std::pair<MatIndex, MatIndex>>>();
      for (MatIndex a = 0; a < m; ++a)
        for (MatIndex c = 0; c < m; ++c)
          if ((*pred)(a, c)) conn->emplace_back(a, c);
      out = [ring, conn, m](Vertex u, RegularGraph::Sink& s) {
        const MatIndex a = static_cast<MatIndex>(u / m), c = static_cast<MatIndex>(u % m);
        for (const auto& [da, dc] : *conn)
          s.push_back(static_cast<Vertex>(std::uint64_t{ring->sub(a, da)} * m + ring->sub(c, dc)));
      };
    } else {
      out = [ring, pred, first_of, m](Vertex u, RegularGraph::Sink& s) {
        const MatIndex a = first_of(u), c = static_cast<MatIndex>(u % m);
        const auto& sl2 = ring->table().sl2;
        for (std::uint64_t k = 0; k < sl2.size(); ++k) {
          const MatIndex da = ring->sub(a, sl2[k]);
          for (MatIndex d = 0; d < m; ++d)
            if ((*pred)(da, ring->sub(c, d))) s.push_back(static_cast<Vertex>(k * m + d));
        }
      };
    }
    return RegularGraph(spec, n, false, aux_claim(spec), adj, out, out);
  }

  DegreeClaim aux_claim(const GraphSpec& spec) const {
    const std::uint64_t q = ring_->q();
    const std::uint64_t q4 = q * q * q * q;
    if (spec.family == Family::aux_e) return DegreeClaim::at_most(q4 * q);
    if (spec.family == Family::aux_m2) return DegreeClaim::none();
    switch (spec.param) {
      case 5:
      case 6: return DegreeClaim::at_most(q * q * q);
      case 7: return DegreeClaim::at_most(q4);
      case 8: return DegreeClaim::exact(q4 * q);
      default: return DegreeClaim::none();
    }
  }

  RegularGraph tensor(const GraphSpec& spec) const {
    auto g = std::make_shared<RegularGraph>(build(*spec.left));
    auto h = std::make_shared<RegularGraph>(build(*spec.right));
    return tensor_product(spec, g, h);
  }

 public:
  /// Tensor product of two undirected graphs: (u,v)~(u',v') iff u~u' and v~v'.
  static RegularGraph tensor_product(GraphSpec spec, std::shared_ptr<const RegularGraph> g,
                                     std::shared_ptr<const RegularGraph> h) {
    if (g->directed() || h->directed()) throw Error(ErrorKind::unsupported, "tensor product of digraphs");
    const std::uint64_t nh = h->n();
    const std::uint64_t n = g->n() * nh;
    if (n > std::numeric_limits<Vertex>::max()) throw Error(ErrorKind::resource_limit, "vertex count overflow");
    auto adj = [g, h, nh](Vertex u, Vertex v) {
      return g->adjacent(static_cast<Vertex>(u / nh), static_cast<Vertex>(v / nh)) &&
             h->adjacent(static_cast<Vertex>(u % nh), static_cast<Vertex>(v % nh));
    };
    auto out = [g, h, nh](Vertex u, RegularGraph::Sink& s) {
      const auto gn = g->out_neighbors(static_cast<Vertex>(u / nh));
      const auto hn = h->out_neighbors(static_cast<Vertex>(u % nh));
      for (Vertex a : gn)
        for (Vertex b : hn) s.push_back(static_cast<Vertex>(std::uint64_t{a} * nh + b));
    };
    DegreeClaim claim = DegreeClaim::none();
    if (g->audit().regular() && h->audit().regular())
      claim = DegreeClaim::exact(g->audit().max_out * h->audit().max_out);
    return RegularGraph(std::move(spec), n, false, claim, adj, out, out);
  }

  /// Tensor product with storage/audit applied by this factory.
  RegularGraph build_tensor(const RegularGraph& g, const RegularGraph& h) const {
    GraphSpec spec = GraphSpec::tensor_of(g.spec(), h.spec());
    RegularGraph t = tensor_product(spec, std::make_shared<RegularGraph>(g), std::make_shared<RegularGraph>(h));
    finish(t);
    return t;
  }

 private:
  RegularGraph make(const GraphSpec& spec) const {
    const std::uint64_t q = ring_->q();
    const auto& t = ring_->table();
    const std::uint64_t sl2 = t.sl2.size();
    switch (spec.family) {
      case Family::unit_cayley: return cayley_m2(spec, t.sl2, DegreeClaim::exact(sl2));
      case Family::det_alpha:
        if (spec.param == 0 || spec.param >= q) throw Error(ErrorKind::domain, "det-alpha needs alpha != 0");
        return cayley_m2(spec, t.slice(spec.param), DegreeClaim::exact(sl2));
      case Family::gl_diff_m2: return cayley_m2(spec, t.gl2, DegreeClaim::exact(t.gl2.size()));
      case Family::singular_diff_m2: {
        std::vector<MatIndex> conn(t.slice(0).begin() + 1, t.slice(0).end());  // drop the zero matrix
        return cayley_m2(spec, std::move(conn), DegreeClaim::exact(q * q * q + q * q - q - 1));
      }
      case Family::sl2_invertible_diff: {
        const RingPtr r = ring_;
        return on_sl2_graph(spec, [r](MatIndex d) { return r->det(d) != 0; },
                            DegreeClaim::exact(q * q * q - q * q - q));
      }
      case Family::sl2_singular_diff: {
        const RingPtr r = ring_;
        return on_sl2_graph(spec, [r](MatIndex d) { return d != 0 && r->det(d) == 0; },
                            DegreeClaim::exact(q * q - 1));
      }
      case Family::sl2_sl2_diff: {
        const RingPtr r = ring_;
        return on_sl2_graph(spec, [r](MatIndex d) { return r->det(d) == 1; }, DegreeClaim::none());
      }
      case Family::sp_digraph_m2: return sp_digraph(spec, false);
      case Family::sp_digraph_sl2: return sp_digraph(spec, true);
      case Family::aux_e:
      case Family::aux_m:
      case Family::aux_m2: return aux_graph(spec);
      case Family::tensor: return tensor(spec);
      case Family::custom: break;
    }
    throw Error(ErrorKind::domain, "unknown family");
  }

  RingPtr ring_;
  BuildOptions opts_;
  std::vector<std::int64_t> sl2_pos_;
};

/// Graph from explicit out-neighbour lists. Undirected input must list both directions.
inline RegularGraph make_explicit_graph(std::vector<std::vector<Vertex>> out_lists, bool directed,
                                        std::uint32_t audit_samples = 512) {
  const std::uint64_t n = out_lists.size();
  auto outs = std::make_shared<std::vector<std::vector<Vertex>>>(std::move(out_lists));
  auto ins = std::make_shared<std::vector<std::vector<Vertex>>>(n);
  for (Vertex u = 0; u < n; ++u) {
    auto& row = (*outs)[u];
    std::sort(row.begin(), row.end());
    for (Vertex v : row) {
      if (v >= n) throw Error(ErrorKind::domain, "edge endpoint out of range");
      (*ins)[v].push_back(u);
    }
  }
  if (!directed)
    for (Vertex u = 0; u < n; ++u)
      if ((*outs)[u].size() != (*ins)[u].size()) throw Error(ErrorKind::domain, "undirected lists not symmetric");
  auto adj = [outs](Vertex u, Vertex v) {
    const auto& row = (*outs)[u];
    return std::binary_search(row.begin(), row.end(), v);
  };
  auto out = [outs](Vertex u, RegularGraph::Sink& s) { s.insert(s.end(), (*outs)[u].begin(), (*outs)[u].end()); };
  auto in = [ins](Vertex u, RegularGraph::Sink& s) { s.insert(s.end(), (*ins)[u].begin(), (*ins)[u].end()); };
  RegularGraph g(GraphSpec::of(Family::custom, 0), n, directed, DegreeClaim::none(), adj, out, in);
  g.run_audit(audit_samples);
  return g;
}

/// Complete graph K_n.
inline RegularGraph complete_graph(std::uint32_t n) {
  std::vector<std::vector<Vertex>> lists(n);
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = 0; v < n; ++v)
      if (u != v) lists[u].push_back(v);
  return make_explicit_graph(std::move(lists), false);
}

/// Common out- (or in-) neighbours of two distinct vertices, by neighbour-list scan.
enum class Direction { out, in };

inline std::uint64_t common_neighbors(const RegularGraph& g, Vertex u, Vertex v, Direction dir) {
  if (u == v) throw Error(ErrorKind::domain, "common_neighbors needs u != v");
  const auto a = dir == Direction::out ? g.out_neighbors(u) : g.in_neighbors(u);
  const auto b = dir == Direction::out ? g.out_neighbors(v) : g.in_neighbors(v);
  std::uint64_t count = 0;
  for (std::size_t i = 0, j = 0; i < a.size() && j < b.size();) {
    if (a[i] < b[j]) ++i;
    else if (b[j] < a[i]) ++j;
    else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

/// Exact diameter by BFS from every vertex; nullopt when disconnected.
inline std::optional<std::uint32_t> diameter(const RegularGraph& g) {
  if (g.directed()) throw Error(ErrorKind::unsupported, "diameter of a digraph");
  if (g.n() > kDenseUndirectedLimit) throw Error(ErrorKind::resource_limit, "diameter limited to n <= 1e4");
  const auto csr = g.csr();
  const std::uint32_t n = static_cast<std::uint32_t>(g.n());
  std::uint32_t best = 0;
  std::vector<std::uint32_t> dist(n);
  std::vector<Vertex> frontier;
  frontier.reserve(n);
  for (Vertex s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<std::uint32_t>::max());
    dist[s] = 0;
    frontier.clear();
    frontier.push_back(s);
    std::uint32_t seen = 1;
    for (std::size_t head = 0; head < frontier.size(); ++head) {
      const Vertex u = frontier[head];
      for (std::uint64_t k = csr.offsets[u]; k < csr.offsets[u + 1]; ++k) {
        const Vertex w = csr.targets[k];
        if (dist[w] == std::numeric_limits<std::uint32_t>::max()) {
          dist[w] = dist[u] + 1;
          best = std::max(best, dist[w]);
          frontier.push_back(w);
          ++seen;
        }
      }
    }
    if (seen != n) return std::nullopt;
  }
  return best;
}

}  // namespace mrx
