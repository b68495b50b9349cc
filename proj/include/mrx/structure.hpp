#pragma once

// Exact checks of the structural claims behind the (n, d, lambda) bounds:
// common-neighbour case analyses, digraph normality, adjacency decompositions,
// the determinant-scaling correspondence and SL2 + SL2 = M2.

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mrx/graph.hpp"
#include "mrx/parallel.hpp"

namespace mrx {

enum class CaseFamily { sp_digraph_m2, sp_digraph_sl2, sl2_singular_diff };

enum class CaseLabel {
  g1_case1, g1_case2, g1_case3_1, g1_case3_2, g1_case3_3, g1_case3_4, g1_case3_5,
  g2_case1, g2_case2, g2_case3, g2_case4, g2_case5_1, g2_case5_2, g2_case5_3, g2_case5_4,
  det0_generic, det0_row_equal, det0_col_equal, det0_translate, detnz_generic, detnz_proportional,
};

inline const char* to_string(CaseLabel l) {
  switch (l) {
    case CaseLabel::g1_case1: return "1";
    case CaseLabel::g1_case2: return "2";
    case CaseLabel::g1_case3_1: return "3.1";
    case CaseLabel::g1_case3_2: return "3.2";
    case CaseLabel::g1_case3_3: return "3.3";
    case CaseLabel::g1_case3_4: return "3.4";
    case CaseLabel::g1_case3_5: return "3.5";
    case CaseLabel::g2_case1: return "1";
    case CaseLabel::g2_case2: return "2";
    case CaseLabel::g2_case3: return "3";
    case CaseLabel::g2_case4: return "4";
    case CaseLabel::g2_case5_1: return "5.1";
    case CaseLabel::g2_case5_2: return "5.2";
    case CaseLabel::g2_case5_3: return "5.3";
    case CaseLabel::g2_case5_4: return "5.4";
    case CaseLabel::det0_generic: return "det0-generic";
    case CaseLabel::det0_row_equal: return "det0-row-equal";
    case CaseLabel::det0_col_equal: return "det0-col-equal";
    case CaseLabel::det0_translate: return "det0-translate";
    case CaseLabel::detnz_generic: return "detNZ-generic";
    case CaseLabel::detnz_proportional: return "detNZ-proportional";
  }
  return "unknown";
}

inline const char* to_string(CaseFamily f) {
  switch (f) {
    case CaseFamily::sp_digraph_m2: return "sp-digraph-m2";
    case CaseFamily::sp_digraph_sl2: return "sp-digraph-sl2";
    case CaseFamily::sl2_singular_diff: return "sl2-singular-diff";
  }
  return "unknown";
}

inline Family graph_family(CaseFamily f) {
  switch (f) {
    case CaseFamily::sp_digraph_m2: return Family::sp_digraph_m2;
    case CaseFamily::sp_digraph_sl2: return Family::sp_digraph_sl2;
    case CaseFamily::sl2_singular_diff: return Family::sl2_singular_diff;
  }
  return Family::custom;
}

struct PairClassification {
  CaseLabel label;
  /// Empty only for labels the analysis rules out (G1 case 3.2).
  std::optional<std::uint64_t> predicted;
};

inline std::string format_matrix(const Mat2& m) {
  std::ostringstream os;
  os << "[[" << m.a << "," << m.b << "],[" << m.c << "," << m.d << "]]";
  return os.str();
}

/// Labels an ordered pair of distinct vertices and returns the count the case analysis predicts.
inline PairClassification classify_pair(const GraphFactory& f, CaseFamily fam, Vertex u, Vertex v) {
  if (u == v) throw Error(ErrorKind::domain, "classify_pair needs u != v");
  const IndexedRing& r = *f.ring();
  const std::uint64_t q = r.q();
  if (fam == CaseFamily::sl2_singular_diff) {
    const GraphSpec spec = GraphSpec::of(Family::sl2_singular_diff, r.q());
    const Mat2 x = r.decode(f.vertex_matrix(spec, u)), y = r.decode(f.vertex_matrix(spec, v));
    const Field& k = r.field();
    const bool det0 = r.det(r.sub(r.encode(x), r.encode(y))) == 0;
    if (det0) {
      if (x.a != y.a && x.b != y.b) return {CaseLabel::det0_generic, 2 * q - 1};
      if (x.a != y.a) return {CaseLabel::det0_row_equal, 2 * q - 1};
      if (x.b != y.b) return {CaseLabel::det0_col_equal, 2 * q - 1};
      return {CaseLabel::det0_translate, 0};
    }
    const bool cross0 = k.sub(k.mul(x.a, y.b), k.mul(x.b, y.a)) == 0;
    if (!cross0) return {CaseLabel::detnz_generic, q - 1};
    return {CaseLabel::detnz_proportional, q};
  }

  const GraphSpec spec = GraphSpec::of(graph_family(fam), r.q());
  const auto [a1, c1] = f.vertex_pair(spec, u);
  const auto [a2, c2] = f.vertex_pair(spec, v);
  const MatIndex da = r.sub(a1, a2), dc = r.sub(c1, c2);
  const int ra = r.rank(da), rc = r.rank(dc);
  const bool same = ra == 1 && rc == 1 && detail::same_profile(r, da, dc);

  if (fam == CaseFamily::sp_digraph_m2) {
    if (ra == 2) return {CaseLabel::g1_case1, 1};
    if (rc == 2) return {CaseLabel::g1_case2, 0};
    if (ra == 0 && rc == 1) return {CaseLabel::g1_case3_1, 0};
    if (ra == 0) return {CaseLabel::g1_case3_2, std::nullopt};
    if (rc == 0) return {CaseLabel::g1_case3_3, q * q};
    if (same) return {CaseLabel::g1_case3_4, q * q};
    return {CaseLabel::g1_case3_5, 0};
  }
  if (ra == 2 && rc == 2) {
    if (r.det(da) == r.det(dc)) return {CaseLabel::g2_case1, 1};
    return {CaseLabel::g2_case2, 0};
  }
  if (rc == 2) return {CaseLabel::g2_case3, 0};
  if (ra == 2) return {CaseLabel::g2_case4, 0};
  if (ra == 0) return {CaseLabel::g2_case5_1, 0};  // rc == 1 since u != v
  if (rc == 0) return {CaseLabel::g2_case5_2, 0};
  if (same) return {CaseLabel::g2_case5_3, q};
  return {CaseLabel::g2_case5_4, 0};
}

/// Full matrices behind a vertex, for mismatch reports.
inline std::string describe_vertex(const GraphFactory& f, const GraphSpec& spec, Vertex u) {
  const IndexedRing& r = *f.ring();
  if (spec.family == Family::sp_digraph_m2 || spec.family == Family::sp_digraph_sl2 || spec.family == Family::aux_e ||
      spec.family == Family::aux_m || spec.family == Family::aux_m2) {
    const auto [a, c] = f.vertex_pair(spec, u);
    return "(A=" + format_matrix(r.decode(a)) + ", C=" + format_matrix(r.decode(c)) + ")";
  }
  return format_matrix(r.decode(f.vertex_matrix(spec, u)));
}

enum class CheckMode { exhaustive, sampled };

inline const char* to_string(CheckMode m) { return m == CheckMode::exhaustive ? "exhaustive" : "sampled"; }

struct Mismatch {
  std::string first, second;  // full matrices
  std::string label;
  std::int64_t expected = 0;
  std::int64_t observed = 0;
};

/// Shape shared by all verification reports.
struct VerificationReport {
  std::string target;
  std::uint32_t q = 0;
  CheckMode mode = CheckMode::exhaustive;
  std::uint64_t pairs_checked = 0;
  std::uint64_t mismatch_count = 0;
  /// First few mismatches with full data; mismatch_count has the total.
  std::vector<Mismatch> mismatches;
  std::map<std::string, std::uint64_t> label_counts;
  std::map<std::string, std::uint64_t> label_mismatches;
  std::map<std::string, std::string> notes;
  double elapsed_ms = 0.0;

  bool exact() const { return mismatch_count == 0; }
  std::string verdict() const { return exact() ? "exact" : "mismatch"; }
};

inline constexpr std::size_t kMismatchKeep = 16;
inline constexpr std::uint64_t kExhaustivePairLimit = 100'000'000;

struct CheckOptions {
  CheckMode mode = CheckMode::exhaustive;
  std::uint64_t samples = 100'000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

namespace detail {

/// Ordered pair #k of distinct vertices: k in [0, n(n-1)).
inline std::pair<Vertex, Vertex> ordered_pair(std::uint64_t k, std::uint64_t n) {
  const Vertex u = static_cast<Vertex>(k / (n - 1));
  Vertex v = static_cast<Vertex>(k % (n - 1));
  if (v >= u) ++v;
  return {u, v};
}

/// Pair #k of the sample stream; depends only on (seed, k).
inline std::pair<Vertex, Vertex> sampled_pair(std::uint64_t seed, std::uint64_t k, std::uint64_t n) {
  std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ull * (k + 1)));
  std::uniform_int_distribution<std::uint64_t> pick(0, n * (n - 1) - 1);
  return ordered_pair(pick(rng), n);
}

inline std::uint64_t intersect_sorted(const std::vector<Vertex>& a, const std::vector<Vertex>& b) {
  std::uint64_t c = 0;
  for (std::size_t i = 0, j = 0; i < a.size() && j < b.size();) {
    if (a[i] < b[j]) ++i;
    else if (b[j] < a[i]) ++j;
    else ++c, ++i, ++j;
  }
  return c;
}

struct NeighborCache {
  std::vector<std::vector<Vertex>> out, in;
  explicit NeighborCache(const RegularGraph& g, bool with_in = false) : out(g.n()) {
    for (Vertex u = 0; u < g.n(); ++u) out[u] = g.out_neighbors(u);
    if (with_in) {
      in.resize(g.n());
      for (Vertex u = 0; u < g.n(); ++u) in[u] = g.in_neighbors(u);
    }
  }
};

/// Per-worker accumulation merged in worker order so reports are thread-count independent.
struct Partial {
  std::uint64_t checked = 0, bad = 0;
  std::vector<std::pair<std::uint64_t, Mismatch>> kept;  // (pair index, data)
  std::map<std::string, std::uint64_t> labels, label_bad;
};

inline void merge(VerificationReport& rep, std::vector<Partial>& parts) {
  std::vector<std::pair<std::uint64_t, Mismatch>> all;
  for (auto& p : parts) {
    rep.pairs_checked += p.checked;
    rep.mismatch_count += p.bad;
    for (auto& [k, v] : p.labels) rep.label_counts[k] += v;
    for (auto& [k, v] : p.label_bad) rep.label_mismatches[k] += v;
    for (auto& m : p.kept) all.push_back(std::move(m));
  }
  std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  for (std::size_t i = 0; i < all.size() && i < kMismatchKeep; ++i) rep.mismatches.push_back(std::move(all[i].second));
}

inline double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

/// Drives a pair check over all ordered pairs or a deterministic sample of them.
template <class Check>
void run_pairs(VerificationReport& rep, std::uint64_t n, const CheckOptions& opt, Check&& check) {
  const std::uint64_t total = n * (n - 1);
  if (opt.mode == CheckMode::exhaustive && total > kExhaustivePairLimit)
    throw Error(ErrorKind::resource_limit, "exhaustive mode limited to 1e8 pairs");
  const std::uint64_t count = opt.mode == CheckMode::exhaustive ? total : opt.samples;
  std::vector<Partial> parts(std::max(1u, opt.threads));
  parallel_chunks(count, opt.threads, [&](std::uint64_t b, std::uint64_t e, unsigned w) {
    Partial& p = parts[w];
    for (std::uint64_t k = b; k < e; ++k) {
      const auto [u, v] = opt.mode == CheckMode::exhaustive ? ordered_pair(k, n) : sampled_pair(opt.seed, k, n);
      ++p.checked;
      check(k, u, v, p);
    }
  });
  merge(rep, parts);
}

}  // namespace detail

/// Brute-force common out-neighbour counts against the case-analysis predictions.
inline VerificationReport verify_case_analysis(const GraphFactory& f, CaseFamily fam, const CheckOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  const GraphSpec spec = GraphSpec::of(graph_family(fam), f.ring()->q());
  const RegularGraph g = f.build(spec);
  const detail::NeighborCache nb(g);
  VerificationReport rep;
  rep.target = std::string("cases:") + to_string(fam);
  rep.q = f.ring()->q();
  rep.mode = opt.mode;
  detail::run_pairs(rep, g.n(), opt, [&](std::uint64_t k, Vertex u, Vertex v, detail::Partial& p) {
    const auto cls = classify_pair(f, fam, u, v);
    const std::string label = to_string(cls.label);
    ++p.labels[label];
    const std::uint64_t observed = detail::intersect_sorted(nb.out[u], nb.out[v]);
    if (cls.predicted && *cls.predicted == observed) return;
    ++p.bad;
    ++p.label_bad[label];
    if (p.kept.size() < kMismatchKeep)
      p.kept.push_back({k,
                        {describe_vertex(f, spec, u), describe_vertex(f, spec, v), label,
                         cls.predicted ? static_cast<std::int64_t>(*cls.predicted) : -1,
                         static_cast<std::int64_t>(observed)}});
  });
  std::uint64_t labelled = 0;
  for (const auto& [k, c] : rep.label_counts) labelled += c;
  rep.notes["partition_total"] = labelled == rep.pairs_checked ? "ok" : "broken";
  rep.elapsed_ms = detail::ms_since(t0);
  return rep;
}

/// |N+(u,v)| == |N-(u,v)| over pairs, plus out-degree == in-degree at every vertex.
inline VerificationReport verify_normality(const RegularGraph& g, const CheckOptions& opt = {},
                                           const GraphFactory* f = nullptr) {
  if (!g.directed()) throw Error(ErrorKind::domain, "verify_normality needs a digraph");
  const auto t0 = std::chrono::steady_clock::now();
  const detail::NeighborCache nb(g, true);
  VerificationReport rep;
  rep.target = "normality:" + g.name();
  rep.q = g.spec().q;
  rep.mode = opt.mode;
  std::uint64_t deg_bad = 0;
  for (Vertex u = 0; u < g.n(); ++u) deg_bad += nb.out[u].size() != nb.in[u].size();
  rep.notes["degree_imbalanced_vertices"] = std::to_string(deg_bad);
  detail::run_pairs(rep, g.n(), opt, [&](std::uint64_t k, Vertex u, Vertex v, detail::Partial& p) {
    const std::uint64_t np = detail::intersect_sorted(nb.out[u], nb.out[v]);
    const std::uint64_t nm = detail::intersect_sorted(nb.in[u], nb.in[v]);
    p.labels["N+"] += np;
    p.labels["N-"] += nm;
    if (np == nm) return;
    ++p.bad;
    if (p.kept.size() < kMismatchKeep) {
      Mismatch m;
      m.first = f ? describe_vertex(*f, g.spec(), u) : std::to_string(u);
      m.second = f ? describe_vertex(*f, g.spec(), v) : std::to_string(v);
      m.label = "N+ vs N-";
      m.expected = static_cast<std::int64_t>(np);
      m.observed = static_cast<std::int64_t>(nm);
      p.kept.push_back({k, std::move(m)});
    }
  });
  // The N+ / N- sums travel through label_counts; move them to notes.
  const std::uint64_t total_out = rep.label_counts["N+"], total_in = rep.label_counts["N-"];
  rep.label_counts.clear();
  rep.notes["sum_n_plus"] = std::to_string(total_out);
  rep.notes["sum_n_minus"] = std::to_string(total_in);
  if (opt.mode == CheckMode::exhaustive) {
    // Both sums count length-2 paths u -> w <- v (resp. u <- w -> v) with u != v.
    std::uint64_t paths = 0;
    for (Vertex w = 0; w < g.n(); ++w) {
      const std::uint64_t d = nb.in[w].size();
      if (d) paths += d * (d - 1);
    }
    rep.notes["length2_paths"] = std::to_string(paths);
    rep.notes["three_way_count"] = (paths == total_out && paths == total_in) ? "ok" : "differs";
  }
  rep.mismatch_count += deg_bad;
  rep.elapsed_ms = detail::ms_since(t0);
  return rep;
}

enum class DecompositionTarget { g1_mmt, g2_mmt, g31_squared };

inline const char* to_string(DecompositionTarget t) {
  switch (t) {
    case DecompositionTarget::g1_mmt: return "g1-mmt";
    case DecompositionTarget::g2_mmt: return "g2-mmt";
    case DecompositionTarget::g31_squared: return "g31-squared";
  }
  return "unknown";
}

inline DecompositionTarget parse_decomposition(const std::string& s) {
  if (s == "g1-mmt") return DecompositionTarget::g1_mmt;
  if (s == "g2-mmt") return DecompositionTarget::g2_mmt;
  if (s == "g31-squared") return DecompositionTarget::g31_squared;
  throw Error(ErrorKind::usage, "unknown decomposition target '" + s + "'");
}

/// One weighted adjacency term of an assembled right-hand side.
struct Term {
  std::string name;
  std::int64_t coefficient;
  std::function<bool(Vertex, Vertex)> adjacent;
  std::uint64_t max_degree;
};

/// The five component graphs in the M31^2 identity, with their stated edge conditions.
inline std::vector<Term> g31_terms(const GraphFactory& f) {
  const RingPtr ring = f.ring();
  const std::int64_t q = ring->q();
  auto mats = [ring](Vertex u, Vertex v) {
    const auto& sl2 = ring->table().sl2;
    return std::pair{ring->decode(sl2[u]), ring->decode(sl2[v])};
  };
  auto det_diff = [ring](Vertex u, Vertex v) {
    const auto& sl2 = ring->table().sl2;
    return ring->det(ring->sub(sl2[u], sl2[v]));
  };
  auto cross = [ring](const Mat2& x, const Mat2& y) {
    const Field& k = ring->field();
    return k.sub(k.mul(x.a, y.b), k.mul(x.b, y.a));
  };
  std::vector<Term> t;
  t.push_back({"E31", q, [=](Vertex u, Vertex v) {
                 if (u == v) return false;
                 const auto [x, y] = mats(u, v);
                 return x.a != y.a && x.b != y.b && cross(x, y) != 0 && det_diff(u, v) == 0;
               }, 0});
  t.push_back({"E32", q, [=](Vertex u, Vertex v) {
                 if (u == v) return false;
                 const auto [x, y] = mats(u, v);
                 return x.a != y.a && x.b == y.b && x.d == y.d && cross(x, y) != 0 && det_diff(u, v) == 0;
               }, 0});
  t.push_back({"E33", q, [=](Vertex u, Vertex v) {
                 if (u == v) return false;
                 const auto [x, y] = mats(u, v);
                 return x.a == y.a && x.b != y.b && x.c == y.c && det_diff(u, v) == 0;
               }, 0});
  t.push_back({"E34", -(q - 1), [=](Vertex u, Vertex v) {
                 if (u == v) return false;
                 const auto [x, y] = mats(u, v);
                 return x.a == y.a && x.b == y.b && (x.c != y.c || x.d != y.d) && det_diff(u, v) == 0;
               }, 0});
  t.push_back({"E35", 1, [=](Vertex u, Vertex v) {
                 if (u == v) return false;
                 const auto [x, y] = mats(u, v);
                 const Field& k = ring->field();
                 // 1 + b'c - a'd and a'd - bc' - 1, with (a,b,c,d) = x and primes = y.
                 const Elem t1 = k.add(1, k.sub(k.mul(y.b, x.c), k.mul(y.a, x.d)));
                 const Elem t2 = k.sub(k.sub(k.mul(y.a, x.d), k.mul(x.b, y.c)), 1);
                 return cross(x, y) == 0 && (t1 != 0 || t2 != 0) && det_diff(u, v) != 0;
               }, 0});
  const std::uint64_t n = ring->table().sl2.size();
  for (auto& term : t) {
    std::uint64_t best = 0;
    for (Vertex u = 0; u < n; ++u) {
      std::uint64_t d = 0;
      for (Vertex v = 0; v < n; ++v) d += term.adjacent(u, v);
      best = std::max(best, d);
    }
    term.max_degree = best;
  }
  return t;
}

struct Decomposition {
  std::string target;
  std::uint64_t n = 0;
  std::int64_t identity_coefficient = 0;
  std::int64_t ones_coefficient = 0;
  std::vector<Term> terms;
  /// Graph whose M M^t (or M^2 when undirected) is the left side.
  std::shared_ptr<const RegularGraph> graph;
  GraphSpec spec;
};

inline Decomposition build_decomposition(const GraphFactory& f, DecompositionTarget target) {
  const std::uint32_t q = f.ring()->q();
  const std::int64_t qq = static_cast<std::int64_t>(q) * q;
  Decomposition d;
  d.target = to_string(target);
  auto add_graph = [&](const GraphSpec& s, std::int64_t coef) {
    auto g = std::make_shared<RegularGraph>(f.build(s));
    g->run_audit(g->n() <= 20'000 ? g->n() : 512);
    d.terms.push_back({family_name(s), coef, [g](Vertex u, Vertex v) { return g->adjacent(u, v); }, g->audit().max_out});
  };
  switch (target) {
    case DecompositionTarget::g1_mmt: {
      d.spec = GraphSpec::of(Family::sp_digraph_m2, q);
      d.identity_coefficient = qq * qq - 1;
      d.ones_coefficient = 1;
      add_graph(GraphSpec::of(Family::aux_e, q, 11), -1);
      add_graph(GraphSpec::of(Family::aux_e, q, 12), -1);
      add_graph(GraphSpec::of(Family::aux_e, q, 13), qq - 1);
      add_graph(GraphSpec::of(Family::aux_e, q, 14), qq - 1);
      add_graph(GraphSpec::of(Family::aux_e, q, 15), -1);
      break;
    }
    case DecompositionTarget::g2_mmt: {
      d.spec = GraphSpec::of(Family::sp_digraph_sl2, q);
      d.identity_coefficient = static_cast<std::int64_t>(f.ring()->table().sl2.size()) - 1;
      d.ones_coefficient = 1;
      add_graph(GraphSpec::of(Family::aux_m, q, 1), -1);
      for (std::uint32_t i = 1; i < q; ++i) add_graph(GraphSpec::of(Family::aux_m2, q, i), 1);
      add_graph(GraphSpec::of(Family::aux_m, q, 3), -1);
      add_graph(GraphSpec::of(Family::aux_m, q, 4), -1);
      add_graph(GraphSpec::of(Family::aux_m, q, 5), -1);
      add_graph(GraphSpec::of(Family::aux_m, q, 6), -1);
      add_graph(GraphSpec::of(Family::aux_m, q, 7), static_cast<std::int64_t>(q) - 1);
      add_graph(GraphSpec::of(Family::aux_m, q, 8), -1);
      break;
    }
    case DecompositionTarget::g31_squared: {
      d.spec = GraphSpec::of(Family::sl2_singular_diff, q);
      d.identity_coefficient = qq - q + 1;
      d.ones_coefficient = static_cast<std::int64_t>(q) - 1;
      d.terms = g31_terms(f);
      break;
    }
  }
  d.graph = std::make_shared<RegularGraph>(f.build(d.spec));
  d.n = d.graph->n();
  return d;
}

inline std::int64_t assembled_entry(const Decomposition& d, Vertex u, Vertex v) {
  std::int64_t s = d.ones_coefficient + (u == v ? d.identity_coefficient : 0);
  for (const auto& t : d.terms)
    if (t.adjacent(u, v)) s += t.coefficient;
  return s;
}

/// Left side entrywise from walk counts, right side from the component oracles.
/// Exhaustive mode compares all n^2 entries; sampled mode draws opt.samples entries.
inline VerificationReport verify_decomposition(const GraphFactory& f, DecompositionTarget target,
                                               const CheckOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  const Decomposition d = build_decomposition(f, target);
  const RegularGraph& g = *d.graph;
  const detail::NeighborCache nb(g);
  VerificationReport rep;
  rep.target = d.target;
  rep.q = f.ring()->q();
  rep.mode = opt.mode;
  const std::uint64_t n = d.n;
  const std::uint64_t count = opt.mode == CheckMode::exhaustive ? n * n : opt.samples;
  if (opt.mode == CheckMode::exhaustive && count > kExhaustivePairLimit)
    throw Error(ErrorKind::resource_limit, "exhaustive decomposition limited to 1e8 entries");
  std::vector<detail::Partial> parts(std::max(1u, opt.threads));
  parallel_chunks(count, opt.threads, [&](std::uint64_t b, std::uint64_t e, unsigned w) {
    auto& p = parts[w];
    for (std::uint64_t k = b; k < e; ++k) {
      Vertex u, v;
      if (opt.mode == CheckMode::exhaustive) {
        u = static_cast<Vertex>(k / n);
        v = static_cast<Vertex>(k % n);
      } else {
        std::mt19937_64 rng(opt.seed ^ (0x9e3779b97f4a7c15ull * (k + 1)));
        std::uniform_int_distribution<std::uint64_t> pick(0, n - 1);
        u = static_cast<Vertex>(pick(rng));
        v = static_cast<Vertex>(pick(rng));
      }
      ++p.checked;
      const std::int64_t lhs = u == v ? static_cast<std::int64_t>(nb.out[u].size())
                                      : static_cast<std::int64_t>(detail::intersect_sorted(nb.out[u], nb.out[v]));
      const std::int64_t rhs = assembled_entry(d, u, v);
      ++p.labels[u == v ? "diagonal" : "off-diagonal"];
      if (lhs == rhs) continue;
      ++p.bad;
      ++p.label_bad[u == v ? "diagonal" : "off-diagonal"];
      if (p.kept.size() < kMismatchKeep)
        p.kept.push_back({k, {describe_vertex(f, d.spec, u), describe_vertex(f, d.spec, v), "entry", rhs, lhs}});
    }
  });
  detail::merge(rep, parts);
  // Non-principal bound: |identity coefficient| + sum |coefficient| * degree over the adjacency terms.
  double bound = static_cast<double>(std::llabs(d.identity_coefficient));
  for (const auto& t : d.terms) bound += static_cast<double>(std::llabs(t.coefficient)) * static_cast<double>(t.max_degree);
  rep.notes["assembled_nonprincipal_bound"] = std::to_string(bound);
  rep.elapsed_ms = detail::ms_since(t0);
  return rep;
}

/// |Di Dj| vs |Di' Dj'| with Di' row-scaled and Dj' column-scaled into SL2.
struct ScalingResult {
  std::uint64_t original = 0, scaled = 0;
  bool equal() const { return original == scaled; }
};

inline ScalingResult scaling_lemma_sizes(const IndexedRing& r, Elem i, Elem j, const std::vector<MatIndex>& di,
                                         const std::vector<MatIndex>& dj) {
  if (i == 0 || j == 0 || i >= r.q() || j >= r.q()) throw Error(ErrorKind::domain, "scaling lemma needs i, j != 0");
  for (MatIndex x : di)
    if (r.det(x) != i) throw Error(ErrorKind::domain, "element of Di has the wrong determinant");
  for (MatIndex y : dj)
    if (r.det(y) != j) throw Error(ErrorKind::domain, "element of Dj has the wrong determinant");
  std::vector<MatIndex> si, sj;
  for (MatIndex x : di) si.push_back(r.encode(r.ring().scale_to_sl2(r.decode(x), ScaleSide::row)));
  for (MatIndex y : dj) sj.push_back(r.encode(r.ring().scale_to_sl2(r.decode(y), ScaleSide::column)));
  auto product_size = [&](const std::vector<MatIndex>& a, const std::vector<MatIndex>& b) {
    std::vector<bool> seen(r.size(), false);
    std::uint64_t c = 0;
    for (MatIndex x : a)
      for (MatIndex y : b) {
        const MatIndex z = r.mul(x, y);
        if (!seen[z]) seen[z] = true, ++c;
      }
    return c;
  };
  return {product_size(di, dj), product_size(si, sj)};
}

inline bool verify_scaling_lemma(const IndexedRing& r, Elem i, Elem j, const std::vector<MatIndex>& di,
                                 const std::vector<MatIndex>& dj) {
  return scaling_lemma_sizes(r, i, j, di, dj).equal();
}

/// Every matrix is a sum of two SL2 matrices.
inline bool verify_sl2_sumcover(const IndexedRing& r) {
  if (r.q() > 7) throw Error(ErrorKind::resource_limit, "sum cover check limited to q <= 7");
  const auto& t = r.table();
  for (MatIndex target = 0; target < r.size(); ++target) {
    bool hit = false;
    for (MatIndex s : t.sl2)
      if (t.in_sl2(r.sub(target, s))) {
        hit = true;
        break;
      }
    if (!hit) return false;
  }
  return true;
}

}  // namespace mrx
