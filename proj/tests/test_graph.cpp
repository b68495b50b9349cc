#include <gtest/gtest.h>

#include <random>

#include "mrx/graph.hpp"

using namespace mrx;

namespace {

std::uint64_t q3(std::uint64_t q) { return q * q * q; }

}  // namespace

TEST(FamilyNames, RoundTrip) {
  for (const char* name : {"unit-cayley", "det-alpha:2", "gl-diff-m2", "singular-diff-m2", "sl2-invertible-diff",
                           "sl2-singular-diff", "sl2-sl2-diff", "sp-digraph-m2", "sp-digraph-sl2", "aux-e:14",
                           "aux-m:7", "aux-m2:1", "tensor:gl-diff-m2,sl2-singular-diff"})
    EXPECT_EQ(family_name(parse_family(name, 3)), name);
  EXPECT_THROW(parse_family("nope", 3), Error);
  EXPECT_THROW(parse_family("det-alpha:x", 3), Error);
}

TEST(GraphFactoryTest, UnitCayleyQ2) {
  GraphFactory f(make_ring(2));
  auto g = f.build(GraphSpec::of(Family::unit_cayley, 2));
  EXPECT_EQ(g.n(), 16u);
  EXPECT_TRUE(g.audit().regular());
  EXPECT_EQ(g.degree(), 6u);
  EXPECT_EQ(g.storage(), Storage::dense_bitset);
  // Oracle: brute-force neighbour count with the matrix ring directly.
  const auto& r = *f.ring();
  for (Vertex u = 0; u < 16; ++u) {
    int deg = 0;
    for (Vertex v = 0; v < 16; ++v) {
      const bool e = r.ring().det(r.ring().sub(r.decode(u), r.decode(v))) == 1;
      deg += e;
      EXPECT_EQ(g.adjacent(u, v), e);
    }
    EXPECT_EQ(deg, 6);
  }
}

TEST(GraphFactoryTest, UndirectedFamiliesSymmetricAndDegrees) {
  for (std::uint32_t q : {2u, 3u}) {
    GraphFactory f(make_ring(q));
    for (Family fam : {Family::unit_cayley, Family::gl_diff_m2, Family::singular_diff_m2,
                       Family::sl2_invertible_diff, Family::sl2_singular_diff, Family::sl2_sl2_diff}) {
      auto g = f.build(GraphSpec::of(fam, q));
      for (Vertex u = 0; u < g.n(); ++u) {
        const auto nb = g.out_neighbors(u);
        for (Vertex v : nb) ASSERT_TRUE(g.adjacent(v, u)) << g.name();
        ASSERT_FALSE(g.adjacent(u, u)) << g.name();
      }
      g.run_audit(g.n());
      EXPECT_TRUE(g.audit().regular()) << g.name();
      EXPECT_TRUE(g.claimed_degree().satisfied_by(g.audit().min_out, g.audit().max_out)) << g.name() << " q=" << q;
    }
  }
}

TEST(GraphFactoryTest, SymmetrySampledQ5) {
  GraphFactory f(make_ring(5));
  auto g = f.build(GraphSpec::of(Family::unit_cayley, 5));
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<Vertex> pick(0, static_cast<Vertex>(g.n() - 1));
  for (int t = 0; t < 1'000'000; ++t) {
    const Vertex u = pick(rng), v = pick(rng);
    ASSERT_EQ(g.adjacent(u, v), g.adjacent(v, u));
  }
}

TEST(GraphFactoryTest, ComponentDegrees) {
  for (std::uint64_t q : {3u, 5u, 7u}) {
    GraphFactory f(make_ring(static_cast<std::uint32_t>(q)));
    auto g11 = f.build(GraphSpec::of(Family::sl2_invertible_diff, static_cast<std::uint32_t>(q)));
    EXPECT_TRUE(g11.audit().regular());
    EXPECT_EQ(g11.degree(), q3(q) - q * q - q);
    auto g31 = f.build(GraphSpec::of(Family::sl2_singular_diff, static_cast<std::uint32_t>(q)));
    EXPECT_EQ(g31.degree(), q * q - 1);
    auto g41 = f.build(GraphSpec::of(Family::singular_diff_m2, static_cast<std::uint32_t>(q)));
    EXPECT_EQ(g41.degree(), q3(q) + q * q - q - 1);
  }
}

TEST(GraphFactoryTest, DigraphDegrees) {
  GraphFactory f2(make_ring(2));
  auto g1 = f2.build(GraphSpec::of(Family::sp_digraph_m2, 2));
  EXPECT_EQ(g1.n(), 256u);
  g1.run_audit(g1.n());
  EXPECT_EQ(g1.audit().min_out, 16u);
  EXPECT_EQ(g1.audit().max_in, 16u);
  EXPECT_TRUE(g1.audit().regular());
  GraphFactory f3(make_ring(3));
  auto g2 = f3.build(GraphSpec::of(Family::sp_digraph_sl2, 3));
  EXPECT_EQ(g2.n(), 1944u);
  g2.run_audit(g2.n());
  EXPECT_TRUE(g2.audit().regular());
  EXPECT_EQ(g2.degree(), 24u);
}

TEST(GraphFactoryTest, DigraphEdgeRule) {
  GraphFactory f(make_ring(2));
  const auto spec = GraphSpec::of(Family::sp_digraph_sl2, 2);
  auto g = f.build(spec);
  const auto& r = *f.ring();
  for (Vertex u = 0; u < g.n(); ++u)
    for (Vertex v = 0; v < g.n(); ++v) {
      const auto [a, c] = f.vertex_pair(spec, u);
      const auto [b, d] = f.vertex_pair(spec, v);
      ASSERT_EQ(g.adjacent(u, v), r.mul(a, b) == r.add(c, d));
      ASSERT_EQ(f.pair_vertex(spec, a, c), u);
    }
}

TEST(GraphFactoryTest, DetAlphaDegree) {
  GraphFactory f(make_ring(3));
  auto g = f.build(GraphSpec::of(Family::det_alpha, 3, 2));
  EXPECT_EQ(g.degree(), 24u);
  EXPECT_THROW(f.build(GraphSpec::of(Family::det_alpha, 3, 0)), Error);
  EXPECT_THROW(f.build(GraphSpec::of(Family::unit_cayley, 5)), Error);
}

TEST(GraphFactoryTest, AuxDegreesQ2) {
  GraphFactory f(make_ring(2));
  auto m7 = f.build(GraphSpec::of(Family::aux_m, 2, 7));
  m7.run_audit(m7.n());
  EXPECT_LE(m7.audit().max_out, 16u);
  auto m8 = f.build(GraphSpec::of(Family::aux_m, 2, 8));
  m8.run_audit(m8.n());
  EXPECT_GT(m8.audit().max_out, 0u);
  EXPECT_THROW(f.build(GraphSpec::of(Family::aux_e, 2, 16)), Error);
  EXPECT_THROW(f.build(GraphSpec::of(Family::aux_m, 2, 2)), Error);
}

TEST(TensorProduct, Basics) {
  auto k2 = std::make_shared<RegularGraph>(complete_graph(2));
  auto t = GraphFactory::tensor_product(GraphSpec::of(Family::custom, 0), k2, k2);
  t.run_audit(t.n());
  EXPECT_EQ(t.n(), 4u);
  EXPECT_EQ(t.degree(), 1u);
  EXPECT_TRUE(t.adjacent(0, 3));
  EXPECT_TRUE(t.adjacent(1, 2));
  EXPECT_FALSE(t.adjacent(0, 1));

  GraphFactory f(make_ring(2));
  auto g12 = f.build(GraphSpec::of(Family::gl_diff_m2, 2));
  auto g31 = f.build(GraphSpec::of(Family::sl2_singular_diff, 2));
  auto p = f.build_tensor(g12, g31);
  EXPECT_EQ(p.n(), 96u);
  p.run_audit(p.n());
  EXPECT_TRUE(p.audit().regular());
  EXPECT_EQ(p.degree(), g12.degree() * g31.degree());
  std::uint64_t ep = 0, eg = 0, eh = 0;
  for (Vertex u = 0; u < p.n(); ++u) ep += p.out_neighbors(u).size();
  for (Vertex u = 0; u < g12.n(); ++u) eg += g12.out_neighbors(u).size();
  for (Vertex u = 0; u < g31.n(); ++u) eh += g31.out_neighbors(u).size();
  EXPECT_EQ(ep / 2, 2 * (eg / 2) * (eh / 2));

  auto d = std::make_shared<RegularGraph>(f.build(GraphSpec::of(Family::sp_digraph_m2, 2)));
  try {
    GraphFactory::tensor_product(GraphSpec::of(Family::custom, 0), d, k2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unsupported);
  }
}

TEST(CommonNeighbors, Examples) {
  GraphFactory f(make_ring(2));
  const auto spec = GraphSpec::of(Family::sp_digraph_m2, 2);
  auto g = f.build(spec);
  const auto& r = *f.ring();
  const MatIndex I = r.encode({1, 0, 0, 1}), Z = 0;
  EXPECT_EQ(common_neighbors(g, f.pair_vertex(spec, I, Z), f.pair_vertex(spec, Z, I), Direction::out), 1u);
  // det(A1 - A2) = 0 with A1 != A2, det(C1 - C2) != 0.
  const MatIndex E = r.encode({1, 0, 0, 0});
  EXPECT_EQ(common_neighbors(g, f.pair_vertex(spec, E, Z), f.pair_vertex(spec, Z, I), Direction::out), 0u);
  // rank(A1 - A2) = 1, C1 = C2.
  EXPECT_EQ(common_neighbors(g, f.pair_vertex(spec, E, Z), f.pair_vertex(spec, Z, Z), Direction::out), 4u);
  EXPECT_THROW(common_neighbors(g, 3, 3, Direction::out), Error);
}

TEST(Diameter, Examples) {
  EXPECT_EQ(diameter(complete_graph(16)), 1u);
  GraphFactory f3(make_ring(3));
  EXPECT_EQ(diameter(f3.build(GraphSpec::of(Family::unit_cayley, 3))), 2u);
  // Oracle for q=2: BFS layer sizes from vertex 0 by direct matrix enumeration.
  GraphFactory f2(make_ring(2));
  auto g = f2.build(GraphSpec::of(Family::unit_cayley, 2));
  const auto& r = *f2.ring();
  std::vector<int> dist(16, -1);
  dist[0] = 0;
  for (int layer = 0; layer < 16; ++layer)
    for (MatIndex u = 0; u < 16; ++u)
      if (dist[u] == layer)
        for (MatIndex v = 0; v < 16; ++v)
          if (dist[v] < 0 && r.det(r.sub(u, v)) == 1) dist[v] = layer + 1;
  const int ecc = *std::max_element(dist.begin(), dist.end());
  ASSERT_GT(ecc, 0);
  // Vertex-transitive, so every eccentricity equals that of vertex 0.
  EXPECT_EQ(diameter(g), static_cast<std::uint32_t>(ecc));
  // Two disjoint edges: disconnected.
  auto two = make_explicit_graph({{1}, {0}, {3}, {2}}, false);
  EXPECT_FALSE(diameter(two).has_value());
}

TEST(ExplicitGraph, RejectsAsymmetricUndirected) {
  EXPECT_THROW(make_explicit_graph({{1}, {}}, false), Error);
  EXPECT_NO_THROW(make_explicit_graph({{1}, {}}, true));
}
