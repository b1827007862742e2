#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "surfclass/simplicial.hpp"

using namespace surfclass;

namespace {

FiniteComplex2 tetrahedron() {
  return complex_from_triangles({{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}});
}

FiniteComplex2 torus7() {
  std::vector<Tri> ts;
  for (int i = 0; i < 7; ++i) {
    ts.push_back(mk_tri(i, (i + 1) % 7, (i + 3) % 7));
    ts.push_back(mk_tri(i, (i + 2) % 7, (i + 3) % 7));
  }
  return complex_from_triangles(ts);
}

FiniteComplex2 projective6() {
  return complex_from_triangles({{1, 2, 3}, {1, 2, 4}, {1, 3, 5}, {1, 4, 6}, {1, 5, 6},
                                 {2, 3, 6}, {2, 4, 5}, {2, 5, 6}, {3, 4, 5}, {3, 4, 6}});
}

FiniteComplex2 moebius5() {
  return complex_from_triangles({{0, 1, 2}, {1, 2, 3}, {2, 3, 4}, {3, 4, 0}, {4, 0, 1}});
}

FiniteComplex2 annulus_prism() {
  return complex_from_triangles({{0, 1, 4}, {0, 4, 3}, {1, 2, 5}, {1, 5, 4}, {2, 0, 3}, {2, 3, 5}});
}

}  // namespace

TEST_CASE("validate_complex enforces closure and support") {
  REQUIRE_NOTHROW(tetrahedron());

  std::set<int> vs{0, 1, 2};
  std::set<Edge> es{mk_edge(0, 2), mk_edge(1, 2)};  // {0,1} missing
  std::set<Tri> ts{mk_tri(0, 1, 2)};
  REQUIRE_THROWS_AS(validate_complex(vs, es, ts), MissingFace);

  std::set<int> vs2{0, 1, 2, 5};
  std::set<Edge> es2{mk_edge(0, 1), mk_edge(0, 2), mk_edge(1, 2)};
  try {
    validate_complex(vs2, es2, {mk_tri(0, 1, 2)});
    FAIL("expected IsolatedVertexViolation");
  } catch (const IsolatedVertexViolation& e) {
    REQUIRE(e.vertex == 5);
  }
}

TEST_CASE("surface_check classifies the basic shapes") {
  REQUIRE(surface_check(tetrahedron()).kind == SurfaceKind::Closed);

  auto disk = complex_from_triangles({{0, 1, 2}});
  auto sk = surface_check(disk);
  REQUIRE(sk.kind == SurfaceKind::Bordered);
  REQUIRE(sk.boundary_circles == 1);

  // Two triangles pinched at a single shared vertex.
  auto pinch = complex_from_triangles({{0, 1, 2}, {0, 3, 4}});
  sk = surface_check(pinch);
  REQUIRE(sk.kind == SurfaceKind::NotSurface);
  REQUIRE(sk.witness.find("vertex 0") != std::string::npos);

  // An edge in three triangles.
  auto book = complex_from_triangles({{0, 1, 2}, {0, 1, 3}, {0, 1, 4}});
  sk = surface_check(book);
  REQUIRE(sk.kind == SurfaceKind::NotSurface);
  REQUIRE(sk.witness.find("3 triangles") != std::string::npos);

  // Disjoint union.
  std::vector<Tri> two;
  for (const Tri& t : tetrahedron().triangles) two.push_back(t);
  for (const Tri& t : tetrahedron().triangles) two.push_back(mk_tri(t[0] + 10, t[1] + 10, t[2] + 10));
  sk = surface_check(complex_from_triangles(two));
  REQUIRE(sk.kind == SurfaceKind::NotSurface);
  REQUIRE(sk.witness == "disconnected");
}

TEST_CASE("invariants of the 7-vertex torus") {
  auto K = torus7();
  REQUIRE(K.vertices.size() == 7);
  REQUIRE(K.edges.size() == 21);
  REQUIRE(K.triangles.size() == 14);
  REQUIRE(surface_check(K).kind == SurfaceKind::Closed);
  auto inv = invariants(K);
  REQUIRE(inv.euler == 0);
  REQUIRE(inv.orientable);
  REQUIRE(inv.genus == 1);
  REQUIRE(inv.boundary_circles == 0);
  REQUIRE_FALSE(inv.planar);
}

TEST_CASE("invariants of the 6-vertex projective plane") {
  auto K = projective6();
  REQUIRE(K.vertices.size() == 6);
  REQUIRE(K.edges.size() == 15);
  REQUIRE(K.triangles.size() == 10);
  REQUIRE(surface_check(K).kind == SurfaceKind::Closed);
  auto inv = invariants(K);
  REQUIRE(inv.euler == 1);
  REQUIRE_FALSE(inv.orientable);
  REQUIRE(inv.crosscaps == 1);
  REQUIRE(inv.boundary_circles == 0);
}

TEST_CASE("invariants of bordered pieces") {
  auto inv = invariants(complex_from_triangles({{0, 1, 2}}));
  REQUIRE(inv.euler == 1);
  REQUIRE(inv.orientable);
  REQUIRE(inv.genus == 0);
  REQUIRE(inv.boundary_circles == 1);
  REQUIRE(inv.planar);

  inv = invariants(annulus_prism());
  REQUIRE(inv.euler == 0);
  REQUIRE(inv.orientable);
  REQUIRE(inv.genus == 0);
  REQUIRE(inv.boundary_circles == 2);
  REQUIRE(inv.planar);

  inv = invariants(moebius5());
  REQUIRE(inv.euler == 0);
  REQUIRE_FALSE(inv.orientable);
  REQUIRE(inv.crosscaps == 1);
  REQUIRE(inv.boundary_circles == 1);
  REQUIRE_FALSE(inv.planar);
}

TEST_CASE("invariants of the sphere") {
  auto inv = invariants(tetrahedron());
  REQUIRE(inv.euler == 2);
  REQUIRE(inv.orientable);
  REQUIRE(inv.genus == 0);
  REQUIRE(inv.boundary_circles == 0);
}

TEST_CASE("subdividing one edge of the tetrahedron") {
  auto K = subdivide(tetrahedron(), {mk_edge(0, 1)});
  REQUIRE(K.vertices.size() == 5);
  REQUIRE(K.edges.size() == 9);
  REQUIRE(K.triangles.size() == 6);
  auto inv = invariants(K);
  REQUIRE(inv.euler == 2);
  REQUIRE(inv.orientable);
  REQUIRE(inv.genus == 0);
}

TEST_CASE("subdivide with an empty selection is the identity") {
  auto K = tetrahedron();
  REQUIRE(subdivide(K, {}) == K);
}

TEST_CASE("subdivide rejects edges sharing a triangle") {
  REQUIRE_THROWS_AS(subdivide(tetrahedron(), {mk_edge(0, 1), mk_edge(1, 2)}), SharedTriangle);
  // Edges not sharing any triangle are fine: opposite edges of the tetrahedron.
  REQUIRE_NOTHROW(subdivide(tetrahedron(), {mk_edge(0, 1), mk_edge(2, 3)}));
}

TEST_CASE("subdivision preserves all surface invariants (randomized)") {
  std::mt19937 rng(20240817);
  for (FiniteComplex2 K : {torus7(), projective6(), annulus_prism(), moebius5()}) {
    auto base = invariants(K);
    FiniteComplex2 cur = K;
    for (int round = 0; round < 3; ++round) {
      // Greedy random legal selection: no two picked edges in one triangle.
      std::vector<Edge> all(cur.edges.begin(), cur.edges.end());
      std::shuffle(all.begin(), all.end(), rng);
      std::vector<Edge> picked;
      std::set<Tri> blocked;
      for (const Edge& e : all) {
        auto star = cur.star_of_edge(e);
        bool ok = true;
        for (const Tri& t : star)
          if (blocked.count(t)) ok = false;
        if (!ok) continue;
        picked.push_back(e);
        for (const Tri& t : star) blocked.insert(t);
      }
      cur = subdivide(cur, picked);
      auto inv = invariants(cur);
      REQUIRE(inv.euler == base.euler);
      REQUIRE(inv.orientable == base.orientable);
      REQUIRE(inv.genus == base.genus);
      REQUIRE(inv.crosscaps == base.crosscaps);
      REQUIRE(inv.boundary_circles == base.boundary_circles);
    }
  }
}

TEST_CASE("connected_components partitions the complex") {
  std::vector<Tri> two;
  for (const Tri& t : tetrahedron().triangles) two.push_back(t);
  for (const Tri& t : torus7().triangles) two.push_back(mk_tri(t[0] + 100, t[1] + 100, t[2] + 100));
  auto comps = connected_components(complex_from_triangles(two));
  REQUIRE(comps.size() == 2);
  size_t verts = comps[0].vertices.size() + comps[1].vertices.size();
  REQUIRE(verts == 4 + 7);
  REQUIRE(connected_components(FiniteComplex2{}).empty());
  REQUIRE(connected_components(tetrahedron()).size() == 1);
}

TEST_CASE("complement_span of an annulus past one rim") {
  auto K = annulus_prism();
  FiniteComplex2 rim;
  rim.vertices = {0, 1, 2};
  rim.edges = {mk_edge(0, 1), mk_edge(1, 2), mk_edge(0, 2)};
  auto pieces = complement_span(K, rim);
  REQUIRE(pieces.size() == 1);
  REQUIRE(pieces[0].piece.triangles.size() == 6);
  REQUIRE(pieces[0].frontier == rim.edges);

  REQUIRE(complement_span(K, K).empty());
  auto whole = complement_span(K, FiniteComplex2{});
  REQUIRE(whole.size() == 1);
  REQUIRE(whole[0].piece.triangles == K.triangles);
  REQUIRE(whole[0].frontier.empty());

  FiniteComplex2 alien;
  alien.vertices = {99};
  alien.edges = {};
  REQUIRE_THROWS_AS(complement_span(K, alien), NotSubcomplex);
}

TEST_CASE("complement_span splits across a separating circle") {
  // Two annuli stacked: bottom 0,1,2 / middle 3,4,5 / top 6,7,8.
  std::vector<Tri> ts;
  auto ring = [&](int b, int t) {
    ts.push_back(mk_tri(b, b + 1, t + 1));
    ts.push_back(mk_tri(b, t + 1, t));
    ts.push_back(mk_tri(b + 1, b + 2, t + 2));
    ts.push_back(mk_tri(b + 1, t + 2, t + 1));
    ts.push_back(mk_tri(b + 2, b, t));
    ts.push_back(mk_tri(b + 2, t, t + 2));
  };
  ring(0, 3);
  ring(3, 6);
  auto K = complex_from_triangles(ts);
  REQUIRE(surface_check(K).kind == SurfaceKind::Bordered);
  FiniteComplex2 mid;
  mid.vertices = {3, 4, 5};
  mid.edges = {mk_edge(3, 4), mk_edge(4, 5), mk_edge(3, 5)};
  auto pieces = complement_span(K, mid);
  REQUIRE(pieces.size() == 2);
  REQUIRE(pieces[0].piece.triangles.size() == 6);
  REQUIRE(pieces[1].piece.triangles.size() == 6);
  REQUIRE(pieces[0].frontier == mid.edges);
  REQUIRE(pieces[1].frontier == mid.edges);
}

TEST_CASE("isomorphism via canonical encodings") {
  auto K = torus7();
  std::vector<Tri> relabeled;
  for (const Tri& t : K.triangles)
    relabeled.push_back(mk_tri(t[0] * 3 + 11, t[1] * 3 + 11, t[2] * 3 + 11));
  REQUIRE(isomorphic(K, complex_from_triangles(relabeled)));
  REQUIRE_FALSE(isomorphic(K, projective6()));
  REQUIRE_FALSE(isomorphic(tetrahedron(), K));
}

TEST_CASE("bounded equivalence finds common subdivisions") {
  auto K = tetrahedron();
  auto S = subdivide(K, {mk_edge(0, 1)});
  REQUIRE(equivalent_bounded(K, S, 1) == Ternary::Yes);
  REQUIRE(equivalent_bounded(S, K, 1) == Ternary::Yes);
  REQUIRE(equivalent_bounded(K, K, 0) == Ternary::Yes);
  REQUIRE(equivalent_bounded(K, torus7(), 1) == Ternary::Unknown);
}
