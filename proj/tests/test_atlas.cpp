#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "surfclass/atlas.hpp"
#include "surfclass/classify.hpp"

using namespace surfclass;

namespace {

PLMap translation_map(const RatRect& dom, const Rat& dx, const Rat& dy) {
  Triangulation2 t = triangulate_polygon(box_region(dom.x0, dom.y0, dom.x1, dom.y1));
  std::vector<Point2> imgs;
  for (const Point2& p : t.points) imgs.push_back({p.x + dx, p.y + dy});
  return PLMap{t, imgs, 1};
}

// Glues two rectangular charts that present unit-translation copies of the
// same plane: every integer shift with a positive-area intersection becomes
// one overlap piece in each direction.
void add_deck_glues(PLAtlas& a, int i, int j, const RatRect& ri, const RatRect& rj) {
  for (int dx = -1; dx <= 1; ++dx)
    for (int dy = -1; dy <= 1; ++dy) {
      Rat sx = rj.x0 - dx, sy = rj.y0 - dy;
      Rat tx = rj.x1 - dx, ty = rj.y1 - dy;
      Rat x0 = ri.x0 > sx ? ri.x0 : sx;
      Rat y0 = ri.y0 > sy ? ri.y0 : sy;
      Rat x1 = ri.x1 < tx ? ri.x1 : tx;
      Rat y1 = ri.y1 < ty ? ri.y1 : ty;
      if (!(x0 < x1 && y0 < y1)) continue;
      a.glues.push_back({i, j, translation_map({x0, y0, x1, y1}, Rat(dx), Rat(dy))});
      a.glues.push_back(
          {j, i, translation_map({x0 + dx, y0 + dy, x1 + dx, y1 + dy}, Rat(-dx), Rat(-dy))});
    }
}

// Four unit squares covering the unit-translation plane quotient.
PLAtlas torus_atlas() {
  PLAtlas a;
  std::vector<RatRect> r = {{Rat(0), Rat(0), Rat(1), Rat(1)},
                            {Rat(1, 2), Rat(0), Rat(3, 2), Rat(1)},
                            {Rat(0), Rat(1, 2), Rat(1), Rat(3, 2)},
                            {Rat(1, 2), Rat(1, 2), Rat(3, 2), Rat(3, 2)}};
  for (const RatRect& b : r) a.charts.push_back(box_region(b.x0, b.y0, b.x1, b.y1));
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) add_deck_glues(a, i, j, r[size_t(i)], r[size_t(j)]);
  return a;
}

PLAtlas square_atlas() {
  PLAtlas a;
  a.charts.push_back(box_region(Rat(0), Rat(0), Rat(1), Rat(1)));
  return a;
}

// Two charts wrapping in x only: an open cylinder.
PLAtlas annulus_atlas() {
  PLAtlas a;
  RatRect r0{Rat(0), Rat(0), Rat(3, 4), Rat(1)};
  RatRect r1{Rat(1, 2), Rat(0), Rat(5, 4), Rat(1)};
  a.charts.push_back(box_region(r0.x0, r0.y0, r0.x1, r0.y1));
  a.charts.push_back(box_region(r1.x0, r1.y0, r1.x1, r1.y1));
  add_deck_glues(a, 0, 1, r0, r1);
  return a;
}

// Two copies of a box identified away from a small central hole: every hole
// frontier point doubles.
PLAtlas doubled_origin_atlas() {
  PLAtlas a;
  PolygonalRegion box = box_region(Rat(-1), Rat(-1), Rat(1), Rat(1));
  a.charts.push_back(box);
  a.charts.push_back(box);
  PolygonalRegion overlap;
  overlap.outer = SimplePolygon{{{Rat(-1), Rat(-1)},
                                 {Rat(1), Rat(-1)},
                                 {Rat(1), Rat(1)},
                                 {Rat(-1), Rat(1)}}};
  overlap.holes.push_back(SimplePolygon{{{Rat(-1, 8), Rat(-1, 8)},
                                         {Rat(1, 8), Rat(-1, 8)},
                                         {Rat(1, 8), Rat(1, 8)},
                                         {Rat(-1, 8), Rat(1, 8)}}});
  Triangulation2 t = triangulate_polygon(overlap);
  PLMap id = plmap_identity(t);
  a.glues.push_back({0, 1, id});
  a.glues.push_back({1, 0, id});
  return a;
}

PLAtlas relabel(const PLAtlas& a, const std::vector<int>& perm) {
  PLAtlas out;
  std::vector<int> pos(perm.size());
  for (size_t k = 0; k < perm.size(); ++k) {
    out.charts.push_back(a.charts[size_t(perm[k])]);
    pos[size_t(perm[k])] = int(k);
  }
  for (const ChartGlue& g : a.glues)
    out.glues.push_back({pos[size_t(g.i)], pos[size_t(g.j)], g.map});
  return out;
}

Rat cells_area2(const ChartCells& cs) {
  Rat s = 0;
  for (const auto& c : cs) s += detail::poly_area2(c);
  return s;
}

}  // namespace

TEST_CASE("deck translation atlases validate") {
  CHECK(validate_atlas(torus_atlas()).ok);
  CHECK(validate_atlas(square_atlas()).ok);
  CHECK(validate_atlas(annulus_atlas()).ok);
  CHECK(validate_atlas(doubled_origin_atlas()).ok);
}

TEST_CASE("validation reports the failing condition") {
  SECTION("glue naming a missing chart") {
    PLAtlas a = square_atlas();
    a.glues.push_back({0, 5, translation_map({Rat(0), Rat(0), Rat(1, 2), Rat(1)}, Rat(0), Rat(0))});
    AtlasCheck c = validate_atlas(a);
    CHECK_FALSE(c.ok);
    CHECK(c.condition == 0);
  }
  SECTION("overlap escaping its chart") {
    PLAtlas a;
    a.charts.push_back(box_region(Rat(0), Rat(0), Rat(1), Rat(1)));
    a.charts.push_back(box_region(Rat(0), Rat(0), Rat(2), Rat(1)));
    PLMap m = translation_map({Rat(1, 2), Rat(0), Rat(3, 2), Rat(1)}, Rat(0), Rat(0));
    a.glues.push_back({0, 1, m});
    AtlasCheck c = validate_atlas(a);
    CHECK_FALSE(c.ok);
    CHECK(c.condition == 1);
    CHECK(c.i == 0);
    CHECK(c.j == 1);
  }
  SECTION("self-gluing that moves points") {
    PLAtlas a = square_atlas();
    a.glues.push_back(
        {0, 0, translation_map({Rat(0), Rat(0), Rat(1, 2), Rat(1)}, Rat(1, 4), Rat(0))});
    AtlasCheck c = validate_atlas(a);
    CHECK_FALSE(c.ok);
    CHECK(c.condition == 2);
  }
  SECTION("reverse gluing that is not the inverse") {
    PLAtlas a;
    a.charts.push_back(box_region(Rat(0), Rat(0), Rat(1), Rat(1)));
    a.charts.push_back(box_region(Rat(0), Rat(0), Rat(1), Rat(1)));
    RatRect dom{Rat(1, 2), Rat(0), Rat(1), Rat(1)};
    a.glues.push_back({0, 1, translation_map(dom, Rat(0), Rat(0))});
    Triangulation2 t = triangulate_polygon(box_region(dom.x0, dom.y0, dom.x1, dom.y1));
    std::vector<Point2> refl;
    for (const Point2& p : t.points) refl.push_back({Rat(3, 2) - p.x, p.y});
    a.glues.push_back({1, 0, PLMap{t, refl, -1}});
    AtlasCheck c = validate_atlas(a);
    CHECK_FALSE(c.ok);
    CHECK(c.condition == 3);
  }
  SECTION("transition chain that disagrees") {
    PLAtlas a;
    PolygonalRegion box = box_region(Rat(0), Rat(0), Rat(1), Rat(1));
    a.charts = {box, box, box};
    Triangulation2 t = triangulate_polygon(box);
    PLMap id = plmap_identity(t);
    std::vector<Point2> refl;
    for (const Point2& p : t.points) refl.push_back({Rat(1) - p.x, p.y});
    PLMap mirror{t, refl, -1};
    a.glues.push_back({0, 1, id});
    a.glues.push_back({1, 0, id});
    a.glues.push_back({1, 2, id});
    a.glues.push_back({2, 1, id});
    a.glues.push_back({0, 2, mirror});
    a.glues.push_back({2, 0, mirror});
    AtlasCheck c = validate_atlas(a);
    CHECK_FALSE(c.ok);
    CHECK(c.condition == 4);
  }
}

TEST_CASE("saturation carries a region into every chart") {
  PLAtlas a = torus_atlas();
  PolygonalRegion V = box_region(Rat(3, 8), Rat(3, 8), Rat(5, 8), Rat(5, 8));
  auto sat = saturate(a, 0, V);
  REQUIRE(sat.size() == 4);
  for (int j = 0; j < 4; ++j) CHECK(cells_area2(sat[size_t(j)]) == Rat(1, 8));

  SECTION("saturating again adds nothing") {
    for (int j = 0; j < 4; ++j) {
      auto again = saturate_pieces(a, j, sat[size_t(j)]);
      for (int k = 0; k < 4; ++k)
        CHECK(detail::cells_covered_by(again[size_t(k)], sat[size_t(k)]));
    }
  }
}

TEST_CASE("hausdorff detection") {
  CHECK(is_hausdorff(torus_atlas()).hausdorff);
  CHECK(is_hausdorff(square_atlas()).hausdorff);
  CHECK(is_hausdorff(annulus_atlas()).hausdorff);

  HausdorffCheck h = is_hausdorff(doubled_origin_atlas());
  REQUIRE_FALSE(h.hausdorff);
  CHECK(h.x.chart != h.y.chart);
  // The inseparable pair doubles a hole frontier point.
  CHECK(h.x.p == h.y.p);
  Rat m = rat_abs(h.x.p.x) > rat_abs(h.x.p.y) ? rat_abs(h.x.p.x) : rat_abs(h.x.p.y);
  CHECK(m == Rat(1, 8));
}

TEST_CASE("compactness decision") {
  CHECK(is_compact(torus_atlas()));
  CHECK_FALSE(is_compact(square_atlas()));
  CHECK_FALSE(is_compact(annulus_atlas()));
  CHECK_THROWS_AS(is_compact(doubled_origin_atlas()), NotHausdorff);
}

TEST_CASE("connected components split along the gluing graph") {
  CHECK(connected_components(torus_atlas()).size() == 1);
  PLAtlas two;
  two.charts.push_back(box_region(Rat(0), Rat(0), Rat(1), Rat(1)));
  two.charts.push_back(box_region(Rat(2), Rat(0), Rat(3), Rat(1)));
  auto comps = connected_components(two);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0].charts.size() == 1);
  CHECK(comps[1].charts.size() == 1);
}

TEST_CASE("torus refinement is a perturbed 4x4 lattice") {
  PLAtlas a = torus_atlas();
  RefinedCharts ref = refine_locally_finite(a);
  CHECK(ref.total);
  CHECK(ref.perturbed);
  REQUIRE(ref.atlas.charts.size() == 16);
  // Each rectangle meets exactly eight others.
  for (int p = 0; p < 16; ++p) {
    std::set<int> partners;
    for (const ChartGlue& g : ref.atlas.glues)
      if (g.i == p) partners.insert(g.j);
    CHECK(partners.size() == 8);
  }
  CHECK(validate_atlas(ref.atlas).ok);
}

TEST_CASE("square refinement covers the interior only") {
  RefinedCharts ref = refine_locally_finite(square_atlas(), 2);
  CHECK(ref.atlas.charts.size() == 49);
  CHECK_FALSE(ref.total);
  CHECK(ref.perturbed);
  for (size_t r = 0; r < ref.core.size(); ++r) {
    CHECK(ref.frame[r].x0 >= 0);
    CHECK(ref.frame[r].x1 <= 1);
  }
}

TEST_CASE("refinement refuses non-hausdorff input") {
  CHECK_THROWS_AS(refine_locally_finite(doubled_origin_atlas()), NotHausdorff);
}

TEST_CASE("torus atlas triangulates to a closed genus-one polyhedron") {
  AtlasComplex tri = triangulate(torus_atlas(), 3);
  REQUIRE(tri.compact);
  CHECK(surface_check(tri.closed).kind == SurfaceKind::Closed);
  CHECK(invariants(tri.closed).euler == 0);
  CHECK(classify_compact(tri.closed) == CompactClass{true, 1});
  CHECK(validate_canonical(tri.recipe.view).ok);
}

TEST_CASE("square atlas classifies as a plane at depth five") {
  AtlasComplex tri = triangulate(square_atlas(), 5);
  CHECK_FALSE(tri.compact);
  REQUIRE(tri.recipe.view.pieces.size() >= 6);
  CHECK(validate_canonical(tri.recipe.view).ok);
  RichardsInvariant inv = classify_surface(tri.recipe, 5);
  CHECK_FALSE(inv.genus.infinite);
  CHECK(inv.genus.value == 0);
  CHECK(inv.oclass.value == OClass::Orientable);
  CHECK(inv.counts.total.n == 1);
  CHECK(inv.counts.nonplanar.n == 0);
  CHECK(inv.counts.nonorientable.n == 0);
}

TEST_CASE("annulus atlas has two ends") {
  AtlasComplex tri = triangulate(annulus_atlas(), 4);
  CHECK_FALSE(tri.compact);
  CHECK(validate_canonical(tri.recipe.view).ok);
  RichardsInvariant inv = classify_surface(tri.recipe, 50);
  CHECK(inv.genus.value == 0);
  CHECK(inv.counts.total.n == 2);
  CHECK(inv.counts.nonorientable.n == 0);
}

TEST_CASE("triangulation refuses bad input") {
  CHECK_THROWS_AS(triangulate(doubled_origin_atlas(), 2), NotHausdorff);
  PLAtlas two;
  two.charts.push_back(box_region(Rat(0), Rat(0), Rat(1), Rat(1)));
  two.charts.push_back(box_region(Rat(2), Rat(0), Rat(3), Rat(1)));
  CHECK_THROWS_AS(triangulate(two, 2), Disconnected);
}

TEST_CASE("classification is invariant under chart relabeling") {
  AtlasComplex base = triangulate(torus_atlas(), 3);
  AtlasComplex moved = triangulate(relabel(torus_atlas(), {3, 0, 1, 2}), 3);
  REQUIRE(base.compact);
  REQUIRE(moved.compact);
  CHECK(classify_compact(base.closed) == classify_compact(moved.closed));
  RichardsInvariant ib = classify_surface(base.recipe, 100);
  RichardsInvariant im = classify_surface(moved.recipe, 100);
  CHECK(ib.genus.certified);
  CHECK(im.genus.certified);
  CHECK(ib.genus.value == im.genus.value);
  CHECK(ib.oclass.value == im.oclass.value);
  CHECK(ib.counts.total.n == im.counts.total.n);
}

TEST_CASE("classification is invariant under a redundant chart") {
  PLAtlas a = torus_atlas();
  RatRect r4{Rat(1, 8), Rat(1, 8), Rat(7, 8), Rat(7, 8)};
  a.charts.push_back(box_region(r4.x0, r4.y0, r4.x1, r4.y1));
  std::vector<RatRect> r = {{Rat(0), Rat(0), Rat(1), Rat(1)},
                            {Rat(1, 2), Rat(0), Rat(3, 2), Rat(1)},
                            {Rat(0), Rat(1, 2), Rat(1), Rat(3, 2)},
                            {Rat(1, 2), Rat(1, 2), Rat(3, 2), Rat(3, 2)}};
  for (int j = 0; j < 4; ++j) add_deck_glues(a, 4, j, r4, r[size_t(j)]);
  REQUIRE(validate_atlas(a).ok);

  AtlasComplex base = triangulate(torus_atlas(), 3);
  AtlasComplex wide = triangulate(a, 3);
  REQUIRE(wide.compact);
  CHECK(classify_compact(base.closed) == classify_compact(wide.closed));
  RichardsInvariant ib = classify_surface(base.recipe, 100);
  RichardsInvariant iw = classify_surface(wide.recipe, 100);
  CHECK(ib.genus.certified == iw.genus.certified);
  CHECK(ib.genus.value == iw.genus.value);
  CHECK(ib.oclass.value == iw.oclass.value);
  CHECK(ib.counts.total.n == iw.counts.total.n);
}
