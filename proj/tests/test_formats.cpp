#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "surfclass/formats.hpp"
#include "surfclass/recipes.hpp"

using namespace surfclass;

namespace {

std::mt19937 rng(20260823);

int rnd_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

Rat rnd_rat(int span, int max_den) {
  int den = rnd_int(1, max_den);
  return Rat(rnd_int(-span * den, span * den), den);
}

Point2 rnd_point() { return {rnd_rat(3, 8), rnd_rat(3, 8)}; }

FiniteComplex2 rnd_complex() {
  FiniteComplex2 K;
  int nt = rnd_int(0, 8);
  for (int i = 0; i < nt; ++i) {
    int a = rnd_int(0, 11), b = rnd_int(0, 11), c = rnd_int(0, 11);
    if (a == b || b == c || a == c) continue;
    Tri t = mk_tri(a, b, c);
    K.triangles.insert(t);
    for (int k = 0; k < 3; ++k) {
      K.edges.insert(mk_edge(t[size_t(k)], t[size_t((k + 1) % 3)]));
      K.vertices.insert(t[size_t(k)]);
    }
  }
  int ne = rnd_int(0, 3);
  for (int i = 0; i < ne; ++i) {
    int a = rnd_int(0, 14), b = rnd_int(0, 14);
    if (a == b) continue;
    K.edges.insert(mk_edge(a, b));
    K.vertices.insert(a);
    K.vertices.insert(b);
  }
  int nv = rnd_int(0, 2);
  for (int i = 0; i < nv; ++i) K.vertices.insert(rnd_int(15, 19));
  return K;
}

std::vector<int> rnd_cycle() {
  std::vector<int> c;
  int n = rnd_int(3, 6);
  for (int i = 0; i < n; ++i) c.push_back(rnd_int(0, 30));
  return c;
}

bool block_eq(const AttachmentBlock& a, const AttachmentBlock& b) {
  return a.K == b.K && a.input == b.input && a.outputs == b.outputs;
}

bool recipe_eq(const SurfaceRecipe& a, const SurfaceRecipe& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == SurfaceRecipe::Explicit) return a.view.pieces == b.view.pieces;
  if (!(a.base == b.base) || a.base_outputs != b.base_outputs) return false;
  if (a.rules.size() != b.rules.size()) return false;
  for (const auto& [name, block] : a.rules) {
    auto it = b.rules.find(name);
    if (it == b.rules.end() || !block_eq(block, it->second)) return false;
  }
  return true;
}

SurfaceRecipe rnd_recipe() {
  SurfaceRecipe r;
  if (rnd_int(0, 1) == 0) {
    r.kind = SurfaceRecipe::Explicit;
    int np = rnd_int(1, 3);
    for (int i = 0; i < np; ++i) r.view.pieces.push_back(rnd_complex());
    return r;
  }
  r.kind = SurfaceRecipe::Periodic;
  r.base = rnd_complex();
  const char* names[] = {"a", "b", "c"};
  int nb = rnd_int(0, 2);
  for (int i = 0; i < nb; ++i) r.base_outputs.push_back({rnd_cycle(), names[rnd_int(0, 2)]});
  int nr = rnd_int(1, 3);
  for (int i = 0; i < nr; ++i) {
    AttachmentBlock block;
    block.K = rnd_complex();
    block.input = rnd_cycle();
    int no = rnd_int(0, 2);
    for (int j = 0; j < no; ++j) block.outputs.push_back({rnd_cycle(), names[rnd_int(0, 2)]});
    r.rules[names[i]] = std::move(block);
  }
  return r;
}

SimplePolygon rnd_rect(const Rat& inset) {
  Rat x0 = rnd_rat(2, 4) - 3, y0 = rnd_rat(2, 4) - 3;
  Rat w = rnd_rat(1, 4) + 1, h = rnd_rat(1, 4) + 1;
  SimplePolygon p;
  p.v = {{x0 + inset, y0 + inset},
         {x0 + w - inset, y0 + inset},
         {x0 + w - inset, y0 + h - inset},
         {x0 + inset, y0 + h - inset}};
  return p;
}

bool poly_eq(const SimplePolygon& a, const SimplePolygon& b) { return a.v == b.v; }

bool region_eq(const PolygonalRegion& a, const PolygonalRegion& b) {
  if (!poly_eq(a.outer, b.outer) || a.holes.size() != b.holes.size()) return false;
  for (size_t i = 0; i < a.holes.size(); ++i)
    if (!poly_eq(a.holes[i], b.holes[i])) return false;
  return true;
}

bool glue_eq(const ChartGlue& a, const ChartGlue& b) {
  return a.i == b.i && a.j == b.j && a.map.domain.points == b.map.domain.points &&
         a.map.domain.triangles == b.map.domain.triangles &&
         a.map.domain.boundary == b.map.domain.boundary && a.map.images == b.map.images &&
         a.map.orient == b.map.orient;
}

bool atlas_eq(const PLAtlas& a, const PLAtlas& b) {
  if (a.charts.size() != b.charts.size() || a.glues.size() != b.glues.size()) return false;
  for (size_t i = 0; i < a.charts.size(); ++i)
    if (!region_eq(a.charts[i], b.charts[i])) return false;
  for (size_t i = 0; i < a.glues.size(); ++i)
    if (!glue_eq(a.glues[i], b.glues[i])) return false;
  return true;
}

PLAtlas rnd_atlas() {
  PLAtlas a;
  int nc = rnd_int(1, 3);
  for (int i = 0; i < nc; ++i) {
    PolygonalRegion chart;
    chart.outer = rnd_rect(0);
    if (rnd_int(0, 1) == 0) {
      SimplePolygon h;
      Rat cx = (chart.outer.v[0].x + chart.outer.v[1].x) / 2;
      Rat cy = (chart.outer.v[0].y + chart.outer.v[2].y) / 2;
      h.v = {{cx, cy}, {cx + Rat(1, 8), cy}, {cx + Rat(1, 8), cy + Rat(1, 8)},
             {cx, cy + Rat(1, 8)}};
      chart.holes.push_back(std::move(h));
    }
    a.charts.push_back(std::move(chart));
  }
  int ng = rnd_int(0, 2);
  for (int g = 0; g < ng; ++g) {
    ChartGlue glue;
    glue.i = rnd_int(0, nc - 1);
    glue.j = rnd_int(0, nc - 1);
    int np = rnd_int(3, 6);
    for (int p = 0; p < np; ++p) {
      glue.map.domain.points.push_back(rnd_point());
      glue.map.images.push_back(rnd_point());
    }
    int nt = rnd_int(0, 2);
    for (int t = 0; t < nt; ++t)
      glue.map.domain.triangles.push_back(
          {rnd_int(0, np - 1), rnd_int(0, np - 1), rnd_int(0, np - 1)});
    if (rnd_int(0, 1) == 0) {
      std::vector<int> cyc;
      for (int k = 0; k < 3; ++k) cyc.push_back(rnd_int(0, np - 1));
      glue.map.domain.boundary.push_back(std::move(cyc));
    }
    glue.map.orient = rnd_int(0, 1) == 0 ? 1 : -1;
    a.glues.push_back(std::move(glue));
  }
  return a;
}

BoundaryMap rnd_bmap() {
  BoundaryMap g;
  std::set<int> ts;
  int n = rnd_int(3, 8);
  while (int(ts.size()) < n) ts.insert(rnd_int(0, 255));
  for (int t : ts) {
    g.params.push_back(Rat(t, 64));
    g.target.v.push_back(rnd_point());
  }
  return g;
}

MoebiusElement rnd_element() {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (;;) {
    Cpx a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)}, d{u(rng), u(rng)};
    if (std::abs(a * d - b * c) >= 0.5) return moebius_element(a, b, c, d);
  }
}

}  // namespace

TEST_CASE("complex documents round-trip and close downward") {
  // A bare body (no header) is accepted, and faces imply their edges and
  // vertices.
  FiniteComplex2 tri = parse_complex("F 0 1 2\n");
  CHECK(tri == complex_from_triangles({{0, 1, 2}}));
  CHECK(tri.edges.size() == 3);
  CHECK(tri.vertices.size() == 3);

  FiniteComplex2 spelled = parse_complex(
      "complex\n"
      "V 0\nV 1\nV 2\n"
      "E 0 1\nE 0 2\nE 1 2\n"
      "F 0 1 2\n");
  CHECK(spelled == tri);

  // Comments and blank lines are ignored.
  FiniteComplex2 commented = parse_complex("# a triangle\n\nF 0 1 2  # the face\n");
  CHECK(commented == tri);

  for (int i = 0; i < 200; ++i) {
    FiniteComplex2 K = rnd_complex();
    CHECK(parse_complex(complex_str(K)) == K);
  }
}

TEST_CASE("recipe documents round-trip") {
  for (const char* name : {"plane", "cylinder", "loch_ness", "jacobs_ladder", "cantor_complement",
                           "flute", "crosscap_chain", "prong(3)"}) {
    SurfaceRecipe r = builtin_recipes(name);
    INFO(name);
    CHECK(recipe_eq(parse_recipe(recipe_str(r)), r));
  }
  for (int i = 0; i < 200; ++i) {
    SurfaceRecipe r = rnd_recipe();
    CHECK(recipe_eq(parse_recipe(recipe_str(r)), r));
  }
}

TEST_CASE("atlas documents round-trip") {
  for (int i = 0; i < 200; ++i) {
    PLAtlas a = rnd_atlas();
    CHECK(atlas_eq(parse_atlas(atlas_str(a)), a));
  }
}

TEST_CASE("boundary map documents round-trip") {
  for (int i = 0; i < 200; ++i) {
    BoundaryMap g = rnd_bmap();
    BoundaryMap h = parse_boundary_map(boundary_map_str(g));
    CHECK(h.params == g.params);
    CHECK(h.target.v == g.target.v);
  }
}

TEST_CASE("matrix lists round-trip bit-exactly") {
  // Serialization uses %.17g, which reproduces doubles exactly; parsed
  // matrices are already normalized, so no renormalization drift occurs.
  for (int i = 0; i < 200; ++i) {
    std::vector<MoebiusElement> gens;
    int n = rnd_int(1, 5);
    for (int k = 0; k < n; ++k) gens.push_back(rnd_element());
    std::vector<MoebiusElement> back = parse_matrix_list(matrix_list_str(gens));
    REQUIRE(back.size() == gens.size());
    for (size_t k = 0; k < gens.size(); ++k) {
      CHECK(back[k].a == gens[k].a);
      CHECK(back[k].b == gens[k].b);
      CHECK(back[k].c == gens[k].c);
      CHECK(back[k].d == gens[k].d);
    }
  }
}

TEST_CASE("rational coordinates parse exactly") {
  CHECK(detail::parse_rat("1/3", 1) == Rat(1, 3));
  CHECK(detail::parse_rat("-7/2", 1) == Rat(-7, 2));
  CHECK(detail::parse_rat("5", 1) == Rat(5));
  CHECK_THROWS_AS(detail::parse_rat("x", 1), ParseError);
  CHECK_THROWS_AS(detail::parse_rat("1/0", 1), ParseError);
}

TEST_CASE("kind detection") {
  CHECK(sniff_kind("complex\nF 0 1 2\n") == "complex");
  CHECK(sniff_kind("F 0 1 2\n") == "complex");
  CHECK(sniff_kind("V 7\n") == "complex");
  CHECK(sniff_kind("recipe\nexplicit\npiece\nend\n") == "recipe");
  CHECK(sniff_kind("atlas\n") == "atlas");
  CHECK(sniff_kind("boundarymap\npair 0 1 0\n") == "boundarymap");
  CHECK(sniff_kind("moebius\n1 0 0 0 0 0 1 0\n") == "moebius");
  CHECK(sniff_kind("1 0 0 0 0 0 1 0\n") == "moebius");
  CHECK_THROWS_AS(sniff_kind(""), ParseError);
  CHECK_THROWS_AS(sniff_kind("widget\n"), ParseError);
}

TEST_CASE("declared kinds must match the parser") {
  const std::string atlas_doc = "atlas\nchart\nouter 0 0 1 0 1 1\nendchart\n";
  CHECK_THROWS_AS(parse_complex(atlas_doc), KindMismatch);
  CHECK_THROWS_AS(parse_recipe("complex\nF 0 1 2\n"), KindMismatch);
  CHECK_THROWS_AS(parse_matrix_list("boundarymap\npair 0 1 0\n"), KindMismatch);
  // Bare bodies are only legal where the first line is unambiguous.
  CHECK_THROWS_AS(parse_recipe("explicit\npiece\nend\n"), ParseError);
  CHECK_THROWS_AS(parse_atlas("chart\nouter 0 0 1 0 1 1\nendchart\n"), ParseError);
}

TEST_CASE("parse errors carry line numbers") {
  try {
    parse_complex("complex\nV 0\nE 0 0\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
  }
  try {
    parse_complex("# leading comment\n\nF 0 1 2\nF 1 1 2\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 4);
  }
  try {
    parse_boundary_map("boundarymap\npair 0 0 0\npair nope 1 1\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
  }
}
