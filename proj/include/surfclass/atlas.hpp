#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "surfclass/arrangement.hpp"
#include "surfclass/exhaustion.hpp"
#include "surfclass/plmap.hpp"

namespace surfclass {

struct NotHausdorff : Error {
  using Error::Error;
};

struct Disconnected : Error {
  using Error::Error;
};

struct FaceNotDisk : Error {
  int face;
  explicit FaceNotDisk(int f)
      : Error("glued face " + std::to_string(f) + " is not a disk"), face(f) {}
};

// One connected piece of the overlap between chart i and chart j: the piece is
// the domain region of the stored map, which carries chart-i points onto the
// matching piece inside chart j. A pair of charts may be glued along several
// pieces, so the full overlap is the union of the entries for (i, j).
struct ChartGlue {
  int i = 0, j = 0;
  PLMap map;
};

// Finitely many bounded planar charts glued along exact piecewise-linear
// transition maps. Self-gluings are not stored: the identity transition of a
// chart with itself is implicit, and any explicit (i, i) entry must be an
// identity restriction.
struct PLAtlas {
  std::vector<PolygonalRegion> charts;
  std::vector<ChartGlue> glues;
};

inline PolygonalRegion overlap_region(const ChartGlue& g) { return region_of(g.map.domain); }

// A point of the glued space, named by a chart and coordinates inside it.
struct SurfacePoint {
  int chart = 0;
  Point2 p;
};

// Verdict of the structural check. condition names what failed:
//   0  malformed data (bad region, bad triangulation, bad map, bad index)
//   1  a glue piece is not contained in its source chart
//   2  a self-gluing is not the identity
//   3  the reverse gluing is missing or disagrees with the inverse
//   4  chaining two gluings leaves the declared overlaps or disagrees with
//      the direct one
// i, j, k are the chart indices involved (unused ones stay -1).
struct AtlasCheck {
  bool ok = true;
  int condition = 0;
  int i = -1, j = -1, k = -1;
  std::string detail;
};

namespace detail {

// A convex cell, counterclockwise.
using Cell = std::vector<Point2>;

inline Rat poly_area2(const Cell& c) { return signed_area2(c); }

inline std::vector<Cell> cells_of(const Triangulation2& t) {
  std::vector<Cell> out;
  out.reserve(t.triangles.size());
  for (const auto& tr : t.triangles)
    out.push_back({t.points[size_t(tr[0])], t.points[size_t(tr[1])], t.points[size_t(tr[2])]});
  return out;
}

inline std::vector<Cell> region_cells(const PolygonalRegion& r) {
  return cells_of(triangulate_polygon(r));
}

// Exact cover test: the convex cell must be contained in the union of the
// listed triangles. The part outside the first triangle is split into convex
// pieces and each piece recurses on the rest.
inline bool covered_by(const Cell& poly, const std::vector<Cell>& tris, size_t k = 0) {
  if (poly.size() < 3) return true;
  Rat a2 = poly_area2(poly);
  if (a2 == 0) return true;
  if (k == tris.size()) return false;
  const Cell& t = tris[k];
  Cell keep = poly;
  for (size_t e = 0; e < t.size(); ++e) {
    const Point2 &A = t[e], &B = t[(e + 1) % t.size()];
    Cell outside = clip_halfplane(keep, B, A);
    if (!covered_by(outside, tris, k + 1)) return false;
    keep = clip_halfplane(keep, A, B);
    if (keep.size() < 3) break;
  }
  return true;
}

inline bool cells_covered_by(const std::vector<Cell>& what, const std::vector<Cell>& tris) {
  for (const Cell& c : what)
    if (!covered_by(c, tris)) return false;
  return true;
}

inline bool point_in_cell(const Cell& c, const Point2& p) {
  for (size_t e = 0; e < c.size(); ++e) {
    const Point2 &A = c[e], &B = c[(e + 1) % c.size()];
    if (cross(B - A, p - A) < 0) return false;
  }
  return true;
}

inline Point2 seg_point(const Point2& a, const Point2& b, const Rat& t) {
  return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t};
}

inline Rat param_on(const Point2& a, const Point2& b, const Point2& p) {
  Rat dx = b.x - a.x, dy = b.y - a.y;
  if (rat_abs(dx) >= rat_abs(dy)) {
    if (dx == 0) throw Error("param_on: degenerate segment");
    Rat t = (p.x - a.x) / dx;
    return t;
  }
  Rat t = (p.y - a.y) / dy;
  return t;
}

// Parameter interval of the segment a->b inside a convex cell, or nothing.
inline std::optional<std::pair<Rat, Rat>> seg_in_cell(const Point2& a, const Point2& b,
                                                      const Cell& c) {
  Rat lo(0), hi(1);
  for (size_t e = 0; e < c.size(); ++e) {
    const Point2 &A = c[e], &B = c[(e + 1) % c.size()];
    Rat c0 = cross(B - A, a - A);
    Rat c1 = cross(B - A, b - a);
    if (c1 == 0) {
      if (c0 < 0) return std::nullopt;
      continue;
    }
    Rat bound = -c0 / c1;
    if (c1 > 0) {
      if (bound > lo) lo = bound;
    } else {
      if (bound < hi) hi = bound;
    }
  }
  if (lo > hi) return std::nullopt;
  return std::make_pair(lo, hi);
}

struct Ival {
  Rat lo, hi;
};

// First uncovered open subinterval of [0,1], if any.
inline std::optional<std::pair<Rat, Rat>> unit_gap(std::vector<Ival> iv) {
  std::vector<Ival> v;
  for (auto& i : iv) {
    Rat lo = i.lo < 0 ? Rat(0) : i.lo;
    Rat hi = i.hi > 1 ? Rat(1) : i.hi;
    if (lo <= hi) v.push_back({lo, hi});
  }
  std::sort(v.begin(), v.end(), [](const Ival& a, const Ival& b) {
    if (a.lo != b.lo) return a.lo < b.lo;
    return a.hi < b.hi;
  });
  Rat cur(0);
  for (const auto& i : v) {
    if (i.lo > cur) return std::make_pair(cur, i.lo);
    if (i.hi > cur) cur = i.hi;
    if (cur >= 1) return std::nullopt;
  }
  if (cur < 1) return std::make_pair(cur, Rat(1));
  return std::nullopt;
}

// Affine image of p under the piece sending cell corners (A,B,C) to (P,Q,R).
inline Point2 cell_map(const Cell& dom, const Cell& img, const Point2& p) {
  return affine_map(dom[0], dom[1], dom[2], img[0], img[1], img[2], p);
}

// Domain and image triangles of a map, as parallel cell lists. Image cells
// are reversed when the map flips orientation, so both lists read ccw.
inline void map_cells(const PLMap& f, std::vector<Cell>& dom, std::vector<Cell>& img) {
  for (const auto& tr : f.domain.triangles) {
    Cell d{f.domain.points[size_t(tr[0])], f.domain.points[size_t(tr[1])],
           f.domain.points[size_t(tr[2])]};
    Cell m{f.images[size_t(tr[0])], f.images[size_t(tr[1])], f.images[size_t(tr[2])]};
    dom.push_back(std::move(d));
    img.push_back(std::move(m));
  }
}

}  // namespace detail

inline AtlasCheck validate_atlas(const PLAtlas& a) {
  const int n = int(a.charts.size());
  auto fail = [](int cond, int i, int j, int k, std::string d) {
    return AtlasCheck{false, cond, i, j, k, std::move(d)};
  };

  std::vector<std::vector<detail::Cell>> chart_cells(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    try {
      validate_region(a.charts[size_t(i)]);
      chart_cells[size_t(i)] = detail::region_cells(a.charts[size_t(i)]);
    } catch (const Error& e) {
      return fail(0, i, -1, -1, e.what());
    }
  }

  for (const ChartGlue& g : a.glues) {
    if (g.i < 0 || g.i >= n || g.j < 0 || g.j >= n)
      return fail(0, g.i, g.j, -1, "glue names a chart that does not exist");
    try {
      validate_triangulation(g.map.domain);
      plmap_verify(g.map);
    } catch (const Error& e) {
      return fail(0, g.i, g.j, -1, e.what());
    }
  }

  // Each glue piece sits inside its source chart.
  for (const ChartGlue& g : a.glues)
    for (const detail::Cell& c : detail::cells_of(g.map.domain))
      if (!detail::covered_by(c, chart_cells[size_t(g.i)]))
        return fail(1, g.i, g.j, -1, "overlap piece leaves its chart");

  // Self-gluings must be identity restrictions.
  for (const ChartGlue& g : a.glues)
    if (g.i == g.j)
      for (size_t v = 0; v < g.map.domain.points.size(); ++v)
        if (!(g.map.domain.points[v] == g.map.images[v]))
          return fail(2, g.i, g.i, -1, "self-gluing moves a point");

  // Inverses of the non-trivial glue maps, computed once.
  std::vector<PLMap> inv(a.glues.size());
  for (size_t gi = 0; gi < a.glues.size(); ++gi)
    if (a.glues[gi].i != a.glues[gi].j) inv[gi] = plmap_invert(a.glues[gi].map);

  // Every piece's image is covered by reverse pieces, and the reverse agrees
  // with the inverse wherever they overlap.
  for (size_t gi = 0; gi < a.glues.size(); ++gi) {
    const ChartGlue& g = a.glues[gi];
    if (g.i == g.j) continue;
    std::vector<detail::Cell> image_cells = detail::cells_of(inv[gi].domain);
    std::vector<detail::Cell> reverse_cells;
    for (const ChartGlue& h : a.glues)
      if (h.i == g.j && h.j == g.i)
        for (const detail::Cell& c : detail::cells_of(h.map.domain)) reverse_cells.push_back(c);
    for (const detail::Cell& c : image_cells)
      if (!detail::covered_by(c, reverse_cells))
        return fail(3, g.i, g.j, -1, "no reverse gluing covers the image");
    for (const ChartGlue& h : a.glues) {
      if (!(h.i == g.j && h.j == g.i)) continue;
      for (const detail::Cell& c1 : image_cells)
        for (const detail::Cell& c2 : detail::cells_of(h.map.domain)) {
          detail::Cell piece = detail::clip_triangle(c1, c2[0], c2[1], c2[2]);
          if (piece.size() < 3 || detail::poly_area2(piece) == 0) continue;
          for (const Point2& z : piece)
            if (!(plmap_eval(inv[gi], z) == plmap_eval(h.map, z)))
              return fail(3, g.i, g.j, -1, "reverse gluing disagrees with the inverse");
        }
    }
  }

  // Chaining i->j->k must stay inside the declared (i,k) overlap and agree
  // with it. The k == i case is the inverse condition above.
  for (size_t g1i = 0; g1i < a.glues.size(); ++g1i) {
    const ChartGlue& g1 = a.glues[g1i];
    if (g1.i == g1.j) continue;
    for (const ChartGlue& g2 : a.glues) {
      if (g2.i != g1.j || g2.j == g2.i || g2.j == g1.i) continue;
      const int ci = g1.i, cj = g1.j, ck = g2.j;
      std::vector<detail::Cell> direct_cells;
      for (const ChartGlue& g3 : a.glues)
        if (g3.i == ci && g3.j == ck)
          for (const detail::Cell& c : detail::cells_of(g3.map.domain)) direct_cells.push_back(c);
      for (const detail::Cell& c1 : detail::cells_of(inv[g1i].domain))
        for (const detail::Cell& c2 : detail::cells_of(g2.map.domain)) {
          detail::Cell piece = detail::clip_triangle(c1, c2[0], c2[1], c2[2]);
          if (piece.size() < 3 || detail::poly_area2(piece) == 0) continue;
          detail::Cell pulled;
          for (const Point2& z : piece) pulled.push_back(plmap_eval(inv[g1i], z));
          if (detail::poly_area2(pulled) < 0) std::reverse(pulled.begin(), pulled.end());
          if (!detail::covered_by(pulled, direct_cells))
            return fail(4, ci, cj, ck, "chained overlap leaves the declared overlap");
          for (const ChartGlue& g3 : a.glues) {
            if (!(g3.i == ci && g3.j == ck)) continue;
            for (const detail::Cell& c3 : detail::cells_of(g3.map.domain)) {
              detail::Cell q = detail::clip_triangle(pulled, c3[0], c3[1], c3[2]);
              if (q.size() < 3 || detail::poly_area2(q) == 0) continue;
              for (const Point2& z : q) {
                Point2 lhs = plmap_eval(g3.map, z);
                Point2 rhs = plmap_eval(g2.map, plmap_eval(g1.map, z));
                if (!(lhs == rhs)) return fail(4, ci, cj, ck, "transition chain mismatch");
              }
            }
          }
        }
    }
  }

  return {};
}

// The orbit of a region under the gluings: entry j lists the convex pieces of
// chart j identified with part of the input. Entry i always contains the
// input itself.
using ChartCells = std::vector<detail::Cell>;

inline std::vector<ChartCells> saturate_pieces(const PLAtlas& a, int i, const ChartCells& V) {
  if (i < 0 || i >= int(a.charts.size())) throw Error("saturate: chart index out of range");
  std::vector<ChartCells> out(a.charts.size());
  out[size_t(i)] = V;
  for (const ChartGlue& g : a.glues) {
    if (g.i != i || g.j == i) continue;
    std::vector<detail::Cell> dom, img;
    detail::map_cells(g.map, dom, img);
    for (const detail::Cell& vc : V)
      for (size_t t = 0; t < dom.size(); ++t) {
        detail::Cell piece = detail::clip_triangle(vc, dom[t][0], dom[t][1], dom[t][2]);
        if (piece.size() < 3 || detail::poly_area2(piece) == 0) continue;
        detail::Cell mapped;
        for (const Point2& p : piece) mapped.push_back(detail::cell_map(dom[t], img[t], p));
        if (detail::poly_area2(mapped) < 0) std::reverse(mapped.begin(), mapped.end());
        out[size_t(g.j)].push_back(std::move(mapped));
      }
  }
  return out;
}

inline std::vector<ChartCells> saturate(const PLAtlas& a, int i, const PolygonalRegion& V) {
  return saturate_pieces(a, i, detail::region_cells(V));
}

struct HausdorffCheck {
  bool hausdorff = true;
  SurfacePoint x, y;  // inseparable pair when not hausdorff
};

// Decides separability of the glued space. Each transition map is defined on
// a closed region, so it already extends to the frontier of its piece; the
// space fails to be Hausdorff exactly when some frontier point interior to
// the source chart is carried to a frontier point interior to the target
// chart without the two being identified by any other gluing. Every frontier
// edge is scanned with exact interval arithmetic.
inline HausdorffCheck is_hausdorff(const PLAtlas& a) {
  for (const ChartGlue& g : a.glues) {
    if (g.i == g.j) continue;
    const Triangulation2& T = g.map.domain;
    for (const auto& cycle : T.boundary) {
      const size_t m = cycle.size();
      for (size_t s = 0; s < m; ++s) {
        const int u = cycle[s], v = cycle[(s + 1) % m];
        const Point2 s0 = T.points[size_t(u)], s1 = T.points[size_t(v)];
        const Point2 i0 = g.map.images[size_t(u)], i1 = g.map.images[size_t(v)];
        std::vector<detail::Ival> cov;
        // Parts of the edge on the source chart frontier.
        for (const auto& e : region_edges(a.charts[size_t(g.i)])) {
          SegIntersection si = segment_intersection(s0, s1, e.first, e.second);
          if (si.kind == SegIntersection::OnePoint) {
            Rat t = detail::param_on(s0, s1, si.p);
            cov.push_back({t, t});
          } else if (si.kind == SegIntersection::Overlap) {
            Rat t0 = detail::param_on(s0, s1, si.q0);
            Rat t1 = detail::param_on(s0, s1, si.q1);
            if (t1 < t0) std::swap(t0, t1);
            cov.push_back({t0, t1});
          }
        }
        // Parts whose image lies on the target chart frontier.
        for (const auto& e : region_edges(a.charts[size_t(g.j)])) {
          SegIntersection si = segment_intersection(i0, i1, e.first, e.second);
          if (si.kind == SegIntersection::OnePoint) {
            Rat t = detail::param_on(i0, i1, si.p);
            cov.push_back({t, t});
          } else if (si.kind == SegIntersection::Overlap) {
            Rat t0 = detail::param_on(i0, i1, si.q0);
            Rat t1 = detail::param_on(i0, i1, si.q1);
            if (t1 < t0) std::swap(t0, t1);
            cov.push_back({t0, t1});
          }
        }
        // Parts identified with their image through some other gluing. The
        // identification only holds on the open overlap, so a subsegment
        // counts only when its interior lies inside the other domain — a
        // piece running along that domain's frontier does not.
        for (const ChartGlue& h : a.glues) {
          if (&h == &g) continue;
          std::vector<detail::Cell> dom, img;
          if (h.i == g.i && h.j == g.j) {
            detail::map_cells(h.map, dom, img);
            PolygonalRegion hreg = region_of(h.map.domain);
            for (size_t t = 0; t < dom.size(); ++t) {
              auto iv = detail::seg_in_cell(s0, s1, dom[t]);
              if (!iv || iv->first == iv->second) continue;
              Rat mid = (iv->first + iv->second) / 2;
              if (locate_in_region(hreg, detail::seg_point(s0, s1, mid)) != PointLoc::Inside)
                continue;
              Point2 pa = detail::seg_point(s0, s1, iv->first);
              Point2 pb = detail::seg_point(s0, s1, iv->second);
              if (detail::cell_map(dom[t], img[t], pa) == detail::seg_point(i0, i1, iv->first) &&
                  detail::cell_map(dom[t], img[t], pb) == detail::seg_point(i0, i1, iv->second))
                cov.push_back({iv->first, iv->second});
            }
          } else if (h.i == g.j && h.j == g.i) {
            detail::map_cells(h.map, dom, img);
            PolygonalRegion hreg = region_of(h.map.domain);
            for (size_t t = 0; t < dom.size(); ++t) {
              auto iv = detail::seg_in_cell(i0, i1, dom[t]);
              if (!iv || iv->first == iv->second) continue;
              Rat mid = (iv->first + iv->second) / 2;
              if (locate_in_region(hreg, detail::seg_point(i0, i1, mid)) != PointLoc::Inside)
                continue;
              Point2 pa = detail::seg_point(i0, i1, iv->first);
              Point2 pb = detail::seg_point(i0, i1, iv->second);
              if (detail::cell_map(dom[t], img[t], pa) == detail::seg_point(s0, s1, iv->first) &&
                  detail::cell_map(dom[t], img[t], pb) == detail::seg_point(s0, s1, iv->second))
                cov.push_back({iv->first, iv->second});
            }
          }
        }
        auto gap = detail::unit_gap(std::move(cov));
        if (gap) {
          Rat t = (gap->first + gap->second) / 2;
          return {false,
                  {g.i, detail::seg_point(s0, s1, t)},
                  {g.j, detail::seg_point(i0, i1, t)}};
        }
      }
    }
  }
  return {};
}

// Compactness of the glued space. The space is compact exactly when every
// germ at a chart frontier point is absorbed: some gluing defined at the
// point carries it strictly inside another chart. Each frontier edge is
// split at every parameter where that condition can change, and the
// condition is evaluated exactly at the endpoints and midpoints of the
// resulting subintervals.
inline bool is_compact(const PLAtlas& a) {
  {
    HausdorffCheck h = is_hausdorff(a);
    if (!h.hausdorff)
      throw NotHausdorff("glued space is not Hausdorff (charts " + std::to_string(h.x.chart) +
                         " and " + std::to_string(h.y.chart) + ")");
  }
  for (int i = 0; i < int(a.charts.size()); ++i) {
    for (const auto& e : region_edges(a.charts[size_t(i)])) {
      std::vector<Rat> bp{Rat(0), Rat(1)};
      for (const ChartGlue& g : a.glues) {
        if (g.i != i || g.j == i) continue;
        std::vector<detail::Cell> dom, img;
        detail::map_cells(g.map, dom, img);
        for (size_t t = 0; t < dom.size(); ++t) {
          auto iv = detail::seg_in_cell(e.first, e.second, dom[t]);
          if (!iv) continue;
          bp.push_back(iv->first);
          bp.push_back(iv->second);
          Point2 qa = detail::cell_map(dom[t], img[t], detail::seg_point(e.first, e.second, iv->first));
          Point2 qb = detail::cell_map(dom[t], img[t], detail::seg_point(e.first, e.second, iv->second));
          if (qa == qb) continue;
          Rat span = iv->second - iv->first;
          for (const auto& f : region_edges(a.charts[size_t(g.j)])) {
            SegIntersection si = segment_intersection(qa, qb, f.first, f.second);
            if (si.kind == SegIntersection::OnePoint) {
              Rat tq = detail::param_on(qa, qb, si.p);
              bp.push_back(iv->first + span * tq);
            } else if (si.kind == SegIntersection::Overlap) {
              Rat t0 = detail::param_on(qa, qb, si.q0);
              Rat t1 = detail::param_on(qa, qb, si.q1);
              bp.push_back(iv->first + span * t0);
              bp.push_back(iv->first + span * t1);
            }
          }
        }
      }
      std::sort(bp.begin(), bp.end());
      bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
      std::vector<Rat> cand;
      for (size_t k = 0; k < bp.size(); ++k) {
        if (bp[k] < 0 || bp[k] > 1) continue;
        cand.push_back(bp[k]);
        if (k + 1 < bp.size() && bp[k + 1] <= 1) {
          Rat mid = (bp[k] + bp[k + 1]) / 2;
          cand.push_back(mid);
        }
      }
      for (const Rat& t : cand) {
        Point2 P = detail::seg_point(e.first, e.second, t);
        bool absorbed = false;
        for (const ChartGlue& g : a.glues) {
          if (g.i != i || g.j == i) continue;
          std::vector<detail::Cell> dom, img;
          detail::map_cells(g.map, dom, img);
          for (size_t c = 0; c < dom.size() && !absorbed; ++c)
            if (detail::point_in_cell(dom[c], P)) {
              Point2 Q = detail::cell_map(dom[c], img[c], P);
              if (locate_in_region(a.charts[size_t(g.j)], Q) == PointLoc::Inside) absorbed = true;
            }
          if (absorbed) break;
        }
        if (!absorbed) return false;
      }
    }
  }
  return true;
}

// Splits the atlas along the chart-gluing graph. Chart regions are single
// polygons with holes, hence connected, so components are exactly the
// components of the graph whose edges are the positive-area gluings.
inline std::vector<PLAtlas> connected_components(const PLAtlas& a) {
  const int n = int(a.charts.size());
  detail::DisjointSet ds(static_cast<size_t>(n));
  for (const ChartGlue& g : a.glues)
    if (g.i != g.j && g.map.domain.area2() > 0) ds.unite(g.i, g.j);
  std::map<int, int> comp_id;
  std::vector<PLAtlas> out;
  std::vector<int> new_index(size_t(n), -1);
  for (int i = 0; i < n; ++i) {
    int r = ds.find(i);
    auto it = comp_id.find(r);
    if (it == comp_id.end()) {
      it = comp_id.emplace(r, int(out.size())).first;
      out.emplace_back();
    }
    PLAtlas& c = out[size_t(it->second)];
    new_index[size_t(i)] = int(c.charts.size());
    c.charts.push_back(a.charts[size_t(i)]);
  }
  for (const ChartGlue& g : a.glues) {
    int ci = comp_id.at(ds.find(g.i));
    ChartGlue h = g;
    h.i = new_index[size_t(g.i)];
    h.j = new_index[size_t(g.j)];
    out[size_t(ci)].glues.push_back(std::move(h));
  }
  return out;
}

struct RatRect {
  Rat x0, y0, x1, y1;
  bool contains_strict(const Point2& p) const {
    return p.x > x0 && p.x < x1 && p.y > y0 && p.y < y1;
  }
};

namespace detail {

inline Cell rect_cell(const RatRect& r) {
  return {{r.x0, r.y0}, {r.x1, r.y0}, {r.x1, r.y1}, {r.x0, r.y1}};
}

inline std::vector<Cell> rect_tris(const RatRect& r) {
  return {{{r.x0, r.y0}, {r.x1, r.y0}, {r.x1, r.y1}},
          {{r.x0, r.y0}, {r.x1, r.y1}, {r.x0, r.y1}}};
}

inline std::vector<std::pair<Point2, Point2>> rect_edges(const RatRect& r) {
  Cell c = rect_cell(r);
  return {{c[0], c[1]}, {c[1], c[2]}, {c[2], c[3]}, {c[3], c[0]}};
}

inline BigInt rat_floor_div(const Rat& r) {
  BigInt num = numerator(r), den = denominator(r);
  BigInt q = num / den;
  if (q * den != num && num < 0) q -= 1;
  return q;
}

inline BigInt rat_ceil_div(const Rat& r) {
  BigInt num = numerator(r), den = denominator(r);
  BigInt q = num / den;
  if (q * den != num && num > 0) q += 1;
  return q;
}

// n-th fraction (from 0) in the denominator-ordered list 1/1, 1/2, 1/3, 2/3,
// 1/4, 3/4, 1/5, ... of reduced fractions in (0, 1].
inline Rat farey_at(long long n) {
  long long seen = 0;
  for (long long q = 1;; ++q)
    for (long long p = 1; p <= q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      if (seen == n) return Rat(BigInt(p), BigInt(q));
      ++seen;
    }
}

}  // namespace detail

// A rectangle refinement of the atlas: every new chart is an axis-aligned
// frame rectangle with a concentric core rectangle, the frame sits strictly
// inside some original chart, and the core interiors jointly cover as much of
// the glued space as the scale allows. total reports exact full coverage;
// perturbed reports that core corners had to be shifted to keep distinct
// rectangles' core edges off shared lines.
struct RefinedCharts {
  PLAtlas atlas;                // charts are the frame rectangles
  std::vector<RatRect> frame;   // per refined chart
  std::vector<RatRect> core;    // concentric, strictly inside the frame
  std::vector<int> parent;      // original chart of each rectangle
  bool total = false;
  bool perturbed = false;
};

namespace detail {

struct LatticeRect {
  int parent = 0;
  Rat cx, cy;   // center
  Rat half1;    // core half-side
};

// Transports convex cells from one original chart into another through every
// direct gluing, appending the images.
inline void transport_cells(const PLAtlas& a, int from, const std::vector<Cell>& cells, int to,
                            std::vector<Cell>& out) {
  for (const ChartGlue& g : a.glues) {
    if (g.i != from || g.j != to || g.i == g.j) continue;
    std::vector<Cell> dom, img;
    map_cells(g.map, dom, img);
    for (const Cell& c : cells)
      for (size_t t = 0; t < dom.size(); ++t) {
        Cell piece = clip_triangle(c, dom[t][0], dom[t][1], dom[t][2]);
        if (piece.size() < 3 || poly_area2(piece) == 0) continue;
        Cell mapped;
        for (const Point2& p : piece) mapped.push_back(cell_map(dom[t], img[t], p));
        if (poly_area2(mapped) < 0) std::reverse(mapped.begin(), mapped.end());
        out.push_back(std::move(mapped));
      }
  }
}

// Core boundary edges of every accepted rectangle, expressed in the given
// original chart (own rectangles directly, others through the gluings); each
// segment is tagged with its rectangle index.
inline std::vector<std::pair<std::pair<Point2, Point2>, size_t>> core_edges_in_chart(
    const PLAtlas& a, const std::vector<LatticeRect>& rects, int chart) {
  std::vector<std::pair<std::pair<Point2, Point2>, size_t>> out;
  for (size_t r = 0; r < rects.size(); ++r) {
    RatRect core{rects[r].cx - rects[r].half1, rects[r].cy - rects[r].half1,
                 rects[r].cx + rects[r].half1, rects[r].cy + rects[r].half1};
    auto edges = rect_edges(core);
    if (rects[r].parent == chart) {
      for (auto& e : edges) out.push_back({e, r});
      continue;
    }
    for (const ChartGlue& g : a.glues) {
      if (g.i != rects[r].parent || g.j != chart || g.i == g.j) continue;
      std::vector<Cell> dom, img;
      map_cells(g.map, dom, img);
      for (auto& e : edges)
        for (size_t t = 0; t < dom.size(); ++t) {
          auto iv = seg_in_cell(e.first, e.second, dom[t]);
          if (!iv || iv->first == iv->second) continue;
          Point2 pa = cell_map(dom[t], img[t], seg_point(e.first, e.second, iv->first));
          Point2 pb = cell_map(dom[t], img[t], seg_point(e.first, e.second, iv->second));
          out.push_back({{pa, pb}, r});
        }
    }
  }
  return out;
}

// True when two distinct rectangles' core boundaries share a collinear piece
// of positive length somewhere in some chart.
inline bool cores_share_segments(const PLAtlas& a, const std::vector<LatticeRect>& rects) {
  for (int i = 0; i < int(a.charts.size()); ++i) {
    auto segs = core_edges_in_chart(a, rects, i);
    for (size_t p = 0; p < segs.size(); ++p)
      for (size_t q = p + 1; q < segs.size(); ++q) {
        if (segs[p].second == segs[q].second) continue;
        SegIntersection si = segment_intersection(segs[p].first.first, segs[p].first.second,
                                                  segs[q].first.first, segs[q].first.second);
        if (si.kind == SegIntersection::Overlap) return true;
      }
  }
  return false;
}

}  // namespace detail

inline RefinedCharts refine_locally_finite(const PLAtlas& a, int depth = 2) {
  {
    HausdorffCheck h = is_hausdorff(a);
    if (!h.hausdorff)
      throw NotHausdorff("glued space is not Hausdorff (charts " + std::to_string(h.x.chart) +
                         " and " + std::to_string(h.y.chart) + ")");
  }
  const bool compact = is_compact(a);
  const int n = int(a.charts.size());

  std::vector<std::vector<detail::Cell>> chart_cells(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) chart_cells[size_t(i)] = detail::region_cells(a.charts[size_t(i)]);

  std::vector<detail::LatticeRect> accepted;
  Rat scale;
  bool covered_all = false;
  const int d_lo = compact ? 1 : std::max(1, depth);
  const int d_hi = compact ? 12 : std::max(1, depth);
  for (int d = d_lo; d <= d_hi; ++d) {
    accepted.clear();
    Rat s = Rat(BigInt(1), BigInt(1) << d);
    Rat step = s / 2;
    Rat half1 = s * 3 / 8;
    // Greedy pass: keep a lattice square only when its core adds new area to
    // the running cover, tracked per original chart through the gluings.
    std::vector<std::vector<detail::Cell>> soup(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      Rat bx0 = a.charts[size_t(i)].outer.v[0].x, bx1 = bx0;
      Rat by0 = a.charts[size_t(i)].outer.v[0].y, by1 = by0;
      for (const Point2& p : a.charts[size_t(i)].outer.v) {
        if (p.x < bx0) bx0 = p.x;
        if (p.x > bx1) bx1 = p.x;
        if (p.y < by0) by0 = p.y;
        if (p.y > by1) by1 = p.y;
      }
      BigInt kx0 = detail::rat_ceil_div((bx0 + step) / step);
      BigInt kx1 = detail::rat_floor_div((bx1 - step) / step);
      BigInt ky0 = detail::rat_ceil_div((by0 + step) / step);
      BigInt ky1 = detail::rat_floor_div((by1 - step) / step);
      for (BigInt ky = ky0; ky <= ky1; ++ky)
        for (BigInt kx = kx0; kx <= kx1; ++kx) {
          Rat cx = Rat(kx) * step, cy = Rat(ky) * step;
          RatRect frame{cx - step, cy - step, cx + step, cy + step};
          bool inside = true;
          for (const detail::Cell& c : detail::rect_tris(frame))
            if (!detail::covered_by(c, chart_cells[size_t(i)])) {
              inside = false;
              break;
            }
          if (!inside) continue;
          RatRect core{cx - half1, cy - half1, cx + half1, cy + half1};
          bool redundant = true;
          for (const detail::Cell& c : detail::rect_tris(core))
            if (!detail::covered_by(c, soup[size_t(i)])) {
              redundant = false;
              break;
            }
          if (redundant) continue;
          accepted.push_back({i, cx, cy, half1});
          auto core_tris = detail::rect_tris(core);
          for (const detail::Cell& c : core_tris) soup[size_t(i)].push_back(c);
          for (int j = 0; j < n; ++j)
            if (j != i) detail::transport_cells(a, i, core_tris, j, soup[size_t(j)]);
        }
    }
    covered_all = true;
    for (int i = 0; i < n && covered_all; ++i)
      for (const detail::Cell& c : chart_cells[size_t(i)])
        if (!detail::covered_by(c, soup[size_t(i)])) {
          covered_all = false;
          break;
        }
    scale = s;
    if (!compact || covered_all) break;
    if (d == d_hi) throw Error("refine: no scale reached total coverage");
  }

  RefinedCharts out;
  out.total = covered_all;

  // Distinct rectangles must not share collinear core edges; shift core
  // half-sides by distinct small fractions until they do not. The shifts
  // only enlarge cores, so coverage is preserved.
  if (detail::cores_share_segments(a, accepted)) {
    out.perturbed = true;
    Rat unit = scale * 3 / 64;
    bool clean = false;
    for (int attempt = 0; attempt < 4 && !clean; ++attempt) {
      for (size_t r = 0; r < accepted.size(); ++r)
        accepted[r].half1 =
            scale * 3 / 8 + unit * detail::farey_at(static_cast<long long>(r) + 1000LL * attempt);
      clean = !detail::cores_share_segments(a, accepted);
    }
    if (!clean) throw Error("refine: could not separate shared core edges");
  }

  const int R = int(accepted.size());
  Rat step = scale / 2;
  for (int r = 0; r < R; ++r) {
    const auto& lr = accepted[size_t(r)];
    out.frame.push_back({lr.cx - step, lr.cy - step, lr.cx + step, lr.cy + step});
    out.core.push_back({lr.cx - lr.half1, lr.cy - lr.half1, lr.cx + lr.half1, lr.cy + lr.half1});
    out.parent.push_back(lr.parent);
    out.atlas.charts.push_back(
        box_region(lr.cx - step, lr.cy - step, lr.cx + step, lr.cy + step));
  }

  // Gluings between refined rectangles. Same parent: the rectangle
  // intersection with the identity. Different parents: the parent gluing
  // clipped to both frames, split into connected pieces.
  for (int p = 0; p < R; ++p)
    for (int q = p + 1; q < R; ++q) {
      const RatRect &fp = out.frame[size_t(p)], &fq = out.frame[size_t(q)];
      if (out.parent[size_t(p)] == out.parent[size_t(q)]) {
        Rat x0 = fp.x0 > fq.x0 ? fp.x0 : fq.x0;
        Rat y0 = fp.y0 > fq.y0 ? fp.y0 : fq.y0;
        Rat x1 = fp.x1 < fq.x1 ? fp.x1 : fq.x1;
        Rat y1 = fp.y1 < fq.y1 ? fp.y1 : fq.y1;
        if (x0 < x1 && y0 < y1) {
          Triangulation2 t = triangulate_polygon(box_region(x0, y0, x1, y1));
          PLMap id = plmap_identity(t);
          out.atlas.glues.push_back({p, q, id});
          out.atlas.glues.push_back({q, p, id});
        }
        continue;
      }
      const int pi = out.parent[size_t(p)], pj = out.parent[size_t(q)];
      for (const ChartGlue& g : a.glues) {
        if (g.i != pi || g.j != pj || g.i == g.j) continue;
        std::vector<detail::Cell> dom, img;
        detail::map_cells(g.map, dom, img);
        std::vector<std::pair<detail::Cell, detail::Cell>> pieces;
        for (size_t t = 0; t < dom.size(); ++t) {
          detail::Cell d1 = dom[t];
          for (const auto& he : detail::rect_edges(fp)) d1 = detail::clip_halfplane(d1, he.first, he.second);
          if (d1.size() < 3 || detail::poly_area2(d1) == 0) continue;
          detail::Cell m1;
          for (const Point2& z : d1) m1.push_back(detail::cell_map(dom[t], img[t], z));
          if (detail::poly_area2(m1) < 0) {
            std::reverse(m1.begin(), m1.end());
            std::reverse(d1.begin(), d1.end());
          }
          for (const auto& he : detail::rect_edges(fq)) m1 = detail::clip_halfplane(m1, he.first, he.second);
          if (m1.size() < 3 || detail::poly_area2(m1) == 0) continue;
          detail::Cell d2;
          for (const Point2& z : m1) d2.push_back(detail::cell_map(img[t], dom[t], z));
          if (detail::poly_area2(d2) < 0) {
            std::reverse(d2.begin(), d2.end());
            std::reverse(m1.begin(), m1.end());
          }
          pieces.push_back({std::move(d2), std::move(m1)});
        }
        if (pieces.empty()) continue;
        // Assemble the clipped pieces into triangulated maps, one per
        // connected component.
        std::map<Point2, int> vid;
        std::vector<Point2> pts, ims;
        std::vector<std::array<int, 3>> tris;
        auto intern = [&](const Point2& pd, const Point2& pm) {
          auto it = vid.find(pd);
          if (it != vid.end()) {
            if (!(ims[size_t(it->second)] == pm))
              throw Error("refine: glue pieces disagree at a shared point");
            return it->second;
          }
          int id = int(pts.size());
          vid.emplace(pd, id);
          pts.push_back(pd);
          ims.push_back(pm);
          return id;
        };
        for (const auto& [pd, pm] : pieces) {
          std::vector<int> ids;
          for (size_t z = 0; z < pd.size(); ++z) ids.push_back(intern(pd[z], pm[z]));
          for (size_t z = 1; z + 1 < pd.size(); ++z) {
            if (orientation(pd[0], pd[z], pd[z + 1]) == 0) continue;
            tris.push_back({ids[0], ids[size_t(z)], ids[size_t(z + 1)]});
          }
        }
        if (tris.empty()) continue;
        // Components by shared undirected edges.
        detail::DisjointSet ds(tris.size());
        std::map<std::pair<int, int>, int> first_tri;
        for (size_t t = 0; t < tris.size(); ++t)
          for (int k = 0; k < 3; ++k) {
            int u = tris[t][size_t(k)], v = tris[t][size_t((k + 1) % 3)];
            auto key = std::minmax(u, v);
            auto it = first_tri.find(key);
            if (it == first_tri.end())
              first_tri.emplace(key, int(t));
            else
              ds.unite(int(t), it->second);
          }
        std::map<int, std::vector<int>> comps;
        for (size_t t = 0; t < tris.size(); ++t) comps[ds.find(int(t))].push_back(int(t));
        for (const auto& [root, tlist] : comps) {
          std::map<int, int> remap;
          Triangulation2 piece;
          std::vector<Point2> piece_ims;
          for (int t : tlist) {
            std::array<int, 3> tri{};
            for (int k = 0; k < 3; ++k) {
              int old = tris[size_t(t)][size_t(k)];
              auto it = remap.find(old);
              if (it == remap.end()) {
                it = remap.emplace(old, int(piece.points.size())).first;
                piece.points.push_back(pts[size_t(old)]);
                piece_ims.push_back(ims[size_t(old)]);
              }
              tri[size_t(k)] = it->second;
            }
            piece.triangles.push_back(tri);
          }
          // Boundary walks: edges used once, directed with the piece on the
          // left; the positive-area walk leads.
          std::map<std::pair<int, int>, int> ecount;
          std::map<std::pair<int, int>, std::pair<int, int>> edir;
          for (const auto& tri : piece.triangles)
            for (int k = 0; k < 3; ++k) {
              int u = tri[size_t(k)], v = tri[size_t((k + 1) % 3)];
              auto key = std::minmax(u, v);
              ecount[key] += 1;
              if (ecount[key] == 1) edir[key] = {u, v};
            }
          std::map<int, int> nxt;
          for (const auto& [key, c] : ecount)
            if (c == 1) {
              auto [u, v] = edir[key];
              if (nxt.count(u)) throw Error("refine: pinched overlap piece");
              nxt[u] = v;
            }
          std::set<int> done;
          std::vector<std::vector<int>> walks;
          for (const auto& [u, v] : nxt) {
            if (done.count(u)) continue;
            std::vector<int> w;
            int c = u;
            do {
              w.push_back(c);
              done.insert(c);
              c = nxt.at(c);
            } while (c != u);
            walks.push_back(std::move(w));
          }
          int outer_at = -1;
          for (size_t w = 0; w < walks.size(); ++w) {
            std::vector<Point2> wp;
            for (int id : walks[w]) wp.push_back(piece.points[size_t(id)]);
            if (signed_area2(wp) > 0) {
              if (outer_at >= 0) throw Error("refine: overlap piece is not connected");
              outer_at = int(w);
            }
          }
          if (outer_at < 0) throw Error("refine: overlap piece has no outer walk");
          std::swap(walks[0], walks[size_t(outer_at)]);
          piece.boundary = std::move(walks);
          validate_triangulation(piece);
          PLMap fwd{piece, piece_ims, g.map.orient};
          out.atlas.glues.push_back({p, q, fwd});
          out.atlas.glues.push_back({q, p, plmap_invert(fwd)});
        }
      }
    }

  return out;
}

// Result of triangulating an atlas: explicit exhaustion stages, the closed
// final polyhedron when the space is compact, and an exact placement of
// every complex vertex and cone point inside a refined chart.
struct AtlasComplex {
  SurfaceRecipe recipe;
  bool compact = false;
  FiniteComplex2 closed;                           // meaningful when compact
  RefinedCharts refined;
  std::vector<std::pair<int, Point2>> vertex_site; // refined chart + coordinates
  std::vector<std::pair<int, Point2>> cone_site;   // per glued face
  bool perturbed = false;
};

namespace detail {

// Merges collinear overlapping or abutting segments into maximal runs, so a
// curve delivered piecewise through several gluings shows no artificial
// break points.
inline std::vector<Segment> merge_collinear(const std::vector<Segment>& in) {
  std::map<std::tuple<int, Rat, Rat>, std::vector<Ival>> lines;
  for (const Segment& s : in) {
    Rat dx = s.second.x - s.first.x, dy = s.second.y - s.first.y;
    if (dx == 0 && dy == 0) continue;
    if (dx == 0) {
      Rat lo = s.first.y, hi = s.second.y;
      if (hi < lo) std::swap(lo, hi);
      lines[{0, s.first.x, Rat(0)}].push_back({lo, hi});
    } else {
      Rat m = dy / dx;
      Rat c = s.first.y - m * s.first.x;
      Rat lo = s.first.x, hi = s.second.x;
      if (hi < lo) std::swap(lo, hi);
      lines[{1, m, c}].push_back({lo, hi});
    }
  }
  std::vector<Segment> out;
  for (auto& [key, iv] : lines) {
    std::sort(iv.begin(), iv.end(), [](const Ival& a, const Ival& b) {
      if (a.lo != b.lo) return a.lo < b.lo;
      return a.hi < b.hi;
    });
    size_t k = 0;
    while (k < iv.size()) {
      Rat lo = iv[k].lo, hi = iv[k].hi;
      while (k + 1 < iv.size() && iv[k + 1].lo <= hi) {
        if (iv[k + 1].hi > hi) hi = iv[k + 1].hi;
        ++k;
      }
      ++k;
      auto [tag, a, b] = key;
      if (tag == 0)
        out.push_back({{a, lo}, {a, hi}});
      else
        out.push_back({{lo, a * lo + b}, {hi, a * hi + b}});
    }
  }
  return out;
}

inline bool face_has(const Arrangement& arr, const Arrangement::Face& f, const Point2& p) {
  std::vector<Point2> w;
  w.reserve(f.outer.size());
  for (int v : f.outer) w.push_back(arr.vertices[size_t(v)]);
  if (locate_in_walk(w, p) != PointLoc::Inside) return false;
  for (const auto& hull : f.islands) {
    std::vector<Point2> hw;
    hw.reserve(hull.size());
    for (auto it = hull.rbegin(); it != hull.rend(); ++it) hw.push_back(arr.vertices[size_t(*it)]);
    if (locate_in_walk(hw, p) == PointLoc::Inside) return false;
  }
  return true;
}

}  // namespace detail

// Triangulates the glued surface. The atlas is refined into core/frame
// rectangles, each refined chart is cut along every rectangle core boundary
// visible in it, the resulting planar pieces are matched across the gluings
// into faces of the surface, each face is coned from its interior sample
// point, and the coned faces are emitted as nested exhaustion stages (growing
// one closed neighborhood per stage). depth asks for at least that many
// nested stages when the space is large enough to provide them.
inline AtlasComplex triangulate(const PLAtlas& a, int depth) {
  {
    HausdorffCheck h = is_hausdorff(a);
    if (!h.hausdorff)
      throw NotHausdorff("glued space is not Hausdorff (charts " + std::to_string(h.x.chart) +
                         " and " + std::to_string(h.y.chart) + ")");
  }
  if (connected_components(a).size() != 1)
    throw Disconnected("atlas has more than one connected component");

  AtlasComplex out;
  for (int scale_try = 1; scale_try <= 6; ++scale_try) {
    RefinedCharts ref = refine_locally_finite(a, scale_try);
    const PLAtlas& ra = ref.atlas;
    const int R = int(ra.charts.size());

    // Cut each refined chart along every core boundary it can see.
    std::vector<Arrangement> arrs(static_cast<size_t>(R));
    for (int q = 0; q < R; ++q) {
      std::vector<Segment> segs;
      for (const auto& e : detail::rect_edges(ref.core[size_t(q)])) segs.push_back(e);
      for (const ChartGlue& g : ra.glues) {
        if (g.j != q) continue;
        std::vector<detail::Cell> dom, img;
        detail::map_cells(g.map, dom, img);
        for (const auto& e : detail::rect_edges(ref.core[size_t(g.i)]))
          for (size_t t = 0; t < dom.size(); ++t) {
            auto iv = detail::seg_in_cell(e.first, e.second, dom[t]);
            if (!iv || iv->first == iv->second) continue;
            Point2 pa = detail::cell_map(dom[t], img[t],
                                         detail::seg_point(e.first, e.second, iv->first));
            Point2 pb = detail::cell_map(dom[t], img[t],
                                         detail::seg_point(e.first, e.second, iv->second));
            segs.push_back({pa, pb});
          }
      }
      segs = detail::merge_collinear(segs);
      arrs[size_t(q)] = arrangement(ra.charts[size_t(q)], segs);
    }

    // Flat ids for the planar pieces, and their orbits under the gluings.
    std::vector<int> face_off(size_t(R) + 1, 0);
    for (int q = 0; q < R; ++q)
      face_off[size_t(q) + 1] = face_off[size_t(q)] + int(arrs[size_t(q)].faces.size());
    const int NF = face_off[size_t(R)];
    detail::DisjointSet fds(static_cast<size_t>(NF));
    std::vector<char> canonical(size_t(NF), 0);
    for (int q = 0; q < R; ++q)
      for (size_t f = 0; f < arrs[size_t(q)].faces.size(); ++f) {
        const Point2& s = arrs[size_t(q)].faces[f].sample;
        if (ref.core[size_t(q)].contains_strict(s)) canonical[size_t(face_off[size_t(q)]) + f] = 1;
        for (const ChartGlue& g : ra.glues) {
          if (g.i != q) continue;
          std::vector<detail::Cell> dom, img;
          detail::map_cells(g.map, dom, img);
          for (size_t t = 0; t < dom.size(); ++t)
            if (detail::point_in_cell(dom[t], s)) {
              Point2 m = detail::cell_map(dom[t], img[t], s);
              const Arrangement& ta = arrs[size_t(g.j)];
              for (size_t f2 = 0; f2 < ta.faces.size(); ++f2)
                if (detail::face_has(ta, ta.faces[f2], m)) {
                  fds.unite(face_off[size_t(q)] + int(f), face_off[size_t(g.j)] + int(f2));
                  break;
                }
              break;
            }
        }
      }

    // One glued face per orbit that owns a canonical appearance: a piece
    // lying strictly inside its own chart's core is never clipped by a chart
    // frame, so it shows the whole face.
    std::map<int, int> face_id;     // orbit root -> glued face id
    std::vector<int> face_rep;      // glued face id -> flat id of the canonical piece
    for (int fid = 0; fid < NF; ++fid) {
      if (!canonical[size_t(fid)]) continue;
      int root = fds.find(fid);
      if (!face_id.count(root)) {
        face_id.emplace(root, int(face_rep.size()));
        face_rep.push_back(fid);
      }
    }
    const int F = int(face_rep.size());

    for (int fi = 0; fi < F; ++fi) {
      int flat = face_rep[size_t(fi)];
      int q = int(std::upper_bound(face_off.begin(), face_off.end(), flat) - face_off.begin()) - 1;
      const auto& face = arrs[size_t(q)].faces[size_t(flat - face_off[size_t(q)])];
      if (!face.islands.empty()) throw FaceNotDisk(fi);
    }

    // Orbits of the arrangement vertices used by the glued faces.
    std::vector<int> vert_off(size_t(R) + 1, 0);
    for (int q = 0; q < R; ++q)
      vert_off[size_t(q) + 1] = vert_off[size_t(q)] + int(arrs[size_t(q)].vertices.size());
    const int NV_flat = vert_off[size_t(R)];
    detail::DisjointSet vds(static_cast<size_t>(NV_flat));
    std::vector<std::map<Point2, int>> vindex(static_cast<size_t>(R));
    for (int q = 0; q < R; ++q)
      for (size_t v = 0; v < arrs[size_t(q)].vertices.size(); ++v)
        vindex[size_t(q)].emplace(arrs[size_t(q)].vertices[v], int(v));
    for (int q = 0; q < R; ++q)
      for (size_t v = 0; v < arrs[size_t(q)].vertices.size(); ++v) {
        const Point2& p = arrs[size_t(q)].vertices[v];
        if (!ref.frame[size_t(q)].contains_strict(p)) continue;
        for (const ChartGlue& g : ra.glues) {
          if (g.i != q) continue;
          std::vector<detail::Cell> dom, img;
          detail::map_cells(g.map, dom, img);
          for (size_t t = 0; t < dom.size(); ++t)
            if (detail::point_in_cell(dom[t], p)) {
              Point2 m = detail::cell_map(dom[t], img[t], p);
              if (ref.frame[size_t(g.j)].contains_strict(m)) {
                auto it = vindex[size_t(g.j)].find(m);
                if (it == vindex[size_t(g.j)].end())
                  throw Error("triangulate: cut patterns disagree across a gluing");
                vds.unite(vert_off[size_t(q)] + int(v), vert_off[size_t(g.j)] + it->second);
              }
              break;
            }
        }
      }

    // Global labels: walk the glued faces in order, numbering vertex orbits
    // on first sight; cone labels follow all vertex labels.
    std::map<int, int> vlabel;
    out.vertex_site.clear();
    out.cone_site.clear();
    std::vector<std::vector<int>> face_walk(static_cast<size_t>(F));
    for (int fi = 0; fi < F; ++fi) {
      int flat = face_rep[size_t(fi)];
      int q = int(std::upper_bound(face_off.begin(), face_off.end(), flat) - face_off.begin()) - 1;
      const auto& face = arrs[size_t(q)].faces[size_t(flat - face_off[size_t(q)])];
      for (int v : face.outer) {
        int root = vds.find(vert_off[size_t(q)] + v);
        auto it = vlabel.find(root);
        if (it == vlabel.end()) {
          it = vlabel.emplace(root, int(out.vertex_site.size())).first;
          out.vertex_site.push_back({q, arrs[size_t(q)].vertices[size_t(v)]});
        }
        face_walk[size_t(fi)].push_back(it->second);
      }
      out.cone_site.push_back({q, face.sample});
    }
    const int NV = int(out.vertex_site.size());

    // Cone triangles per glued face, and the face adjacency through shared
    // vertices that drives the stage growth.
    std::vector<std::vector<Tri>> face_tris(static_cast<size_t>(F));
    std::vector<std::vector<int>> vert_faces(static_cast<size_t>(NV));
    for (int fi = 0; fi < F; ++fi) {
      const auto& w = face_walk[size_t(fi)];
      for (size_t s = 0; s < w.size(); ++s) {
        int u = w[s], v = w[(s + 1) % w.size()];
        if (u == v) throw FaceNotDisk(fi);
        face_tris[size_t(fi)].push_back(mk_tri(NV + fi, u, v));
      }
      std::set<int> seen(w.begin(), w.end());
      for (int u : seen) vert_faces[size_t(u)].push_back(fi);
    }

    auto complex_of = [&](const std::vector<char>& in) {
      FiniteComplex2 K;
      for (int fi = 0; fi < F; ++fi) {
        if (!in[size_t(fi)]) continue;
        for (const Tri& t : face_tris[size_t(fi)]) {
          K.triangles.insert(t);
          K.vertices.insert(t[0]);
          K.vertices.insert(t[1]);
          K.vertices.insert(t[2]);
          K.edges.insert(mk_edge(t[0], t[1]));
          K.edges.insert(mk_edge(t[1], t[2]));
          K.edges.insert(mk_edge(t[0], t[2]));
        }
      }
      return K;
    };

    // Stages. When the glued complex is closed, grow from the first face by
    // repeated vertex-star closure: each stage swallows the closed
    // neighborhood of the one before, so successive borders stay disjoint.
    // When the complex has a border, filter instead by face-graph distance
    // from the border-touching faces: faces sharing a vertex differ by at
    // most one in distance, so every threshold piece contains the full star
    // of the previous one and no proper stage reaches the border.
    if (F == 0) throw Error("triangulate: refinement produced no faces");
    ExhaustionView view;
    {
      std::vector<char> all_in(size_t(F), 1);
      FiniteComplex2 full = complex_of(all_in);
      if (surface_check(full).kind == SurfaceKind::NotSurface)
        throw Error("triangulate: glued faces do not form a surface");
      std::set<int> border_verts;
      for (const Edge& e : boundary_edges(full)) {
        border_verts.insert(e.first);
        border_verts.insert(e.second);
      }
      if (border_verts.empty()) {
        std::vector<char> in(size_t(F), 0);
        in[0] = 1;
        view.pieces.push_back(complex_of(in));
        while (true) {
          std::vector<char> next = in;
          for (int fi = 0; fi < F; ++fi) {
            if (!in[size_t(fi)]) continue;
            for (int u : face_walk[size_t(fi)])
              for (int fj : vert_faces[size_t(u)]) next[size_t(fj)] = 1;
          }
          if (next == in) break;
          in = std::move(next);
          FiniteComplex2 K = complex_of(in);
          // The wavefront of a growing ball can collide with itself around
          // the surface; merging such a pinched stage into the next one
          // keeps the chain nested without losing the collar condition.
          if (surface_check(K).kind == SurfaceKind::NotSurface) continue;
          view.pieces.push_back(std::move(K));
        }
      } else {
        std::vector<int> dist(size_t(F), -1);
        std::vector<int> bfs;
        for (int fi = 0; fi < F; ++fi)
          for (int u : face_walk[size_t(fi)])
            if (border_verts.count(u)) {
              dist[size_t(fi)] = 0;
              bfs.push_back(fi);
              break;
            }
        for (size_t head = 0; head < bfs.size(); ++head) {
          int fi = bfs[head];
          for (int u : face_walk[size_t(fi)])
            for (int fj : vert_faces[size_t(u)])
              if (dist[size_t(fj)] < 0) {
                dist[size_t(fj)] = dist[size_t(fi)] + 1;
                bfs.push_back(fj);
              }
        }
        int maxd = 0;
        for (int fi = 0; fi < F; ++fi) maxd = std::max(maxd, dist[size_t(fi)]);
        int prev_count = 0;
        for (int t = maxd; t >= 0; --t) {
          std::vector<char> in(size_t(F), 0);
          int cnt = 0;
          for (int fi = 0; fi < F; ++fi)
            if (dist[size_t(fi)] >= t || dist[size_t(fi)] < 0) {
              in[size_t(fi)] = 1;
              ++cnt;
            }
          if (cnt == 0 || cnt == prev_count) continue;
          FiniteComplex2 K = complex_of(in);
          // A level set may pinch or disconnect; merging it into the next
          // one keeps the chain nested and the collar condition intact.
          if (t > 0 && surface_check(K).kind == SurfaceKind::NotSurface) continue;
          view.pieces.push_back(std::move(K));
          prev_count = cnt;
        }
      }
    }

    out.refined = ref;
    out.perturbed = ref.perturbed;
    out.recipe.kind = SurfaceRecipe::Explicit;
    out.recipe.view = view;
    const FiniteComplex2& last = view.pieces.back();
    SurfaceKind sk = surface_check(last);
    out.compact = ref.total && sk.kind == SurfaceKind::Closed;
    if (out.compact) out.closed = last;

    if (out.compact || int(view.pieces.size()) >= depth + 1 || scale_try == 6) break;
  }
  return out;
}

}  // namespace surfclass
