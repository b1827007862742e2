#pragma once

#include <map>
#include <vector>

#include "surfclass/arrangement.hpp"
#include "surfclass/triangulate.hpp"

namespace surfclass {

struct OutsideDomain : Error {
  Point2 where;
  explicit OutsideDomain(const Point2& p) : Error("point outside domain: " + point_str(p)), where(p) {}
};

struct NotInjective : Error {
  size_t tri_a, tri_b;
  NotInjective(size_t a, size_t b)
      : Error("map not injective: image triangles " + std::to_string(a) + " and " +
              std::to_string(b) + " overlap"),
        tri_a(a), tri_b(b) {}
};

// Piecewise-linear map: affine on each triangle of the domain, determined by
// the image point assigned to each domain vertex. orient is the common sign of
// every image triangle.
struct PLMap {
  Triangulation2 domain;
  std::vector<Point2> images;
  int orient = 1;
};

namespace detail {

// Barycentric coordinates of p relative to (a, b, c): p = a + s(b-a) + t(c-a).
inline std::pair<Rat, Rat> barycentric(const Point2& a, const Point2& b, const Point2& c,
                                       const Point2& p) {
  Rat det = cross(b - a, c - a);
  if (det == 0) throw Error("barycentric: degenerate triangle");
  Rat s = cross(p - a, c - a) / det;
  Rat t = cross(b - a, p - a) / det;
  return {s, t};
}

inline Point2 affine_map(const Point2& a, const Point2& b, const Point2& c, const Point2& A,
                         const Point2& B, const Point2& C, const Point2& p) {
  auto [s, t] = barycentric(a, b, c, p);
  return A + Rat(s) * (B - A) + Rat(t) * (C - A);
}

// Clips a convex ccw polygon to the half-plane left of (or on) the directed
// line a->b. Exact; points on the line are kept.
inline std::vector<Point2> clip_halfplane(const std::vector<Point2>& poly, const Point2& a,
                                          const Point2& b) {
  std::vector<Point2> out;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Point2 &p = poly[i], &q = poly[(i + 1) % n];
    int sp = orientation(a, b, p), sq = orientation(a, b, q);
    if (sp >= 0) out.push_back(p);
    if ((sp > 0 && sq < 0) || (sp < 0 && sq > 0)) {
      // Edge crosses the line: exact intersection.
      Rat denom = cross(b - a, q - p);
      Rat t = cross(b - a, a - p) / denom;
      out.push_back(p + t * (q - p));
    }
  }
  // Collapse consecutive duplicates.
  std::vector<Point2> ded;
  for (const auto& p : out)
    if (ded.empty() || !(ded.back() == p)) ded.push_back(p);
  if (ded.size() > 1 && ded.front() == ded.back()) ded.pop_back();
  return ded;
}

inline std::vector<Point2> clip_triangle(const std::vector<Point2>& poly, const Point2& A,
                                         const Point2& B, const Point2& C) {
  auto r = clip_halfplane(poly, A, B);
  if (r.size() < 3) return {};
  r = clip_halfplane(r, B, C);
  if (r.size() < 3) return {};
  r = clip_halfplane(r, C, A);
  if (r.size() < 3) return {};
  return r;
}

}  // namespace detail

inline PLMap plmap_identity(const Triangulation2& t) {
  return {t, t.points, 1};
}

// Exact evaluation: locate a containing triangle, then apply its affine piece.
inline Point2 plmap_eval(const PLMap& f, const Point2& p) {
  for (size_t i = 0; i < f.domain.triangles.size(); ++i) {
    const auto& t = f.domain.triangles[i];
    const Point2 &a = f.domain.points[t[0]], &b = f.domain.points[t[1]], &c = f.domain.points[t[2]];
    if (orientation(a, b, p) >= 0 && orientation(b, c, p) >= 0 && orientation(c, a, p) >= 0)
      return detail::affine_map(a, b, c, f.images[t[0]], f.images[t[1]], f.images[t[2]], p);
  }
  throw OutsideDomain(p);
}

// The region covered by a triangulation, read off its boundary cycles
// (first cycle outer, the rest holes). Orientations are normalized.
inline PolygonalRegion region_of(const Triangulation2& t) {
  if (t.boundary.empty()) throw Error("triangulation has no boundary cycles");
  PolygonalRegion r;
  auto cycle_pts = [&](const std::vector<int>& c) {
    std::vector<Point2> w;
    w.reserve(c.size());
    for (int v : c) w.push_back(t.points[v]);
    return w;
  };
  r.outer.v = cycle_pts(t.boundary[0]);
  if (!r.outer.ccw()) std::reverse(r.outer.v.begin(), r.outer.v.end());
  for (size_t i = 1; i < t.boundary.size(); ++i) {
    SimplePolygon h;
    h.v = cycle_pts(t.boundary[i]);
    if (!h.ccw()) std::reverse(h.v.begin(), h.v.end());
    r.holes.push_back(std::move(h));
  }
  return r;
}

// Checks a triangulation is a proper simplicial cover of its boundary region:
// positive triangles, interior edges shared by exactly two triangles, boundary
// edges by one, and total area matching the boundary walks.
inline void validate_triangulation(const Triangulation2& t) {
  std::map<std::pair<int, int>, int> edge_count;
  Rat area = 0;
  for (const auto& tri : t.triangles) {
    const Point2 &a = t.points[tri[0]], &b = t.points[tri[1]], &c = t.points[tri[2]];
    if (orientation(a, b, c) != 1) throw Error("triangulation: non-positive triangle");
    area += cross(b - a, c - a);
    for (int e = 0; e < 3; ++e) {
      int u = tri[e], v = tri[(e + 1) % 3];
      edge_count[{std::min(u, v), std::max(u, v)}]++;
    }
  }
  std::map<std::pair<int, int>, int> boundary_edges;
  Rat bound_area = 0;
  for (size_t ci = 0; ci < t.boundary.size(); ++ci) {
    const auto& c = t.boundary[ci];
    std::vector<Point2> w;
    for (int v : c) w.push_back(t.points[v]);
    Rat a2 = signed_area2(w);
    bound_area += (ci == 0) ? rat_abs(a2) : -rat_abs(a2);
    for (size_t i = 0; i < c.size(); ++i) {
      int u = c[i], v = c[(i + 1) % c.size()];
      boundary_edges[{std::min(u, v), std::max(u, v)}]++;
    }
  }
  for (const auto& [e, n] : edge_count) {
    auto it = boundary_edges.find(e);
    int expected = (it != boundary_edges.end()) ? 2 - it->second : 2;
    if (n != expected)
      throw Error("triangulation: edge (" + std::to_string(e.first) + "," +
                  std::to_string(e.second) + ") shared by " + std::to_string(n) + " triangles");
  }
  for (const auto& [e, n] : boundary_edges)
    if (!edge_count.count(e)) throw Error("triangulation: boundary edge not covered");
  if (area != bound_area) throw Error("triangulation: area does not match boundary region");
}

// Verifies the PLMap invariants: every image triangle has the declared sign,
// boundary cycles land on pairwise disjoint weakly simple walks, and image
// areas add up to the region bounded by the image walks. Together these force
// the map to be a homeomorphism onto its image. On an overlap, the offending
// image triangle pair is reported.
inline void plmap_verify(const PLMap& f) {
  if (f.images.size() != f.domain.points.size())
    throw Error("plmap: one image point required per domain point");
  if (f.orient != 1 && f.orient != -1) throw Error("plmap: orientation must be +1 or -1");

  auto witness_overlap = [&]() -> void {
    auto ccw_img = [&](size_t k) {
      const auto& t = f.domain.triangles[k];
      std::vector<Point2> p{f.images[t[0]], f.images[t[1]], f.images[t[2]]};
      if (orientation(p[0], p[1], p[2]) < 0) std::swap(p[1], p[2]);
      return p;
    };
    for (size_t i = 0; i < f.domain.triangles.size(); ++i) {
      auto pi = ccw_img(i);
      if (orientation(pi[0], pi[1], pi[2]) == 0) continue;
      for (size_t j = i + 1; j < f.domain.triangles.size(); ++j) {
        auto pj = ccw_img(j);
        if (orientation(pj[0], pj[1], pj[2]) == 0) continue;
        auto piece = detail::clip_triangle(pi, pj[0], pj[1], pj[2]);
        if (!piece.empty() && rat_abs(signed_area2(piece)) > 0) throw NotInjective(i, j);
      }
    }
    throw Error("plmap: image boundary pinched or degenerate (no area-overlap witness)");
  };

  Rat img_area = 0;
  for (size_t i = 0; i < f.domain.triangles.size(); ++i) {
    const auto& t = f.domain.triangles[i];
    int o = orientation(f.images[t[0]], f.images[t[1]], f.images[t[2]]);
    if (o == 0) throw NotInjective(i, i);
    if (o != f.orient) witness_overlap();
    img_area += rat_abs(cross(f.images[t[1]] - f.images[t[0]], f.images[t[2]] - f.images[t[0]]));
  }

  // Image boundary walks: weakly simple, pairwise disjoint.
  std::vector<std::vector<Point2>> walks;
  for (const auto& c : f.domain.boundary) {
    std::vector<Point2> w;
    for (int v : c) w.push_back(f.images[v]);
    walks.push_back(std::move(w));
  }
  auto edges_of = [](const std::vector<Point2>& w) {
    std::vector<Segment> es;
    for (size_t i = 0; i < w.size(); ++i) es.push_back({w[i], w[(i + 1) % w.size()]});
    return es;
  };
  for (size_t wi = 0; wi < walks.size(); ++wi) {
    auto es = edges_of(walks[wi]);
    for (size_t i = 0; i < es.size(); ++i) {
      if (es[i].first == es[i].second) witness_overlap();  // collapsed edge
      for (size_t j = i + 1; j < es.size(); ++j) {
        SegIntersection si =
            segment_intersection(es[i].first, es[i].second, es[j].first, es[j].second);
        if (si.kind == SegIntersection::Overlap) witness_overlap();
        if (si.kind == SegIntersection::OnePoint) {
          bool shared = si.p == es[i].first || si.p == es[i].second;
          bool shared2 = si.p == es[j].first || si.p == es[j].second;
          if (!(shared && shared2)) witness_overlap();
        }
      }
    }
    for (size_t wj = wi + 1; wj < walks.size(); ++wj)
      for (const auto& e1 : es)
        for (const auto& e2 : edges_of(walks[wj]))
          if (segment_intersection(e1.first, e1.second, e2.first, e2.second).kind !=
              SegIntersection::Empty)
            witness_overlap();
  }

  // Coverage: triangles tile exactly the region bounded by the image walks.
  Rat walk_area = 0;
  for (size_t wi = 0; wi < walks.size(); ++wi)
    walk_area += (wi == 0) ? rat_abs(signed_area2(walks[wi])) : -rat_abs(signed_area2(walks[wi]));
  if (img_area != walk_area) witness_overlap();
  // The outer image walk must wind with the declared orientation.
  if (!walks.empty() && sgn(signed_area2(walks[0])) != f.orient)
    throw Error("plmap: outer boundary image winds against declared orientation");
}

// Inverse of a verified bijective map: domain and images swap roles. Domain
// triangles are reordered positive when f reverses orientation.
inline PLMap plmap_invert(const PLMap& f) {
  plmap_verify(f);
  PLMap inv;
  inv.orient = f.orient;
  inv.domain.points = f.images;
  inv.domain.triangles = f.domain.triangles;
  if (f.orient < 0)
    for (auto& t : inv.domain.triangles) std::swap(t[1], t[2]);
  inv.domain.boundary = f.domain.boundary;
  if (f.orient < 0)
    for (auto& c : inv.domain.boundary) std::reverse(c.begin(), c.end());
  inv.images = f.domain.points;
  return inv;
}

// Composition g . f by exact overlay: each domain triangle of f is refined
// along the g-domain triangles its image meets, so the result is affine on
// every cell. Throws OutsideDomain if f's image is not covered by g's domain.
inline PLMap plmap_compose(const PLMap& f, const PLMap& g) {
  PLMap out;
  out.orient = f.orient * g.orient;
  std::map<Point2, int> pid;
  auto id_of = [&](const Point2& dom_pt, const Point2& img_pt) {
    auto it = pid.find(dom_pt);
    if (it != pid.end()) return it->second;
    int id = int(out.domain.points.size());
    out.domain.points.push_back(dom_pt);
    out.images.push_back(img_pt);
    pid.emplace(dom_pt, id);
    return id;
  };

  for (size_t ti = 0; ti < f.domain.triangles.size(); ++ti) {
    const auto& t = f.domain.triangles[ti];
    const Point2 &a = f.domain.points[t[0]], &b = f.domain.points[t[1]], &c = f.domain.points[t[2]];
    Point2 A = f.images[t[0]], B = f.images[t[1]], C = f.images[t[2]];
    std::vector<Point2> img_tri{A, B, C};
    if (f.orient < 0) std::swap(img_tri[1], img_tri[2]);  // ccw for clipping
    Rat covered = 0;
    for (const auto& s : g.domain.triangles) {
      const Point2 &P = g.domain.points[s[0]], &Q = g.domain.points[s[1]],
                   &R = g.domain.points[s[2]];
      auto piece = detail::clip_triangle(img_tri, P, Q, R);
      if (piece.empty()) continue;
      Rat pa = signed_area2(piece);
      if (pa == 0) continue;
      covered += pa;
      // Pull the piece back through f's affine inverse on this triangle, and
      // push it forward through g's affine piece.
      std::vector<Point2> dom_pts, img_pts;
      for (const auto& p : piece) {
        dom_pts.push_back(detail::affine_map(A, B, C, a, b, c, p));
        img_pts.push_back(
            detail::affine_map(P, Q, R, g.images[s[0]], g.images[s[1]], g.images[s[2]], p));
      }
      // Ear-clip the convex piece (keeps collinear subdivision vertices).
      std::vector<int> walk(piece.size());
      for (size_t k = 0; k < piece.size(); ++k) walk[k] = int(k);
      for (auto tri : earcut_walk(piece, walk)) {
        if (f.orient < 0) std::swap(tri[1], tri[2]);  // back to domain orientation
        int i0 = id_of(dom_pts[tri[0]], img_pts[tri[0]]);
        int i1 = id_of(dom_pts[tri[1]], img_pts[tri[1]]);
        int i2 = id_of(dom_pts[tri[2]], img_pts[tri[2]]);
        out.domain.triangles.push_back({i0, i1, i2});
      }
    }
    if (covered != rat_abs(signed_area2(img_tri)))
      throw OutsideDomain(Point2{(A.x + B.x + C.x) / 3, (A.y + B.y + C.y) / 3});
  }

  // Refined boundary cycles: original cycles with any new vertices inserted
  // along their edges, in order.
  for (const auto& cyc : f.domain.boundary) {
    std::vector<int> refined;
    for (size_t i = 0; i < cyc.size(); ++i) {
      const Point2& u = f.domain.points[cyc[i]];
      const Point2& v = f.domain.points[cyc[(i + 1) % cyc.size()]];
      std::vector<Point2> on_edge{u};
      for (const auto& [p, id] : pid)
        if (on_open_segment(u, v, p)) on_edge.push_back(p);
      const Point2 d = v - u;
      bool byx = rat_abs(d.x) >= rat_abs(d.y);
      std::sort(on_edge.begin(), on_edge.end(), [&](const Point2& x, const Point2& y) {
        return byx ? (d.x > 0 ? x.x < y.x : x.x > y.x) : (d.y > 0 ? x.y < y.y : x.y > y.y);
      });
      for (const auto& p : on_edge) {
        auto it = pid.find(p);
        if (it == pid.end()) throw Error("compose: boundary vertex missing from refinement");
        if (refined.empty() || refined.back() != it->second) refined.push_back(it->second);
      }
    }
    if (refined.size() > 1 && refined.front() == refined.back()) refined.pop_back();
    out.domain.boundary.push_back(std::move(refined));
  }
  return out;
}

// Exact agreement of two PL maps on the common refinement of their domains.
// Both maps must cover the same region; affine pieces are compared at every
// overlay cell corner, which pins them down everywhere.
inline bool plmap_agree(const PLMap& f, const PLMap& g) {
  Rat fa = 0, ga = 0;
  for (const auto& t : f.domain.triangles)
    fa += rat_abs(cross(f.domain.points[t[1]] - f.domain.points[t[0]],
                        f.domain.points[t[2]] - f.domain.points[t[0]]));
  for (const auto& t : g.domain.triangles)
    ga += rat_abs(cross(g.domain.points[t[1]] - g.domain.points[t[0]],
                        g.domain.points[t[2]] - g.domain.points[t[0]]));
  if (fa != ga) return false;
  Rat common = 0;
  for (const auto& t : f.domain.triangles) {
    std::vector<Point2> ft{f.domain.points[t[0]], f.domain.points[t[1]], f.domain.points[t[2]]};
    for (const auto& s : g.domain.triangles) {
      auto piece = detail::clip_triangle(ft, g.domain.points[s[0]], g.domain.points[s[1]],
                                         g.domain.points[s[2]]);
      if (piece.empty()) continue;
      Rat pa = signed_area2(piece);
      if (pa == 0) continue;
      common += pa;
      for (const auto& p : piece) {
        Point2 fv = detail::affine_map(f.domain.points[t[0]], f.domain.points[t[1]],
                                       f.domain.points[t[2]], f.images[t[0]], f.images[t[1]],
                                       f.images[t[2]], p);
        Point2 gv = detail::affine_map(g.domain.points[s[0]], g.domain.points[s[1]],
                                       g.domain.points[s[2]], g.images[s[0]], g.images[s[1]],
                                       g.images[s[2]], p);
        if (!(fv == gv)) return false;
      }
    }
  }
  return common == fa;  // same region covered
}

}  // namespace surfclass
