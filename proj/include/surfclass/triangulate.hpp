#pragma once

#include <array>
#include <vector>

#include "surfclass/geometry.hpp"

namespace surfclass {

// Straight-line triangulation of a polygonal set. Triangles index into
// points; distinct indices may carry equal coordinates (slit boundaries).
struct Triangulation2 {
  std::vector<Point2> points;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::vector<int>> boundary;  // closed index walks

  Rat area2() const {
    Rat s = 0;
    for (const auto& t : triangles)
      s += rat_abs(cross(points[t[1]] - points[t[0]], points[t[2]] - points[t[0]]));
    return s;
  }
};

namespace detail {

struct EarNode {
  int idx;
  int prev, next;
  bool alive;
};

}  // namespace detail

// Clips ears off the closed walk (given as point indices, counterclockwise by
// area) until only triangles remain. The walk may be weakly simple: vertices
// may repeat (slits, hole bridges), but no vertex may lie in the interior of a
// walk edge and distinct edges may not cross properly. Emits |walk| - 2
// positively oriented triangles.
inline std::vector<std::array<int, 3>> earcut_walk(const std::vector<Point2>& pts,
                                                   const std::vector<int>& walk) {
  const size_t n = walk.size();
  if (n < 3) throw Error("earcut: walk too short");
  std::vector<detail::EarNode> nodes(n);
  for (size_t i = 0; i < n; ++i)
    nodes[i] = {walk[i], int((i + n - 1) % n), int((i + 1) % n), true};
  size_t remaining = n;
  std::vector<std::array<int, 3>> tris;
  tris.reserve(n - 2);

  auto P = [&](int node) -> const Point2& { return pts[nodes[node].idx]; };

  auto is_ear = [&](int b) -> bool {
    int a = nodes[b].prev, c = nodes[b].next;
    const Point2 &pa = P(a), &pb = P(b), &pc = P(c);
    if (orientation(pa, pb, pc) <= 0) return false;
    // No other live vertex strictly inside the ear, or on the open diagonal.
    for (size_t i = 0; i < n; ++i) {
      if (!nodes[i].alive || int(i) == a || int(i) == b || int(i) == c) continue;
      const Point2& q = P(int(i));
      if (q == pa || q == pb || q == pc) continue;  // coincident twin across a slit
      int o1 = orientation(pa, pb, q), o2 = orientation(pb, pc, q), o3 = orientation(pc, pa, q);
      if (o1 > 0 && o2 > 0 && o3 > 0) return false;
      if (on_open_segment(pa, pc, q)) return false;
    }
    // No live edge properly crossing the open diagonal.
    for (size_t i = 0; i < n; ++i) {
      if (!nodes[i].alive) continue;
      int j = nodes[i].next;
      if (int(i) == a || int(i) == b || j == a || j == b) continue;
      if (int(i) == c && j == a) continue;
      SegIntersection si = segment_intersection(pa, pc, P(int(i)), P(j));
      if (si.kind == SegIntersection::Overlap) return false;
      if (si.kind == SegIntersection::OnePoint) {
        bool at_end = (si.p == pa || si.p == pc);
        if (!at_end) return false;
      }
    }
    return true;
  };

  int cur = 0;
  size_t since_progress = 0;
  while (remaining > 3) {
    if (!nodes[cur].alive) { cur = nodes[cur].next; continue; }
    if (is_ear(cur)) {
      int a = nodes[cur].prev, c = nodes[cur].next;
      tris.push_back({nodes[a].idx, nodes[cur].idx, nodes[c].idx});
      nodes[cur].alive = false;
      nodes[a].next = c;
      nodes[c].prev = a;
      --remaining;
      cur = a;
      since_progress = 0;
    } else {
      cur = nodes[cur].next;
      if (++since_progress > n + 1) {
        // Degenerate spike removal: collinear fold-back corners carry no area.
        bool cured = false;
        for (size_t i = 0; i < n && !cured; ++i) {
          if (!nodes[i].alive) continue;
          int a = nodes[i].prev, c = nodes[i].next;
          if (orientation(P(a), P(int(i)), P(c)) == 0 &&
              dot(P(int(i)) - P(a), P(c) - P(int(i))) < 0) {
            nodes[i].alive = false;
            nodes[a].next = c;
            nodes[c].prev = a;
            --remaining;
            cured = true;
            cur = a;
            since_progress = 0;
          }
        }
        if (!cured) throw Error("earcut: no ear found (degenerate walk)");
        if (remaining < 3) throw Error("earcut: walk collapsed");
      }
    }
  }
  // Final triangle.
  int b = cur;
  while (!nodes[b].alive) b = nodes[b].next;
  int a = nodes[b].prev, c = nodes[b].next;
  if (orientation(P(a), P(b), P(c)) > 0) tris.push_back({nodes[a].idx, nodes[b].idx, nodes[c].idx});
  else if (orientation(P(a), P(b), P(c)) < 0) tris.push_back({nodes[a].idx, nodes[c].idx, nodes[b].idx});
  else throw Error("earcut: final triangle degenerate");
  return tris;
}

namespace detail {

// Bridge target for a hole: nearest walk vertex visible from the hole's
// leftmost vertex; ties broken by lexicographic point order.
inline size_t find_bridge(const std::vector<Point2>& pts, const std::vector<int>& walk,
                          const Point2& h, const PolygonalRegion& region) {
  size_t best = walk.size();
  Rat bestd = 0;
  for (size_t k = 0; k < walk.size(); ++k) {
    const Point2& w = pts[walk[k]];
    if (w == h) continue;
    bool ok = true;
    // The open segment must avoid every walk vertex.
    for (size_t m = 0; m < walk.size() && ok; ++m)
      if (on_open_segment(h, w, pts[walk[m]])) ok = false;
    // And must not cross any current walk edge properly (touching at h or w
    // only).
    for (size_t m = 0; m < walk.size() && ok; ++m) {
      const Point2& e0 = pts[walk[m]];
      const Point2& e1 = pts[walk[(m + 1) % walk.size()]];
      SegIntersection si = segment_intersection(h, w, e0, e1);
      if (si.kind == SegIntersection::Overlap) ok = false;
      else if (si.kind == SegIntersection::OnePoint && si.p != h && si.p != w) ok = false;
    }
    if (ok && locate_in_region(region, midpoint(h, w)) != PointLoc::Inside) ok = false;
    if (!ok) continue;
    Rat d = dist2(h, w);
    if (best == walk.size() || d < bestd ||
        (d == bestd && pts[walk[k]] < pts[walk[best]]))
      { best = k; bestd = d; }
  }
  if (best == walk.size()) throw InvalidRegion("no visible bridge vertex for hole");
  return best;
}

}  // namespace detail

// Triangulates a polygonal region by ear clipping. Holes are joined to the
// outer walk through bridge diagonals chosen deterministically (leftmost hole
// vertex to the nearest visible walk vertex). No new points are created: the
// triangulation's vertices are exactly the region's vertices.
inline Triangulation2 triangulate_polygon(const PolygonalRegion& region) {
  validate_region(region);
  Triangulation2 out;
  out.points = region.outer.v;
  std::vector<int> walk(out.points.size());
  for (size_t i = 0; i < walk.size(); ++i) walk[i] = int(i);

  // Holes sorted by leftmost vertex, processed left to right.
  std::vector<size_t> order(region.holes.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  auto leftmost = [&](const SimplePolygon& h) {
    size_t b = 0;
    for (size_t i = 1; i < h.v.size(); ++i)
      if (h.v[i] < h.v[b]) b = i;
    return b;
  };
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return region.holes[a].v[leftmost(region.holes[a])] < region.holes[b].v[leftmost(region.holes[b])];
  });

  std::vector<std::vector<int>> hole_walks;
  for (size_t oi : order) {
    const SimplePolygon& hole = region.holes[oi];
    size_t hstart = leftmost(hole);
    int base = int(out.points.size());
    for (const Point2& p : hole.v) out.points.push_back(p);
    std::vector<int> hw(hole.v.size());
    for (size_t i = 0; i < hw.size(); ++i) hw[i] = base + int(i);
    hole_walks.push_back(hw);

    size_t wpos = detail::find_bridge(out.points, walk, hole.v[hstart], region);
    // Splice: ... w, h, hole clockwise from h, h, w, ...
    std::vector<int> spliced;
    spliced.reserve(walk.size() + hw.size() + 2);
    for (size_t i = 0; i <= wpos; ++i) spliced.push_back(walk[i]);
    const size_t m = hw.size();
    for (size_t i = 0; i <= m; ++i)
      spliced.push_back(hw[(hstart + m - (i % m)) % m]);  // cw traversal, h repeated at end
    spliced.push_back(walk[wpos]);
    for (size_t i = wpos + 1; i < walk.size(); ++i) spliced.push_back(walk[i]);
    walk = std::move(spliced);
  }

  out.triangles = earcut_walk(out.points, walk);
  std::vector<int> outer_cycle(region.outer.v.size());
  for (size_t i = 0; i < outer_cycle.size(); ++i) outer_cycle[i] = int(i);
  out.boundary.push_back(outer_cycle);
  for (const auto& hw : hole_walks) out.boundary.push_back(hw);
  return out;
}

}  // namespace surfclass
