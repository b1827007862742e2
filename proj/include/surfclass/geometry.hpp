#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "surfclass/rational.hpp"

namespace surfclass {

// Sign of the determinant | b-a  c-a |: +1 left turn, -1 right turn, 0 collinear.
inline int orientation(const Point2& a, const Point2& b, const Point2& c) {
  return sgn(cross(b - a, c - a));
}

// Twice the signed area of the cyclic walk (positive for counterclockwise).
inline Rat signed_area2(const std::vector<Point2>& walk) {
  Rat s = 0;
  const size_t n = walk.size();
  for (size_t i = 0; i < n; ++i) s += cross(walk[i], walk[(i + 1) % n]);
  return s;
}

// p lies on the closed segment [a,b].
inline bool on_segment(const Point2& a, const Point2& b, const Point2& p) {
  if (orientation(a, b, p) != 0) return false;
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

// p lies on the open segment (a,b).
inline bool on_open_segment(const Point2& a, const Point2& b, const Point2& p) {
  return on_segment(a, b, p) && p != a && p != b;
}

struct SegIntersection {
  enum Kind { Empty, OnePoint, Overlap } kind = Empty;
  Point2 p;       // the point, when kind == OnePoint
  Point2 q0, q1;  // the shared subsegment, when kind == Overlap
};

// Exact intersection of closed segments [a,b] and [c,d].
// A shared single endpoint reports OnePoint; collinear overlap of positive
// length reports Overlap with its endpoints.
inline SegIntersection segment_intersection(const Point2& a, const Point2& b,
                                            const Point2& c, const Point2& d) {
  SegIntersection out;
  int o1 = orientation(a, b, c), o2 = orientation(a, b, d);
  int o3 = orientation(c, d, a), o4 = orientation(c, d, b);

  if (o1 == 0 && o2 == 0) {
    // Collinear. Order along the dominant axis.
    auto lt = [&](const Point2& u, const Point2& v) {
      if (a.x != b.x || c.x != d.x) return u.x < v.x || (u.x == v.x && u.y < v.y);
      return u.y < v.y;
    };
    Point2 lo1 = a, hi1 = b, lo2 = c, hi2 = d;
    if (lt(hi1, lo1)) std::swap(lo1, hi1);
    if (lt(hi2, lo2)) std::swap(lo2, hi2);
    Point2 lo = lt(lo1, lo2) ? lo2 : lo1;
    Point2 hi = lt(hi1, hi2) ? hi1 : hi2;
    if (lt(hi, lo)) return out;  // disjoint
    if (lo == hi) {
      out.kind = SegIntersection::OnePoint;
      out.p = lo;
      return out;
    }
    out.kind = SegIntersection::Overlap;
    out.q0 = lo;
    out.q1 = hi;
    return out;
  }

  if (((o1 > 0) != (o2 > 0) || o1 == 0 || o2 == 0) &&
      ((o3 > 0) != (o4 > 0) || o3 == 0 || o4 == 0)) {
    // Not collinear; either a proper crossing or an endpoint touch.
    if (o1 == 0 && on_segment(a, b, c)) { out.kind = SegIntersection::OnePoint; out.p = c; return out; }
    if (o2 == 0 && on_segment(a, b, d)) { out.kind = SegIntersection::OnePoint; out.p = d; return out; }
    if (o3 == 0 && on_segment(c, d, a)) { out.kind = SegIntersection::OnePoint; out.p = a; return out; }
    if (o4 == 0 && on_segment(c, d, b)) { out.kind = SegIntersection::OnePoint; out.p = b; return out; }
    if ((o1 > 0) != (o2 > 0) && (o3 > 0) != (o4 > 0)) {
      // Proper crossing: solve for the parameter on [a,b].
      Rat denom = cross(b - a, d - c);
      Rat t = cross(c - a, d - c) / denom;
      out.kind = SegIntersection::OnePoint;
      out.p = a + t * (b - a);
      return out;
    }
  }
  return out;
}

// True when the open segments (a,b) and (c,d) share an interior point that is
// interior to both (a transversal crossing or interior overlap).
inline bool segments_cross_properly(const Point2& a, const Point2& b,
                                    const Point2& c, const Point2& d) {
  SegIntersection si = segment_intersection(a, b, c, d);
  if (si.kind == SegIntersection::Empty) return false;
  if (si.kind == SegIntersection::Overlap) return true;
  const Point2& p = si.p;
  bool int1 = (p != a && p != b);
  bool int2 = (p != c && p != d);
  return int1 && int2;
}

struct SelfIntersection : Error {
  size_t edge_a, edge_b;
  SelfIntersection(size_t ea, size_t eb)
      : Error("polygon edges " + std::to_string(ea) + " and " + std::to_string(eb) +
              " intersect"),
        edge_a(ea), edge_b(eb) {}
};

struct DegenerateVertex : Error {
  size_t index;
  explicit DegenerateVertex(size_t i)
      : Error("degenerate polygon vertex at index " + std::to_string(i)), index(i) {}
};

// A simple closed polygon: >= 3 vertices, consecutive vertices distinct, no
// vertex collinear between its neighbours, edges meet only at shared endpoints.
struct SimplePolygon {
  std::vector<Point2> v;
  Rat area2() const { return signed_area2(v); }
  bool ccw() const { return area2() > 0; }
};

// Checks the SimplePolygon invariants. Throws DegenerateVertex or
// SelfIntersection naming the offending vertices/edges.
inline SimplePolygon validate_simple(const std::vector<Point2>& pts) {
  const size_t n = pts.size();
  if (n < 3) throw Error("polygon needs at least 3 vertices");
  for (size_t i = 0; i < n; ++i) {
    const Point2& prev = pts[(i + n - 1) % n];
    const Point2& cur = pts[i];
    const Point2& next = pts[(i + 1) % n];
    if (cur == next) throw DegenerateVertex(i);
    if (orientation(prev, cur, next) == 0) throw DegenerateVertex(i);
  }
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const Point2 &a = pts[i], &b = pts[(i + 1) % n];
      const Point2 &c = pts[j], &d = pts[(j + 1) % n];
      bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      SegIntersection si = segment_intersection(a, b, c, d);
      if (si.kind == SegIntersection::Empty) continue;
      if (si.kind == SegIntersection::Overlap) throw SelfIntersection(i, j);
      if (adjacent) {
        // Must meet exactly at the shared endpoint.
        const Point2& shared = (j == i + 1) ? b : a;
        if (si.p != shared) throw SelfIntersection(i, j);
      } else {
        throw SelfIntersection(i, j);
      }
    }
  }
  return SimplePolygon{pts};
}

enum class PointLoc { Inside, OnBoundary, Outside };

// Location of p relative to the closed polygon walk (even-odd rule).
// The walk may repeat edges; doubled edges cancel, which is what the face
// machinery relies on.
inline PointLoc locate_in_walk(const std::vector<Point2>& walk, const Point2& p) {
  const size_t n = walk.size();
  bool inside = false;
  for (size_t i = 0; i < n; ++i) {
    const Point2& a = walk[i];
    const Point2& b = walk[(i + 1) % n];
    if (a == b) continue;
    if (on_segment(a, b, p)) return PointLoc::OnBoundary;
    // Half-open crossing rule on y, exact x comparison at the crossing.
    bool aAbove = a.y > p.y, bAbove = b.y > p.y;
    if (aAbove != bAbove) {
      // x coordinate of the edge at height p.y
      Rat t = (p.y - a.y) / (b.y - a.y);
      Rat xint = a.x + t * (b.x - a.x);
      if (xint > p.x) inside = !inside;
    }
  }
  return inside ? PointLoc::Inside : PointLoc::Outside;
}

inline PointLoc locate_in_polygon(const SimplePolygon& poly, const Point2& p) {
  return locate_in_walk(poly.v, p);
}

struct InvalidRegion : Error {
  explicit InvalidRegion(const std::string& m) : Error(m) {}
};

// Polygonal region: one outer simple polygon (counterclockwise) and pairwise
// disjoint holes (clockwise as stored walks? stored counterclockwise; holes
// are subtracted) strictly inside the outer polygon.
struct PolygonalRegion {
  SimplePolygon outer;                // ccw
  std::vector<SimplePolygon> holes;   // each ccw as stored; subtracted
};

inline PolygonalRegion make_region(std::vector<Point2> outer,
                                   std::vector<std::vector<Point2>> holes = {}) {
  PolygonalRegion r;
  r.outer = validate_simple(outer);
  if (!r.outer.ccw()) std::reverse(r.outer.v.begin(), r.outer.v.end());
  for (auto& h : holes) {
    SimplePolygon hp = validate_simple(h);
    if (!hp.ccw()) std::reverse(hp.v.begin(), hp.v.end());
    r.holes.push_back(std::move(hp));
  }
  return r;
}

// Validates a region: holes strictly inside the outer polygon, pairwise
// disjoint (no shared points).
inline void validate_region(const PolygonalRegion& r) {
  for (size_t h = 0; h < r.holes.size(); ++h) {
    for (const Point2& p : r.holes[h].v)
      if (locate_in_polygon(r.outer, p) != PointLoc::Inside)
        throw InvalidRegion("hole " + std::to_string(h) + " not strictly inside outer polygon");
    for (size_t i = 0; i < r.holes[h].v.size(); ++i)
      for (size_t j = 0; j < r.outer.v.size(); ++j)
        if (segment_intersection(r.holes[h].v[i], r.holes[h].v[(i + 1) % r.holes[h].v.size()],
                                 r.outer.v[j], r.outer.v[(j + 1) % r.outer.v.size()]).kind !=
            SegIntersection::Empty)
          throw InvalidRegion("hole " + std::to_string(h) + " touches outer polygon");
  }
  for (size_t g = 0; g < r.holes.size(); ++g)
    for (size_t h = g + 1; h < r.holes.size(); ++h) {
      const auto& A = r.holes[g].v;
      const auto& B = r.holes[h].v;
      for (size_t i = 0; i < A.size(); ++i)
        for (size_t j = 0; j < B.size(); ++j)
          if (segment_intersection(A[i], A[(i + 1) % A.size()], B[j], B[(j + 1) % B.size()]).kind !=
              SegIntersection::Empty)
            throw InvalidRegion("holes " + std::to_string(g) + " and " + std::to_string(h) +
                                " intersect");
      if (locate_in_polygon(r.holes[g], B[0]) == PointLoc::Inside)
        throw InvalidRegion("hole nested inside hole");
      if (locate_in_polygon(r.holes[h], A[0]) == PointLoc::Inside)
        throw InvalidRegion("hole nested inside hole");
    }
}

inline PointLoc locate_in_region(const PolygonalRegion& r, const Point2& p) {
  PointLoc lo = locate_in_polygon(r.outer, p);
  if (lo != PointLoc::Inside) return lo;
  for (const auto& h : r.holes) {
    PointLoc lh = locate_in_polygon(h, p);
    if (lh == PointLoc::OnBoundary) return PointLoc::OnBoundary;
    if (lh == PointLoc::Inside) return PointLoc::Outside;
  }
  return PointLoc::Inside;
}

inline Rat region_area2(const PolygonalRegion& r) {
  Rat a = rat_abs(r.outer.area2());
  for (const auto& h : r.holes) a -= rat_abs(h.area2());
  return a;
}

// All boundary edges of the region (outer + holes), as point pairs.
inline std::vector<std::pair<Point2, Point2>> region_edges(const PolygonalRegion& r) {
  std::vector<std::pair<Point2, Point2>> es;
  auto add = [&](const std::vector<Point2>& w) {
    for (size_t i = 0; i < w.size(); ++i) es.emplace_back(w[i], w[(i + 1) % w.size()]);
  };
  add(r.outer.v);
  for (const auto& h : r.holes) add(h.v);
  return es;
}

inline PolygonalRegion box_region(const Rat& x0, const Rat& y0, const Rat& x1, const Rat& y1) {
  return make_region({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

}  // namespace surfclass
