#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "surfclass/embedding.hpp"
#include "surfclass/plmap.hpp"

namespace surfclass {

struct NonDisk : Error {
  explicit NonDisk(const std::string& what) : Error("not a disk: " + what) {}
};

struct CorrespondenceMismatch : Error {
  explicit CorrespondenceMismatch(const std::string& what)
      : Error("boundary correspondence: " + what) {}
};

struct BoxTooSmall : Error {
  explicit BoxTooSmall(const std::string& what) : Error("box too small: " + what) {}
};

struct NotSimple : Error {
  explicit NotSimple(const std::string& what) : Error("curve not simple: " + what) {}
};

// Axis-aligned rational box, corners (x0,y0) and (x1,y1).
struct Box2 {
  Rat x0, y0, x1, y1;
  bool is_square() const { return x1 - x0 == y1 - y0 && x1 > x0; }
  bool strictly_contains(const Point2& p) const {
    return p.x > x0 && p.x < x1 && p.y > y0 && p.y < y1;
  }
  // Counterclockwise corner cycle starting at (x0,y0).
  std::vector<Point2> corners() const {
    return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  }
};

// Perimeter of the unit square, parametrized by t in [0,4) counterclockwise
// from the origin: one unit of parameter per side.
inline Point2 square_boundary_point(Rat t) {
  while (t < 0) t += 4;
  while (t >= 4) t -= 4;
  if (t < 1) return {t, 0};
  if (t < 2) return {1, t - 1};
  if (t < 3) return {3 - t, 1};
  return {0, 4 - t};
}

// Parametrized boundary correspondence: breakpoint params[i] on the unit
// square perimeter maps to target.v[i], affinely in the parameter between
// consecutive breakpoints. Both sides run counterclockwise.
struct BoundaryMap {
  std::vector<Rat> params;  // strictly increasing, within [0, 4)
  SimplePolygon target;
};

inline void validate_boundary_map(const BoundaryMap& g) {
  if (g.params.size() != g.target.v.size())
    throw CorrespondenceMismatch("breakpoint count " + std::to_string(g.params.size()) +
                                 " does not match vertex count " +
                                 std::to_string(g.target.v.size()));
  if (g.params.size() < 3) throw CorrespondenceMismatch("need at least 3 breakpoints");
  for (size_t i = 0; i < g.params.size(); ++i) {
    if (g.params[i] < 0 || g.params[i] >= 4)
      throw CorrespondenceMismatch("parameter out of [0,4)");
    if (i > 0 && g.params[i] <= g.params[i - 1])
      throw CorrespondenceMismatch("parameters must strictly increase");
  }
  try {
    validate_simple(g.target.v);
  } catch (const Error& e) {
    throw NotSimple(e.what());
  }
  if (!(signed_area2(g.target.v) > 0))
    throw CorrespondenceMismatch("target polygon must be counterclockwise");
}

// The two sides of a simple closed polygon. The bounded side is a region
// outright; the unbounded side is produced on demand relative to a box.
struct JordanSides {
  PolygonalRegion interior;
  SimplePolygon curve;  // counterclockwise

  PolygonalRegion exterior_within(const Box2& b) const {
    for (const Point2& p : curve.v)
      if (!b.strictly_contains(p)) throw BoxTooSmall("curve vertex " + point_str(p) + " not strictly inside");
    PolygonalRegion r = make_region({{b.x0, b.y0}, {b.x1, b.y0}, {b.x1, b.y1}, {b.x0, b.y1}},
                                    {curve.v});
    validate_region(r);
    return r;
  }
};

inline JordanSides jordan_sides(const SimplePolygon& c) {
  PolygonalRegion interior;
  try {
    interior = make_region(c.v);
  } catch (const Error& e) {
    throw NotSimple(e.what());
  }
  return {interior, interior.outer};
}

namespace detail {

// Splits the boundary edge whose endpoints carry ids (u, v) consecutively in
// some boundary cycle, adding p (strictly between them) as a new vertex. The
// unique incident triangle is split in two; the cycle gains the new id.
inline int split_boundary_edge(Triangulation2& t, int u, int v, const Point2& p) {
  if (!on_open_segment(t.points[u], t.points[v], p))
    throw Error("split_boundary_edge: point not on the open edge");
  int w = int(t.points.size());
  t.points.push_back(p);
  size_t hit = t.triangles.size();
  for (size_t i = 0; i < t.triangles.size() && hit == t.triangles.size(); ++i) {
    const auto& tri = t.triangles[i];
    for (int e = 0; e < 3; ++e) {
      int a = tri[e], b = tri[(e + 1) % 3];
      if ((a == u && b == v) || (a == v && b == u)) {
        hit = i;
        break;
      }
    }
  }
  if (hit == t.triangles.size()) throw Error("split_boundary_edge: edge not in any triangle");
  auto tri = t.triangles[hit];
  int e = 0;
  while (!((tri[e] == u && tri[(e + 1) % 3] == v) || (tri[e] == v && tri[(e + 1) % 3] == u))) ++e;
  int a = tri[e], b = tri[(e + 1) % 3], x = tri[(e + 2) % 3];
  t.triangles[hit] = {a, w, x};
  t.triangles.push_back({w, b, x});
  bool placed = false;
  for (auto& cyc : t.boundary) {
    for (size_t i = 0; i < cyc.size(); ++i) {
      if (cyc[i] == u && cyc[(i + 1) % cyc.size()] == v) {
        cyc.insert(cyc.begin() + long(i) + 1, w);
        placed = true;
        break;
      }
    }
    if (placed) break;
  }
  if (!placed) throw Error("split_boundary_edge: edge not on a boundary cycle");
  return w;
}

// Triangulation of the closed walk over the given points (in walk order).
// Coincident twin points across a slit are allowed.
inline Triangulation2 disk_from_cycle(std::vector<Point2> pts) {
  Triangulation2 t;
  std::vector<int> walk(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) walk[i] = int(i);
  t.points = std::move(pts);
  t.triangles = earcut_walk(t.points, walk);
  t.boundary.push_back(walk);
  validate_triangulation(t);
  return t;
}

// Equalizes the vertex counts of matched boundary arcs and returns the full
// position-to-position pairing between the two (possibly grown) cycles.
// Anchors are (position in d1 cycle, position in d2 cycle) pairs.
inline std::vector<std::pair<size_t, size_t>> align_boundaries(
    Triangulation2& d1, Triangulation2& d2,
    std::vector<std::pair<size_t, size_t>> anchors) {
  const auto cyc1 = d1.boundary[0];  // pre-equalization copies
  const auto cyc2 = d2.boundary[0];
  const size_t n1 = cyc1.size(), n2 = cyc2.size();
  if (anchors.empty()) throw CorrespondenceMismatch("at least one anchor pair required");
  for (const auto& [p, q] : anchors)
    if (p >= n1 || q >= n2) throw CorrespondenceMismatch("anchor position out of range");
  std::sort(anchors.begin(), anchors.end());
  const size_t A = anchors.size();
  for (size_t k = 0; k + 1 < A; ++k)
    if (anchors[k].first == anchors[k + 1].first)
      throw CorrespondenceMismatch("duplicate anchor position");
  if (A > 1) {
    size_t descents = 0;
    for (size_t k = 0; k < A; ++k) {
      size_t cur = anchors[k].second, nxt = anchors[(k + 1) % A].second;
      if (cur == nxt) throw CorrespondenceMismatch("duplicate anchor position");
      if (nxt < cur) ++descents;
    }
    if (descents != 1) throw CorrespondenceMismatch("anchors not cyclically order-preserving");
  }

  // Plan insertions per arc so matched arcs end up with equal vertex counts.
  struct Insertion {
    int u, v;
    std::vector<Point2> pts;  // strictly between u and v, in order
  };
  std::vector<Insertion> plan1, plan2;
  for (size_t k = 0; k < A; ++k) {
    size_t a1 = anchors[k].first, b1 = anchors[(k + 1) % A].first;
    size_t a2 = anchors[k].second, b2 = anchors[(k + 1) % A].second;
    size_t len1 = (b1 + n1 - a1 - 1) % n1;  // interior vertices of the arc
    size_t len2 = (b2 + n2 - a2 - 1) % n2;
    if (len1 == len2) continue;
    bool grow1 = len1 < len2;
    const auto& cyc = grow1 ? cyc1 : cyc2;
    size_t n = grow1 ? n1 : n2;
    size_t start = grow1 ? a1 : a2;
    size_t fewer = std::min(len1, len2), more = std::max(len1, len2);
    auto& plan = grow1 ? plan1 : plan2;
    const auto& pts = grow1 ? d1.points : d2.points;
    size_t edges = fewer + 1;
    // Spread (more - fewer) new vertices as evenly as possible over the arc's
    // edges, uniformly in the affine parameter within each edge.
    for (size_t j = 0; j < edges; ++j) {
      size_t want = (more + 1) * (j + 1) / edges - (more + 1) * j / edges;
      if (want <= 1) continue;
      int u = cyc[(start + j) % n], v = cyc[(start + j + 1) % n];
      Insertion ins{u, v, {}};
      const Point2 &pu = pts[u], &pv = pts[v];
      for (size_t i = 1; i < want; ++i) {
        Rat s = Rat(BigInt(i), BigInt(want));
        ins.pts.push_back({pu.x + s * (pv.x - pu.x), pu.y + s * (pv.y - pu.y)});
      }
      plan.push_back(std::move(ins));
    }
  }
  auto apply = [](Triangulation2& d, const std::vector<Insertion>& plan) {
    for (const auto& ins : plan) {
      int prev = ins.u;
      for (const Point2& p : ins.pts) prev = split_boundary_edge(d, prev, ins.v, p);
    }
  };
  apply(d1, plan1);
  apply(d2, plan2);

  // Pair final cycle positions arc by arc between consecutive anchors.
  const auto& f1 = d1.boundary[0];
  const auto& f2 = d2.boundary[0];
  auto pos_of = [](const std::vector<int>& cyc, int id) {
    for (size_t i = 0; i < cyc.size(); ++i)
      if (cyc[i] == id) return i;
    throw Error("align_boundaries: anchor vertex lost");
  };
  std::vector<std::pair<size_t, size_t>> match;
  for (size_t k = 0; k < A; ++k) {
    size_t a1 = pos_of(f1, cyc1[anchors[k].first]);
    size_t b1 = pos_of(f1, cyc1[anchors[(k + 1) % A].first]);
    size_t a2 = pos_of(f2, cyc2[anchors[k].second]);
    size_t b2 = pos_of(f2, cyc2[anchors[(k + 1) % A].second]);
    size_t len1 = (b1 + f1.size() - a1) % f1.size();
    size_t len2 = (b2 + f2.size() - a2) % f2.size();
    if (A == 1) len1 = f1.size(), len2 = f2.size();
    if (len1 != len2) throw Error("align_boundaries: equalization failed");
    for (size_t s = 0; s < len1; ++s)
      match.emplace_back((a1 + s) % f1.size(), (a2 + s) % f2.size());
  }
  if (match.size() != f1.size() || f1.size() != f2.size())
    throw CorrespondenceMismatch("anchors do not cover both cycles consistently");
  return match;
}

}  // namespace detail

// PL homeomorphism d1 -> d2 restricting to the given boundary correspondence:
// both disks are straightened onto a common convex polygon with matched
// boundary vertices at the same positions, and the two straightenings are
// composed through an exact overlay. Anchor pairs (position in d1's boundary
// cycle, position in d2's) pin the correspondence; arcs between consecutive
// anchors are matched in order, inserting evenly spaced subdivision points on
// whichever side has fewer vertices. The returned map's domain refines d1.
inline PLMap disk_homeo(Triangulation2 d1, Triangulation2 d2,
                        const std::vector<std::pair<size_t, size_t>>& anchors) {
  validate_triangulation(d1);
  validate_triangulation(d2);
  if (d1.boundary.size() != 1)
    throw NonDisk("first input has " + std::to_string(d1.boundary.size()) + " boundary cycles");
  if (d2.boundary.size() != 1)
    throw NonDisk("second input has " + std::to_string(d2.boundary.size()) + " boundary cycles");

  auto match = detail::align_boundaries(d1, d2, anchors);
  const size_t n = d1.boundary[0].size();
  std::vector<Point2> circle = convex_positions(n);
  std::vector<Point2> place1(n), place2(n);
  for (const auto& [s1, s2] : match) {
    place1[s1] = circle[s1];
    place2[s2] = circle[s1];
  }

  AbstractDisk a1{int(d1.points.size()), d1.triangles, d1.boundary[0]};
  AbstractDisk a2{int(d2.points.size()), d2.triangles, d2.boundary[0]};
  Triangulation2 e1 = convex_embed(a1, place1);
  Triangulation2 e2 = convex_embed(a2, place2);

  PLMap f1{d1, e1.points, 1};
  PLMap f2{d2, e2.points, 1};
  return plmap_compose(f1, plmap_invert(f2));
}

// PL self-homeomorphism of the box, the identity on its boundary.
struct PLHomeo {
  Box2 box;
  PLMap forward;
  PLMap inverse;
};

namespace detail {

// Aligned vertex cycles of a boundary map: the square perimeter subdivided at
// every breakpoint and corner, and the matching target cycle (corners that are
// not breakpoints get affinely interpolated images on the polygon edge).
inline std::pair<std::vector<Point2>, std::vector<Point2>> boundary_cycles(const BoundaryMap& g) {
  const size_t n = g.params.size();
  std::vector<std::pair<Rat, Point2>> events;
  for (size_t i = 0; i < n; ++i) events.emplace_back(g.params[i], g.target.v[i]);
  for (int c = 0; c < 4; ++c) {
    Rat t = c;
    bool present = false;
    for (const auto& [u, _] : events)
      if (u == t) present = true;
    if (present) continue;
    // Bracket t cyclically among the breakpoints and interpolate its image.
    size_t succ = 0;
    while (succ < n && g.params[succ] < t) ++succ;
    size_t pred = (succ + n - 1) % n;
    Rat ta = g.params[pred], tb = g.params[succ % n];
    Rat tt = t;
    if (succ == n) tb += 4;           // wraps past the last breakpoint
    if (succ == 0) ta -= 4;           // wraps before the first breakpoint
    Rat s = (tt - ta) / (tb - ta);
    const Point2 &va = g.target.v[pred], &vb = g.target.v[succ % n];
    events.emplace_back(t, Point2{va.x + s * (vb.x - va.x), va.y + s * (vb.y - va.y)});
  }
  std::sort(events.begin(), events.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Point2> square, target;
  for (const auto& [t, img] : events) {
    square.push_back(square_boundary_point(t));
    target.push_back(img);
  }
  return {square, target};
}

// True when the open segment from a to b meets the cycle's edges at most at b.
inline bool segment_clears_cycle(const Point2& a, const Point2& b,
                                 const std::vector<Point2>& cyc) {
  for (size_t i = 0; i < cyc.size(); ++i) {
    SegIntersection si =
        segment_intersection(a, b, cyc[i], cyc[(i + 1) % cyc.size()]);
    if (si.kind == SegIntersection::Overlap) return false;
    if (si.kind == SegIntersection::OnePoint && si.p != b) return false;
  }
  return true;
}

// Arc from w on the box's top edge down to vertex `inner[k]`, staying inside
// the annulus between the box and the cycle. Straight when the segment works;
// otherwise it detours radially around a margin ring between the unit square
// and the box (only ever needed for the square-side annulus).
inline std::vector<Point2> annulus_cut_arc(const Box2& b, const Point2& w,
                                           const std::vector<Point2>& inner, size_t k) {
  const Point2& s = inner[k];
  if (segment_clears_cycle(w, s, inner)) return {w, s};
  Rat left = -b.x0, bottom = -b.y0, right = b.x1 - 1, top = b.y1 - 1;
  Rat mm = std::min(std::min(left, bottom), std::min(right, top)) / 2;
  Rat lo = -mm, hi = 1 + mm;  // margin ring around the unit square
  Point2 c{Rat(1, 2), Rat(1, 2)};
  Point2 d{s.x - c.x, s.y - c.y};
  Rat t = 0;
  auto axis_hit = [&](const Rat& dc, const Rat& coord) -> Rat {
    if (dc > 0) return (hi - coord) / dc;
    if (dc < 0) return (lo - coord) / dc;
    return Rat(0);
  };
  Rat tx = axis_hit(d.x, c.x), ty = axis_hit(d.y, c.y);
  if (tx > 0 && (ty == 0 || tx <= ty)) t = tx;
  else t = ty;
  Point2 z{c.x + t * d.x, c.y + t * d.y};  // radial exit onto the ring
  Point2 w1{w.x, hi};                      // ring point below w
  std::vector<Point2> arc{w, w1};
  if (z == w1) {
    arc.push_back(s);
    return arc;
  }
  // Walk the ring clockwise from w1 (on its top side) around to z.
  std::vector<Point2> ring{{hi, hi}, {hi, lo}, {lo, lo}, {lo, hi}};  // cw from NE
  auto side_of = [&](const Point2& p) {
    if (p.y == hi && p.x != lo) return 0;  // top (cw: right-to-... toward +x? reached first)
    if (p.x == hi) return 1;
    if (p.y == lo) return 2;
    return 3;  // x == lo
  };
  // Clockwise from w1: top side toward +x, then right side downward, bottom
  // toward -x, left side upward.
  auto cw_rank = [&](const Point2& p) -> Rat {
    switch (side_of(p)) {
      case 0: return p.x - lo;
      case 1: return (hi - lo) + (hi - p.y);
      case 2: return 2 * (hi - lo) + (hi - p.x);
      default: return 3 * (hi - lo) + (p.y - lo);
    }
  };
  Rat rw = cw_rank(w1), rz = cw_rank(z);
  std::vector<std::pair<Rat, Point2>> stops;
  for (const Point2& q : ring) {
    Rat r = cw_rank(q);
    Rat rel = r - rw;
    if (rel <= 0) rel += 4 * (hi - lo);
    stops.emplace_back(rel, q);
  }
  Rat relz = rz - rw;
  if (relz <= 0) relz += 4 * (hi - lo);
  std::sort(stops.begin(), stops.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [rel, q] : stops)
    if (rel < relz && q != w1) arc.push_back(q);
  if (z != arc.back()) arc.push_back(z);
  arc.push_back(s);
  return arc;
}

// Cut-open annulus between the box boundary and the inner cycle (given ccw),
// slit along `arc` from the box's top edge down to inner[k]. The slit is
// traversed twice with coincident twin vertices, making the result a disk.
// Walk layout: [w, box ccw, w, slit down, inner cw from inner[k], slit up].
inline Triangulation2 cut_annulus(const Box2& b, const std::vector<Point2>& inner, size_t k,
                                  const std::vector<Point2>& arc) {
  std::vector<Point2> pts;
  const Point2& w = arc.front();
  pts.push_back(w);
  pts.push_back({b.x0, b.y1});
  pts.push_back({b.x0, b.y0});
  pts.push_back({b.x1, b.y0});
  pts.push_back({b.x1, b.y1});
  for (size_t i = 0; i + 1 < arc.size(); ++i) pts.push_back(arc[i]);  // w twin + slit interior
  const size_t m = inner.size();
  for (size_t i = 0; i < m; ++i) pts.push_back(inner[(k + m - i) % m]);  // cw, starts at inner[k]
  pts.push_back(inner[k]);                                               // twin
  for (size_t i = arc.size() - 2; i >= 1; --i) pts.push_back(arc[i]);    // slit back up
  return disk_from_cycle(std::move(pts));
}

// Glues piecewise maps that agree on their shared vertices into one map over
// the union, merging vertices by coordinate. The boundary is supplied by the
// caller since the pieces' seams become interior.
inline PLMap merge_plmaps(const std::vector<PLMap>& pieces,
                          const std::vector<Point2>& outer_cycle) {
  PLMap out;
  out.orient = 1;
  std::map<Point2, int> id;
  auto id_of = [&](const Point2& p, const Point2& img) {
    auto it = id.find(p);
    if (it != id.end()) {
      if (out.images[size_t(it->second)] != img)
        throw Error("merge_plmaps: pieces disagree at " + point_str(p));
      return it->second;
    }
    int v = int(out.domain.points.size());
    out.domain.points.push_back(p);
    out.images.push_back(img);
    id.emplace(p, v);
    return v;
  };
  for (const PLMap& f : pieces) {
    if (f.orient != 1) throw Error("merge_plmaps: pieces must preserve orientation");
    for (const auto& t : f.domain.triangles) {
      int a = id_of(f.domain.points[t[0]], f.images[t[0]]);
      int b = id_of(f.domain.points[t[1]], f.images[t[1]]);
      int c = id_of(f.domain.points[t[2]], f.images[t[2]]);
      out.domain.triangles.push_back({a, b, c});
    }
  }
  std::vector<int> cyc;
  for (const Point2& p : outer_cycle) {
    auto it = id.find(p);
    if (it == id.end()) throw Error("merge_plmaps: boundary vertex missing");
    cyc.push_back(it->second);
  }
  out.domain.boundary.push_back(std::move(cyc));
  return out;
}

}  // namespace detail

// Extends the boundary parametrization g to a PL self-homeomorphism of the box
// that is the identity on the box boundary: the square interior is mapped onto
// the polygon interior, and the surrounding annuli are matched after cutting
// each one open into a disk along an arc through the topmost target vertex.
inline PLHomeo extend_to_plane_homeo(const BoundaryMap& g, const Box2& box) {
  validate_boundary_map(g);
  if (!box.is_square()) throw Error("extend_to_plane_homeo: box must be a square");
  if (!(box.x0 < 0 && box.y0 < 0 && box.x1 > 1 && box.y1 > 1))
    throw BoxTooSmall("box must strictly contain the unit square");
  for (const Point2& v : g.target.v)
    if (!box.strictly_contains(v)) throw BoxTooSmall("target vertex " + point_str(v) + " not strictly inside");

  auto [square_cycle, target_cycle] = detail::boundary_cycles(g);
  const size_t m = square_cycle.size();

  Triangulation2 ts = detail::disk_from_cycle(square_cycle);
  Triangulation2 tp = detail::disk_from_cycle(target_cycle);
  PLMap inner = disk_homeo(ts, tp, {{0, 0}});

  // Slit both annuli toward the same boundary point above the topmost target
  // vertex (ties broken by smaller x), so the glued map fixes the box edge.
  size_t k = 0;
  for (size_t i = 1; i < m; ++i) {
    const Point2 &best = target_cycle[k], &cur = target_cycle[i];
    if (cur.y > best.y || (cur.y == best.y && cur.x < best.x)) k = i;
  }
  Point2 w{target_cycle[k].x, box.y1};
  std::vector<Point2> arc_target{w, target_cycle[k]};
  if (!detail::segment_clears_cycle(w, target_cycle[k], target_cycle))
    throw Error("extend_to_plane_homeo: slit blocked");  // topmost vertex: cannot happen
  std::vector<Point2> arc_square = detail::annulus_cut_arc(box, w, square_cycle, k);

  Triangulation2 cut_s = detail::cut_annulus(box, square_cycle, k, arc_square);
  Triangulation2 cut_p = detail::cut_annulus(box, target_cycle, k, arc_target);
  const size_t j = arc_square.size() - 2;  // slit interior vertices, square side
  std::vector<std::pair<size_t, size_t>> anchors{
      {0, 0}, {5, 5}, {6 + j, 6}, {6 + j + m, 6 + m}};
  PLMap annulus = disk_homeo(cut_s, cut_p, anchors);

  std::vector<Point2> outer{w, {box.x0, box.y1}, {box.x0, box.y0}, {box.x1, box.y0}, {box.x1, box.y1}};
  PLMap forward = detail::merge_plmaps({inner, annulus}, outer);
  plmap_verify(forward);
  for (int v : forward.domain.boundary[0])
    if (forward.images[size_t(v)] != forward.domain.points[size_t(v)])
      throw Error("extend_to_plane_homeo: box boundary not fixed");
  PLMap inverse = plmap_invert(forward);
  return {box, forward, inverse};
}

}  // namespace surfclass
