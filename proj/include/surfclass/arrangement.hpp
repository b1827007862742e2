#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "surfclass/triangulate.hpp"

namespace surfclass {

using Segment = std::pair<Point2, Point2>;

namespace detail {

// Splits segments at every pairwise intersection and overlap endpoint, then
// deduplicates, so the result is a set of interior-disjoint subsegments.
// Collinear overlapping inputs collapse onto shared pieces.
inline std::vector<Segment> split_into_atomic(const std::vector<Segment>& segs) {
  const size_t n = segs.size();
  std::vector<std::vector<Point2>> cuts(n);
  for (size_t i = 0; i < n; ++i) {
    cuts[i].push_back(segs[i].first);
    cuts[i].push_back(segs[i].second);
  }
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      SegIntersection si = segment_intersection(segs[i].first, segs[i].second,
                                                segs[j].first, segs[j].second);
      if (si.kind == SegIntersection::OnePoint) {
        cuts[i].push_back(si.p);
        cuts[j].push_back(si.p);
      } else if (si.kind == SegIntersection::Overlap) {
        cuts[i].push_back(si.q0); cuts[i].push_back(si.q1);
        cuts[j].push_back(si.q0); cuts[j].push_back(si.q1);
      }
    }
  std::set<Segment> out;
  for (size_t i = 0; i < n; ++i) {
    auto& c = cuts[i];
    // Order along the segment by dominant axis.
    const Point2 d = segs[i].second - segs[i].first;
    bool byx = rat_abs(d.x) >= rat_abs(d.y);
    std::sort(c.begin(), c.end(), [&](const Point2& a, const Point2& b) {
      return byx ? (d.x > 0 ? a.x < b.x : a.x > b.x) : (d.y > 0 ? a.y < b.y : a.y > b.y);
    });
    c.erase(std::unique(c.begin(), c.end()), c.end());
    for (size_t k = 0; k + 1 < c.size(); ++k) {
      Point2 a = c[k], b = c[k + 1];
      if (a == b) continue;
      if (b < a) std::swap(a, b);
      out.insert({a, b});
    }
  }
  return {out.begin(), out.end()};
}

// Counterclockwise angular order of direction vectors around a vertex.
inline bool dir_less(const Point2& a, const Point2& b) {
  auto half = [](const Point2& v) { return (v.y < 0 || (v.y == 0 && v.x < 0)) ? 1 : 0; };
  int ha = half(a), hb = half(b);
  if (ha != hb) return ha < hb;
  return cross(a, b) > 0;
}

struct DisjointSet {
  std::vector<int> p;
  explicit DisjointSet(size_t n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) { while (p[x] != x) x = p[x] = p[p[x]]; return x; }
  void unite(int a, int b) { p[find(a)] = find(b); }
};

// A planar straight-line graph together with its face-tracing orbits.
struct PlanarSubdivision {
  std::vector<Point2> vertices;
  std::vector<std::pair<int, int>> edges;           // undirected
  std::vector<std::vector<int>> pos_orbits;         // ccw cycles: bounded face outers
  std::vector<std::vector<int>> hull_orbits;        // one per component, area <= 0
  std::vector<int> hull_component;                  // component id per hull orbit
  std::vector<int> vertex_component;
  size_t n_components = 0;
};

inline PlanarSubdivision build_subdivision(const std::vector<Segment>& raw) {
  PlanarSubdivision sub;
  std::vector<Segment> segs = split_into_atomic(raw);
  std::map<Point2, int> vid;
  auto id_of = [&](const Point2& p) {
    auto it = vid.find(p);
    if (it != vid.end()) return it->second;
    int id = int(sub.vertices.size());
    sub.vertices.push_back(p);
    vid.emplace(p, id);
    return id;
  };
  for (const auto& s : segs) {
    int a = id_of(s.first), b = id_of(s.second);
    sub.edges.push_back({a, b});
  }
  const size_t V = sub.vertices.size(), E = sub.edges.size();

  // Half-edges: 2k = edges[k].first->second, 2k+1 reversed.
  auto h_src = [&](int h) { return h % 2 == 0 ? sub.edges[h / 2].first : sub.edges[h / 2].second; };
  auto h_dst = [&](int h) { return h % 2 == 0 ? sub.edges[h / 2].second : sub.edges[h / 2].first; };
  std::vector<std::vector<int>> out(V);
  for (size_t k = 0; k < E; ++k) {
    out[sub.edges[k].first].push_back(int(2 * k));
    out[sub.edges[k].second].push_back(int(2 * k + 1));
  }
  for (size_t v = 0; v < V; ++v)
    std::sort(out[v].begin(), out[v].end(), [&](int h1, int h2) {
      return dir_less(sub.vertices[h_dst(h1)] - sub.vertices[size_t(v)],
                      sub.vertices[h_dst(h2)] - sub.vertices[size_t(v)]);
    });
  // next(h): at v = dst(h), take the ccw-predecessor of twin(h).
  std::vector<int> pos_in_ring(2 * E);
  for (size_t v = 0; v < V; ++v)
    for (size_t i = 0; i < out[v].size(); ++i) pos_in_ring[out[v][i]] = int(i);
  auto next_he = [&](int h) {
    int twin = h ^ 1;
    int v = h_src(twin);
    const auto& ring = out[v];
    int i = pos_in_ring[twin];
    return ring[(i + ring.size() - 1) % ring.size()];
  };

  DisjointSet ds(V);
  for (const auto& e : sub.edges) ds.unite(e.first, e.second);
  sub.vertex_component.resize(V);
  std::map<int, int> comp_ids;
  for (size_t v = 0; v < V; ++v) {
    int r = ds.find(int(v));
    auto it = comp_ids.find(r);
    if (it == comp_ids.end()) it = comp_ids.emplace(r, int(comp_ids.size())).first;
    sub.vertex_component[v] = it->second;
  }
  sub.n_components = comp_ids.size();

  std::vector<char> seen(2 * E, 0);
  for (size_t h0 = 0; h0 < 2 * E; ++h0) {
    if (seen[h0]) continue;
    std::vector<int> cycle;
    int h = int(h0);
    do {
      seen[h] = 1;
      cycle.push_back(h_src(h));
      h = next_he(h);
    } while (h != int(h0));
    std::vector<Point2> walk;
    walk.reserve(cycle.size());
    for (int v : cycle) walk.push_back(sub.vertices[v]);
    Rat a2 = signed_area2(walk);
    if (a2 > 0) sub.pos_orbits.push_back(std::move(cycle));
    else {
      sub.hull_component.push_back(sub.vertex_component[cycle[0]]);
      sub.hull_orbits.push_back(std::move(cycle));
    }
  }
  // One hull per component, and the plane-graph Euler identity.
  if (sub.hull_orbits.size() != sub.n_components)
    throw Error("subdivision: component hull count mismatch");
  if (BigInt(V) - BigInt(E) + BigInt(sub.pos_orbits.size()) != BigInt(sub.n_components))
    throw Error("subdivision: Euler identity violated");
  return sub;
}

// A point strictly inside the weakly simple ccw walk, avoiding every edge of
// the subdivision and every listed island hull. Ears of the walk provide
// candidate spots; corners are approached geometrically if the centroid is
// covered by an island.
inline Point2 face_sample(const PlanarSubdivision& sub, const std::vector<int>& outer,
                          const std::vector<const std::vector<int>*>& island_hulls) {
  auto ok = [&](const Point2& c) {
    for (const auto& e : sub.edges)
      if (c == sub.vertices[e.first] || c == sub.vertices[e.second] ||
          on_open_segment(sub.vertices[e.first], sub.vertices[e.second], c))
        return false;
    std::vector<Point2> w;
    w.reserve(outer.size());
    for (int v : outer) w.push_back(sub.vertices[v]);
    if (locate_in_walk(w, c) != PointLoc::Inside) return false;
    for (const auto* hull : island_hulls) {
      std::vector<Point2> hw;
      hw.reserve(hull->size());
      for (auto it = hull->rbegin(); it != hull->rend(); ++it) hw.push_back(sub.vertices[*it]);
      if (locate_in_walk(hw, c) == PointLoc::Inside) return false;
    }
    return true;
  };
  auto tris = earcut_walk(sub.vertices, outer);
  for (const auto& t : tris) {
    const Point2 &a = sub.vertices[t[0]], &b = sub.vertices[t[1]], &c = sub.vertices[t[2]];
    Point2 cen{(a.x + b.x + c.x) / 3, (a.y + b.y + c.y) / 3};
    if (ok(cen)) return cen;
    for (const Point2* corner : {&a, &b, &c}) {
      Rat f(1, 2);
      for (int k = 0; k < 64; ++k, f /= 2) {
        Point2 cand{corner->x + (cen.x - corner->x) * f, corner->y + (cen.y - corner->y) * f};
        if (ok(cand)) return cand;
      }
    }
  }
  throw Error("face sample: no interior point found");
}

}  // namespace detail

// Planar subdivision of a region cut along segments. Faces are the connected
// components of the open region minus the segments; each carries its outer
// cycle (ccw), any island contours (clockwise walks around material floating
// inside), and an interior sample point.
struct Arrangement {
  std::vector<Point2> vertices;
  std::vector<std::pair<int, int>> edges;
  struct Face {
    std::vector<int> outer;                 // ccw vertex cycle
    std::vector<std::vector<int>> islands;  // hull walks of enclosed components
    Point2 sample;                          // strictly interior
  };
  std::vector<Face> faces;
};

inline Arrangement arrangement(const PolygonalRegion& region, const std::vector<Segment>& segments) {
  std::vector<Segment> all;
  for (const auto& e : region_edges(region)) all.push_back(e);
  for (const auto& s : segments) all.push_back(s);
  detail::PlanarSubdivision sub = detail::build_subdivision(all);

  // Representative of each component: its least vertex, which lies on the hull.
  std::vector<Point2> rep(sub.n_components);
  std::vector<char> have(sub.n_components, 0);
  for (size_t v = 0; v < sub.vertices.size(); ++v) {
    int c = sub.vertex_component[v];
    if (!have[c] || sub.vertices[v] < rep[c]) { rep[c] = sub.vertices[v]; have[c] = 1; }
  }
  // Innermost positive orbit strictly containing each component representative.
  std::vector<int> owner(sub.n_components, -1);
  std::vector<Rat> owner_area(sub.n_components, Rat(0));
  std::vector<std::vector<Point2>> orbit_walk(sub.pos_orbits.size());
  std::vector<Rat> orbit_area(sub.pos_orbits.size());
  for (size_t i = 0; i < sub.pos_orbits.size(); ++i) {
    for (int v : sub.pos_orbits[i]) orbit_walk[i].push_back(sub.vertices[v]);
    orbit_area[i] = signed_area2(orbit_walk[i]);
  }
  for (size_t c = 0; c < sub.n_components; ++c)
    for (size_t i = 0; i < sub.pos_orbits.size(); ++i) {
      if (sub.vertex_component[sub.pos_orbits[i][0]] == int(c)) continue;
      if (locate_in_walk(orbit_walk[i], rep[c]) != PointLoc::Inside) continue;
      if (owner[c] == -1 || orbit_area[i] < owner_area[c]) {
        owner[c] = int(i);
        owner_area[c] = orbit_area[i];
      }
    }

  Arrangement arr;
  arr.vertices = sub.vertices;
  arr.edges = sub.edges;
  for (size_t i = 0; i < sub.pos_orbits.size(); ++i) {
    std::vector<const std::vector<int>*> hulls;
    for (size_t h = 0; h < sub.hull_orbits.size(); ++h)
      if (owner[sub.hull_component[h]] == int(i)) hulls.push_back(&sub.hull_orbits[h]);
    Point2 s = detail::face_sample(sub, sub.pos_orbits[i], hulls);
    if (locate_in_region(region, s) != PointLoc::Inside) continue;  // hole interior
    Arrangement::Face f;
    f.outer = sub.pos_orbits[i];
    for (const auto* h : hulls) f.islands.push_back(*h);
    f.sample = s;
    arr.faces.push_back(std::move(f));
  }
  return arr;
}

}  // namespace surfclass
