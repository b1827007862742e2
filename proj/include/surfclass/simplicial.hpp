#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "surfclass/rational.hpp"

namespace surfclass {

using Edge = std::pair<int, int>;  // stored min,max
using Tri = std::array<int, 3>;    // stored ascending

inline Edge mk_edge(int a, int b) { return {std::min(a, b), std::max(a, b)}; }
inline Tri mk_tri(int a, int b, int c) {
  Tri t{a, b, c};
  std::sort(t.begin(), t.end());
  return t;
}

struct MissingFace : Error {
  using Error::Error;
};
struct IsolatedVertexViolation : Error {
  int vertex;
  explicit IsolatedVertexViolation(int v)
      : Error("vertex " + std::to_string(v) + " lies in no edge or triangle"), vertex(v) {}
};
struct SharedTriangle : Error {
  Edge a, b;
  SharedTriangle(Edge x, Edge y)
      : Error("edges share a triangle and cannot be subdivided together"), a(x), b(y) {}
};
struct NotSubcomplex : Error {
  using Error::Error;
};

// Finite two-dimensional simplicial complex over integer labels. Faces of
// every stored simplex are stored too; labels need not be contiguous.
struct FiniteComplex2 {
  std::set<int> vertices;
  std::set<Edge> edges;
  std::set<Tri> triangles;

  bool operator==(const FiniteComplex2& o) const = default;

  // Triangles containing the given edge.
  std::vector<Tri> star_of_edge(const Edge& e) const {
    std::vector<Tri> out;
    for (const Tri& t : triangles)
      if ((t[0] == e.first || t[1] == e.first || t[2] == e.first) &&
          (t[0] == e.second || t[1] == e.second || t[2] == e.second))
        out.push_back(t);
    return out;
  }
};

// Checks the closure and support conditions and returns the complex.
inline FiniteComplex2 validate_complex(const std::set<int>& vertices, const std::set<Edge>& edges,
                                       const std::set<Tri>& triangles) {
  FiniteComplex2 K{vertices, edges, triangles};
  for (const Edge& e : edges) {
    if (e.first == e.second) throw Error("degenerate edge");
    if (!vertices.count(e.first) || !vertices.count(e.second))
      throw MissingFace("edge {" + std::to_string(e.first) + "," + std::to_string(e.second) +
                        "} has an undeclared endpoint");
  }
  for (const Tri& t : triangles) {
    if (t[0] == t[1] || t[1] == t[2]) throw Error("degenerate triangle");
    for (int i = 0; i < 3; ++i) {
      Edge e = mk_edge(t[i], t[(i + 1) % 3]);
      if (!edges.count(e))
        throw MissingFace("triangle {" + std::to_string(t[0]) + "," + std::to_string(t[1]) + "," +
                          std::to_string(t[2]) + "} missing edge {" + std::to_string(e.first) +
                          "," + std::to_string(e.second) + "}");
    }
  }
  std::set<int> supported;
  for (const Edge& e : edges) {
    supported.insert(e.first);
    supported.insert(e.second);
  }
  for (const Tri& t : triangles) supported.insert(t.begin(), t.end());
  for (int v : vertices)
    if (!supported.count(v)) throw IsolatedVertexViolation(v);
  return K;
}

// Convenience: the complex spanned by a list of triangles.
inline FiniteComplex2 complex_from_triangles(const std::vector<Tri>& tris) {
  std::set<int> vs;
  std::set<Edge> es;
  std::set<Tri> ts;
  for (const Tri& raw : tris) {
    Tri t = mk_tri(raw[0], raw[1], raw[2]);
    ts.insert(t);
    for (int i = 0; i < 3; ++i) {
      vs.insert(t[i]);
      es.insert(mk_edge(t[i], t[(i + 1) % 3]));
    }
  }
  return validate_complex(vs, es, ts);
}

struct SurfaceKind {
  enum Kind { Closed, Bordered, NotSurface } kind = NotSurface;
  int boundary_circles = 0;  // meaningful for Bordered
  std::string witness;       // meaningful for NotSurface
};

namespace detail {

// Link of a vertex: graph on its neighbours with one edge per incident
// triangle. For a surface vertex this is a single cycle (interior) or a single
// simple path (boundary).
struct LinkShape {
  enum { Cycle, Path, Bad } shape = Bad;
};

inline LinkShape link_shape(const FiniteComplex2& K, int v) {
  std::map<int, std::vector<int>> adj;
  int link_edges = 0;
  for (const Tri& t : K.triangles) {
    if (t[0] != v && t[1] != v && t[2] != v) continue;
    int a = -1, b = -1;
    for (int x : t)
      if (x != v) (a == -1 ? a : b) = x;
    adj[a].push_back(b);
    adj[b].push_back(a);
    ++link_edges;
  }
  // Every edge at v must appear in the link graph (be in some triangle at v).
  for (const Edge& e : K.edges) {
    int other = (e.first == v) ? e.second : (e.second == v ? e.first : -1);
    if (other != -1 && !adj.count(other)) return {LinkShape::Bad};
  }
  if (adj.empty()) return {LinkShape::Bad};
  int deg1 = 0;
  for (const auto& [node, nb] : adj) {
    if (nb.size() == 1) ++deg1;
    else if (nb.size() != 2) return {LinkShape::Bad};
  }
  // Connectivity of the link graph.
  std::set<int> seen;
  std::queue<int> q;
  q.push(adj.begin()->first);
  seen.insert(adj.begin()->first);
  while (!q.empty()) {
    int x = q.front();
    q.pop();
    for (int y : adj[x])
      if (seen.insert(y).second) q.push(y);
  }
  if (seen.size() != adj.size()) return {LinkShape::Bad};
  if (deg1 == 0 && link_edges == int(adj.size())) return {LinkShape::Cycle};
  if (deg1 == 2 && link_edges == int(adj.size()) - 1) return {LinkShape::Path};
  return {LinkShape::Bad};
}

inline bool skeleton_connected(const FiniteComplex2& K) {
  if (K.vertices.empty()) return false;
  std::map<int, std::vector<int>> adj;
  for (const Edge& e : K.edges) {
    adj[e.first].push_back(e.second);
    adj[e.second].push_back(e.first);
  }
  std::set<int> seen;
  std::queue<int> q;
  int start = *K.vertices.begin();
  q.push(start);
  seen.insert(start);
  while (!q.empty()) {
    int x = q.front();
    q.pop();
    for (int y : adj[x])
      if (seen.insert(y).second) q.push(y);
  }
  return seen.size() == K.vertices.size();
}

}  // namespace detail

// Edges lying in exactly one triangle.
inline std::set<Edge> boundary_edges(const FiniteComplex2& K) {
  std::map<Edge, int> cnt;
  for (const Tri& t : K.triangles)
    for (int i = 0; i < 3; ++i) cnt[mk_edge(t[i], t[(i + 1) % 3])]++;
  std::set<Edge> out;
  for (const auto& [e, n] : cnt)
    if (n == 1) out.insert(e);
  return out;
}

// Decomposes the boundary edges into vertex cycles. Requires every boundary
// vertex to meet exactly two boundary edges (guaranteed for surfaces).
inline std::vector<std::vector<int>> boundary_cycles(const FiniteComplex2& K) {
  std::set<Edge> be = boundary_edges(K);
  std::map<int, std::vector<int>> adj;
  for (const Edge& e : be) {
    adj[e.first].push_back(e.second);
    adj[e.second].push_back(e.first);
  }
  for (const auto& [v, nb] : adj)
    if (nb.size() != 2) throw Error("boundary is not a union of circles at vertex " + std::to_string(v));
  std::vector<std::vector<int>> cycles;
  std::set<int> used;
  for (const auto& [v0, nb0] : adj) {
    if (used.count(v0)) continue;
    std::vector<int> cyc{v0};
    used.insert(v0);
    int prev = v0, cur = nb0[0];
    while (cur != v0) {
      cyc.push_back(cur);
      used.insert(cur);
      const auto& nb = adj[cur];
      int nxt = (nb[0] == prev) ? nb[1] : nb[0];
      prev = cur;
      cur = nxt;
    }
    cycles.push_back(std::move(cyc));
  }
  return cycles;
}

// Decides whether the complex is a closed surface, a surface with boundary,
// or neither (with a witness).
inline SurfaceKind surface_check(const FiniteComplex2& K) {
  if (K.triangles.empty()) return {SurfaceKind::NotSurface, 0, "no triangles"};
  std::map<Edge, int> cnt;
  for (const Tri& t : K.triangles)
    for (int i = 0; i < 3; ++i) cnt[mk_edge(t[i], t[(i + 1) % 3])]++;
  for (const Edge& e : K.edges) {
    auto it = cnt.find(e);
    int n = (it == cnt.end()) ? 0 : it->second;
    if (n == 0)
      return {SurfaceKind::NotSurface, 0,
              "edge {" + std::to_string(e.first) + "," + std::to_string(e.second) +
                  "} lies in no triangle"};
    if (n > 2)
      return {SurfaceKind::NotSurface, 0,
              "edge {" + std::to_string(e.first) + "," + std::to_string(e.second) + "} lies in " +
                  std::to_string(n) + " triangles"};
  }
  bool any_boundary = false;
  for (const auto& [e, n] : cnt)
    if (n == 1) any_boundary = true;
  for (int v : K.vertices) {
    auto shape = detail::link_shape(K, v);
    if (shape.shape == detail::LinkShape::Bad)
      return {SurfaceKind::NotSurface, 0, "vertex " + std::to_string(v) + " has a non-fan link"};
    if (shape.shape == detail::LinkShape::Cycle && any_boundary) continue;
    if (shape.shape == detail::LinkShape::Path && !any_boundary)
      return {SurfaceKind::NotSurface, 0,
              "vertex " + std::to_string(v) + " has a path link in a closed complex"};
  }
  if (!detail::skeleton_connected(K)) return {SurfaceKind::NotSurface, 0, "disconnected"};
  if (!any_boundary) return {SurfaceKind::Closed, 0, ""};
  return {SurfaceKind::Bordered, int(boundary_cycles(K).size()), ""};
}

struct PieceInvariants {
  long long euler = 0;
  bool orientable = true;
  int genus = 0;       // orientable case
  int crosscaps = 0;   // nonorientable case
  int boundary_circles = 0;
  bool planar = false;
  bool connected = true;
};

// Euler characteristic, orientability by propagating triangle orientations
// across shared interior edges, and genus/crosscap counts from the Euler
// formula. Requires a (possibly bordered) surface complex.
inline PieceInvariants invariants(const FiniteComplex2& K) {
  SurfaceKind sk = surface_check(K);
  if (sk.kind == SurfaceKind::NotSurface)
    throw Error("invariants: not a surface complex: " + sk.witness);
  PieceInvariants inv;
  inv.euler = (long long)K.vertices.size() - (long long)K.edges.size() + (long long)K.triangles.size();
  inv.boundary_circles = (sk.kind == SurfaceKind::Bordered) ? sk.boundary_circles : 0;
  inv.connected = true;

  // Dual-graph BFS: orient the least triangle by its sorted order, neighbours
  // must induce each shared edge in opposite directions.
  std::map<Edge, std::vector<const Tri*>> by_edge;
  for (const Tri& t : K.triangles)
    for (int i = 0; i < 3; ++i) by_edge[mk_edge(t[i], t[(i + 1) % 3])].push_back(&t);
  std::map<const Tri*, int> flip;  // 0: as stored; 1: reversed
  auto induces = [](const Tri& t, int fl, const Edge& e) {
    // Directed edges of (t[0],t[1],t[2]) or its reversal; returns +1 if the
    // oriented triangle traverses e as (first,second), else -1.
    std::array<int, 3> o = fl ? std::array<int, 3>{t[0], t[2], t[1]} : std::array<int, 3>{t[0], t[1], t[2]};
    for (int i = 0; i < 3; ++i) {
      if (o[i] == e.first && o[(i + 1) % 3] == e.second) return +1;
      if (o[i] == e.second && o[(i + 1) % 3] == e.first) return -1;
    }
    throw Error("internal: edge not in triangle");
  };
  inv.orientable = true;
  for (const Tri& t0 : K.triangles) {
    if (flip.count(&t0)) continue;
    flip[&t0] = 0;
    std::queue<const Tri*> q;
    q.push(&t0);
    while (!q.empty() && inv.orientable) {
      const Tri* t = q.front();
      q.pop();
      for (int i = 0; i < 3; ++i) {
        Edge e = mk_edge((*t)[i], (*t)[(i + 1) % 3]);
        for (const Tri* u : by_edge[e]) {
          if (u == t) continue;
          // Opposite induced directions on the shared edge mean compatible.
          int want = (induces(*t, flip[t], e) == +1) ? -1 : +1;
          auto it = flip.find(u);
          int need = (induces(*u, 0, e) == want) ? 0 : 1;
          if (it == flip.end()) {
            flip[u] = need;
            q.push(u);
          } else if (it->second != need) {
            inv.orientable = false;
            break;
          }
        }
        if (!inv.orientable) break;
      }
    }
    if (!inv.orientable) break;
  }

  if (inv.orientable) {
    long long g2 = 2 - inv.boundary_circles - inv.euler;
    if (g2 < 0 || g2 % 2 != 0) throw Error("invariants: Euler formula inconsistent (orientable)");
    inv.genus = int(g2 / 2);
    inv.crosscaps = 0;
  } else {
    long long c = 2 - inv.boundary_circles - inv.euler;
    if (c <= 0) throw Error("invariants: Euler formula inconsistent (nonorientable)");
    inv.crosscaps = int(c);
    inv.genus = 0;
  }
  inv.planar = inv.orientable && inv.genus == 0;
  return inv;
}

// Simple subdivision: each selected edge gains a midpoint vertex; the two
// triangles astride it split in two. Selected edges must not share a triangle.
inline FiniteComplex2 subdivide(const FiniteComplex2& K, const std::vector<Edge>& raw_edges) {
  std::vector<Edge> sel;
  for (const Edge& e : raw_edges) sel.push_back(mk_edge(e.first, e.second));
  std::sort(sel.begin(), sel.end());
  sel.erase(std::unique(sel.begin(), sel.end()), sel.end());
  for (const Edge& e : sel)
    if (!K.edges.count(e)) throw Error("subdivide: edge not in complex");
  for (const Tri& t : K.triangles) {
    std::vector<Edge> in_t;
    for (int i = 0; i < 3; ++i) {
      Edge e = mk_edge(t[i], t[(i + 1) % 3]);
      if (std::binary_search(sel.begin(), sel.end(), e)) in_t.push_back(e);
    }
    if (in_t.size() >= 2) throw SharedTriangle(in_t[0], in_t[1]);
  }
  FiniteComplex2 out = K;
  int fresh = out.vertices.empty() ? 0 : *out.vertices.rbegin() + 1;
  for (const Edge& e : sel) {
    int x = fresh++;
    out.vertices.insert(x);
    out.edges.erase(e);
    out.edges.insert(mk_edge(e.first, x));
    out.edges.insert(mk_edge(e.second, x));
    for (const Tri& t : out.star_of_edge(e)) {
      int k = -1;
      for (int v : t)
        if (v != e.first && v != e.second) k = v;
      out.triangles.erase(t);
      out.triangles.insert(mk_tri(e.first, x, k));
      out.triangles.insert(mk_tri(e.second, x, k));
      out.edges.insert(mk_edge(x, k));
    }
  }
  return out;
}

// Connected components along the 1-skeleton; simplices follow their vertices.
inline std::vector<FiniteComplex2> connected_components(const FiniteComplex2& K) {
  std::map<int, int> comp;
  std::map<int, std::vector<int>> adj;
  for (const Edge& e : K.edges) {
    adj[e.first].push_back(e.second);
    adj[e.second].push_back(e.first);
  }
  int nc = 0;
  for (int v : K.vertices) {
    if (comp.count(v)) continue;
    std::queue<int> q;
    q.push(v);
    comp[v] = nc;
    while (!q.empty()) {
      int x = q.front();
      q.pop();
      for (int y : adj[x])
        if (!comp.count(y)) {
          comp[y] = nc;
          q.push(y);
        }
    }
    ++nc;
  }
  std::vector<FiniteComplex2> out(nc);
  for (int v : K.vertices) out[comp[v]].vertices.insert(v);
  for (const Edge& e : K.edges) out[comp[e.first]].edges.insert(e);
  for (const Tri& t : K.triangles) out[comp[t[0]]].triangles.insert(t);
  return out;
}

inline bool is_subcomplex(const FiniteComplex2& K, const FiniteComplex2& sub) {
  return std::includes(K.vertices.begin(), K.vertices.end(), sub.vertices.begin(),
                       sub.vertices.end()) &&
         std::includes(K.edges.begin(), K.edges.end(), sub.edges.begin(), sub.edges.end()) &&
         std::includes(K.triangles.begin(), K.triangles.end(), sub.triangles.begin(),
                       sub.triangles.end());
}

struct ComplementPiece {
  FiniteComplex2 piece;
  std::set<Edge> frontier;  // edges shared with the removed subcomplex
};

// Components of the part of K outside sub: triangles of K not in sub, grouped
// by adjacency across edges not in sub (an edge of sub blocks passage, which
// matches components of the underlying open complement).
inline std::vector<ComplementPiece> complement_span(const FiniteComplex2& K,
                                                    const FiniteComplex2& sub) {
  if (!is_subcomplex(K, sub)) throw NotSubcomplex("complement_span: not a subcomplex");
  std::vector<Tri> rest;
  for (const Tri& t : K.triangles)
    if (!sub.triangles.count(t)) rest.push_back(t);
  std::map<Edge, std::vector<int>> by_edge;
  for (size_t i = 0; i < rest.size(); ++i)
    for (int k = 0; k < 3; ++k) by_edge[mk_edge(rest[i][k], rest[i][(k + 1) % 3])].push_back(int(i));
  std::vector<int> comp(rest.size(), -1);
  int nc = 0;
  for (size_t i = 0; i < rest.size(); ++i) {
    if (comp[i] != -1) continue;
    std::queue<int> q;
    q.push(int(i));
    comp[i] = nc;
    while (!q.empty()) {
      int x = q.front();
      q.pop();
      for (int k = 0; k < 3; ++k) {
        Edge e = mk_edge(rest[x][k], rest[x][(k + 1) % 3]);
        if (sub.edges.count(e)) continue;  // blocked passage
        for (int j : by_edge[e])
          if (comp[j] == -1) {
            comp[j] = nc;
            q.push(j);
          }
      }
    }
    ++nc;
  }
  std::vector<ComplementPiece> out(nc);
  for (size_t i = 0; i < rest.size(); ++i) {
    auto& P = out[comp[i]];
    P.piece.triangles.insert(rest[i]);
    for (int k = 0; k < 3; ++k) {
      P.piece.vertices.insert(rest[i][k]);
      Edge e = mk_edge(rest[i][k], rest[i][(k + 1) % 3]);
      P.piece.edges.insert(e);
      if (sub.edges.count(e)) P.frontier.insert(e);
    }
  }
  return out;
}

namespace detail {

// Canonical labeling by individualization-refinement: vertices are coloured
// by combinatorial invariants, refined to a stable partition, and ambiguous
// classes are split by branching; the lexicographically least relabelled
// complex over all branches is canonical.
struct Canonicalizer {
  const FiniteComplex2& K;
  std::vector<int> verts;
  std::map<int, int> index_of;
  std::vector<std::vector<int>> vadj;
  std::vector<std::vector<std::pair<int, int>>> tadj;  // per-vertex: other two (by index)

  explicit Canonicalizer(const FiniteComplex2& k) : K(k) {
    verts.assign(K.vertices.begin(), K.vertices.end());
    for (size_t i = 0; i < verts.size(); ++i) index_of[verts[i]] = int(i);
    vadj.resize(verts.size());
    tadj.resize(verts.size());
    for (const Edge& e : K.edges) {
      vadj[index_of[e.first]].push_back(index_of[e.second]);
      vadj[index_of[e.second]].push_back(index_of[e.first]);
    }
    for (const Tri& t : K.triangles) {
      int a = index_of[t[0]], b = index_of[t[1]], c = index_of[t[2]];
      tadj[a].push_back({std::min(b, c), std::max(b, c)});
      tadj[b].push_back({std::min(a, c), std::max(a, c)});
      tadj[c].push_back({std::min(a, b), std::max(a, b)});
    }
  }

  using Encoding = std::vector<int>;

  std::vector<int> refine(std::vector<int> color) const {
    const size_t n = verts.size();
    while (true) {
      std::vector<std::vector<int>> sig(n);
      for (size_t i = 0; i < n; ++i) {
        std::vector<int> s{color[i]};
        std::vector<int> ns;
        for (int j : vadj[i]) ns.push_back(color[j]);
        std::sort(ns.begin(), ns.end());
        s.push_back(-1);
        s.insert(s.end(), ns.begin(), ns.end());
        std::vector<std::pair<int, int>> ts;
        for (auto [a, b] : tadj[i])
          ts.push_back({std::min(color[a], color[b]), std::max(color[a], color[b])});
        std::sort(ts.begin(), ts.end());
        s.push_back(-2);
        for (auto [a, b] : ts) {
          s.push_back(a);
          s.push_back(b);
        }
        sig[i] = std::move(s);
      }
      std::map<std::vector<int>, int> order;
      for (const auto& s : sig) order.emplace(s, 0);
      int c = 0;
      for (auto& [s, id] : order) id = c++;
      std::vector<int> nc(n);
      for (size_t i = 0; i < n; ++i) nc[i] = order[sig[i]];
      if (nc == color) return color;
      color = std::move(nc);
    }
  }

  Encoding encode(const std::vector<int>& perm) const {
    // perm[i] = canonical label of vertex index i.
    std::vector<Edge> es;
    for (const Edge& e : K.edges)
      es.push_back(mk_edge(perm[index_of.at(e.first)], perm[index_of.at(e.second)]));
    std::sort(es.begin(), es.end());
    std::vector<Tri> ts;
    for (const Tri& t : K.triangles)
      ts.push_back(mk_tri(perm[index_of.at(t[0])], perm[index_of.at(t[1])], perm[index_of.at(t[2])]));
    std::sort(ts.begin(), ts.end());
    Encoding enc;
    enc.push_back(int(verts.size()));
    for (const Edge& e : es) {
      enc.push_back(e.first);
      enc.push_back(e.second);
    }
    enc.push_back(-1);
    for (const Tri& t : ts) enc.insert(enc.end(), t.begin(), t.end());
    return enc;
  }

  void search(std::vector<int> color, Encoding& best, bool& have) const {
    color = refine(color);
    const size_t n = verts.size();
    // Find the first class with more than one member.
    std::map<int, std::vector<int>> classes;
    for (size_t i = 0; i < n; ++i) classes[color[i]].push_back(int(i));
    int split = -1;
    for (const auto& [c, members] : classes)
      if (members.size() > 1) {
        split = c;
        break;
      }
    if (split == -1) {
      std::vector<int> perm(n);
      for (size_t i = 0; i < n; ++i) perm[i] = color[i];
      Encoding e = encode(perm);
      if (!have || e < best) {
        best = std::move(e);
        have = true;
      }
      return;
    }
    for (int m : classes[split]) {
      std::vector<int> c2(n);
      // Individualize m: classes above split shift up by one.
      for (size_t i = 0; i < n; ++i)
        c2[i] = (color[i] < split) ? color[i] : color[i] + 1;
      c2[m] = split;
      search(std::move(c2), best, have);
    }
  }
};

}  // namespace detail

// Canonical integer encoding of the isomorphism class of K.
inline std::vector<int> canonical_encoding(const FiniteComplex2& K) {
  if (K.vertices.empty()) return {0};
  detail::Canonicalizer cz(K);
  std::vector<int> color(cz.verts.size(), 0);
  std::vector<int> best;
  bool have = false;
  cz.search(color, best, have);
  return best;
}

inline bool isomorphic(const FiniteComplex2& A, const FiniteComplex2& B) {
  return canonical_encoding(A) == canonical_encoding(B);
}

// Bounded combinatorial-equivalence search: do the complexes admit a common
// refinement reachable by at most max_rounds single-edge simple subdivisions
// on each side? Yes is certain; Unknown means none found within the bound.
inline Ternary equivalent_bounded(const FiniteComplex2& A, const FiniteComplex2& B,
                                  int max_rounds, size_t cap = 20000) {
  using Enc = std::vector<int>;
  auto grow = [&](const std::vector<FiniteComplex2>& layer) {
    std::vector<FiniteComplex2> next;
    std::set<Enc> seen;
    for (const auto& K : layer)
      for (const Edge& e : K.edges) {
        FiniteComplex2 S = subdivide(K, {e});
        Enc enc = canonical_encoding(S);
        if (seen.insert(enc).second) next.push_back(std::move(S));
        if (next.size() > cap) return next;
      }
    return next;
  };
  std::vector<FiniteComplex2> la{A}, lb{B};
  std::set<Enc> seenA{canonical_encoding(A)}, seenB{canonical_encoding(B)};
  if (seenA == seenB) return Ternary::Yes;
  for (int r = 0; r < max_rounds; ++r) {
    la = grow(la);
    for (const auto& K : la) seenA.insert(canonical_encoding(K));
    lb = grow(lb);
    for (const auto& K : lb) seenB.insert(canonical_encoding(K));
    for (const auto& e : seenA)
      if (seenB.count(e)) return Ternary::Yes;
    if (la.empty() || lb.empty()) break;
  }
  return Ternary::Unknown;
}

}  // namespace surfclass
