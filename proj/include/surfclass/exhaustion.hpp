#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "surfclass/simplicial.hpp"

namespace surfclass {

struct GluingMismatch : Error {
  using Error::Error;
};
struct UnknownName : Error {
  explicit UnknownName(const std::string& n) : Error("unknown builtin recipe: " + n) {}
};

// Nested bordered polyhedra P0 within P1 within ... presenting a surface from
// the inside out.
struct ExhaustionView {
  std::vector<FiniteComplex2> pieces;
};

// A bordered polyhedron with one designated input circle and any number of
// output circles, each output tagged with the rule to apply there next.
struct AttachmentBlock {
  FiniteComplex2 K;
  std::vector<int> input;  // boundary vertex cycle
  std::vector<std::pair<std::vector<int>, std::string>> outputs;
};

// Finite presentation of a surface: either a fully explicit nested view, or a
// seed polyhedron plus rewrite rules applied to every boundary circle forever.
struct SurfaceRecipe {
  enum Kind { Explicit, Periodic } kind = Periodic;
  ExhaustionView view;  // Explicit
  FiniteComplex2 base;  // Periodic
  std::vector<std::pair<std::vector<int>, std::string>> base_outputs;
  std::map<std::string, AttachmentBlock> rules;
};

// Attachment history of an expansion: one node per block instance, with the
// rule applied, creation stage, parent instance, and the circle it grew from.
struct ExpansionTrace {
  struct Node {
    int stage = 0;           // piece index where this instance first appears
    std::string rule;        // empty for the base
    int parent = -1;         // index into nodes
    std::vector<int> circle; // glued circle in global labels (empty for base)
  };
  std::vector<Node> nodes;                  // nodes[0] is the base
  std::vector<std::pair<std::vector<int>, std::string>> open_circles;  // last frontier
  std::vector<int> open_circle_owner;       // node index owning each open circle
};

namespace detail {

// Glues a block onto a frontier circle: the block's input cycle is identified
// with the circle (reversed, so boundary orientations cancel) and the rest of
// the block gets fresh labels starting at next_label.
inline std::map<int, int> glue_map(const AttachmentBlock& block, const std::vector<int>& circle,
                                   int& next_label) {
  const size_t L = circle.size();
  if (block.input.size() != L)
    throw GluingMismatch("circle of length " + std::to_string(L) +
                         " glued to block input of length " + std::to_string(block.input.size()));
  std::map<int, int> m;
  for (size_t j = 0; j < L; ++j) m[block.input[j]] = circle[(L - j) % L];
  for (int v : block.K.vertices)
    if (!m.count(v)) m[v] = next_label++;
  return m;
}

inline void merge_mapped(FiniteComplex2& P, const FiniteComplex2& B, const std::map<int, int>& m) {
  for (int v : B.vertices) P.vertices.insert(m.at(v));
  for (const Edge& e : B.edges) P.edges.insert(mk_edge(m.at(e.first), m.at(e.second)));
  for (const Tri& t : B.triangles)
    P.triangles.insert(mk_tri(m.at(t[0]), m.at(t[1]), m.at(t[2])));
}

}  // namespace detail

// Deterministic expansion of a recipe to the requested depth, together with
// the attachment history. Produces depth+1 nested pieces.
inline std::pair<ExhaustionView, ExpansionTrace> expand_traced(const SurfaceRecipe& r, int depth) {
  if (depth < 0) throw Error("expand: negative depth");
  if (r.kind == SurfaceRecipe::Explicit) {
    if (r.view.pieces.empty()) throw Error("expand: empty explicit view");
    if (size_t(depth) >= r.view.pieces.size())
      throw Error("expand: depth exceeds explicit view length");
    ExhaustionView v;
    v.pieces.assign(r.view.pieces.begin(), r.view.pieces.begin() + depth + 1);
    ExpansionTrace tr;
    tr.nodes.push_back({0, "", -1, {}});
    return {v, tr};
  }

  ExhaustionView v;
  ExpansionTrace tr;
  FiniteComplex2 P = r.base;
  v.pieces.push_back(P);
  tr.nodes.push_back({0, "", -1, {}});
  int next_label = P.vertices.empty() ? 0 : *P.vertices.rbegin() + 1;
  std::vector<std::pair<std::vector<int>, std::string>> frontier = r.base_outputs;
  std::vector<int> owner(frontier.size(), 0);

  for (int stage = 1; stage <= depth; ++stage) {
    std::vector<std::pair<std::vector<int>, std::string>> next;
    std::vector<int> next_owner;
    for (size_t f = 0; f < frontier.size(); ++f) {
      const auto& [circle, rulename] = frontier[f];
      auto it = r.rules.find(rulename);
      if (it == r.rules.end()) throw Error("expand: no rule named '" + rulename + "'");
      const AttachmentBlock& block = it->second;
      auto m = detail::glue_map(block, circle, next_label);
      detail::merge_mapped(P, block.K, m);
      int node_id = int(tr.nodes.size());
      tr.nodes.push_back({stage, rulename, owner[f], circle});
      for (const auto& [ocyc, orule] : block.outputs) {
        std::vector<int> mapped;
        mapped.reserve(ocyc.size());
        for (int x : ocyc) mapped.push_back(m.at(x));
        next.push_back({std::move(mapped), orule});
        next_owner.push_back(node_id);
      }
    }
    v.pieces.push_back(P);
    frontier = std::move(next);
    owner = std::move(next_owner);
  }
  tr.open_circles = frontier;
  tr.open_circle_owner = owner;
  return {v, tr};
}

inline ExhaustionView expand(const SurfaceRecipe& r, int depth) {
  return expand_traced(r, depth).first;
}

struct CanonicalCheck {
  bool ok = true;
  std::string violation;  // empty when ok
  int stage = -1;
};

// The nesting conditions: every piece a connected (bordered) polyhedron, each
// piece a subcomplex of the next, the next piece's border disjoint from the
// current piece, and all new material attached along the current border.
inline CanonicalCheck validate_canonical(const ExhaustionView& v) {
  for (size_t n = 0; n < v.pieces.size(); ++n) {
    SurfaceKind sk = surface_check(v.pieces[n]);
    if (sk.kind == SurfaceKind::NotSurface)
      return {false, "piece is not a connected polyhedron: " + sk.witness, int(n)};
  }
  for (size_t n = 0; n + 1 < v.pieces.size(); ++n) {
    const FiniteComplex2 &a = v.pieces[n], &b = v.pieces[n + 1];
    if (!is_subcomplex(b, a)) return {false, "piece is not a subcomplex of its successor", int(n)};
    std::set<Edge> border_b = boundary_edges(b);
    for (const Edge& e : border_b) {
      if (a.edges.count(e))
        return {false, "border edge of the successor lies in the piece", int(n)};
      if (a.vertices.count(e.first) || a.vertices.count(e.second))
        return {false, "border vertex of the successor lies in the piece", int(n)};
    }
    for (const auto& piece : complement_span(b, a)) {
      bool touches = false;
      std::set<Edge> border_a = boundary_edges(a);
      for (const Edge& e : piece.frontier)
        if (border_a.count(e)) touches = true;
      if (!piece.frontier.empty() && !touches)
        return {false, "new material not attached along the border", int(n)};
    }
  }
  return {};
}

enum class OClass { Orientable, InfinitelyNonorientable, OddNonorientable, EvenNonorientable };

inline const char* oclass_str(OClass c) {
  switch (c) {
    case OClass::Orientable: return "orientable";
    case OClass::InfinitelyNonorientable: return "infinitely_nonorientable";
    case OClass::OddNonorientable: return "odd_nonorientable";
    default: return "even_nonorientable";
  }
}

struct GenusLimit {
  bool infinite = false;
  long long value = 0;  // when finite
  bool certified = false;
  int depth = 0;  // witness depth when not certified
};
struct OClassLimit {
  OClass value = OClass::Orientable;
  bool certified = false;
  int depth = 0;
};
struct BoolLimit {
  bool value = false;
  bool certified = false;
  int depth = 0;
};
struct LimitInvariants {
  GenusLimit genus;
  OClassLimit oclass;
  BoolLimit planar;
};

namespace detail {

// Genus convention for a single bordered piece: handle count; a pair of
// crosscaps counts as one handle's worth on nonorientable pieces.
inline long long piece_genus(const PieceInvariants& inv) {
  return inv.orientable ? inv.genus : inv.crosscaps / 2;
}

// Rule names that recur forever: reachable from the base and lying on or
// downstream of a directed cycle of the rule graph.
struct RuleAnalysis {
  std::set<std::string> reachable;
  std::set<std::string> recurrent;  // occur infinitely often in the expansion
};

inline RuleAnalysis analyze_rules(const SurfaceRecipe& r) {
  RuleAnalysis ra;
  std::vector<std::string> work;
  for (const auto& [c, rule] : r.base_outputs)
    if (ra.reachable.insert(rule).second) work.push_back(rule);
  while (!work.empty()) {
    std::string cur = work.back();
    work.pop_back();
    auto it = r.rules.find(cur);
    if (it == r.rules.end()) throw Error("recipe references unknown rule '" + cur + "'");
    for (const auto& [c, rule] : it->second.outputs)
      if (ra.reachable.insert(rule).second) work.push_back(rule);
  }
  // Successor closure within the reachable set.
  auto succs = [&](const std::string& s) {
    std::set<std::string> out;
    for (const auto& [c, rule] : r.rules.at(s).outputs) out.insert(rule);
    return out;
  };
  auto reaches = [&](const std::string& from, const std::string& to) {
    std::set<std::string> seen{from};
    std::vector<std::string> w{from};
    while (!w.empty()) {
      std::string cur = w.back();
      w.pop_back();
      for (const auto& nx : succs(cur)) {
        if (nx == to) return true;
        if (seen.insert(nx).second) w.push_back(nx);
      }
    }
    return false;
  };
  std::set<std::string> cyclic;
  for (const auto& s : ra.reachable)
    if (reaches(s, s)) cyclic.insert(s);
  for (const auto& s : ra.reachable)
    for (const auto& c : cyclic)
      if (c == s || reaches(c, s)) ra.recurrent.insert(s);
  return ra;
}

}  // namespace detail

// Limit invariants of the presented surface. Periodic recipes are certified
// by analysing which rules recur forever: a recurring nonplanar block forces
// infinite genus, a recurring nonorientable block forces infinite
// nonorientability, and otherwise everything stabilizes by the time every
// transient rule has fired, so the value read off a deep enough piece is
// final. Explicit views are witnesses only, unless they end closed.
inline LimitInvariants limit_invariants(const SurfaceRecipe& r, int depth) {
  LimitInvariants out;
  if (r.kind == SurfaceRecipe::Explicit) {
    int d = int(r.view.pieces.size()) - 1;
    if (depth >= 0 && depth < d) d = depth;
    const FiniteComplex2& last = r.view.pieces[size_t(d)];
    PieceInvariants inv = invariants(last);
    bool closed = surface_check(last).kind == SurfaceKind::Closed;
    out.genus = {false, detail::piece_genus(inv), closed, d};
    OClass oc = inv.orientable ? OClass::Orientable
                               : (inv.crosscaps % 2 ? OClass::OddNonorientable
                                                    : OClass::EvenNonorientable);
    out.oclass = {oc, closed, d};
    out.planar = {inv.orientable && inv.genus == 0, closed, d};
    return out;
  }

  detail::RuleAnalysis ra = detail::analyze_rules(r);
  bool recurring_nonplanar = false, recurring_nonorientable = false;
  bool all_orientable = invariants(r.base).orientable;
  for (const auto& name : ra.reachable) {
    PieceInvariants bi = invariants(r.rules.at(name).K);
    if (!bi.orientable) all_orientable = false;
    if (ra.recurrent.count(name)) {
      if (bi.genus > 0 || bi.crosscaps > 0) recurring_nonplanar = true;
      if (!bi.orientable) recurring_nonorientable = true;
    }
  }
  // Transient rules all fire within this many stages.
  int stable = int(ra.reachable.size()) + 2;
  int d = std::max(depth, stable);
  ExhaustionView v = expand(r, d);
  PieceInvariants last = invariants(v.pieces.back());

  if (recurring_nonplanar) out.genus = {true, 0, true, d};
  else out.genus = {false, detail::piece_genus(last), true, d};

  if (all_orientable) out.oclass = {OClass::Orientable, true, d};
  else if (recurring_nonorientable) out.oclass = {OClass::InfinitelyNonorientable, true, d};
  else {
    // Finitely many crosscaps, all present by the stable depth.
    out.oclass = {last.crosscaps % 2 ? OClass::OddNonorientable : OClass::EvenNonorientable,
                  true, d};
  }
  out.planar = {all_orientable && !out.genus.infinite && out.genus.value == 0,
                out.genus.certified && out.oclass.certified, d};
  return out;
}

}  // namespace surfclass
