#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <surfclass/endtree.hpp>
#include <surfclass/exhaustion.hpp>
#include <surfclass/simplicial.hpp>

namespace surfclass {

struct NotClosedSurface : Error {
  using Error::Error;
};

// Homeomorphism class of a closed connected surface.
struct CompactClass {
  bool orientable = true;
  int genus_or_crosscaps = 0;  // handle count, or crosscap count when nonorientable
  friend bool operator==(const CompactClass&, const CompactClass&) = default;
  friend bool operator<(const CompactClass& a, const CompactClass& b) {
    return std::tie(a.orientable, a.genus_or_crosscaps) < std::tie(b.orientable, b.genus_or_crosscaps);
  }
};

// Complete invariant for closed connected polyhedra: orientability plus the
// handle/crosscap count recovered from the Euler characteristic.
inline CompactClass classify_compact(const FiniteComplex2& K) {
  if (K.triangles.empty()) throw NotClosedSurface("empty complex");
  SurfaceKind sk = surface_check(K);
  if (sk.kind == SurfaceKind::NotSurface) throw NotClosedSurface("not a surface: " + sk.witness);
  if (sk.kind == SurfaceKind::Bordered) throw NotClosedSurface("surface has boundary");
  if (!detail::skeleton_connected(K)) throw NotClosedSurface("not connected");
  PieceInvariants inv = invariants(K);
  return {inv.orientable, inv.orientable ? inv.genus : inv.crosscaps};
}

// The full invariant of a borderless surface presented by a recipe: limit
// genus, orientability class, the end triple, and its branch counts — each
// with its own certainty flag.
struct RichardsInvariant {
  GenusLimit genus;
  OClassLimit oclass;
  EndTriple triple;
  EndCounts counts;
};

inline RichardsInvariant classify_surface(const SurfaceRecipe& r, int depth) {
  RichardsInvariant out;
  LimitInvariants li = limit_invariants(r, depth);
  out.genus = li.genus;
  out.oclass = li.oclass;
  out.triple = end_triple(r, depth);
  out.counts = count_ends(out.triple);
  return out;
}

struct HomeoVerdict {
  Ternary verdict = Ternary::Unknown;
  std::string certificate;  // set on Yes
  std::string witness;      // set on No
  int depth = 0;
};

namespace detail {

inline bool blocks_equal(const AttachmentBlock& a, const AttachmentBlock& b) {
  return a.K == b.K && a.input == b.input && a.outputs == b.outputs;
}

inline bool recipes_equal(const SurfaceRecipe& a, const SurfaceRecipe& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == SurfaceRecipe::Explicit) return a.view.pieces == b.view.pieces;
  if (!(a.base == b.base) || a.base_outputs != b.base_outputs) return false;
  if (a.rules.size() != b.rules.size()) return false;
  for (const auto& [name, blk] : a.rules) {
    auto it = b.rules.find(name);
    if (it == b.rules.end() || !blocks_equal(blk, it->second)) return false;
  }
  return true;
}

inline std::string genus_str(const GenusLimit& g) {
  return g.infinite ? std::string("infinite") : std::to_string(g.value);
}

// ---- recipe bisimulation ----------------------------------------------------

// States are the base plus every reachable rule of each presentation. Two
// states may only be related when their blocks carry the same bordered
// invariants (which pin the block down up to homeomorphism, boundary count
// included); the relation is refined until related states also have related
// child multisets. Relating the two bases then yields a level-by-level
// correspondence of the exhaustions, hence a homeomorphism — a sound but not
// necessary criterion.
struct Bisimulation {
  bool related = false;
  std::string pairing;  // state correspondence, base listed first
};

inline Bisimulation recipe_bisimulation(const SurfaceRecipe& a, const SurfaceRecipe& b) {
  struct State {
    int side;
    std::string name;  // "" for the base
  };
  std::vector<State> states;
  std::vector<std::vector<int>> children;  // indices into `states`
  std::vector<std::tuple<int, int, int, int>> sig;

  auto add_side = [&](const SurfaceRecipe& r, int side) {
    std::map<std::string, int> idx;
    std::vector<std::string> todo;
    auto intern = [&](const std::string& name) {
      auto it = idx.find(name);
      if (it != idx.end()) return it->second;
      int id = int(states.size());
      idx[name] = id;
      states.push_back({side, name});
      children.emplace_back();
      sig.emplace_back();
      todo.push_back(name);
      return id;
    };
    int base_id = intern("");
    while (!todo.empty()) {
      std::string name = todo.back();
      todo.pop_back();
      int id = idx[name];
      const FiniteComplex2* K = nullptr;
      const std::vector<std::pair<std::vector<int>, std::string>>* outs = nullptr;
      if (name.empty()) {
        K = &r.base;
        outs = &r.base_outputs;
      } else {
        auto it = r.rules.find(name);
        if (it == r.rules.end()) throw UnknownName("rule not defined: " + name);
        K = &it->second.K;
        outs = &it->second.outputs;
      }
      PieceInvariants inv = invariants(*K);
      sig[size_t(id)] = {name.empty() ? 0 : 1, inv.orientable ? 0 : 1,
                         inv.orientable ? inv.genus : inv.crosscaps, inv.boundary_circles};
      for (const auto& [circle, rule] : *outs) {
        (void)circle;
        int child = intern(rule);  // may grow `children`; index afterwards
        children[size_t(id)].push_back(child);
      }
    }
    return base_id;
  };
  int base_a = add_side(a, 0);
  int base_b = add_side(b, 1);

  // Initial partition by block signature, then refine by child-class multisets.
  std::map<std::tuple<int, int, int, int>, int> by_sig;
  std::vector<int> cls(states.size());
  for (size_t i = 0; i < states.size(); ++i)
    cls[i] = by_sig.emplace(sig[i], int(by_sig.size())).first->second;
  for (;;) {
    std::map<std::pair<int, std::vector<int>>, int> fresh;
    std::vector<int> next(states.size());
    for (size_t i = 0; i < states.size(); ++i) {
      std::vector<int> kids;
      for (int c : children[i]) kids.push_back(cls[size_t(c)]);
      std::sort(kids.begin(), kids.end());
      next[i] = fresh.emplace(std::make_pair(cls[i], std::move(kids)), int(fresh.size())).first->second;
    }
    bool stable = true;
    for (size_t i = 0; i < states.size() && stable; ++i)
      for (size_t j = i + 1; j < states.size(); ++j)
        if ((cls[i] == cls[j]) != (next[i] == next[j])) {
          stable = false;
          break;
        }
    cls = std::move(next);
    if (stable) break;
  }

  Bisimulation out;
  out.related = cls[size_t(base_a)] == cls[size_t(base_b)];
  if (!out.related) return out;
  // Report one representative pairing per class that spans both sides.
  std::map<int, std::pair<std::string, std::string>> reps;
  std::map<int, std::pair<bool, bool>> seen;
  for (size_t i = 0; i < states.size(); ++i) {
    auto& r = reps[cls[i]];
    auto& s = seen[cls[i]];
    auto label = [&](const State& st) { return st.name.empty() ? std::string("base") : st.name; };
    if (states[i].side == 0 && !s.first) r.first = label(states[i]), s.first = true;
    if (states[i].side == 1 && !s.second) r.second = label(states[i]), s.second = true;
  }
  std::string sep;
  for (auto& [c, r] : reps) {
    if (!seen[c].first || !seen[c].second) continue;
    out.pairing += sep + r.first + "~" + r.second;
    sep = ", ";
  }
  return out;
}

}  // namespace detail

// Decides homeomorphism of the presented surfaces where the certified data
// suffices. No needs one certified invariant to differ; Yes needs certified
// agreement of genus and orientability class plus either exact finite end
// counts (where the counts determine the end triple) or a recipe
// bisimulation. Everything else is Unknown at the probed depth.
inline HomeoVerdict homeomorphic(const SurfaceRecipe& a, const SurfaceRecipe& b, int depth) {
  HomeoVerdict v;
  v.depth = depth;
  if (detail::recipes_equal(a, b)) {
    v.verdict = Ternary::Yes;
    v.certificate = "identical presentations";
    return v;
  }
  RichardsInvariant ia = classify_surface(a, depth);
  RichardsInvariant ib = classify_surface(b, depth);

  if (ia.genus.certified && ib.genus.certified &&
      (ia.genus.infinite != ib.genus.infinite ||
       (!ia.genus.infinite && ia.genus.value != ib.genus.value))) {
    v.verdict = Ternary::No;
    v.witness = "genus " + detail::genus_str(ia.genus) + " vs " + detail::genus_str(ib.genus);
    return v;
  }
  if (ia.oclass.certified && ib.oclass.certified && ia.oclass.value != ib.oclass.value) {
    v.verdict = Ternary::No;
    v.witness = std::string("orientability class ") + oclass_str(ia.oclass.value) + " vs " +
                oclass_str(ib.oclass.value);
    return v;
  }
  Distinction d = distinguish(ia.triple, ib.triple, depth);
  if (d.distinguished) {
    v.verdict = Ternary::No;
    v.witness = d.invariant + ": " + d.left + " vs " + d.right;
    return v;
  }

  bool invariants_certified_equal = ia.genus.certified && ib.genus.certified &&
                                    ia.oclass.certified && ib.oclass.certified;
  if (invariants_certified_equal) {
    const EndCounts& ca = ia.counts;
    const EndCounts& cb = ib.counts;
    bool exact = ca.certified && cb.certified && ca.total.exact && ca.nonplanar.exact &&
                 ca.nonorientable.exact && cb.total.exact && cb.nonplanar.exact &&
                 cb.nonorientable.exact;
    if (exact && ca.total.n == cb.total.n && ca.nonplanar.n == cb.nonplanar.n &&
        ca.nonorientable.n == cb.nonorientable.n) {
      v.verdict = Ternary::Yes;
      v.certificate = "certified invariants agree: genus " + detail::genus_str(ia.genus) + ", " +
                      oclass_str(ia.oclass.value) + ", end counts (" + std::to_string(ca.total.n) +
                      ", " + std::to_string(ca.nonplanar.n) + ", " +
                      std::to_string(ca.nonorientable.n) + ")";
      return v;
    }
    if (a.kind == SurfaceRecipe::Periodic && b.kind == SurfaceRecipe::Periodic) {
      detail::Bisimulation bi = detail::recipe_bisimulation(a, b);
      if (bi.related) {
        v.verdict = Ternary::Yes;
        v.certificate = "recipe bisimulation: " + bi.pairing;
        return v;
      }
    }
  }
  return v;
}

// Per-component invariants of a list of presentations, with the full pairwise
// decision matrix (diagonal included).
struct CollectionClassification {
  std::vector<RichardsInvariant> components;
  std::vector<std::vector<HomeoVerdict>> matrix;
};

inline CollectionClassification classify_collection(const std::vector<SurfaceRecipe>& rs,
                                                    int depth) {
  CollectionClassification out;
  for (const SurfaceRecipe& r : rs) out.components.push_back(classify_surface(r, depth));
  out.matrix.resize(rs.size());
  for (size_t i = 0; i < rs.size(); ++i) {
    out.matrix[i].resize(rs.size());
    for (size_t j = 0; j < rs.size(); ++j) out.matrix[i][j] = homeomorphic(rs[i], rs[j], depth);
  }
  return out;
}

namespace detail {

// Kuhn's augmenting-path matching on an adjacency predicate.
inline int max_matching(int n, const std::vector<std::vector<char>>& adj) {
  std::vector<int> match_b(size_t(n), -1);
  int matched = 0;
  for (int i = 0; i < n; ++i) {
    std::vector<char> used(size_t(n), 0);
    std::function<bool(int)> try_kuhn = [&](int u) {
      for (int w = 0; w < n; ++w) {
        if (!adj[size_t(u)][size_t(w)] || used[size_t(w)]) continue;
        used[size_t(w)] = 1;
        if (match_b[size_t(w)] < 0 || try_kuhn(match_b[size_t(w)])) {
          match_b[size_t(w)] = u;
          return true;
        }
      }
      return false;
    };
    if (try_kuhn(i)) ++matched;
  }
  return matched;
}

}  // namespace detail

// Equality of unordered collections: Yes needs a bijection of components with
// pairwise Yes; No holds when even the unresolved pairs cannot complete a
// bijection (or the sizes differ); otherwise Unknown.
inline HomeoVerdict collections_equal(const std::vector<SurfaceRecipe>& as,
                                      const std::vector<SurfaceRecipe>& bs, int depth) {
  HomeoVerdict v;
  v.depth = depth;
  if (as.size() != bs.size()) {
    v.verdict = Ternary::No;
    v.witness = "component counts " + std::to_string(as.size()) + " vs " + std::to_string(bs.size());
    return v;
  }
  int n = int(as.size());
  if (n == 0) {
    v.verdict = Ternary::Yes;
    v.certificate = "both empty";
    return v;
  }
  std::vector<std::vector<char>> yes(size_t(n), std::vector<char>(size_t(n), 0));
  std::vector<std::vector<char>> maybe = yes;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Ternary t = homeomorphic(as[size_t(i)], bs[size_t(j)], depth).verdict;
      yes[size_t(i)][size_t(j)] = t == Ternary::Yes;
      maybe[size_t(i)][size_t(j)] = t != Ternary::No;
    }
  if (detail::max_matching(n, yes) == n) {
    v.verdict = Ternary::Yes;
    v.certificate = "bijection with pairwise matches";
    return v;
  }
  if (detail::max_matching(n, maybe) < n) {
    v.verdict = Ternary::No;
    v.witness = "no bijection avoids a distinguished pair";
    return v;
  }
  return v;
}

// Subdivides every block of a periodic presentation on one interior edge
// (where one exists); boundary circles are untouched, so the rewrite system
// is unchanged. Explicit views are returned as-is.
inline SurfaceRecipe subdivide_recipe_blocks(const SurfaceRecipe& r) {
  SurfaceRecipe out = r;
  if (r.kind != SurfaceRecipe::Periodic) return out;
  auto split_one = [](FiniteComplex2& K) {
    std::set<Edge> border = boundary_edges(K);
    for (const Edge& e : K.edges)
      if (!border.count(e)) {
        K = subdivide(K, {e});
        return;
      }
  };
  split_one(out.base);
  for (auto& [name, blk] : out.rules) split_one(blk.K);
  return out;
}

}  // namespace surfclass
