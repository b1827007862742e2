#pragma once

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "surfclass/exhaustion.hpp"

namespace surfclass {
namespace blocks {

// All builtin blocks use boundary circles of length three, so any circle can
// be glued to any block input and no circle ever carries a chord.

// Disk bounded by one circle: a single triangle. Used as a seed, or with no
// outputs as a cap closing a circle for good.
inline AttachmentBlock disk() {
  AttachmentBlock b;
  b.K = complex_from_triangles({{0, 1, 2}});
  b.input = {0, 1, 2};
  return b;
}

// Disk capping a circle for good: a cone over the input circle. The apex
// keeps the cap's face set disjoint from whatever the circle already bounds.
inline AttachmentBlock cap() {
  AttachmentBlock b;
  b.K = complex_from_triangles({{0, 1, 3}, {1, 2, 3}, {0, 2, 3}});
  b.input = {0, 1, 2};
  return b;
}

// Annulus as a triangulated prism side: input circle 0-1-2, output 3-4-5.
inline AttachmentBlock annulus(const std::string& out_rule) {
  AttachmentBlock b;
  b.K = complex_from_triangles(
      {{0, 1, 4}, {0, 4, 3}, {1, 2, 5}, {1, 5, 4}, {2, 0, 3}, {2, 3, 5}});
  b.input = {0, 1, 2};
  b.outputs = {{{3, 4, 5}, out_rule}};
  return b;
}

// Torus minus two disjoint open triangles: genus one, two boundary circles.
// Faces are the 14 triangles {i,i+1,i+3} and {i,i+2,i+3} mod 7 with the two
// disjoint faces {0,1,3} and {2,4,5} removed.
inline AttachmentBlock handle(const std::vector<std::string>& out_rules) {
  std::vector<Tri> tris;
  for (int i = 0; i < 7; ++i) {
    Tri a = mk_tri(i, (i + 1) % 7, (i + 3) % 7);
    Tri c = mk_tri(i, (i + 2) % 7, (i + 3) % 7);
    if (a != mk_tri(0, 1, 3)) tris.push_back(a);
    if (c != mk_tri(2, 4, 5)) tris.push_back(c);
  }
  AttachmentBlock b;
  b.K = complex_from_triangles(tris);
  b.input = {0, 1, 3};
  if (out_rules.size() > 1) throw Error("handle block has one output circle");
  if (out_rules.size() == 1) b.outputs = {{{2, 4, 5}, out_rules[0]}};
  return b;
}

// Projective plane minus two disjoint open triangles: one crosscap, two
// boundary circles. Start from the 6-vertex projective plane, subdivide the
// edge {1,2} with a new vertex 7 so that two disjoint faces exist, then
// remove {1,3,7} and {2,4,5}.
inline AttachmentBlock crosscap(const std::vector<std::string>& out_rules) {
  std::vector<Tri> rp6 = {{1, 2, 3}, {1, 2, 4}, {1, 3, 5}, {1, 4, 6}, {1, 5, 6},
                          {2, 3, 6}, {2, 4, 5}, {2, 5, 6}, {3, 4, 5}, {3, 4, 6}};
  FiniteComplex2 K = complex_from_triangles(rp6);
  K = subdivide(K, {mk_edge(1, 2)});  // fresh vertex is 7
  std::vector<Tri> tris;
  for (const Tri& t : K.triangles)
    if (t != mk_tri(1, 3, 7) && t != mk_tri(2, 4, 5)) tris.push_back(t);
  AttachmentBlock b;
  b.K = complex_from_triangles(tris);
  b.input = {1, 3, 7};
  if (out_rules.size() > 1) throw Error("crosscap block has one output circle");
  if (out_rules.size() == 1) b.outputs = {{{2, 4, 5}, out_rules[0]}};
  return b;
}

// Sphere with m pairwise disjoint open triangles removed. Built from a
// triangular grid of side k = 2m coned off at an apex; the removed faces are
// the downward grid triangles at (0,0), (2,0), ..., (2m-2,0).
inline AttachmentBlock holed_sphere(int m, const std::vector<std::string>& out_rules) {
  if (m < 1) throw Error("holed_sphere: need at least one hole");
  if (int(out_rules.size()) != m - 1)
    throw Error("holed_sphere: one rule per output circle expected");
  int k = 2 * m;
  std::map<std::pair<int, int>, int> id;
  int next = 0;
  for (int i = 0; i <= k; ++i)
    for (int j = 0; i + j <= k; ++j) id[{i, j}] = next++;
  int apex = next++;

  std::vector<Tri> tris;
  for (int i = 0; i <= k - 1; ++i)
    for (int j = 0; i + j <= k - 1; ++j)
      tris.push_back(mk_tri(id[{i, j}], id[{i + 1, j}], id[{i, j + 1}]));
  std::set<Tri> punched;
  std::vector<std::vector<int>> circles;
  for (int t = 0; t < m; ++t) {
    int i = 2 * t, j = 0;
    punched.insert(mk_tri(id[{i + 1, j}], id[{i, j + 1}], id[{i + 1, j + 1}]));
    circles.push_back({id[{i + 1, j}], id[{i, j + 1}], id[{i + 1, j + 1}]});
  }
  for (int i = 0; i <= k - 2; ++i)
    for (int j = 0; i + j <= k - 2; ++j) {
      Tri dn = mk_tri(id[{i + 1, j}], id[{i, j + 1}], id[{i + 1, j + 1}]);
      if (!punched.count(dn)) tris.push_back(dn);
    }
  // Cone the outer boundary of the big triangle to the apex.
  for (int j = 0; j < k; ++j) tris.push_back(mk_tri(id[{0, j}], id[{0, j + 1}], apex));
  for (int i = 0; i < k; ++i) tris.push_back(mk_tri(id[{i, 0}], id[{i + 1, 0}], apex));
  for (int i = 0; i < k; ++i)
    tris.push_back(mk_tri(id[{i, k - i}], id[{i + 1, k - i - 1}], apex));

  AttachmentBlock b;
  b.K = complex_from_triangles(tris);
  b.input = circles[0];
  for (int t = 1; t < m; ++t) b.outputs.push_back({circles[t], out_rules[size_t(t) - 1]});
  return b;
}

// Pair of pants: sphere minus three disks, one input and two outputs.
inline AttachmentBlock pants(const std::string& left, const std::string& right) {
  return holed_sphere(3, {left, right});
}

}  // namespace blocks

namespace detail {

// Converts a block into a recipe base: the block's input circle becomes an
// ordinary boundary circle tagged with the given rule.
inline void base_from_block(SurfaceRecipe& r, const AttachmentBlock& b,
                            const std::string& input_rule) {
  r.base = b.K;
  if (!input_rule.empty()) r.base_outputs.push_back({b.input, input_rule});
  for (const auto& oc : b.outputs) r.base_outputs.push_back(oc);
}

}  // namespace detail

// Named one-ended, two-ended, and wilder reference surfaces.
//   plane              disk growing outward forever
//   cylinder           annulus growing at both circles
//   loch_ness          one handle added per stage, one circle
//   jacobs_ladder      a handle added at each of two circles per stage
//   cantor_complement  every circle splits in two per stage
//   flute              one growing end shedding a puncture per stage
//   prong(n)           sphere minus n points
//   crosscap_chain     one crosscap added per stage, one circle
inline SurfaceRecipe builtin_recipes(const std::string& name) {
  SurfaceRecipe r;
  r.kind = SurfaceRecipe::Periodic;
  auto grow_rule = [&](const std::string& rule) {
    r.rules["grow"] = blocks::annulus(rule);
  };
  if (name == "plane") {
    detail::base_from_block(r, blocks::disk(), "grow");
    grow_rule("grow");
    return r;
  }
  if (name == "cylinder") {
    AttachmentBlock a = blocks::annulus("grow");
    r.base = a.K;
    r.base_outputs = {{a.input, "grow"}, {a.outputs[0].first, "grow"}};
    grow_rule("grow");
    return r;
  }
  if (name == "loch_ness") {
    detail::base_from_block(r, blocks::disk(), "handle");
    r.rules["handle"] = blocks::handle({"handle"});
    return r;
  }
  if (name == "jacobs_ladder") {
    AttachmentBlock h = blocks::handle({"ladder"});
    r.base = h.K;
    r.base_outputs = {{h.input, "ladder"}, {h.outputs[0].first, "ladder"}};
    r.rules["ladder"] = blocks::handle({"ladder"});
    return r;
  }
  if (name == "cantor_complement") {
    // Both base circles split forever: the end tree is the full binary tree.
    AttachmentBlock hs = blocks::holed_sphere(2, {"split"});
    r.base = hs.K;
    r.base_outputs = {{hs.input, "split"}, {hs.outputs[0].first, "split"}};
    r.rules["split"] = blocks::pants("split", "split");
    return r;
  }
  if (name == "flute") {
    detail::base_from_block(r, blocks::disk(), "flute");
    r.rules["flute"] = blocks::pants("flute", "puncture");
    r.rules["puncture"] = blocks::annulus("puncture");
    return r;
  }
  if (name == "crosscap_chain") {
    detail::base_from_block(r, blocks::disk(), "crosscap");
    r.rules["crosscap"] = blocks::crosscap({"crosscap"});
    return r;
  }
  int n = 0;
  if (std::sscanf(name.c_str(), "prong(%d)", &n) == 1 && name == "prong(" + std::to_string(n) + ")") {
    if (n < 1) throw UnknownName(name);
    if (n == 1) {
      detail::base_from_block(r, blocks::disk(), "puncture");
    } else {
      std::vector<std::string> rules(size_t(n) - 1, "puncture");
      AttachmentBlock hs = blocks::holed_sphere(n, rules);
      r.base = hs.K;
      r.base_outputs.push_back({hs.input, "puncture"});
      for (const auto& oc : hs.outputs) r.base_outputs.push_back(oc);
    }
    r.rules["puncture"] = blocks::annulus("puncture");
    return r;
  }
  throw UnknownName(name);
}

inline std::vector<std::string> builtin_recipe_names() {
  return {"plane",  "cylinder", "loch_ness", "jacobs_ladder",
          "cantor_complement", "flute", "prong(2)", "prong(3)", "crosscap_chain"};
}

}  // namespace surfclass
