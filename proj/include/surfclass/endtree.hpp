#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "surfclass/exhaustion.hpp"

namespace surfclass {

struct CountsNotCertified : Error {
  using Error::Error;
};

// A branch count that is either exact or a lower bound ("at least n").
struct EndCount {
  long long n = 0;
  bool exact = false;
  friend bool operator==(const EndCount&, const EndCount&) = default;
};

struct EndCounts {
  EndCount total, nonplanar, nonorientable;
  bool certified = false;  // counts (incl. lower bounds) backed by rule analysis
};

// Rooted finitely-branching tree whose level-n nodes are the persistent
// complementary components of the n-th piece of an exhaustion. Node markers
// say whether the component is (or provably becomes) nonplanar or
// nonorientable; marked nodes form rooted subtrees because a component
// inherits everything its subcomponents contain.
struct LabelledTree {
  struct Node {
    int parent = -1;
    int level = 0;
    std::vector<int> children;  // creation order = canonical component order
    int component = -1;         // attachment id; -1 for synthetic nodes
    std::string state;          // rule presentation, "" for the base/root
    bool np = false;            // nonplanar marker
    bool no = false;            // nonorientable marker
  };
  std::vector<Node> nodes;  // nodes[0] is the root when nonempty
  int depth = 0;            // level of the deepest layer
  bool open = true;         // false when the surface is already closed

  // Finite presentation for periodically generated trees: each state expands
  // to an ordered multiset of child states forever.
  struct Automaton {
    std::string start;
    std::map<std::string, std::vector<std::string>> delta;
    std::map<std::string, bool> np, no;
  };
  std::optional<Automaton> automaton;
};

// End space presentation: the tree T with its two nested marker subtrees.
struct EndTriple {
  LabelledTree T;
  int depth = 0;
  bool np_certified = false;  // markers final, not just witnessed at this depth
  bool no_certified = false;
  bool unary_convention = false;  // set when binary_embed padded a 1-child node
};

namespace detail {

// ---- rule graph facts -------------------------------------------------------

// Static analysis of a periodic recipe's rule graph. State "" is the base.
struct RuleFacts {
  std::vector<std::string> states;  // states[0] == ""
  std::map<std::string, int> index;
  std::vector<std::vector<int>> delta;  // ordered child multiset
  std::vector<char> block_np, block_no;
  std::vector<char> viable;    // an infinite continuation exists
  std::vector<char> reach_np;  // some reachable block (incl. own) is nonplanar
  std::vector<char> reach_no;
};

inline bool complex_nonplanar(const FiniteComplex2& K) {
  PieceInvariants inv = invariants(K);
  return inv.genus > 0 || inv.crosscaps > 0;
}

inline RuleFacts rule_facts(const SurfaceRecipe& r) {
  RuleFacts f;
  f.states.push_back("");
  f.index[""] = 0;
  std::vector<std::string> work{""};
  auto outputs_of = [&](const std::string& s)
      -> const std::vector<std::pair<std::vector<int>, std::string>>& {
    return s.empty() ? r.base_outputs : r.rules.at(s).outputs;
  };
  while (!work.empty()) {
    std::string cur = work.back();
    work.pop_back();
    if (!cur.empty() && !r.rules.count(cur))
      throw Error("recipe references unknown rule '" + cur + "'");
    for (const auto& [c, rule] : outputs_of(cur))
      if (!f.index.count(rule)) {
        f.index[rule] = int(f.states.size());
        f.states.push_back(rule);
        work.push_back(rule);
      }
  }
  int m = int(f.states.size());
  f.delta.resize(size_t(m));
  f.block_np.assign(size_t(m), 0);
  f.block_no.assign(size_t(m), 0);
  for (int i = 0; i < m; ++i) {
    for (const auto& [c, rule] : outputs_of(f.states[size_t(i)]))
      f.delta[size_t(i)].push_back(f.index.at(rule));
    const FiniteComplex2& K = f.states[size_t(i)].empty() ? r.base : r.rules.at(f.states[size_t(i)]).K;
    PieceInvariants inv = invariants(K);
    f.block_np[size_t(i)] = (inv.genus > 0 || inv.crosscaps > 0);
    f.block_no[size_t(i)] = !inv.orientable;
  }
  // viable: can keep growing forever = reaches a directed cycle.
  auto closure = [&](int s) {
    std::set<int> seen{s};
    std::vector<int> w{s};
    while (!w.empty()) {
      int cur = w.back();
      w.pop_back();
      for (int c : f.delta[size_t(cur)])
        if (seen.insert(c).second) w.push_back(c);
    }
    return seen;
  };
  std::vector<char> cyclic(size_t(m), 0);
  for (int s = 0; s < m; ++s)
    for (int c : f.delta[size_t(s)]) {
      if (c == s) cyclic[size_t(s)] = 1;
      else if (closure(c).count(s)) cyclic[size_t(s)] = 1;
    }
  f.viable.assign(size_t(m), 0);
  f.reach_np.assign(size_t(m), 0);
  f.reach_no.assign(size_t(m), 0);
  for (int s = 0; s < m; ++s) {
    for (int t : closure(s)) {
      if (cyclic[size_t(t)]) f.viable[size_t(s)] = 1;
      if (f.block_np[size_t(t)]) f.reach_np[size_t(s)] = 1;
      if (f.block_no[size_t(t)]) f.reach_no[size_t(s)] = 1;
    }
  }
  return f;
}

// ---- automaton branch-space algorithms -------------------------------------

// Indexed form of a tree automaton restricted to a live state set.
struct IndexedAut {
  std::vector<std::string> states;
  std::map<std::string, int> index;
  std::vector<std::vector<int>> delta;
  int start = -1;
  std::vector<char> np, no;
};

inline IndexedAut index_automaton(const LabelledTree::Automaton& a) {
  IndexedAut ia;
  for (const auto& [s, kids] : a.delta)
    if (!ia.index.count(s)) {
      ia.index[s] = int(ia.states.size());
      ia.states.push_back(s);
    }
  auto need = [&](const std::string& s) {
    if (!ia.index.count(s)) {
      ia.index[s] = int(ia.states.size());
      ia.states.push_back(s);
    }
    return ia.index.at(s);
  };
  need(a.start);
  for (const auto& [s, kids] : a.delta)
    for (const auto& k : kids) need(k);
  ia.delta.resize(ia.states.size());
  for (const auto& [s, kids] : a.delta)
    for (const auto& k : kids) ia.delta[size_t(ia.index.at(s))].push_back(ia.index.at(k));
  ia.start = ia.index.at(a.start);
  ia.np.assign(ia.states.size(), 0);
  ia.no.assign(ia.states.size(), 0);
  for (const auto& [s, v] : a.np)
    if (ia.index.count(s)) ia.np[size_t(ia.index.at(s))] = v;
  for (const auto& [s, v] : a.no)
    if (ia.index.count(s)) ia.no[size_t(ia.index.at(s))] = v;
  return ia;
}

// Keeps only states with an infinite continuation inside `live`.
inline std::vector<char> viable_within(const IndexedAut& a, std::vector<char> live) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t s = 0; s < live.size(); ++s) {
      if (!live[s]) continue;
      bool has = false;
      for (int c : a.delta[s])
        if (live[size_t(c)]) has = true;
      if (!has) {
        live[s] = 0;
        changed = true;
      }
    }
  }
  return live;
}

inline constexpr long long kInfinite = -1;
inline constexpr long long kCountCap = 1000000000LL;

// Number of infinite branches below a state, within live states: finite
// exactly when no reachable cycle can be left or forked.
inline long long branch_count_below(const IndexedAut& a, const std::vector<char>& live, int s,
                                    std::map<int, long long>& memo) {
  if (!live[size_t(s)]) return 0;
  auto it = memo.find(s);
  if (it != memo.end()) return it->second;
  // Does s sit on a cycle (within live)?
  std::set<int> seen{s};
  std::vector<int> w{s};
  bool on_cycle = false;
  while (!w.empty() && !on_cycle) {
    int cur = w.back();
    w.pop_back();
    for (int c : a.delta[size_t(cur)]) {
      if (!live[size_t(c)]) continue;
      if (c == s) on_cycle = true;
      else if (seen.insert(c).second) w.push_back(c);
    }
  }
  if (on_cycle) {
    // The cycle carries one branch iff the whole strongly connected part is
    // deterministic and closed; any fork or exit spawns infinitely many.
    std::set<int> scc;
    for (int t : seen) {
      if (t == s) { scc.insert(t); continue; }
      std::set<int> back{t};
      std::vector<int> w2{t};
      bool reaches_s = false;
      while (!w2.empty() && !reaches_s) {
        int cur = w2.back();
        w2.pop_back();
        for (int c : a.delta[size_t(cur)]) {
          if (!live[size_t(c)]) continue;
          if (c == s) reaches_s = true;
          else if (back.insert(c).second) w2.push_back(c);
        }
      }
      if (reaches_s) scc.insert(t);
    }
    bool det = true;
    for (int t : scc) {
      int k = 0;
      bool inside = true;
      for (int c : a.delta[size_t(t)])
        if (live[size_t(c)]) {
          ++k;
          if (!scc.count(c)) inside = false;
        }
      if (k != 1 || !inside) det = false;
    }
    long long v = det ? 1 : kInfinite;
    memo[s] = v;
    return v;
  }
  long long total = 0;
  for (int c : a.delta[size_t(s)]) {
    if (!live[size_t(c)]) continue;
    long long sub = branch_count_below(a, live, c, memo);
    if (sub == kInfinite || total == kInfinite) total = kInfinite;
    else total = std::min(total + sub, kCountCap);
  }
  memo[s] = total;
  return total;
}

// Distinct state paths of the given edge length from the start: a certified
// lower bound for the branch count when it is infinite.
inline long long path_probe(const IndexedAut& a, const std::vector<char>& live, int steps) {
  if (a.start < 0 || !live[size_t(a.start)]) return 0;
  std::vector<long long> dp(a.states.size(), 0);
  dp[size_t(a.start)] = 1;
  for (int t = 0; t < steps; ++t) {
    std::vector<long long> nx(a.states.size(), 0);
    for (size_t s = 0; s < dp.size(); ++s) {
      if (!dp[s] || !live[s]) continue;
      for (int c : a.delta[s])
        if (live[size_t(c)]) nx[size_t(c)] = std::min(nx[size_t(c)] + dp[s], kCountCap);
    }
    dp = std::move(nx);
  }
  long long total = 0;
  for (size_t s = 0; s < dp.size(); ++s)
    if (live[s]) total = std::min(total + dp[s], kCountCap);
  return total;
}

inline EndCount automaton_count(const IndexedAut& a, const std::vector<char>& live) {
  std::map<int, long long> memo;
  long long c = (a.start >= 0 && live[size_t(a.start)])
                    ? branch_count_below(a, live, a.start, memo)
                    : 0;
  if (c != kInfinite) return {c, true};
  return {path_probe(a, live, int(a.states.size()) + 2), false};
}

// True when every state reachable from s (within live) continues in exactly
// one way: the subtree below s carries a single branch.
inline bool deterministic_below(const IndexedAut& a, const std::vector<char>& live, int s) {
  std::set<int> seen{s};
  std::vector<int> w{s};
  while (!w.empty()) {
    int cur = w.back();
    w.pop_back();
    int k = 0;
    for (int c : a.delta[size_t(cur)])
      if (live[size_t(c)]) {
        ++k;
        if (seen.insert(c).second) w.push_back(c);
      }
    if (k != 1) return false;
  }
  return true;
}

}  // namespace detail

// ---- end-tree construction --------------------------------------------------

// Builds the end triple of a recipe at the given depth. Level-n nodes are the
// complementary components of the n-1st piece that persist to the deepest
// piece; for periodic recipes persistence and the markers are certified by
// rule analysis, for explicit views they are witnessed only.
inline EndTriple end_triple(const SurfaceRecipe& r, int depth) {
  EndTriple out;
  out.depth = depth;

  if (r.kind == SurfaceRecipe::Periodic) {
    auto [view, trace] = expand_traced(r, depth);
    detail::RuleFacts f = detail::rule_facts(r);
    out.np_certified = out.no_certified = true;

    LabelledTree& T = out.T;
    T.depth = depth;
    bool any_viable = false;
    for (int c : f.delta[0])
      if (f.viable[size_t(c)]) any_viable = true;
    T.open = any_viable;
    T.automaton.emplace();
    T.automaton->start = "";
    for (size_t s = 0; s < f.states.size(); ++s) {
      std::vector<std::string> kids;
      for (int c : f.delta[s])
        if (f.viable[size_t(c)]) kids.push_back(f.states[size_t(c)]);
      T.automaton->delta[f.states[s]] = kids;
      T.automaton->np[f.states[s]] = f.reach_np[s];
      T.automaton->no[f.states[s]] = f.reach_no[s];
    }

    // Root, then one node per surviving block instance (stage = level).
    std::vector<int> tree_id(trace.nodes.size(), -1);
    LabelledTree::Node root;
    root.level = 0;
    root.component = 0;
    root.state = "";
    root.np = f.reach_np[0];
    root.no = f.reach_no[0];
    T.nodes.push_back(root);
    tree_id[0] = 0;
    for (size_t i = 1; i < trace.nodes.size(); ++i) {
      const auto& tn = trace.nodes[i];
      int st = f.index.at(tn.rule);
      if (!f.viable[size_t(st)]) continue;        // bounded continuation: no end
      if (tree_id[size_t(tn.parent)] < 0) continue;
      LabelledTree::Node n;
      n.parent = tree_id[size_t(tn.parent)];
      n.level = tn.stage;
      n.component = int(i);
      n.state = tn.rule;
      n.np = f.reach_np[size_t(st)];
      n.no = f.reach_no[size_t(st)];
      int id = int(T.nodes.size());
      T.nodes.push_back(n);
      T.nodes[size_t(n.parent)].children.push_back(id);
      tree_id[i] = id;
    }
    return out;
  }

  // Explicit view: components of P_d minus P_n that touch the outer border.
  ExhaustionView view = expand(r, std::min<int>(depth, int(r.view.pieces.size()) - 1));
  int d = int(view.pieces.size()) - 1;
  out.depth = d;
  const FiniteComplex2& last = view.pieces[size_t(d)];
  std::set<Edge> outer = boundary_edges(last);

  LabelledTree& T = out.T;
  T.depth = d;
  T.open = !outer.empty();
  LabelledTree::Node root;
  root.level = 0;
  root.component = 0;
  {
    PieceInvariants inv = invariants(last);
    root.np = inv.genus > 0 || inv.crosscaps > 0;
    root.no = !inv.orientable;
  }
  T.nodes.push_back(root);

  // previous[i] = tree node owning component i of the previous level.
  struct Comp {
    FiniteComplex2 K;
    int node = -1;
  };
  std::vector<Comp> prev{{last, 0}};
  for (int n = 0; n < d; ++n) {
    auto pieces = complement_span(last, view.pieces[size_t(n)]);
    // Canonical order: by smallest triangle.
    std::sort(pieces.begin(), pieces.end(), [](const ComplementPiece& x, const ComplementPiece& y) {
      return *x.piece.triangles.begin() < *y.piece.triangles.begin();
    });
    std::vector<Comp> cur;
    for (const auto& cp : pieces) {
      bool persistent = false;
      for (const Edge& e : cp.piece.edges)
        if (outer.count(e)) persistent = true;
      if (!persistent) continue;
      const Tri& probe = *cp.piece.triangles.begin();
      int parent = -1;
      for (const auto& pc : prev)
        if (pc.K.triangles.count(probe)) parent = pc.node;
      if (parent < 0) continue;  // should not happen on nested views
      LabelledTree::Node node;
      node.parent = parent;
      node.level = n + 1;
      node.component = int(cur.size());
      SurfaceKind sk = surface_check(cp.piece);
      if (sk.kind != SurfaceKind::NotSurface) {
        PieceInvariants inv = invariants(cp.piece);
        node.np = inv.genus > 0 || inv.crosscaps > 0;
        node.no = !inv.orientable;
      }
      int id = int(T.nodes.size());
      T.nodes.push_back(node);
      T.nodes[size_t(parent)].children.push_back(id);
      cur.push_back({cp.piece, id});
    }
    prev = std::move(cur);
  }
  return out;
}

// ---- counting ---------------------------------------------------------------

// Counts maximal-depth branches of T and of its two marker subtrees.
inline EndCounts count_ends(const EndTriple& t) {
  EndCounts out;
  out.certified = t.T.automaton.has_value();
  std::vector<int> bottom;
  for (size_t i = 0; i < t.T.nodes.size(); ++i) {
    const auto& n = t.T.nodes[i];
    if (n.level == t.T.depth && (n.level > 0 || t.T.open)) bottom.push_back(int(i));
  }
  long long total = (long long)bottom.size();
  long long np = 0, no = 0;
  for (int b : bottom) {
    if (t.T.nodes[size_t(b)].np) ++np;
    if (t.T.nodes[size_t(b)].no) ++no;
  }
  if (!t.T.automaton) {
    out.total = {total, !t.T.open && t.T.nodes.size() <= 1};
    out.nonplanar = {np, false};
    out.nonorientable = {no, false};
    return out;
  }
  detail::IndexedAut a = detail::index_automaton(*t.T.automaton);
  std::vector<char> all(a.states.size(), 1);
  std::vector<char> live = detail::viable_within(a, all);
  bool total_exact = true;
  for (int b : bottom) {
    int st = a.index.count(t.T.nodes[size_t(b)].state)
                 ? a.index.at(t.T.nodes[size_t(b)].state)
                 : -1;
    if (st < 0 || !detail::deterministic_below(a, live, st)) total_exact = false;
  }
  if (!t.T.open) total_exact = true;
  out.total = {total, total_exact};

  // A marker count is final when every bottom marker agrees with its limit:
  // the branch below keeps the marker forever iff the marked states stay
  // reachable forever.
  auto marker_live = [&](const std::vector<char>& which) {
    std::vector<char> lv(a.states.size(), 0);
    for (size_t s = 0; s < lv.size(); ++s) lv[s] = live[s] && which[s];
    return detail::viable_within(a, lv);
  };
  std::vector<char> np_live = marker_live(a.np), no_live = marker_live(a.no);
  auto marker_exact = [&](const std::vector<char>& lv, bool marker_bit(const LabelledTree::Node&),
                          long long count) {
    bool stable = true;
    for (int b : bottom) {
      const auto& n = t.T.nodes[size_t(b)];
      int st = a.index.count(n.state) ? a.index.at(n.state) : -1;
      bool limit = st >= 0 && lv[size_t(st)];
      if (marker_bit(n) != limit) stable = false;
    }
    if (!t.T.open) return true;
    return stable && (count == 0 || total_exact);
  };
  out.nonplanar = {np, marker_exact(np_live, [](const LabelledTree::Node& n) { return n.np; }, np)};
  out.nonorientable =
      {no, marker_exact(no_live, [](const LabelledTree::Node& n) { return n.no; }, no)};
  return out;
}

// ---- marker subtrees --------------------------------------------------------

// The marked subtree (nonplanar or nonorientable part) as a tree of its own.
// The automaton is kept only when the triple's markers are certified.
inline LabelledTree marker_tree(const EndTriple& t, bool nonorientable_part) {
  LabelledTree out;
  out.depth = t.T.depth;
  out.open = t.T.open;
  auto marked = [&](const LabelledTree::Node& n) {
    return nonorientable_part ? n.no : n.np;
  };
  if (t.T.nodes.empty() || !marked(t.T.nodes[0])) return out;
  std::vector<int> remap(t.T.nodes.size(), -1);
  for (size_t i = 0; i < t.T.nodes.size(); ++i) {
    const auto& n = t.T.nodes[i];
    if (!marked(n)) continue;
    if (n.parent >= 0 && remap[size_t(n.parent)] < 0) continue;
    LabelledTree::Node copy = n;
    copy.children.clear();
    copy.parent = n.parent < 0 ? -1 : remap[size_t(n.parent)];
    remap[i] = int(out.nodes.size());
    out.nodes.push_back(copy);
    if (copy.parent >= 0) out.nodes[size_t(copy.parent)].children.push_back(remap[i]);
  }
  bool cert = nonorientable_part ? t.no_certified : t.np_certified;
  if (t.T.automaton && cert) {
    const auto& a = *t.T.automaton;
    LabelledTree::Automaton ma;
    ma.start = a.start;
    for (const auto& [s, kids] : a.delta) {
      bool mk = nonorientable_part ? a.no.at(s) : a.np.at(s);
      if (!mk) continue;
      std::vector<std::string> filtered;
      for (const auto& k : kids)
        if (nonorientable_part ? a.no.at(k) : a.np.at(k)) filtered.push_back(k);
      ma.delta[s] = filtered;
      ma.np[s] = a.np.at(s);
      ma.no[s] = a.no.at(s);
    }
    bool start_marked = nonorientable_part ? a.no.at(a.start) : a.np.at(a.start);
    if (start_marked) out.automaton = std::move(ma);
  }
  return out;
}

// ---- binary embedding -------------------------------------------------------

namespace detail {

struct BinaryBuilder {
  const LabelledTree& src;
  LabelledTree dst;
  bool unary_used = false;

  int copy_node(int old_id, int new_parent, int level) {
    const auto& n = src.nodes[size_t(old_id)];
    LabelledTree::Node c;
    c.parent = new_parent;
    c.level = level;
    c.component = n.component;
    c.state = n.state;
    c.np = n.np;
    c.no = n.no;
    int id = int(dst.nodes.size());
    dst.nodes.push_back(c);
    if (new_parent >= 0) dst.nodes[size_t(new_parent)].children.push_back(id);
    return id;
  }

  int intermediate(int new_parent, int level) {
    LabelledTree::Node c;
    c.parent = new_parent;
    c.level = level;
    c.component = -1;
    int id = int(dst.nodes.size());
    dst.nodes.push_back(c);
    if (new_parent >= 0) dst.nodes[size_t(new_parent)].children.push_back(id);
    return id;
  }

  // Hangs the ordered children below `at`, using the leaves of a complete
  // binary tree of height ceil(log2 k) in lexicographic order; unused leaves
  // and their spines are not materialized.
  void place(int at, const std::vector<int>& kids, int height) {
    if (kids.empty()) return;
    if (height == 0) {
      build(kids[0], at);
      return;
    }
    size_t half = size_t(1) << (height - 1);
    std::vector<int> left(kids.begin(), kids.begin() + std::min(half, kids.size()));
    std::vector<int> right(kids.size() > half ? kids.begin() + long(half) : kids.end(),
                           kids.end());
    if (!left.empty()) {
      int l = intermediate(at, dst.nodes[size_t(at)].level + 1);
      place(l, left, height - 1);
    }
    if (!right.empty()) {
      int rnode = intermediate(at, dst.nodes[size_t(at)].level + 1);
      place(rnode, right, height - 1);
    }
  }

  void build(int old_id, int new_parent) {
    int level = new_parent < 0 ? 0 : dst.nodes[size_t(new_parent)].level + 1;
    int me = copy_node(old_id, new_parent, level);
    const auto& kids = src.nodes[size_t(old_id)].children;
    if (kids.empty()) return;
    if (kids.size() == 1) {
      // Height would be zero; pad with the left slot to keep the step visible.
      unary_used = true;
      build(kids[0], me);
      return;
    }
    if (kids.size() == 2) {
      build(kids[0], me);
      build(kids[1], me);
      return;
    }
    int height = 0;
    while ((size_t(1) << height) < kids.size()) ++height;
    place(me, kids, height);
  }
};

}  // namespace detail

// Re-hangs every k-ary fan of children on the leaves of a complete binary
// tree, preserving order and markers; the branch spaces correspond
// one-to-one, with both marker subtriples respected.
inline EndTriple binary_embed(const EndTriple& t) {
  EndTriple out;
  out.depth = t.depth;
  out.np_certified = t.np_certified;
  out.no_certified = t.no_certified;
  if (t.T.nodes.empty()) return out;
  detail::BinaryBuilder bb{t.T, {}, false};
  bb.dst.open = t.T.open;
  bb.build(0, -1);
  // Markers of synthetic interior nodes: whatever their subtrees carry.
  for (size_t i = bb.dst.nodes.size(); i-- > 1;) {
    auto& n = bb.dst.nodes[i];
    auto& p = bb.dst.nodes[size_t(n.parent)];
    if (p.component < 0) {
      p.np = p.np || n.np;
      p.no = p.no || n.no;
    }
  }
  int depth = 0;
  for (const auto& n : bb.dst.nodes) depth = std::max(depth, n.level);
  bb.dst.depth = depth;
  out.T = std::move(bb.dst);
  out.unary_convention = bb.unary_used;
  return out;
}

// ---- Cantor–Bendixson profile ----------------------------------------------

struct CBProfile {
  std::vector<EndCount> counts;  // surviving branches entering each iteration
  std::optional<int> rank;       // first iteration with no branches left
  bool perfect_tail = false;     // nothing isolated anymore; counts stay put
  bool certified = false;        // automaton-backed
};

// Iterated removal of isolated branches. A branch is isolated when some node
// on it has exactly one branch below. With an automaton presentation the
// answer is exact; otherwise bottom nodes are treated as unknown
// continuations and isolation must be witnessed strictly above them.
inline CBProfile cb_profile(const LabelledTree& t, int max_iter) {
  CBProfile out;
  if (t.automaton) {
    out.certified = true;
    detail::IndexedAut a = detail::index_automaton(*t.automaton);
    std::vector<char> live(a.states.size(), 1);
    for (int it = 0; it <= max_iter; ++it) {
      live = detail::viable_within(a, live);
      EndCount c = detail::automaton_count(a, live);
      out.counts.push_back(c);
      if (c.exact && c.n == 0) {
        out.rank = it;
        return out;
      }
      std::vector<int> isolated;
      for (size_t s = 0; s < live.size(); ++s)
        if (live[s] && detail::deterministic_below(a, live, int(s))) isolated.push_back(int(s));
      if (isolated.empty()) {
        out.perfect_tail = true;
        return out;
      }
      for (int s : isolated) live[size_t(s)] = 0;
    }
    return out;
  }

  if (t.nodes.empty()) {
    out.counts.push_back({0, false});
    out.rank = 0;
    return out;
  }
  std::vector<char> leaf_live(t.nodes.size(), 0);
  for (size_t i = 0; i < t.nodes.size(); ++i)
    if (t.nodes[i].children.empty()) leaf_live[i] = 1;
  auto live_below = [&](void) {
    std::vector<long long> cnt(t.nodes.size(), 0);
    for (size_t i = t.nodes.size(); i-- > 0;) {
      if (leaf_live[i]) cnt[i] += 1;
      for (int c : t.nodes[i].children) cnt[i] += cnt[size_t(c)];
    }
    return cnt;
  };
  for (int it = 0; it <= max_iter; ++it) {
    std::vector<long long> cnt = live_below();
    long long total = cnt[0];
    out.counts.push_back({total, false});
    if (total == 0) {
      out.rank = it;
      return out;
    }
    std::vector<int> removed;
    for (size_t i = 0; i < t.nodes.size(); ++i) {
      if (!leaf_live[i]) continue;
      bool isolated = total == 1;
      for (int x = int(i); x >= 0; x = t.nodes[size_t(x)].parent)
        if (!t.nodes[size_t(x)].children.empty() && cnt[size_t(x)] == 1) isolated = true;
      if (isolated) removed.push_back(int(i));
    }
    if (removed.empty()) {
      out.perfect_tail = true;
      return out;
    }
    for (int i : removed) leaf_live[size_t(i)] = 0;
  }
  return out;
}

// ---- distinguishing battery -------------------------------------------------

struct Distinction {
  bool distinguished = false;
  std::string invariant;  // which invariant separated the triples
  std::string left, right;
  int depth = 0;
};

namespace detail {

inline bool counts_separate(const EndCount& x, const EndCount& y) {
  if (x.exact && y.exact) return x.n != y.n;
  if (x.exact && !y.exact) return y.n > x.n;  // at least y.n > exactly x.n
  if (!x.exact && y.exact) return x.n > y.n;
  return false;
}

inline std::string count_str(const EndCount& c) {
  return (c.exact ? "" : ">=") + std::to_string(c.n);
}

inline std::string profile_str(const CBProfile& p) {
  std::string s = "[";
  for (size_t i = 0; i < p.counts.size(); ++i)
    s += (i ? " " : "") + count_str(p.counts[i]);
  s += "]";
  if (p.rank) s += " rank " + std::to_string(*p.rank);
  else if (p.perfect_tail) s += " perfect";
  return s;
}

// Branch counts through marked states at each isolation round of the full
// tree: a finer certified invariant than the marker tree's own profile.
inline std::vector<EndCount> marker_rounds(const LabelledTree& t, bool nonorientable_part,
                                           int max_iter) {
  std::vector<EndCount> out;
  if (!t.automaton) return out;
  IndexedAut a = index_automaton(*t.automaton);
  std::vector<char> live(a.states.size(), 1);
  const std::vector<char>& mk = nonorientable_part ? a.no : a.np;
  for (int it = 0; it <= max_iter; ++it) {
    live = viable_within(a, live);
    std::vector<char> marked_live(a.states.size(), 0);
    for (size_t s = 0; s < live.size(); ++s) marked_live[s] = live[s] && mk[s];
    marked_live = viable_within(a, marked_live);
    out.push_back(automaton_count(a, marked_live));
    std::vector<int> isolated;
    for (size_t s = 0; s < live.size(); ++s)
      if (live[s] && deterministic_below(a, live, int(s))) isolated.push_back(int(s));
    if (isolated.empty()) break;
    for (int s : isolated) live[size_t(s)] = 0;
  }
  return out;
}

}  // namespace detail

// Sound comparison battery: certified-unequal end counts, then the
// Cantor-Bendixson profiles of the tree and both marker subtrees, then
// marked-branch counts per isolation round. Inconclusive comparisons fall
// through to NotDistinguished.
inline Distinction distinguish(const EndTriple& a, const EndTriple& b, int depth) {
  Distinction out;
  out.depth = depth;
  EndCounts ca = count_ends(a), cb = count_ends(b);
  if (ca.certified && cb.certified) {
    auto triple_str = [](const EndCounts& c) {
      return "(" + detail::count_str(c.total) + ", " + detail::count_str(c.nonplanar) + ", " +
             detail::count_str(c.nonorientable) + ")";
    };
    if (detail::counts_separate(ca.total, cb.total) ||
        detail::counts_separate(ca.nonplanar, cb.nonplanar) ||
        detail::counts_separate(ca.nonorientable, cb.nonorientable)) {
      out.distinguished = true;
      out.invariant = "end counts";
      out.left = triple_str(ca);
      out.right = triple_str(cb);
      return out;
    }
  }
  struct Layer {
    std::string name;
    LabelledTree ta, tb;
  };
  std::vector<Layer> layers;
  layers.push_back({"ends", a.T, b.T});
  layers.push_back({"nonplanar ends", marker_tree(a, false), marker_tree(b, false)});
  layers.push_back({"nonorientable ends", marker_tree(a, true), marker_tree(b, true)});
  for (const auto& layer : layers) {
    CBProfile pa = cb_profile(layer.ta, depth);
    CBProfile pb = cb_profile(layer.tb, depth);
    if (!pa.certified || !pb.certified) continue;
    bool differ = false;
    for (size_t i = 0; i < std::min(pa.counts.size(), pb.counts.size()); ++i)
      if (detail::counts_separate(pa.counts[i], pb.counts[i])) differ = true;
    if (pa.rank && pb.rank && *pa.rank != *pb.rank) differ = true;
    if (pa.rank && pb.perfect_tail) differ = true;
    if (pb.rank && pa.perfect_tail) differ = true;
    if (differ) {
      out.distinguished = true;
      out.invariant = "cb profile (" + layer.name + ")";
      out.left = detail::profile_str(pa);
      out.right = detail::profile_str(pb);
      return out;
    }
  }
  for (bool which : {false, true}) {
    auto ma = detail::marker_rounds(a.T, which, depth);
    auto mb = detail::marker_rounds(b.T, which, depth);
    if (ma.empty() || mb.empty()) continue;
    for (size_t i = 0; i < std::min(ma.size(), mb.size()); ++i)
      if (detail::counts_separate(ma[i], mb[i])) {
        out.distinguished = true;
        out.invariant = std::string(which ? "nonorientable" : "nonplanar") +
                        " branches per isolation round";
        out.left = detail::count_str(ma[i]);
        out.right = detail::count_str(mb[i]);
        return out;
      }
  }
  return out;
}

// Complete decision for finite end spaces: two finite discrete triples are
// homeomorphic exactly when their three counts agree.
inline bool decide_finite_triple(const EndTriple& a, const EndTriple& b) {
  EndCounts ca = count_ends(a), cb = count_ends(b);
  for (const EndCounts* c : {&ca, &cb}) {
    if (!c->certified || !c->total.exact || !c->nonplanar.exact || !c->nonorientable.exact)
      throw CountsNotCertified("end counts not certified exact");
  }
  return ca.total.n == cb.total.n && ca.nonplanar.n == cb.nonplanar.n &&
         ca.nonorientable.n == cb.nonorientable.n;
}

}  // namespace surfclass
