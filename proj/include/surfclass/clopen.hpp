#pragma once

#include <algorithm>
#include <set>
#include <vector>

#include "surfclass/endtree.hpp"

namespace surfclass {

struct NotNormalizable : Error {
  using Error::Error;
};

// A clopen subset of the branch space: a union of node cones, minus cones
// strictly below them. Node ids refer to the underlying end tree.
struct ClopenExpr {
  std::vector<int> cones;
  std::vector<int> minus;
};

// Boolean algebra of clopen branch sets over a fixed end triple, with the two
// nested filters induced by the marker subtrees: in_F holds when every
// nonplanar branch lies inside the set, in_G likewise for nonorientable
// branches.
class ClopenAlgebra {
 public:
  explicit ClopenAlgebra(EndTriple t) : t_(std::move(t)) {
    for (size_t i = 0; i < t_.T.nodes.size(); ++i)
      if (t_.T.nodes[i].children.empty()) leaves_.push_back(int(i));
    if (t_.T.automaton) aut_ = detail::index_automaton(*t_.T.automaton);
  }

  const EndTriple& triple() const { return t_; }
  bool certified() const { return aut_.has_value(); }

  ClopenExpr full() const { return t_.T.nodes.empty() ? ClopenExpr{} : ClopenExpr{{0}, {}}; }
  ClopenExpr none() const { return {}; }

  // Canonical form: the maximal fully covered nodes, no subtractions.
  ClopenExpr normalize(const ClopenExpr& e) const { return lift(leafset(e)); }

  ClopenExpr meet(const ClopenExpr& a, const ClopenExpr& b) const {
    std::set<int> la = leafset(a), lb = leafset(b), out;
    for (int x : la)
      if (lb.count(x)) out.insert(x);
    return lift(out);
  }
  ClopenExpr join(const ClopenExpr& a, const ClopenExpr& b) const {
    std::set<int> la = leafset(a), lb = leafset(b);
    la.insert(lb.begin(), lb.end());
    return lift(la);
  }
  ClopenExpr complement(const ClopenExpr& a) const {
    std::set<int> la = leafset(a), out;
    for (int l : leaves_)
      if (!la.count(l)) out.insert(l);
    return lift(out);
  }
  bool eq(const ClopenExpr& a, const ClopenExpr& b) const { return leafset(a) == leafset(b); }
  bool is_empty(const ClopenExpr& a) const { return leafset(a).empty(); }

  // Filter membership: no marked branch escapes the set.
  bool in_F(const ClopenExpr& e) const { return filter(e, false); }
  bool in_G(const ClopenExpr& e) const { return filter(e, true); }

 private:
  EndTriple t_;
  std::vector<int> leaves_;
  std::optional<detail::IndexedAut> aut_;

  void check_node(int id) const {
    if (id < 0 || size_t(id) >= t_.T.nodes.size())
      throw Error("clopen: node id out of range");
  }
  bool strictly_below(int x, int anc) const {
    for (int cur = t_.T.nodes[size_t(x)].parent; cur >= 0; cur = t_.T.nodes[size_t(cur)].parent)
      if (cur == anc) return true;
    return false;
  }
  void leaves_under(int x, std::set<int>& out) const {
    const auto& n = t_.T.nodes[size_t(x)];
    if (n.children.empty()) {
      out.insert(x);
      return;
    }
    for (int c : n.children) leaves_under(c, out);
  }

  // Evaluates the expression as a set of leaf cones.
  std::set<int> leafset(const ClopenExpr& e) const {
    std::set<int> pos, neg;
    for (int c : e.cones) {
      check_node(c);
      leaves_under(c, pos);
    }
    for (int m : e.minus) {
      check_node(m);
      bool below = false;
      for (int c : e.cones)
        if (strictly_below(m, c)) below = true;
      if (!below)
        throw NotNormalizable("subtracted cone is not strictly below a positive cone");
      leaves_under(m, neg);
    }
    for (int x : neg) pos.erase(x);
    return pos;
  }

  // Maximal antichain of fully covered nodes.
  ClopenExpr lift(const std::set<int>& leafs) const {
    ClopenExpr out;
    if (t_.T.nodes.empty()) return out;
    std::vector<char> covered(t_.T.nodes.size(), 0);
    for (size_t i = t_.T.nodes.size(); i-- > 0;) {
      const auto& n = t_.T.nodes[i];
      if (n.children.empty()) covered[i] = leafs.count(int(i)) != 0;
      else {
        covered[i] = 1;
        for (int c : n.children)
          if (!covered[size_t(c)]) covered[i] = 0;
      }
    }
    std::vector<int> stack{0};
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      if (covered[size_t(x)]) {
        out.cones.push_back(x);
        continue;
      }
      for (int c : t_.T.nodes[size_t(x)].children) stack.push_back(c);
    }
    std::sort(out.cones.begin(), out.cones.end());
    return out;
  }

  // Is there a fully marked branch through this leaf?
  bool marked_branch_through(int leaf, bool nonorientable_part) const {
    const auto& n = t_.T.nodes[size_t(leaf)];
    bool mk = nonorientable_part ? n.no : n.np;
    if (!mk) return false;
    if (!aut_) return true;  // witnessed at this depth
    const std::vector<char>& which = nonorientable_part ? aut_->no : aut_->np;
    std::vector<char> all(aut_->states.size(), 1);
    std::vector<char> live = detail::viable_within(*aut_, all);
    std::vector<char> marked(aut_->states.size(), 0);
    for (size_t s = 0; s < marked.size(); ++s) marked[s] = live[s] && which[s];
    marked = detail::viable_within(*aut_, marked);
    auto it = aut_->index.find(n.state);
    return it != aut_->index.end() && marked[size_t(it->second)];
  }

  bool filter(const ClopenExpr& e, bool nonorientable_part) const {
    std::set<int> in = leafset(e);
    for (int l : leaves_) {
      if (in.count(l)) continue;
      if (marked_branch_through(l, nonorientable_part)) return false;
    }
    return true;
  }
};

inline ClopenAlgebra clopen_algebra(const EndTriple& t) { return ClopenAlgebra(t); }

}  // namespace surfclass
