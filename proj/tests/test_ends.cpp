#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "surfclass/clopen.hpp"
#include "surfclass/endtree.hpp"
#include "surfclass/recipes.hpp"

using namespace surfclass;

namespace {

EndTriple triple_of(const std::string& name, int depth) {
  return end_triple(builtin_recipes(name), depth);
}

// Order-insensitive structural signature with markers, for comparing the two
// independent tree constructions.
std::string shape(const LabelledTree& T, int id) {
  std::vector<std::string> kids;
  for (int c : T.nodes[size_t(id)].children) kids.push_back(shape(T, c));
  std::sort(kids.begin(), kids.end());
  std::string s = "(";
  s += T.nodes[size_t(id)].np ? 'P' : 'p';
  s += T.nodes[size_t(id)].no ? 'O' : 'o';
  for (const auto& k : kids) s += k;
  return s + ")";
}

std::vector<int> leaves_of(const LabelledTree& T) {
  std::vector<int> out;
  for (size_t i = 0; i < T.nodes.size(); ++i)
    if (T.nodes[i].children.empty()) out.push_back(int(i));
  return out;
}

SurfaceRecipe handle_and_crosscap_ends() {
  // Two ends: one trailing handles forever (nonplanar, orientable), one
  // trailing crosscaps forever (nonplanar and nonorientable).
  SurfaceRecipe r;
  r.kind = SurfaceRecipe::Periodic;
  AttachmentBlock hs = blocks::holed_sphere(2, {"cc"});
  r.base = hs.K;
  r.base_outputs = {{hs.input, "h"}, {hs.outputs[0].first, "cc"}};
  r.rules["h"] = blocks::handle({"h"});
  r.rules["cc"] = blocks::crosscap({"cc"});
  return r;
}

}  // namespace

TEST_CASE("end counts of the named recipes") {
  struct Row {
    const char* name;
    int depth;
    long long t, np, no;
    bool exact;
  };
  for (const Row& row : std::initializer_list<Row>{
           {"plane", 3, 1, 0, 0, true},
           {"cylinder", 3, 2, 0, 0, true},
           {"loch_ness", 3, 1, 1, 0, true},
           {"jacobs_ladder", 3, 2, 2, 0, true},
           {"crosscap_chain", 3, 1, 1, 1, true},
           {"prong(4)", 3, 4, 0, 0, true},
           {"cantor_complement", 4, 16, 0, 0, false},
       }) {
    EndTriple t = triple_of(row.name, row.depth);
    EndCounts c = count_ends(t);
    INFO(row.name);
    CHECK(c.certified);
    CHECK(c.total.n == row.t);
    CHECK(c.total.exact == row.exact);
    CHECK(c.nonplanar.n == row.np);
    CHECK(c.nonorientable.n == row.no);
    if (row.exact) {
      CHECK(c.nonplanar.exact);
      CHECK(c.nonorientable.exact);
    }
  }
  // Marker counts can be exactly zero even when the total is a lower bound.
  EndCounts cc = count_ends(triple_of("cantor_complement", 4));
  CHECK(cc.nonplanar.exact);
  CHECK(cc.nonorientable.exact);
}

TEST_CASE("closed surfaces have no ends") {
  SurfaceRecipe r;
  r.kind = SurfaceRecipe::Periodic;
  AttachmentBlock seed = blocks::disk();
  r.base = seed.K;
  r.base_outputs = {{seed.input, "cap"}};
  r.rules["cap"] = blocks::cap();
  EndTriple t = end_triple(r, 2);
  CHECK_FALSE(t.T.open);
  EndCounts c = count_ends(t);
  CHECK(c.total == EndCount{0, true});
  CHECK(c.nonplanar == EndCount{0, true});
}

TEST_CASE("end tree shapes") {
  EndTriple plane = triple_of("plane", 3);
  REQUIRE(plane.T.nodes.size() == 4);  // root plus a chain
  for (size_t i = 0; i + 1 < plane.T.nodes.size(); ++i)
    CHECK(plane.T.nodes[i].children.size() == 1);

  // Complete binary tree: every circle splits in two each stage.
  EndTriple cantor = triple_of("cantor_complement", 3);
  for (const auto& n : cantor.T.nodes) {
    if (n.level < 3) CHECK(n.children.size() == 2);
    else CHECK(n.children.empty());
  }

  EndTriple jl = triple_of("jacobs_ladder", 3);
  REQUIRE(jl.T.nodes[0].children.size() == 2);
  for (const auto& n : jl.T.nodes) {
    CHECK(n.np == true);  // every component trails handles
    CHECK(n.no == false);
  }

  // Markers are closed toward the root.
  for (const char* name : {"plane", "flute", "crosscap_chain", "jacobs_ladder"}) {
    EndTriple t = triple_of(name, 3);
    for (const auto& n : t.T.nodes) {
      if (n.parent < 0) continue;
      if (n.np) CHECK(t.T.nodes[size_t(n.parent)].np);
      if (n.no) CHECK(t.T.nodes[size_t(n.parent)].no);
    }
  }
}

TEST_CASE("automaton presentation unfolds to the explicit tree") {
  for (const char* name : {"plane", "cylinder", "loch_ness", "jacobs_ladder",
                           "cantor_complement", "flute", "prong(3)", "crosscap_chain"}) {
    EndTriple t = triple_of(name, 3);
    REQUIRE(t.T.automaton.has_value());
    const auto& a = *t.T.automaton;
    for (const auto& n : t.T.nodes) {
      if (n.level == t.T.depth) continue;
      std::vector<std::string> got;
      for (int c : n.children) got.push_back(t.T.nodes[size_t(c)].state);
      INFO(name << " state " << n.state);
      CHECK(got == a.delta.at(n.state));
    }
  }
}

TEST_CASE("trace-based and complement-based constructions agree") {
  for (const char* name : {"plane", "cylinder", "loch_ness", "jacobs_ladder", "flute",
                           "crosscap_chain", "cantor_complement"}) {
    int depth = 3;
    SurfaceRecipe per = builtin_recipes(name);
    SurfaceRecipe ex;
    ex.kind = SurfaceRecipe::Explicit;
    ex.view = expand(per, depth);
    EndTriple tp = end_triple(per, depth);
    EndTriple te = end_triple(ex, depth);
    INFO(name);
    CHECK(tp.np_certified);
    CHECK_FALSE(te.np_certified);
    CHECK(shape(tp.T, 0) == shape(te.T, 0));
    CHECK_FALSE(count_ends(te).certified);
  }
}

TEST_CASE("binary embedding of a three-way split") {
  EndTriple t = triple_of("prong(3)", 2);
  REQUIRE(t.T.nodes[0].children.size() == 3);
  EndTriple e = binary_embed(t);
  CHECK(e.unary_convention);  // the chains below the split are unary
  for (const auto& n : e.T.nodes) CHECK(n.children.size() <= 2);
  // Children land at addresses 00, 01, 10: the root has two synthetic
  // children; the left one fans out to two grandchildren, the right to one.
  REQUIRE(e.T.nodes[0].children.size() == 2);
  const auto& left = e.T.nodes[size_t(e.T.nodes[0].children[0])];
  const auto& right = e.T.nodes[size_t(e.T.nodes[0].children[1])];
  CHECK(left.component == -1);
  CHECK(right.component == -1);
  CHECK(left.children.size() == 2);
  CHECK(right.children.size() == 1);
  CHECK(leaves_of(e.T).size() == leaves_of(t.T).size());
}

TEST_CASE("binary embedding preserves branches and markers") {
  for (const char* name : {"flute", "jacobs_ladder", "cantor_complement", "crosscap_chain"}) {
    EndTriple t = triple_of(name, 3);
    EndTriple e = binary_embed(t);
    INFO(name);
    for (const auto& n : e.T.nodes) CHECK(n.children.size() <= 2);
    std::vector<int> lt = leaves_of(t.T), le = leaves_of(e.T);
    REQUIRE(lt.size() == le.size());
    long long np_t = 0, np_e = 0, no_t = 0, no_e = 0;
    for (int l : lt) {
      np_t += t.T.nodes[size_t(l)].np;
      no_t += t.T.nodes[size_t(l)].no;
    }
    for (int l : le) {
      np_e += e.T.nodes[size_t(l)].np;
      no_e += e.T.nodes[size_t(l)].no;
    }
    CHECK(np_t == np_e);
    CHECK(no_t == no_e);
    // Leaf order is preserved left to right.
    for (size_t i = 0; i < lt.size(); ++i) {
      CHECK(t.T.nodes[size_t(lt[i])].np == e.T.nodes[size_t(le[i])].np);
      CHECK(t.T.nodes[size_t(lt[i])].no == e.T.nodes[size_t(le[i])].no);
    }
  }
  // Synthetic nodes inherit whatever their subtrees carry.
  EndTriple mixed;
  {
    SurfaceRecipe r;
    r.kind = SurfaceRecipe::Periodic;
    AttachmentBlock hs = blocks::holed_sphere(3, {"cc", "p"});
    r.base = hs.K;
    r.base_outputs = {{hs.input, "h"},
                      {hs.outputs[0].first, "cc"},
                      {hs.outputs[1].first, "p"}};
    r.rules["h"] = blocks::handle({"h"});
    r.rules["cc"] = blocks::crosscap({"cc"});
    r.rules["p"] = blocks::annulus("p");
    mixed = end_triple(r, 2);
  }
  EndTriple em = binary_embed(mixed);
  const auto& left = em.T.nodes[size_t(em.T.nodes[0].children[0])];
  CHECK(left.component == -1);
  CHECK(left.np);  // covers the handle and crosscap branches
}

TEST_CASE("binary embedding preserves depth-bounded isolation profiles") {
  for (const char* name : {"prong(3)", "flute", "cantor_complement", "plane"}) {
    EndTriple t = triple_of(name, 3);
    LabelledTree plain = t.T;
    plain.automaton.reset();
    EndTriple e = binary_embed(t);
    CBProfile a = cb_profile(plain, 4);
    CBProfile b = cb_profile(e.T, 4);
    INFO(name);
    CHECK(a.counts == b.counts);
    CHECK(a.rank == b.rank);
    CHECK(a.perfect_tail == b.perfect_tail);
  }
}

TEST_CASE("isolation profiles from the rule automaton") {
  CBProfile plane = cb_profile(triple_of("plane", 3).T, 5);
  CHECK(plane.certified);
  REQUIRE(plane.rank.has_value());
  CHECK(*plane.rank == 1);
  CHECK(plane.counts == std::vector<EndCount>{{1, true}, {0, true}});

  CBProfile cyl = cb_profile(triple_of("cylinder", 3).T, 5);
  CHECK(cyl.counts == std::vector<EndCount>{{2, true}, {0, true}});
  CHECK(*cyl.rank == 1);

  CBProfile prong = cb_profile(triple_of("prong(3)", 3).T, 5);
  CHECK(prong.counts == std::vector<EndCount>{{3, true}, {0, true}});
  CHECK(*prong.rank == 1);

  CBProfile cantor = cb_profile(triple_of("cantor_complement", 3).T, 5);
  CHECK(cantor.perfect_tail);
  CHECK_FALSE(cantor.rank.has_value());
  CHECK_FALSE(cantor.counts[0].exact);
  CHECK(cantor.counts[0].n >= 2);

  // One limit end with a puncture shed at every stage: the punctures go in
  // the first round, the limit in the second.
  CBProfile flute = cb_profile(triple_of("flute", 3).T, 5);
  REQUIRE(flute.rank.has_value());
  CHECK(*flute.rank == 2);
  REQUIRE(flute.counts.size() == 3);
  CHECK_FALSE(flute.counts[0].exact);
  CHECK(flute.counts[0].n >= 2);
  CHECK(flute.counts[1] == EndCount{1, true});
  CHECK(flute.counts[2] == EndCount{0, true});
}

namespace {

// Hand-built tree helper for profile tests on explicit node sets.
struct TreeBuilder {
  LabelledTree T;
  int add(int parent, int level) {
    LabelledTree::Node n;
    n.parent = parent;
    n.level = level;
    int id = int(T.nodes.size());
    T.nodes.push_back(n);
    if (parent >= 0) T.nodes[size_t(parent)].children.push_back(id);
    return id;
  }
};

}  // namespace

TEST_CASE("isolation profile of a finite spine-with-tails tree") {
  // Spine to the bottom, one side tail hung at each of the first three spine
  // nodes. Every branch, the spine included, passes through an internal node
  // with a unique continuation (the last spine node has no side tail), so all
  // four are witnessed isolated in the first round.
  TreeBuilder b;
  b.T.depth = 4;
  int spine = b.add(-1, 0);
  for (int l = 1; l <= 4; ++l) {
    int next = b.add(spine, l);
    if (l <= 3) {
      int tail = b.add(spine, l);
      for (int tl = l + 1; tl <= 4; ++tl) tail = b.add(tail, tl);
    }
    spine = next;
  }
  CBProfile p = cb_profile(b.T, 5);
  CHECK_FALSE(p.certified);
  REQUIRE(p.rank.has_value());
  CHECK(*p.rank == 1);
  REQUIRE(p.counts.size() == 2);
  CHECK(p.counts[0].n == 4);
  CHECK_FALSE(p.counts[0].exact);
  CHECK(p.counts[1].n == 0);
}

TEST_CASE("isolation profile needing two erosion rounds") {
  // Two middle nodes, each carrying one long tail (behind a unique-
  // continuation chain node) and one short tail. Round one removes the long
  // tails; only then does each middle node see a unique continuation, so the
  // short tails fall in round two.
  TreeBuilder b;
  b.T.depth = 3;
  int root = b.add(-1, 0);
  for (int side = 0; side < 2; ++side) {
    int mid = b.add(root, 1);
    int chain = b.add(mid, 2);
    b.add(chain, 3);  // long tail: witnessed by `chain` immediately
    b.add(mid, 2);    // short tail: no witness until the long tail is gone
  }
  CBProfile p = cb_profile(b.T, 5);
  CHECK_FALSE(p.certified);
  REQUIRE(p.rank.has_value());
  CHECK(*p.rank == 2);
  REQUIRE(p.counts.size() == 3);
  CHECK(p.counts[0].n == 4);
  CHECK(p.counts[1].n == 2);
  CHECK(p.counts[2].n == 0);
}

TEST_CASE("marker subtree profiles") {
  EndTriple ln = triple_of("loch_ness", 3);
  LabelledTree np = marker_tree(ln, false);
  REQUIRE(np.automaton.has_value());
  CBProfile p = cb_profile(np, 4);
  CHECK(p.counts == std::vector<EndCount>{{1, true}, {0, true}});

  LabelledTree no = marker_tree(ln, true);
  CHECK(no.nodes.empty());
  CBProfile q = cb_profile(no, 4);
  CHECK(q.rank == 0);

  EndTriple cc = triple_of("crosscap_chain", 3);
  LabelledTree ccno = marker_tree(cc, true);
  REQUIRE(ccno.automaton.has_value());
  CHECK(cb_profile(ccno, 4).counts[0] == EndCount{1, true});
}

TEST_CASE("distinguishing battery") {
  EndTriple jl = triple_of("jacobs_ladder", 3);
  EndTriple ln = triple_of("loch_ness", 3);
  Distinction d = distinguish(jl, ln, 4);
  CHECK(d.distinguished);
  CHECK(d.invariant == "end counts");
  CHECK(d.left == "(2, 2, 0)");
  CHECK(d.right == "(1, 1, 0)");

  CHECK(distinguish(ln, jl, 4).distinguished);

  Distinction same = distinguish(triple_of("plane", 3), triple_of("plane", 3), 4);
  CHECK_FALSE(same.distinguished);

  // At depth 1 the Cantor tree has shown only one split, so counts cannot
  // separate it from three prongs; the isolation profile can.
  Distinction cp = distinguish(triple_of("cantor_complement", 1), triple_of("prong(3)", 1), 4);
  CHECK(cp.distinguished);
  CHECK(cp.invariant == "cb profile (ends)");

  Distinction pc = distinguish(triple_of("plane", 3), triple_of("cylinder", 3), 4);
  CHECK(pc.distinguished);
  CHECK(pc.invariant == "end counts");

  Distinction cl = distinguish(triple_of("crosscap_chain", 3), triple_of("loch_ness", 3), 4);
  CHECK(cl.distinguished);

  for (const char* name : {"plane", "cylinder", "loch_ness", "flute", "cantor_complement"}) {
    EndTriple t = triple_of(name, 3);
    CHECK_FALSE(distinguish(t, t, 4).distinguished);
  }
}

TEST_CASE("finite end spaces are decided by their counts") {
  CHECK(decide_finite_triple(triple_of("prong(2)", 3), triple_of("cylinder", 3)));
  CHECK_FALSE(decide_finite_triple(triple_of("prong(3)", 3), triple_of("cylinder", 3)));
  CHECK_FALSE(decide_finite_triple(triple_of("jacobs_ladder", 3), triple_of("loch_ness", 3)));
  CHECK(decide_finite_triple(triple_of("loch_ness", 2), triple_of("loch_ness", 4)));

  CHECK_THROWS_AS(decide_finite_triple(triple_of("cantor_complement", 3), triple_of("plane", 3)),
                  CountsNotCertified);
  SurfaceRecipe ex;
  ex.kind = SurfaceRecipe::Explicit;
  ex.view = expand(builtin_recipes("plane"), 3);
  CHECK_THROWS_AS(decide_finite_triple(end_triple(ex, 3), triple_of("plane", 3)),
                  CountsNotCertified);
}

TEST_CASE("clopen cones and filters on the builtin trees") {
  ClopenAlgebra cyl(triple_of("cylinder", 2));
  REQUIRE(cyl.triple().T.nodes[0].children.size() == 2);
  ClopenExpr one_end{{cyl.triple().T.nodes[0].children[0]}, {}};
  CHECK(cyl.in_F(one_end));  // the other end is planar
  CHECK(cyl.in_F(cyl.full()));
  CHECK(cyl.in_F(cyl.none()));  // no nonplanar ends at all, so even the empty set qualifies

  ClopenAlgebra jl(triple_of("jacobs_ladder", 2));
  ClopenExpr side{{jl.triple().T.nodes[0].children[0]}, {}};
  CHECK_FALSE(jl.in_F(side));  // the complement holds a nonplanar end
  CHECK(jl.in_F(jl.full()));
  CHECK_FALSE(jl.in_F(jl.none()));
}

TEST_CASE("clopen normalization") {
  EndTriple cantor = triple_of("cantor_complement", 2);
  ClopenAlgebra alg(cantor);
  const LabelledTree& T = cantor.T;
  int left = T.nodes[0].children[0];
  int a = T.nodes[size_t(left)].children[0];
  int b = T.nodes[size_t(left)].children[1];

  // Both children together lift to the whole cone above them.
  ClopenExpr both{{a, b}, {}};
  ClopenExpr lifted = alg.normalize(both);
  CHECK(lifted.cones == std::vector<int>{left});
  CHECK(alg.eq(both, ClopenExpr{{left}, {}}));
  CHECK_FALSE(alg.eq(both, alg.full()));

  // All four leaves lift through two levels to the root cone.
  ClopenExpr everything{leaves_of(T), {}};
  CHECK(alg.normalize(everything).cones == std::vector<int>{0});
  CHECK(alg.eq(everything, alg.full()));

  // Subtracting a cone leaves the sibling.
  ClopenExpr diff{{left}, {a}};
  ClopenExpr n = alg.normalize(diff);
  CHECK(n.cones == std::vector<int>{b});
  CHECK(n.minus.empty());

  CHECK_THROWS_AS(alg.normalize(ClopenExpr{{a}, {b}}), NotNormalizable);
  CHECK_THROWS_AS(alg.normalize(ClopenExpr{{a}, {a}}), NotNormalizable);
}

TEST_CASE("clopen boolean laws") {
  ClopenAlgebra alg(triple_of("flute", 3));
  std::vector<int> leaves = leaves_of(alg.triple().T);
  REQUIRE(leaves.size() >= 3);
  std::mt19937 rng(20240823);
  auto random_expr = [&]() {
    ClopenExpr e;
    for (int l : leaves)
      if (rng() % 2) e.cones.push_back(l);
    return alg.normalize(e);
  };
  for (int trial = 0; trial < 25; ++trial) {
    ClopenExpr a = random_expr(), b = random_expr(), c = random_expr();
    CHECK(alg.eq(alg.meet(a, b), alg.meet(b, a)));
    CHECK(alg.eq(alg.join(alg.join(a, b), c), alg.join(a, alg.join(b, c))));
    CHECK(alg.eq(alg.meet(a, alg.join(b, c)), alg.join(alg.meet(a, b), alg.meet(a, c))));
    CHECK(alg.eq(alg.complement(alg.join(a, b)),
                 alg.meet(alg.complement(a), alg.complement(b))));
    CHECK(alg.eq(alg.meet(a, alg.complement(a)), alg.none()));
    CHECK(alg.eq(alg.join(a, alg.complement(a)), alg.full()));
    CHECK(alg.eq(alg.complement(alg.complement(a)), alg.normalize(a)));
  }
}

TEST_CASE("filter laws and the nesting of F inside G") {
  EndTriple mixed = end_triple(handle_and_crosscap_ends(), 2);
  ClopenAlgebra alg(mixed);
  std::vector<int> leaves = leaves_of(alg.triple().T);
  REQUIRE(leaves.size() == 2);

  // All subsets of the two-leaf space.
  std::vector<ClopenExpr> exprs = {alg.none(),
                                   ClopenExpr{{leaves[0]}, {}},
                                   ClopenExpr{{leaves[1]}, {}},
                                   alg.full()};
  for (const auto& a : exprs)
    for (const auto& b : exprs) {
      if (alg.in_F(a) && alg.in_F(b)) CHECK(alg.in_F(alg.meet(a, b)));
      if (alg.in_G(a) && alg.in_G(b)) CHECK(alg.in_G(alg.meet(a, b)));
      if (alg.in_F(a)) CHECK(alg.in_F(alg.join(a, b)));
      if (alg.in_G(a)) CHECK(alg.in_G(alg.join(a, b)));
    }
  // Nonorientable branches are nonplanar, so containing all nonplanar ends is
  // the stronger requirement.
  for (const auto& a : exprs)
    if (alg.in_F(a)) CHECK(alg.in_G(a));
  // And strictly stronger here: the crosscap end alone satisfies G only.
  int cc_leaf = alg.triple().T.nodes[size_t(leaves[0])].no ? leaves[0] : leaves[1];
  ClopenExpr cc_only{{cc_leaf}, {}};
  CHECK(alg.in_G(cc_only));
  CHECK_FALSE(alg.in_F(cc_only));
}
