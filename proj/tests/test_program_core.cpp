#include <doctest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "slicecount/derivation.hpp"
#include "slicecount/generators.hpp"
#include "slicecount/oracle.hpp"
#include "slicecount/support.hpp"

using namespace slicecount;
using namespace fixture::running;
using fixture::x;

namespace {

std::vector<Monomial> toMonomials(const testoracle::Poly& poly) {
  std::vector<Monomial> out;
  for (const auto& m : poly) out.emplace_back(m);
  return out;
}

// Every monomial of degree d over the variables of q.
std::vector<Monomial> allOfDegree(const Program& p, NodeIndex q) {
  std::vector<VariableId> vars;
  for (auto v = p.vars(q).find_first(); v != VarSet::npos; v = p.vars(q).find_next(v))
    vars.push_back(static_cast<VariableId>(v));
  const std::size_t d = p.degree(q);
  std::vector<Monomial> out;
  std::vector<bool> pick(vars.size(), false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(std::min(d, vars.size())), true);
  if (d > vars.size()) return out;
  do {
    std::vector<VariableId> m;
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (pick[i]) m.push_back(vars[i]);
    out.emplace_back(m);
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return out;
}

}  // namespace

TEST_CASE("running example parses and validates") {
  Program p = fixture::runningExample();
  CHECK(p.size() == 20);
  CHECK(p.numVars() == 9);
  CHECK(validateProgram(p).ok());
  CHECK(p.toText() == Program::parse(p.toText()).toText());
}

TEST_CASE("validation reports structural violations") {
  SUBCASE("single input") {
    Program p({Node::input(0)}, {"x1"});
    CHECK(validateProgram(p).ok());
  }
  SUBCASE("times with shared variable") {
    Program p({Node::input(0), Node::input(0), Node::times(0, 1)}, {"x1"});
    CHECK(validateProgram(p).has(ViolationKind::NotMultilinear));
  }
  SUBCASE("plus of different degrees") {
    Program p({Node::input(0), Node::input(1), Node::times(0, 1), Node::input(2), Node::plus({2, 3})},
              {"a", "b", "c"});
    CHECK(validateProgram(p).has(ViolationKind::NotHomogeneous));
  }
  SUBCASE("plus feeding plus") {
    Program p({Node::input(0), Node::input(1), Node::plus({0, 1}), Node::plus({1, 2})}, {"a", "b"});
    CHECK(validateProgram(p).has(ViolationKind::PlusChildOfPlus));
  }
  SUBCASE("forward reference") {
    std::vector<Node> nodes{Node::input(0), Node::plus({2}), Node::input(1)};
    CHECK(validateNodes(nodes, 2).has(ViolationKind::ForwardReference));
    CHECK_THROWS_AS(Program::parse("input a\nplus 1\ninput b\n"), ParseError);
  }
}

TEST_CASE("degree follows the inductive rule") {
  Program p = fixture::runningExample();
  CHECK(p.degree(q13) == 1);
  CHECK(p.degree(q5) == 2);
  CHECK(p.degree(q0) == 4);
  for (const auto& m : testoracle::support(p)) CHECK(m.size() == 4);
}

TEST_CASE("support enumeration agrees with the top-down oracle") {
  Program p = fixture::runningExample();
  for (NodeIndex q = 0; q < p.size(); ++q)
    CHECK(enumerateSupport(p, q, kSupportCap) == toMonomials(testoracle::support(p, q)));
  CHECK(enumerateSupport(p).size() == 8);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Program r = randomProgram(seed);
    CHECK(enumerateSupport(r) == toMonomials(testoracle::support(r)));
  }
}

TEST_CASE("capped support splits nodes by size") {
  Program p = fixture::runningExample();
  SUBCASE("default threshold keeps everything exact") {
    SupportInfo info = cappedSupport(p, 16 * 9 * 20 * 20);
    for (NodeIndex q = 0; q < p.size(); ++q) {
      CHECK(info.isExact(q));
      CHECK(info.effectiveHeight[q] == 0);
    }
  }
  SUBCASE("cap 2 matches the oracle partition") {
    SupportInfo info = cappedSupport(p, 2);
    for (NodeIndex q = 0; q < p.size(); ++q) {
      const auto exact = testoracle::support(p, q);
      bool anyLargeChild = false;
      for (NodeIndex ch : p.node(q).children) anyLargeChild = anyLargeChild || !info.isExact(ch);
      CHECK(info.isExact(q) == (exact.size() <= 2 && !anyLargeChild));
      if (info.isExact(q)) CHECK(info.support(q) == toMonomials(exact));
    }
    CHECK(info.effectiveHeight[q0] > 0);
  }
  SUBCASE("input node with cap 1") {
    Program one({Node::input(0)}, {"x"});
    SupportInfo info = cappedSupport(one, 1);
    REQUIRE(info.isExact(0));
    CHECK(info.support(0) == std::vector<Monomial>{Monomial{0}});
  }
}

TEST_CASE("membership agrees with the oracle on every node") {
  Program p = fixture::runningExample();
  CHECK(containsMonomial(p, q0, x({3, 5, 8, 9})));
  CHECK_FALSE(containsMonomial(p, q6, x({1})));
  MembershipOracle oracle(p);
  for (NodeIndex q = 0; q < p.size(); ++q) {
    const auto exact = testoracle::support(p, q);
    for (const Monomial& m : allOfDegree(p, q)) {
      std::vector<std::uint32_t> v(m.vars().begin(), m.vars().end());
      CHECK(oracle.contains(q, m) == (exact.count(v) > 0));
    }
  }
}

TEST_CASE("derivation trees on the running example") {
  Program p = fixture::runningExample();
  DerivationTree red = derivationTree(p, q0, x({3, 5, 8, 9}));
  CHECK(red.find(q1) != DerivationTree::npos);
  CHECK(red.find(q2) == DerivationTree::npos);

  DerivationTree leaf = derivationTree(p, q13, x({3}));
  CHECK(leaf.size() == 1);
  CHECK_THROWS_AS(derivationTree(p, q0, x({1, 2, 3, 4})), NotInSupport);

  for (const Monomial& a : enumerateSupport(p)) CHECK(derivationTree(p, q0, a).size() <= 4 * p.degree(q0));

  SUBCASE("pruned trees") {
    SupportInfo all = cappedSupport(p, 16 * 9 * 400);
    for (const Monomial& a : enumerateSupport(p)) {
      DerivationTree t = derivationTree(p, q0, a);
      CHECK(derivationTreeStar(p, q0, a, all).size() == 1);
      for (std::size_t cap : {1, 2, 3}) {
        SupportInfo info = cappedSupport(p, cap);
        DerivationTree star = derivationTreeStar(p, q0, a, info);
        for (const auto& e : star.entries) {
          CHECK(t.nodeSet().count(e.node));
          CHECK(e.kids.empty() == (info.effectiveHeight[e.node] == 0));
        }
      }
    }
    // With no non-input node small enough, tree* is the whole tree.
    Program c = chainProgram(4);
    SupportInfo inputsOnly = cappedSupport(c, 1);
    for (const Monomial& a : enumerateSupport(c))
      CHECK(derivationTreeStar(c, c.root(), a, inputsOnly).nodeSet() == derivationTree(c, c.root(), a).nodeSet());
  }
}

TEST_CASE("last common subtree nodeset") {
  Program p = fixture::runningExample();
  DerivationTree t1 = derivationTree(p, q0, x({3, 5, 8, 9}));
  DerivationTree t2 = derivationTree(p, q0, x({1, 3, 8, 9}));
  CHECK(lastCommonSubtreeNodeset(t1, t2) == Antichain{q6, q13});
  CHECK(lastCommonSubtreeNodeset(t1, t1) == Antichain{q0});

  const auto supp = enumerateSupport(p);
  for (const Monomial& a : supp)
    for (const Monomial& b : supp) {
      if (a == b) continue;
      DerivationTree ta = derivationTree(p, q0, a), tb = derivationTree(p, q0, b);
      Antichain tau = lastCommonSubtreeNodeset(ta, tb);
      CHECK(isAntichain(ta, tau));
      CHECK(isAntichain(tb, tau));
      for (NodeIndex q : tau) CHECK(DerivationTree::subtreeEqual(ta, ta.find(q), tb, tb.find(q)));
    }
}

TEST_CASE("mutations on the running example") {
  Program p = fixture::runningExample();
  SupportInfo info = cappedSupport(p, 1000);
  const Antichain tau{q6, q13};
  auto below = mutationsBelow(p, x({1, 3, 8, 9}), tau, info);
  CHECK(below == std::vector<Monomial>{x({1, 3, 6, 7})});
  auto cls = mutationClass(p, q0, x({1, 3, 8, 9}), tau, info);
  CHECK(std::find(cls.begin(), cls.end(), x({3, 5, 8, 9})) != cls.end());
  for (const Monomial& b : cls)
    CHECK(lastCommonSubtreeNodeset(derivationTree(p, q0, x({1, 3, 8, 9})), derivationTree(p, q0, b)) == tau);
}
