#include "slicecount/derivation.hpp"

#include <algorithm>
#include <map>

namespace slicecount {

std::set<NodeIndex> DerivationTree::nodeSet() const {
  std::set<NodeIndex> s;
  for (const auto& e : entries) s.insert(e.node);
  return s;
}

std::size_t DerivationTree::find(NodeIndex q) const {
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (entries[i].node == q) return i;
  return npos;
}

bool DerivationTree::subtreeEqual(const DerivationTree& a, std::size_t i, const DerivationTree& b,
                                  std::size_t j) {
  const Entry& x = a.entries[i];
  const Entry& y = b.entries[j];
  if (x.node != y.node || x.mono != y.mono || x.kids.size() != y.kids.size()) return false;
  for (std::size_t k = 0; k < x.kids.size(); ++k)
    if (!subtreeEqual(a, x.kids[k], b, y.kids[k])) return false;
  return true;
}

namespace {

void build(const Program& p, NodeIndex q, const Monomial& alpha, MembershipOracle& oracle,
           const SupportInfo* heights, DerivationTree& t, std::size_t parent) {
  const std::size_t self = t.entries.size();
  t.entries.push_back({q, alpha, {}, parent});
  if (parent != DerivationTree::npos) t.entries[parent].kids.push_back(self);

  const Node& nd = p.node(q);
  if (nd.kind == NodeKind::Input) return;
  if (heights && heights->effectiveHeight[q] == 0) return;

  if (nd.kind == NodeKind::Times) {
    for (NodeIndex c : nd.children) build(p, c, restrict(alpha, p.vars(c)), oracle, heights, t, self);
    return;
  }
  for (NodeIndex c : nd.children) {
    if (oracle.contains(c, alpha)) {
      build(p, c, alpha, oracle, heights, t, self);
      return;
    }
  }
  throw NotInSupport("plus node without a child containing the monomial");
}

DerivationTree makeTree(const Program& p, NodeIndex q, const Monomial& alpha,
                        MembershipOracle& oracle, const SupportInfo* heights) {
  if (!oracle.contains(q, alpha))
    throw NotInSupport("monomial " + alpha.toString(p.varNames()) + " is not in supp(q" +
                       std::to_string(q) + ")");
  DerivationTree t;
  build(p, q, alpha, oracle, heights, t, DerivationTree::npos);
  return t;
}

}  // namespace

DerivationTree derivationTree(const Program& p, NodeIndex q, const Monomial& alpha,
                              MembershipOracle& oracle) {
  return makeTree(p, q, alpha, oracle, nullptr);
}

DerivationTree derivationTree(const Program& p, NodeIndex q, const Monomial& alpha) {
  MembershipOracle oracle(p);
  return makeTree(p, q, alpha, oracle, nullptr);
}

DerivationTree derivationTreeStar(const Program& p, NodeIndex q, const Monomial& alpha,
                                  const SupportInfo& heights, MembershipOracle& oracle) {
  return makeTree(p, q, alpha, oracle, &heights);
}

DerivationTree derivationTreeStar(const Program& p, NodeIndex q, const Monomial& alpha,
                                  const SupportInfo& heights) {
  MembershipOracle oracle(p, &heights);
  return makeTree(p, q, alpha, oracle, &heights);
}

Antichain lastCommonSubtreeNodeset(const DerivationTree& t1, const DerivationTree& t2) {
  // common[i]: subtree at entry i of t1 also occurs, identically, in t2.
  std::vector<bool> common(t1.size(), false);
  for (std::size_t i = 0; i < t1.size(); ++i) {
    std::size_t j = t2.find(t1.entries[i].node);
    common[i] = j != DerivationTree::npos && DerivationTree::subtreeEqual(t1, i, t2, j);
  }
  Antichain out;
  for (std::size_t i = 0; i < t1.size(); ++i) {
    if (!common[i]) continue;
    std::size_t parent = t1.entries[i].parent;
    if (parent == DerivationTree::npos || !common[parent]) out.insert(t1.entries[i].node);
  }
  return out;
}

Antichain lastCommonSubtreeNodeset(const DerivationTree& t1, const DerivationTree& t2,
                                   const DerivationTree& s1, const DerivationTree& s2) {
  Antichain full = lastCommonSubtreeNodeset(t1, t2);
  auto kept = s1.nodeSet();
  auto more = s2.nodeSet();
  kept.insert(more.begin(), more.end());
  Antichain out;
  for (NodeIndex q : full)
    if (kept.count(q)) out.insert(q);
  return out;
}

bool isAntichain(const DerivationTree& t, const Antichain& tau) {
  for (NodeIndex q : tau) {
    std::size_t i = t.find(q);
    if (i == DerivationTree::npos) return false;
    for (std::size_t a = t.entries[i].parent; a != DerivationTree::npos; a = t.entries[a].parent)
      if (tau.count(t.entries[a].node)) return false;
  }
  return true;
}

std::vector<Monomial> mutationClass(const Program& p, NodeIndex q, const Monomial& alpha,
                                    const Antichain& tau, const SupportInfo& info) {
  if (!info.isExact(q)) throw std::invalid_argument("mutationClass needs an exact support at q");
  MembershipOracle oracle(p, &info);
  DerivationTree base = derivationTree(p, q, alpha, oracle);
  std::vector<Monomial> out;
  for (const Monomial& other : info.support(q)) {
    DerivationTree t = derivationTree(p, q, other, oracle);
    if (lastCommonSubtreeNodeset(base, t) == tau) out.push_back(other);
  }
  return out;
}

std::vector<Monomial> mutationsBelow(const Program& p, const Monomial& alpha,
                                     const Antichain& tau, const SupportInfo& info) {
  VarSet below(p.numVars());
  for (NodeIndex q : tau) {
    if (!info.isExact(q)) throw std::invalid_argument("mutationsBelow needs exact supports on tau");
    below |= p.vars(q);
  }
  VarSet rest = below;
  rest.flip();
  std::vector<Monomial> partial{restrict(alpha, rest)};
  for (NodeIndex q : tau) {
    std::vector<Monomial> next;
    for (const auto& base : partial)
      for (const auto& beta : info.support(q)) next.push_back(Monomial::merge(base, beta));
    partial = std::move(next);
  }
  std::sort(partial.begin(), partial.end());
  partial.erase(std::unique(partial.begin(), partial.end()), partial.end());
  partial.erase(std::remove(partial.begin(), partial.end(), alpha), partial.end());
  return partial;
}

}  // namespace slicecount
