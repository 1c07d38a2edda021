#pragma once

#include <cstddef>
#include <set>
#include <vector>

#include "slicecount/support.hpp"

namespace slicecount {

/// Canonical construction witness of a monomial at a node. Plus tree-nodes
/// have one child (the first child, in program order, whose support holds
/// the monomial); Times tree-nodes have two; leaves have none.
struct DerivationTree {
  struct Entry {
    NodeIndex node;
    Monomial mono;                // restriction of the monomial to var(node)
    std::vector<std::size_t> kids;  // indices into `entries`
    std::size_t parent;           // npos for the root
  };
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::vector<Entry> entries;  // entries[0] is the root

  std::size_t size() const { return entries.size(); }
  /// Program nodes used by the tree.
  std::set<NodeIndex> nodeSet() const;
  /// Entry index holding program node q, or npos.
  std::size_t find(NodeIndex q) const;
  /// Structural equality of the subtrees rooted at entry i of a and entry j of b.
  static bool subtreeEqual(const DerivationTree& a, std::size_t i, const DerivationTree& b,
                           std::size_t j);
};

using Antichain = std::set<NodeIndex>;

class NotInSupport : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

DerivationTree derivationTree(const Program& p, NodeIndex q, const Monomial& alpha,
                              MembershipOracle& oracle);
DerivationTree derivationTree(const Program& p, NodeIndex q, const Monomial& alpha);

/// Like derivationTree, but every branch stops at a node of effective height 0.
DerivationTree derivationTreeStar(const Program& p, NodeIndex q, const Monomial& alpha,
                                  const SupportInfo& heights, MembershipOracle& oracle);
DerivationTree derivationTreeStar(const Program& p, NodeIndex q, const Monomial& alpha,
                                  const SupportInfo& heights);

/// Highest program nodes whose rooted subtrees coincide in both trees.
Antichain lastCommonSubtreeNodeset(const DerivationTree& t1, const DerivationTree& t2);

/// lcsn(t1, t2) restricted to the nodes kept by the pruned trees s1, s2.
Antichain lastCommonSubtreeNodeset(const DerivationTree& t1, const DerivationTree& t2,
                                   const DerivationTree& s1, const DerivationTree& s2);

/// True when no member of `tau` is an ancestor of another inside `t`.
bool isAntichain(const DerivationTree& t, const Antichain& tau);

/// { a' in supp(q) : lcsn(tree(alpha,q), tree(a',q)) == tau }, by filtering the
/// enumerated support. Requires q to be Exact in `info`.
std::vector<Monomial> mutationClass(const Program& p, NodeIndex q, const Monomial& alpha,
                                    const Antichain& tau, const SupportInfo& info);

/// Monomials obtained from alpha by swapping its restriction below each node of
/// tau for any other monomial of that node's support (alpha itself excluded).
std::vector<Monomial> mutationsBelow(const Program& p, const Monomial& alpha,
                                     const Antichain& tau, const SupportInfo& info);

}  // namespace slicecount
