#pragma once

#include <cstddef>
#include <optional>
#include <unordered_map>
#include <vector>

#include "slicecount/program.hpp"

namespace slicecount {

/// Per-node support, known exactly when it has at most `threshold` monomials.
struct SupportInfo {
  std::size_t threshold = 0;
  /// Sorted, deduplicated support for Exact nodes; nullopt for Large nodes.
  std::vector<std::optional<std::vector<Monomial>>> exact;
  std::vector<std::size_t> effectiveHeight;

  bool isExact(NodeIndex q) const { return exact[q].has_value(); }
  const std::vector<Monomial>& support(NodeIndex q) const { return *exact[q]; }
  std::size_t maxEffectiveHeight() const;
};

/// Bottom-up capped enumeration. A node is Exact iff |supp| <= cap; a node
/// with a Large child is Large. Effective height is 0 for Exact nodes and
/// 1 + max child height otherwise.
SupportInfo cappedSupport(const Program& p, std::size_t cap);

/// Support-membership queries with memoization keyed on
/// (node, restriction of the monomial to var(node)). Not thread-safe; use
/// one instance per thread.
class MembershipOracle {
 public:
  explicit MembershipOracle(const Program& p, const SupportInfo* info = nullptr)
      : p_(&p), info_(info) {}

  bool contains(NodeIndex q, const Monomial& alpha);

 private:
  struct Key {
    NodeIndex node;
    Monomial mono;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      return MonomialHash{}(k.mono) * 31 + k.node;
    }
  };

  bool containsRestricted(NodeIndex q, const Monomial& alpha);

  const Program* p_;
  const SupportInfo* info_;
  std::unordered_map<Key, bool, KeyHash> memo_;
};

bool containsMonomial(const Program& p, NodeIndex q, const Monomial& alpha);

}  // namespace slicecount
