#include "slicecount/support.hpp"

#include <algorithm>

namespace slicecount {

std::size_t SupportInfo::maxEffectiveHeight() const {
  return effectiveHeight.empty() ? 0
                                 : *std::max_element(effectiveHeight.begin(), effectiveHeight.end());
}

SupportInfo cappedSupport(const Program& p, std::size_t cap) {
  if (cap < 1) throw std::invalid_argument("support cap must be at least 1");
  SupportInfo info;
  info.threshold = cap;
  info.exact.resize(p.size());
  info.effectiveHeight.assign(p.size(), 0);

  for (NodeIndex q = 0; q < p.size(); ++q) {
    const Node& nd = p.node(q);
    auto markLarge = [&] {
      std::size_t h = 0;
      for (NodeIndex c : nd.children) h = std::max(h, info.effectiveHeight[c]);
      info.effectiveHeight[q] = h + 1;
    };
    if (nd.kind == NodeKind::Input) {
      info.exact[q] = std::vector<Monomial>{Monomial::single(nd.var)};
      continue;
    }
    bool childLarge = std::any_of(nd.children.begin(), nd.children.end(),
                                  [&](NodeIndex c) { return !info.exact[c]; });
    if (childLarge) {
      markLarge();
      continue;
    }
    if (nd.kind == NodeKind::Times) {
      const auto& a = *info.exact[nd.children[0]];
      const auto& b = *info.exact[nd.children[1]];
      if (a.size() * b.size() > cap) {
        markLarge();
        continue;
      }
      std::vector<Monomial> out;
      out.reserve(a.size() * b.size());
      for (const auto& x : a)
        for (const auto& y : b) out.push_back(Monomial::merge(x, y));
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      info.exact[q] = std::move(out);
    } else {
      std::vector<Monomial> out;
      bool large = false;
      for (NodeIndex c : nd.children) {
        const auto& s = *info.exact[c];
        std::vector<Monomial> merged;
        merged.reserve(out.size() + s.size());
        std::set_union(out.begin(), out.end(), s.begin(), s.end(), std::back_inserter(merged));
        out = std::move(merged);
        if (out.size() > cap) {
          large = true;
          break;
        }
      }
      if (large)
        markLarge();
      else
        info.exact[q] = std::move(out);
    }
  }
  return info;
}

bool MembershipOracle::contains(NodeIndex q, const Monomial& alpha) {
  if (alpha.degree() != p_->degree(q) || !isSubset(alpha, p_->vars(q))) return false;
  return containsRestricted(q, alpha);
}

// Precondition: alpha is a subset of var(q) with deg(alpha) == deg(q).
bool MembershipOracle::containsRestricted(NodeIndex q, const Monomial& alpha) {
  if (info_ && info_->isExact(q)) {
    const auto& s = info_->support(q);
    return std::binary_search(s.begin(), s.end(), alpha);
  }
  const Node& nd = p_->node(q);
  if (nd.kind == NodeKind::Input) return alpha.degree() == 1 && alpha.vars()[0] == nd.var;

  Key key{q, alpha};
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;

  bool result = false;
  if (nd.kind == NodeKind::Times) {
    NodeIndex l = nd.children[0], r = nd.children[1];
    Monomial left = restrict(alpha, p_->vars(l));
    Monomial right = restrict(alpha, p_->vars(r));
    result = left.degree() == p_->degree(l) && right.degree() == p_->degree(r) &&
             left.degree() + right.degree() == alpha.degree() && containsRestricted(l, left) &&
             containsRestricted(r, right);
  } else {
    for (NodeIndex c : nd.children) {
      if (p_->degree(c) == alpha.degree() && isSubset(alpha, p_->vars(c)) &&
          containsRestricted(c, alpha)) {
        result = true;
        break;
      }
    }
  }
  memo_.emplace(std::move(key), result);
  return result;
}

bool containsMonomial(const Program& p, NodeIndex q, const Monomial& alpha) {
  MembershipOracle oracle(p);
  return oracle.contains(q, alpha);
}

}  // namespace slicecount
