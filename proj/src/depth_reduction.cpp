#include "slicecount/depth_reduction.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <unordered_map>

namespace slicecount {

std::size_t depthBound(std::size_t degree) {
  std::size_t lg = 0;
  while ((std::size_t{1} << lg) < degree) ++lg;
  return 3 * std::max<std::size_t>(1, lg);
}

namespace {

constexpr NodeIndex kZero = std::numeric_limits<NodeIndex>::max();
constexpr NodeIndex kOne = kZero - 1;

// Hash-consing builder over support semantics.
class Builder {
 public:
  NodeIndex input(VariableId v) {
    auto [it, fresh] = inputs_.try_emplace(v, 0);
    if (fresh) it->second = emit(Node::input(v), 0);
    return it->second;
  }

  NodeIndex plus(std::vector<NodeIndex> terms) {
    std::vector<NodeIndex> kids;
    bool one = false;
    for (NodeIndex t : terms) {
      if (t == kZero) continue;
      if (t == kOne) {
        one = true;
        continue;
      }
      if (nodes_[t].kind == NodeKind::Plus)
        kids.insert(kids.end(), nodes_[t].children.begin(), nodes_[t].children.end());
      else
        kids.push_back(t);
    }
    if (one) return kOne;  // degree-0 sums only arise as sums of units
    std::sort(kids.begin(), kids.end());
    kids.erase(std::unique(kids.begin(), kids.end()), kids.end());
    if (kids.empty()) return kZero;
    if (kids.size() == 1) return kids[0];
    auto [it, fresh] = plus_.try_emplace(kids, 0);
    if (fresh) {
      std::size_t h = 0;
      for (NodeIndex k : kids) h = std::max(h, height_[k]);
      it->second = emit(Node::plus(kids), h + 1);
    }
    return it->second;
  }

  NodeIndex times(std::vector<NodeIndex> factors) {
    std::vector<NodeIndex> fs;
    for (NodeIndex f : factors) {
      if (f == kZero) return kZero;
      if (f != kOne) fs.push_back(f);
    }
    if (fs.empty()) return kOne;
    // Pair the two shallowest factors first.
    while (fs.size() > 1) {
      std::sort(fs.begin(), fs.end(), [&](NodeIndex a, NodeIndex b) {
        return height_[a] != height_[b] ? height_[a] > height_[b] : a > b;
      });
      NodeIndex a = fs.back();
      fs.pop_back();
      NodeIndex b = fs.back();
      fs.pop_back();
      auto key = std::minmax(a, b);
      auto [it, fresh] = times_.try_emplace({key.first, key.second}, 0);
      if (fresh)
        it->second = emit(Node::times(key.first, key.second), std::max(height_[a], height_[b]) + 1);
      fs.push_back(it->second);
    }
    return fs[0];
  }

  std::vector<Node> take(NodeIndex root) {
    nodes_.resize(root + 1);
    return std::move(nodes_);
  }

 private:
  NodeIndex emit(Node n, std::size_t h) {
    nodes_.push_back(std::move(n));
    height_.push_back(h);
    return static_cast<NodeIndex>(nodes_.size() - 1);
  }

  std::vector<Node> nodes_;
  std::vector<std::size_t> height_;
  std::map<VariableId, NodeIndex> inputs_;
  std::map<std::pair<NodeIndex, NodeIndex>, NodeIndex> times_;
  std::map<std::vector<NodeIndex>, NodeIndex> plus_;
};

class Reducer {
 public:
  explicit Reducer(const Program& p) : p_(p), below_(p.size()), plusBelow_(p.size()) {
    for (NodeIndex u = 0; u < p.size(); ++u) {
      below_[u].resize(p.size());
      plusBelow_[u].resize(p.size());
      below_[u].set(u);
      plusBelow_[u].set(u);
      for (NodeIndex c : p.node(u).children) {
        below_[u] |= below_[c];
        if (p.node(u).kind == NodeKind::Plus) plusBelow_[u] |= plusBelow_[c];
      }
    }
  }

  NodeIndex full(NodeIndex u) {
    if (auto it = full_.find(u); it != full_.end()) return it->second;
    NodeIndex out;
    const std::size_t d = p_.degree(u);
    if (d == 1) {
      std::vector<NodeIndex> terms;
      const VarSet& vs = p_.vars(u);
      for (auto v = vs.find_first(); v != VarSet::npos; v = vs.find_next(v))
        terms.push_back(b_.input(static_cast<VariableId>(v)));
      out = b_.plus(std::move(terms));
    } else {
      const std::size_t m = (d + 1) / 2;
      std::vector<NodeIndex> terms;
      forEachBelow(u, [&](NodeIndex t) {
        const Node& nd = p_.node(t);
        if (nd.kind != NodeKind::Times || p_.degree(t) <= m) return;
        NodeIndex l = nd.children[0], r = nd.children[1];
        if (p_.degree(l) > m || p_.degree(r) > m) return;
        terms.push_back(b_.times({partial(u, t), full(l), full(r)}));
      });
      out = b_.plus(std::move(terms));
    }
    full_.emplace(u, out);
    return out;
  }

  // Support of u with one occurrence of w replaced by the unit.
  NodeIndex partial(NodeIndex u, NodeIndex w) {
    if (u == w) return kOne;
    if (!below_[u].test(w)) return kZero;
    const std::size_t D = p_.degree(u) - p_.degree(w);
    if (D == 0) return plusBelow_[u].test(w) ? kOne : kZero;
    auto key = std::make_pair(u, w);
    if (auto it = partial_.find(key); it != partial_.end()) return it->second;
    const std::size_t m = p_.degree(w) + D / 2;
    std::vector<NodeIndex> terms;
    forEachBelow(u, [&](NodeIndex t) {
      const Node& nd = p_.node(t);
      if (nd.kind != NodeKind::Times || p_.degree(t) <= m) return;
      for (int side = 0; side < 2; ++side) {
        NodeIndex t1 = nd.children[side], t2 = nd.children[1 - side];
        if (p_.degree(t1) > m || !below_[t1].test(w)) continue;
        terms.push_back(b_.times({partial(u, t), partial(t1, w), full(t2)}));
      }
    });
    NodeIndex out = b_.plus(std::move(terms));
    partial_.emplace(key, out);
    return out;
  }

  std::vector<Node> finish(NodeIndex root) { return b_.take(root); }

 private:
  template <class F>
  void forEachBelow(NodeIndex u, F&& f) {
    for (auto t = below_[u].find_first(); t != VarSet::npos; t = below_[u].find_next(t))
      f(static_cast<NodeIndex>(t));
  }

  const Program& p_;
  Builder b_;
  std::vector<boost::dynamic_bitset<std::uint64_t>> below_;
  std::vector<boost::dynamic_bitset<std::uint64_t>> plusBelow_;
  std::unordered_map<NodeIndex, NodeIndex> full_;
  std::map<std::pair<NodeIndex, NodeIndex>, NodeIndex> partial_;
};

}  // namespace

Program reduceDepth(const Program& input) {
  Program p = input.compacted();
  if (p.depth() <= depthBound(p.degree())) return p;
  Reducer r(p);
  NodeIndex root = r.full(p.root());
  if (root == kOne || root == kZero) throw std::logic_error("depth reduction lost the support");
  return Program(r.finish(root), p.varNames()).compacted();
}

}  // namespace slicecount
