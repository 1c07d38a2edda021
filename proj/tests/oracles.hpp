#pragma once
// Reference implementations used only by tests. They deliberately take
// different routes from the library code they check.

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <map>
#include <set>
#include <tuple>
#include <vector>

#include "slicecount/grammar.hpp"
#include "slicecount/nnf.hpp"
#include "slicecount/program.hpp"

namespace testoracle {

using slicecount::NodeIndex;
using slicecount::NodeKind;
using slicecount::Program;
using Mono = std::vector<std::uint32_t>;  // sorted variable ids
using Poly = std::set<Mono>;

// Top-down memoized expansion of the polynomial support at q.
inline const Poly& expand(const Program& p, NodeIndex q, std::map<NodeIndex, Poly>& memo) {
  if (auto it = memo.find(q); it != memo.end()) return it->second;
  const auto& nd = p.node(q);
  Poly out;
  if (nd.kind == NodeKind::Input) {
    out.insert(Mono{nd.var});
  } else if (nd.kind == NodeKind::Plus) {
    for (NodeIndex c : nd.children) {
      const Poly& s = expand(p, c, memo);
      out.insert(s.begin(), s.end());
    }
  } else {
    const Poly& a = expand(p, nd.children[0], memo);
    const Poly& b = expand(p, nd.children[1], memo);
    for (const Mono& x : a)
      for (const Mono& y : b) {
        Mono m;
        std::set_union(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(m));
        if (m.size() == x.size() + y.size()) out.insert(m);
      }
  }
  return memo.emplace(q, std::move(out)).first->second;
}

inline Poly support(const Program& p, NodeIndex q) {
  std::map<NodeIndex, Poly> memo;
  return expand(p, q, memo);
}
inline Poly support(const Program& p) { return support(p, p.root()); }

// Earley recognizer with the nullable-completion fix; accepts epsilon and
// unit rules directly, so it never goes through normal forms.
inline bool earleyAccepts(const slicecount::Grammar& g, const std::vector<std::uint32_t>& w) {
  const std::size_t nnt = g.nonterminals.size();
  std::vector<bool> nullable(nnt, false);
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& r : g.rules) {
      if (nullable[r.lhs]) continue;
      bool all = true;
      for (const auto& s : r.rhs) all = all && !s.terminal && nullable[s.id];
      if (all) nullable[r.lhs] = changed = true;
    }
  }
  using Item = std::tuple<std::size_t, std::size_t, std::size_t>;  // rule, dot, origin
  std::vector<std::set<Item>> chart(w.size() + 1);
  std::vector<std::vector<Item>> agenda(w.size() + 1);
  auto add = [&](std::size_t k, Item it) {
    if (chart[k].insert(it).second) agenda[k].push_back(it);
  };
  for (std::size_t r = 0; r < g.rules.size(); ++r)
    if (g.rules[r].lhs == g.start) add(0, {r, 0, 0});
  for (std::size_t k = 0; k <= w.size(); ++k) {
    for (std::size_t idx = 0; idx < agenda[k].size(); ++idx) {
      auto [r, dot, origin] = agenda[k][idx];
      const auto& rule = g.rules[r];
      if (dot == rule.rhs.size()) {
        for (const auto& [r2, d2, o2] : std::vector<Item>(chart[origin].begin(), chart[origin].end())) {
          const auto& rr = g.rules[r2];
          if (d2 < rr.rhs.size() && !rr.rhs[d2].terminal && rr.rhs[d2].id == rule.lhs) add(k, {r2, d2 + 1, o2});
        }
        continue;
      }
      const auto& sym = rule.rhs[dot];
      if (sym.terminal) {
        if (k < w.size() && w[k] == sym.id) add(k + 1, {r, dot + 1, origin});
      } else {
        for (std::size_t r2 = 0; r2 < g.rules.size(); ++r2)
          if (g.rules[r2].lhs == sym.id) add(k, {r2, 0, k});
        if (nullable[sym.id]) add(k, {r, dot + 1, origin});
      }
    }
  }
  for (const auto& [r, dot, origin] : chart[w.size()])
    if (origin == 0 && g.rules[r].lhs == g.start && dot == g.rules[r].rhs.size()) return true;
  return false;
}

inline std::set<std::vector<std::uint32_t>> sliceLanguage(const slicecount::Grammar& g, std::size_t n) {
  std::set<std::vector<std::uint32_t>> out;
  const std::size_t k = g.terminals.size();
  std::vector<std::uint32_t> w(n, 0);
  while (true) {
    if (earleyAccepts(g, w)) out.insert(w);
    std::size_t i = 0;
    while (i < n && ++w[i] == k) w[i++] = 0;
    if (i == n) break;
  }
  return out;
}

inline bool evalNnf(const slicecount::NnfCircuit& c, std::uint32_t q, std::uint64_t bits) {
  const auto& nd = c.nodes[q];
  switch (nd.kind) {
    case slicecount::NnfKind::True: return true;
    case slicecount::NnfKind::False: return false;
    case slicecount::NnfKind::Literal: {
      const int v = nd.literal > 0 ? nd.literal : -nd.literal;
      const bool val = (bits >> (v - 1)) & 1;
      return nd.literal > 0 ? val : !val;
    }
    case slicecount::NnfKind::And:
      for (auto ch : nd.children)
        if (!evalNnf(c, ch, bits)) return false;
      return true;
    case slicecount::NnfKind::Or:
      for (auto ch : nd.children)
        if (evalNnf(c, ch, bits)) return true;
      return false;
  }
  return false;
}

inline std::set<std::uint64_t> models(const slicecount::NnfCircuit& c) {
  std::set<std::uint64_t> out;
  for (std::uint64_t b = 0; b < (std::uint64_t{1} << c.numVars); ++b)
    if (evalNnf(c, c.root(), b)) out.insert(b);
  return out;
}

}  // namespace testoracle
