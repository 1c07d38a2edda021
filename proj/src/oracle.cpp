#include "slicecount/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <random>

namespace slicecount {

std::vector<Monomial> enumerateSupport(const Program& p, NodeIndex q, std::uint64_t hardCap) {
  std::vector<bool> need(p.size(), false);
  need[q] = true;
  for (NodeIndex i = q + 1; i-- > 0;)
    if (need[i])
      for (NodeIndex c : p.node(i).children) need[c] = true;

  std::vector<std::vector<Monomial>> supp(p.size());
  auto refuse = [&](NodeIndex i, std::uint64_t size) {
    throw OracleRefusal("support of node " + std::to_string(i) + " has at least " + std::to_string(size) +
                        " monomials, above the cap of " + std::to_string(hardCap));
  };
  for (NodeIndex i = 0; i <= q; ++i) {
    if (!need[i]) continue;
    const Node& nd = p.node(i);
    auto& out = supp[i];
    if (nd.kind == NodeKind::Input) {
      out.push_back(Monomial::single(nd.var));
    } else if (nd.kind == NodeKind::Times) {
      const auto& a = supp[nd.children[0]];
      const auto& b = supp[nd.children[1]];
      const double size = static_cast<double>(a.size()) * static_cast<double>(b.size());
      if (size > static_cast<double>(hardCap)) refuse(i, static_cast<std::uint64_t>(size));
      for (const auto& x : a)
        for (const auto& y : b) {
          bool disjoint = true;
          Monomial m = Monomial::merge(x, y, &disjoint);
          if (disjoint) out.push_back(std::move(m));  // x*x is not multilinear
        }
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
    } else {
      for (NodeIndex c : nd.children) out.insert(out.end(), supp[c].begin(), supp[c].end());
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      if (out.size() > hardCap) refuse(i, out.size());
    }
  }
  return std::move(supp[q]);
}

std::vector<Monomial> enumerateSupport(const Program& p, std::uint64_t hardCap) {
  return enumerateSupport(p, p.root(), hardCap);
}

std::uint64_t bruteCfgCount(const Grammar& g, std::size_t n, std::uint64_t wordCap) {
  const std::uint64_t k = g.terminals.size();
  if (n == 0) return derives(g, {}) ? 1 : 0;
  if (k == 0) return 0;
  if (std::pow(static_cast<double>(k), static_cast<double>(n)) > static_cast<double>(wordCap))
    throw OracleRefusal(std::to_string(k) + "^" + std::to_string(n) + " words exceed the cap of " +
                        std::to_string(wordCap));
  Grammar cnf = toCnf(g);
  Word w(n, 0);
  std::uint64_t count = 0;
  for (;;) {
    if (cykAccepts(cnf, w)) ++count;
    std::size_t i = 0;
    while (i < n && ++w[i] == k) w[i++] = 0;
    if (i == n) break;
  }
  return count;
}

std::uint64_t bruteDnnfCount(const NnfCircuit& c, std::size_t varCap) {
  if (c.numVars > varCap)
    throw OracleRefusal(std::to_string(c.numVars) + " variables exceed the cap of " + std::to_string(varCap));
  std::uint64_t count = 0;
  std::vector<bool> a(c.numVars, false);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << c.numVars); ++mask) {
    for (std::size_t v = 0; v < c.numVars; ++v) a[v] = (mask >> v) & 1;
    if (c.evaluate(a)) ++count;
  }
  return count;
}

Monomial exactUniformSample(const Program& p, SplitMix64& rng, std::uint64_t hardCap) {
  auto supp = enumerateSupport(p, hardCap);
  if (supp.empty()) throw std::invalid_argument("cannot sample from an empty support");
  std::uniform_int_distribution<std::size_t> pick(0, supp.size() - 1);
  return supp[pick(rng)];
}

}  // namespace slicecount
