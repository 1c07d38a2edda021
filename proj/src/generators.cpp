#include "slicecount/generators.hpp"

#include <algorithm>
#include <map>

#include "slicecount/rng.hpp"

namespace slicecount {

namespace {

class Dice {
 public:
  explicit Dice(std::uint64_t seed) : rng_(mix64(seed ^ 0x5851f42d4c957f2dULL)) {}
  std::size_t below(std::size_t n) { return n <= 1 ? 0 : static_cast<std::size_t>(rng_() % n); }
  bool chance(double p) { return rng_.uniform() < p; }
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  SplitMix64 rng_;
};

}  // namespace

Grammar randomGrammar(std::uint64_t seed, const GrammarShape& shape) {
  static const char* kNames[] = {"S", "A", "B", "C", "D", "E", "F", "G"};
  static const char* kLetters[] = {"a", "b", "c", "d"};
  if (shape.nonterminals < 1 || shape.nonterminals > 8 || shape.alphabet < 1 || shape.alphabet > 4)
    throw std::invalid_argument("grammar shape out of range");
  Dice dice(seed);
  Grammar g;
  for (std::size_t i = 0; i < shape.nonterminals; ++i) g.nonterminals.push_back(kNames[i]);
  for (std::size_t i = 0; i < shape.alphabet; ++i) g.terminals.push_back(kLetters[i]);
  g.start = 0;
  for (SymbolId a = 0; a < shape.nonterminals; ++a) {
    const std::size_t rules = 1 + dice.below(shape.maxRulesPerNonterminal);
    for (std::size_t k = 0; k < rules; ++k) {
      Rule r;
      r.lhs = a;
      std::size_t len = dice.chance(shape.epsilonProbability) ? 0 : 1 + dice.below(shape.maxRhs);
      for (std::size_t i = 0; i < len; ++i) {
        if (dice.chance(shape.terminalProbability))
          r.rhs.push_back(Symbol{true, static_cast<SymbolId>(dice.below(shape.alphabet))});
        else
          r.rhs.push_back(Symbol{false, static_cast<SymbolId>(dice.below(shape.nonterminals))});
      }
      if (std::find(g.rules.begin(), g.rules.end(), r) == g.rules.end()) g.rules.push_back(std::move(r));
    }
  }
  return g;
}

NnfCircuit randomDnnf(std::uint64_t seed, const DnnfShape& shape) {
  if (shape.numVars < 1) throw std::invalid_argument("need at least one variable");
  Dice dice(seed);
  NnfCircuit c;
  c.numVars = shape.numVars;
  std::map<int, std::uint32_t> literals;
  auto emit = [&](NnfNode n) {
    c.nodes.push_back(std::move(n));
    return static_cast<std::uint32_t>(c.nodes.size() - 1);
  };
  auto lit = [&](int l) {
    auto [it, fresh] = literals.try_emplace(l, 0);
    if (fresh) it->second = emit(NnfNode::lit(l));
    return it->second;
  };
  auto randomLit = [&](std::uint32_t v) { return lit(dice.chance(0.5) ? static_cast<int>(v) : -static_cast<int>(v)); };

  auto gen = [&](auto& self, std::vector<std::uint32_t> vars, std::size_t depth) -> std::uint32_t {
    if (vars.size() == 1) {
      switch (dice.below(3)) {
        case 0: return lit(static_cast<int>(vars[0]));
        case 1: return lit(-static_cast<int>(vars[0]));
        default: {
          auto a = lit(static_cast<int>(vars[0])), b = lit(-static_cast<int>(vars[0]));
          return emit(NnfNode::disj({a, b}));
        }
      }
    }
    if (depth == 0) {
      std::vector<std::uint32_t> kids;
      for (auto v : vars) kids.push_back(randomLit(v));
      return emit(NnfNode::conj(std::move(kids)));
    }
    const std::size_t fan = 2 + dice.below(std::max<std::size_t>(1, shape.maxFanout - 1));
    if (dice.chance(shape.orProbability)) {
      std::vector<std::uint32_t> kids;
      for (std::size_t i = 0; i < fan; ++i) {
        if (dice.chance(shape.constantProbability)) {
          kids.push_back(emit(dice.chance(0.5) ? NnfNode{NnfKind::True, 0, {}} : NnfNode{NnfKind::False, 0, {}}));
          continue;
        }
        std::vector<std::uint32_t> sub;
        if (shape.smooth) {
          sub = vars;
        } else {
          for (auto v : vars)
            if (dice.chance(0.7)) sub.push_back(v);
          if (sub.empty()) sub.push_back(vars[dice.below(vars.size())]);
        }
        kids.push_back(self(self, std::move(sub), depth - 1));
      }
      return emit(NnfNode::disj(std::move(kids)));
    }
    std::vector<std::uint32_t> shuffled = vars;
    dice.shuffle(shuffled);
    const std::size_t parts = std::min(fan, shuffled.size());
    std::vector<std::uint32_t> kids;
    std::size_t begin = 0;
    for (std::size_t i = 0; i < parts; ++i) {
      std::size_t remaining = parts - i - 1;
      std::size_t maxEnd = shuffled.size() - remaining;
      std::size_t end = i + 1 == parts ? shuffled.size() : begin + 1 + dice.below(maxEnd - begin);
      std::vector<std::uint32_t> part(shuffled.begin() + static_cast<std::ptrdiff_t>(begin),
                                      shuffled.begin() + static_cast<std::ptrdiff_t>(end));
      std::sort(part.begin(), part.end());
      kids.push_back(self(self, std::move(part), depth - 1));
      begin = end;
    }
    return emit(NnfNode::conj(std::move(kids)));
  };

  std::vector<std::uint32_t> all;
  for (std::uint32_t v = 1; v <= shape.numVars; ++v) all.push_back(v);
  std::uint32_t root = gen(gen, all, shape.maxDepth);
  if (root != c.root()) emit(NnfNode::conj({root}));
  return shape.smooth ? smooth(c) : c;
}

Program randomProgram(std::uint64_t seed, const ProgramShape& shape) {
  if (shape.degree < 1 || shape.numVars < shape.degree)
    throw std::invalid_argument("program shape needs numVars >= degree >= 1");
  if (shape.minTerms < 1 || shape.minTerms > shape.maxTerms || shape.minLeafFanin < 1 ||
      shape.minLeafFanin > shape.maxLeafFanin)
    throw std::invalid_argument("program shape has an empty term or fan-in range");
  auto between = [&](Dice& d, std::size_t lo, std::size_t hi) { return lo + d.below(hi - lo + 1); };
  Dice dice(seed);
  std::vector<Node> nodes;
  std::vector<std::string> names;
  for (std::size_t v = 0; v < shape.numVars; ++v) names.push_back("x" + std::to_string(v + 1));
  std::map<VariableId, NodeIndex> inputs;
  std::map<std::pair<NodeIndex, NodeIndex>, NodeIndex> timesNodes;
  std::map<std::pair<std::vector<VariableId>, std::size_t>, NodeIndex> cache;
  auto emit = [&](Node n) {
    nodes.push_back(std::move(n));
    return static_cast<NodeIndex>(nodes.size() - 1);
  };
  auto input = [&](VariableId v) {
    auto [it, fresh] = inputs.try_emplace(v, 0);
    if (fresh) it->second = emit(Node::input(v));
    return it->second;
  };

  auto gen = [&](auto& self, std::vector<VariableId> vars, std::size_t d) -> NodeIndex {
    auto key = std::make_pair(vars, d);
    if (auto it = cache.find(key); it != cache.end() && dice.chance(shape.reuseProbability)) return it->second;
    NodeIndex out;
    if (d == 1) {
      std::vector<VariableId> pick = vars;
      dice.shuffle(pick);
      const std::size_t hi = std::min(pick.size(), shape.maxLeafFanin);
      pick.resize(between(dice, std::min(hi, shape.minLeafFanin), hi));
      std::vector<NodeIndex> kids;
      for (auto v : pick) kids.push_back(input(v));
      std::sort(kids.begin(), kids.end());
      out = kids.size() == 1 ? kids[0] : emit(Node::plus(kids));
    } else {
      const std::size_t terms = between(dice, shape.minTerms, shape.maxTerms);
      std::vector<NodeIndex> kids;
      for (std::size_t t = 0; t < terms; ++t) {
        const std::size_t d1 = 1 + dice.below(d - 1), d2 = d - d1;
        std::vector<VariableId> shuffled = vars;
        dice.shuffle(shuffled);
        const std::size_t split = d1 + dice.below(shuffled.size() - d2 - d1 + 1);
        std::vector<VariableId> v1(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(split));
        std::vector<VariableId> v2(shuffled.begin() + static_cast<std::ptrdiff_t>(split), shuffled.end());
        std::sort(v1.begin(), v1.end());
        std::sort(v2.begin(), v2.end());
        NodeIndex a = self(self, std::move(v1), d1);
        NodeIndex b = self(self, std::move(v2), d2);
        auto [it, fresh] = timesNodes.try_emplace({a, b}, 0);
        if (fresh) it->second = emit(Node::times(a, b));
        kids.push_back(it->second);
      }
      std::sort(kids.begin(), kids.end());
      kids.erase(std::unique(kids.begin(), kids.end()), kids.end());
      out = kids.size() == 1 ? kids[0] : emit(Node::plus(kids));
    }
    cache[key] = out;
    return out;
  };

  std::vector<VariableId> all;
  for (std::size_t v = 0; v < shape.numVars; ++v) all.push_back(static_cast<VariableId>(v));
  NodeIndex root = gen(gen, all, shape.degree);
  nodes.resize(root + 1);
  return Program(std::move(nodes), std::move(names)).compacted();
}

Program chainProgram(std::size_t n) {
  if (n < 1) throw std::invalid_argument("chain degree must be positive");
  std::vector<Node> nodes;
  std::vector<std::string> names;
  auto emit = [&](Node nd) {
    nodes.push_back(std::move(nd));
    return static_cast<NodeIndex>(nodes.size() - 1);
  };
  auto fresh = [&] {
    names.push_back("v" + std::to_string(names.size() + 1));
    return emit(Node::input(static_cast<VariableId>(names.size() - 1)));
  };
  NodeIndex x = fresh(), y = fresh();
  NodeIndex cur = emit(Node::plus({x, y}));
  for (std::size_t k = 2; k <= n; ++k) {
    NodeIndex a = fresh(), b = fresh();
    NodeIndex t1 = emit(Node::times(cur, a));
    NodeIndex t2 = emit(Node::times(cur, b));
    cur = emit(Node::plus({t1, t2}));
  }
  return Program(std::move(nodes), std::move(names));
}

Program combProgram(std::size_t n, std::size_t teeth) {
  if (n < 1 || teeth < 1) throw std::invalid_argument("comb needs n >= 1 and teeth >= 1");
  std::vector<Node> nodes;
  std::vector<std::string> names;
  auto emit = [&](Node nd) {
    nodes.push_back(std::move(nd));
    return static_cast<NodeIndex>(nodes.size() - 1);
  };
  auto tooth = [&] {
    std::vector<NodeIndex> kids;
    for (std::size_t i = 0; i < teeth; ++i) {
      names.push_back("v" + std::to_string(names.size() + 1));
      kids.push_back(emit(Node::input(static_cast<VariableId>(names.size() - 1))));
    }
    return emit(Node::plus(kids));
  };
  NodeIndex cur = tooth();
  for (std::size_t k = 2; k <= n; ++k) {
    NodeIndex t = tooth();
    NodeIndex prod = emit(k % 2 ? Node::times(t, cur) : Node::times(cur, t));
    cur = emit(Node::plus({prod}));
  }
  return Program(std::move(nodes), std::move(names));
}

}  // namespace slicecount
