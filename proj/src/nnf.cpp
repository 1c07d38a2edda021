#include "slicecount/nnf.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace slicecount {

std::vector<std::vector<std::uint32_t>> NnfCircuit::varSets() const {
  std::vector<std::vector<std::uint32_t>> vs(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const NnfNode& nd = nodes[i];
    if (nd.kind == NnfKind::Literal) {
      vs[i] = {static_cast<std::uint32_t>(std::abs(nd.literal))};
      continue;
    }
    std::vector<std::uint32_t> acc;
    for (auto c : nd.children) {
      std::vector<std::uint32_t> merged;
      std::set_union(acc.begin(), acc.end(), vs[c].begin(), vs[c].end(), std::back_inserter(merged));
      acc = std::move(merged);
    }
    vs[i] = std::move(acc);
  }
  return vs;
}

bool NnfCircuit::evaluate(const std::vector<bool>& assignment) const {
  std::vector<bool> val(nodes.size(), false);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const NnfNode& nd = nodes[i];
    switch (nd.kind) {
      case NnfKind::True: val[i] = true; break;
      case NnfKind::False: val[i] = false; break;
      case NnfKind::Literal: {
        bool x = assignment[static_cast<std::size_t>(std::abs(nd.literal)) - 1];
        val[i] = nd.literal > 0 ? x : !x;
        break;
      }
      case NnfKind::And:
        val[i] = std::all_of(nd.children.begin(), nd.children.end(), [&](auto c) { return bool(val[c]); });
        break;
      case NnfKind::Or:
        val[i] = std::any_of(nd.children.begin(), nd.children.end(), [&](auto c) { return bool(val[c]); });
        break;
    }
  }
  return val.back();
}

std::string NnfCircuit::toText() const {
  std::size_t edges = 0;
  for (const auto& nd : nodes) edges += nd.children.size();
  std::ostringstream os;
  os << "nnf " << nodes.size() << ' ' << edges << ' ' << numVars << '\n';
  for (const auto& nd : nodes) {
    switch (nd.kind) {
      case NnfKind::Literal: os << "L " << nd.literal; break;
      case NnfKind::True: os << "A 0"; break;
      case NnfKind::False: os << "O 0 0"; break;
      case NnfKind::And:
        os << "A " << nd.children.size();
        for (auto c : nd.children) os << ' ' << c;
        break;
      case NnfKind::Or:
        os << "O 0 " << nd.children.size();
        for (auto c : nd.children) os << ' ' << c;
        break;
    }
    os << '\n';
  }
  return os.str();
}

NnfCircuit parseNnf(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineNo = 0;
  NnfCircuit c;
  bool haveHeader = false;
  std::size_t declaredNodes = 0, declaredEdges = 0, edges = 0;

  auto nextInt = [&](std::istringstream& ls, const char* what) {
    long long v;
    if (!(ls >> v)) throw ParseError(lineNo, std::string("expected ") + what);
    return v;
  };

  while (std::getline(in, line)) {
    ++lineNo;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag == "c") continue;
    if (!haveHeader) {
      if (tag != "nnf") throw ParseError(lineNo, "malformed header: expected 'nnf'");
      long long nn = nextInt(ls, "node count"), ne = nextInt(ls, "edge count"),
                nv = nextInt(ls, "variable count");
      if (nn < 1 || ne < 0 || nv < 0) throw ParseError(lineNo, "malformed header: negative count");
      declaredNodes = static_cast<std::size_t>(nn);
      declaredEdges = static_cast<std::size_t>(ne);
      c.numVars = static_cast<std::size_t>(nv);
      haveHeader = true;
      continue;
    }
    const auto self = static_cast<std::uint32_t>(c.nodes.size());
    auto readChildren = [&](long long k) {
      if (k < 0) throw ParseError(lineNo, "negative child count");
      std::vector<std::uint32_t> kids;
      for (long long i = 0; i < k; ++i) {
        long long ch = nextInt(ls, "child index");
        if (ch < 0 || static_cast<std::uint64_t>(ch) >= self)
          throw ParseError(lineNo, "child index " + std::to_string(ch) + " out of range for node " +
                                       std::to_string(self));
        kids.push_back(static_cast<std::uint32_t>(ch));
      }
      edges += kids.size();
      return kids;
    };
    if (tag == "L") {
      long long lit = nextInt(ls, "literal");
      if (lit == 0 || static_cast<std::size_t>(std::llabs(lit)) > c.numVars)
        throw ParseError(lineNo, "variable " + std::to_string(lit) + " out of range");
      c.nodes.push_back(NnfNode::lit(static_cast<int>(lit)));
    } else if (tag == "A") {
      auto kids = readChildren(nextInt(ls, "child count"));
      c.nodes.push_back(kids.empty() ? NnfNode{NnfKind::True, 0, {}} : NnfNode::conj(std::move(kids)));
    } else if (tag == "O") {
      nextInt(ls, "conflict variable");
      auto kids = readChildren(nextInt(ls, "child count"));
      c.nodes.push_back(kids.empty() ? NnfNode{NnfKind::False, 0, {}} : NnfNode::disj(std::move(kids)));
    } else {
      throw ParseError(lineNo, "unknown node tag '" + tag + "'");
    }
    std::string extra;
    if (ls >> extra) throw ParseError(lineNo, "trailing tokens");
  }
  if (!haveHeader) throw ParseError(lineNo, "malformed header: missing 'nnf' line");
  if (c.nodes.size() != declaredNodes)
    throw ParseError(lineNo, "malformed header: declared " + std::to_string(declaredNodes) +
                                 " nodes, found " + std::to_string(c.nodes.size()));
  if (edges != declaredEdges)
    throw ParseError(lineNo, "malformed header: declared " + std::to_string(declaredEdges) +
                                 " edges, found " + std::to_string(edges));
  return c;
}

NnfReport checkDecomposable(const NnfCircuit& c) {
  NnfReport rep;
  auto vs = c.varSets();
  for (std::uint32_t i = 0; i < c.nodes.size(); ++i) {
    if (c.nodes[i].kind != NnfKind::And) continue;
    std::vector<std::uint32_t> seen;
    for (auto ch : c.nodes[i].children) {
      std::vector<std::uint32_t> common;
      std::set_intersection(seen.begin(), seen.end(), vs[ch].begin(), vs[ch].end(),
                            std::back_inserter(common));
      if (!common.empty()) {
        rep.push_back({i, "and-children share variable " + std::to_string(common.front())});
        break;
      }
      std::vector<std::uint32_t> merged;
      std::set_union(seen.begin(), seen.end(), vs[ch].begin(), vs[ch].end(), std::back_inserter(merged));
      seen = std::move(merged);
    }
  }
  return rep;
}

NnfReport checkSmooth(const NnfCircuit& c) {
  NnfReport rep;
  auto vs = c.varSets();
  for (std::uint32_t i = 0; i < c.nodes.size(); ++i) {
    const NnfNode& nd = c.nodes[i];
    if (nd.kind != NnfKind::Or) continue;
    for (auto ch : nd.children) {
      if (vs[ch] != vs[nd.children[0]]) {
        rep.push_back({i, "or-children have different variable sets"});
        break;
      }
    }
  }
  if (!c.nodes.empty() && vs.back().size() != c.numVars)
    rep.push_back({c.root(), "root does not mention every variable"});
  return rep;
}

NnfCircuit eliminateConstants(const NnfCircuit& c) {
  // value: 0 false, 1 true, 2 non-constant (mapped to out index)
  std::vector<int> value(c.nodes.size(), 2);
  std::vector<std::uint32_t> remap(c.nodes.size(), 0);
  NnfCircuit out;
  out.numVars = c.numVars;
  for (std::size_t i = 0; i < c.nodes.size(); ++i) {
    const NnfNode& nd = c.nodes[i];
    if (nd.kind == NnfKind::True) { value[i] = 1; continue; }
    if (nd.kind == NnfKind::False) { value[i] = 0; continue; }
    if (nd.kind == NnfKind::Literal) {
      remap[i] = static_cast<std::uint32_t>(out.nodes.size());
      out.nodes.push_back(nd);
      continue;
    }
    const bool isAnd = nd.kind == NnfKind::And;
    std::vector<std::uint32_t> kids;
    bool absorbed = false;
    for (auto ch : nd.children) {
      if (value[ch] == 2) {
        kids.push_back(remap[ch]);
      } else if ((value[ch] == 0 && isAnd) || (value[ch] == 1 && !isAnd)) {
        absorbed = true;
        break;
      }
    }
    if (absorbed) {
      value[i] = isAnd ? 0 : 1;
    } else if (kids.empty()) {
      value[i] = isAnd ? 1 : 0;
    } else if (kids.size() == 1) {
      remap[i] = kids[0];
    } else {
      remap[i] = static_cast<std::uint32_t>(out.nodes.size());
      out.nodes.push_back(NnfNode{nd.kind, 0, std::move(kids)});
    }
  }
  if (value.back() != 2) {
    NnfCircuit k;
    k.numVars = c.numVars;
    k.nodes.push_back(NnfNode{value.back() ? NnfKind::True : NnfKind::False, 0, {}});
    return k;
  }
  // drop nodes not reachable from the mapped root
  std::uint32_t root = remap[c.nodes.size() - 1];
  std::vector<bool> live(out.nodes.size(), false);
  live[root] = true;
  for (std::size_t i = root + 1; i-- > 0;)
    if (live[i])
      for (auto ch : out.nodes[i].children) live[ch] = true;
  NnfCircuit compact;
  compact.numVars = c.numVars;
  std::vector<std::uint32_t> idx(out.nodes.size(), 0);
  for (std::size_t i = 0; i <= root; ++i) {
    if (!live[i]) continue;
    NnfNode nd = out.nodes[i];
    for (auto& ch : nd.children) ch = idx[ch];
    idx[i] = static_cast<std::uint32_t>(compact.nodes.size());
    compact.nodes.push_back(std::move(nd));
  }
  return compact;
}

NnfCircuit smooth(const NnfCircuit& input) {
  if (input.nodes.empty()) throw CircuitShapeError("empty circuit");
  if (auto rep = checkDecomposable(input); !rep.empty())
    throw CircuitShapeError("circuit is not decomposable at node " + std::to_string(rep.front().node));

  const bool hasConstants = std::any_of(input.nodes.begin(), input.nodes.end(), [](const NnfNode& n) {
    return n.kind == NnfKind::True || n.kind == NnfKind::False;
  });
  NnfCircuit c = hasConstants ? eliminateConstants(input) : input;
  if (c.nodes.size() == 1 && c.nodes[0].kind == NnfKind::False) return c;

  NnfCircuit out;
  out.numVars = c.numVars;
  std::map<std::uint32_t, std::uint32_t> gadgets;
  auto emit = [&](NnfNode n) {
    out.nodes.push_back(std::move(n));
    return static_cast<std::uint32_t>(out.nodes.size() - 1);
  };
  auto gadget = [&](std::uint32_t v) {
    auto it = gadgets.find(v);
    if (it != gadgets.end()) return it->second;
    auto pos = emit(NnfNode::lit(static_cast<int>(v)));
    auto neg = emit(NnfNode::lit(-static_cast<int>(v)));
    auto g = emit(NnfNode::disj({pos, neg}));
    gadgets.emplace(v, g);
    return g;
  };
  auto pad = [&](std::uint32_t node, const std::vector<std::uint32_t>& missing) {
    if (missing.empty()) return node;
    std::vector<std::uint32_t> kids;
    if (node != UINT32_MAX) kids.push_back(node);
    for (auto v : missing) kids.push_back(gadget(v));
    return kids.size() == 1 ? kids[0] : emit(NnfNode::conj(std::move(kids)));
  };

  std::uint32_t root;
  std::vector<std::uint32_t> rootVars;
  if (c.nodes.size() == 1 && c.nodes[0].kind == NnfKind::True) {
    if (c.numVars == 0) return c;
    root = UINT32_MAX;
  } else {
    auto vs = c.varSets();
    std::vector<std::uint32_t> remap(c.nodes.size(), 0);
    for (std::size_t i = 0; i < c.nodes.size(); ++i) {
      NnfNode nd = c.nodes[i];
      if (nd.kind == NnfKind::Or) {
        for (auto& ch : nd.children) {
          std::vector<std::uint32_t> missing;
          std::set_difference(vs[i].begin(), vs[i].end(), vs[ch].begin(), vs[ch].end(),
                              std::back_inserter(missing));
          ch = pad(remap[ch], missing);
        }
      } else {
        for (auto& ch : nd.children) ch = remap[ch];
      }
      remap[i] = emit(std::move(nd));
    }
    root = remap.back();
    rootVars = vs.back();
  }
  std::vector<std::uint32_t> missing;
  for (std::uint32_t v = 1; v <= c.numVars; ++v)
    if (!std::binary_search(rootVars.begin(), rootVars.end(), v)) missing.push_back(v);
  std::uint32_t finalRoot = pad(root, missing);
  if (finalRoot != out.root()) emit(NnfNode::conj({finalRoot}));
  return out;
}

Monomial AssignmentDecoder::encode(const std::vector<bool>& assignment) const {
  if (assignment.size() != numVars_) throw std::invalid_argument("assignment has the wrong size");
  std::vector<VariableId> vars;
  for (std::size_t v = 1; v <= numVars_; ++v)
    vars.push_back(literalVariable(assignment[v - 1] ? static_cast<int>(v) : -static_cast<int>(v)));
  return Monomial(std::move(vars));
}

std::vector<bool> AssignmentDecoder::decode(const Monomial& m) const {
  if (m.degree() != numVars_) throw std::invalid_argument("monomial is not a total assignment");
  std::vector<bool> a(numVars_, false);
  std::vector<bool> seen(numVars_, false);
  for (VariableId x : m.vars()) {
    std::size_t v = x / 2;
    if (v >= numVars_ || seen[v]) throw std::invalid_argument("monomial is not a total assignment");
    seen[v] = true;
    a[v] = (x % 2) == 0;
  }
  return a;
}

DnnfTranslation dnnfToPlusTimes(const NnfCircuit& input) {
  if (input.nodes.empty()) throw CircuitShapeError("empty circuit");
  const bool hasConstants = std::any_of(input.nodes.begin(), input.nodes.end(), [](const NnfNode& n) {
    return n.kind == NnfKind::True || n.kind == NnfKind::False;
  });
  NnfCircuit c = hasConstants ? eliminateConstants(input) : input;
  if (c.nodes.size() == 1 && c.nodes[0].kind == NnfKind::False) return ConstantCount{0};
  if (c.nodes.size() == 1 && c.nodes[0].kind == NnfKind::True) {
    if (c.numVars >= 64) throw CircuitShapeError("tautology over too many variables to count");
    return ConstantCount{std::uint64_t{1} << c.numVars};
  }
  if (auto rep = checkDecomposable(c); !rep.empty())
    throw CircuitShapeError("circuit is not decomposable at node " + std::to_string(rep.front().node));
  if (auto rep = checkSmooth(c); !rep.empty())
    throw CircuitShapeError("circuit is not smooth at node " + std::to_string(rep.front().node) + ": " +
                            rep.front().message);

  std::vector<std::string> names;
  for (std::size_t v = 1; v <= c.numVars; ++v) {
    names.push_back("x" + std::to_string(v));
    names.push_back("-x" + std::to_string(v));
  }
  std::vector<Node> nodes;
  std::map<int, NodeIndex> literalNode;
  std::map<std::pair<NodeIndex, NodeIndex>, NodeIndex> timesNode;
  std::vector<NodeIndex> remap(c.nodes.size(), 0);
  auto emit = [&](Node n) {
    nodes.push_back(std::move(n));
    return static_cast<NodeIndex>(nodes.size() - 1);
  };
  for (std::size_t i = 0; i < c.nodes.size(); ++i) {
    const NnfNode& nd = c.nodes[i];
    if (nd.kind == NnfKind::Literal) {
      auto it = literalNode.find(nd.literal);
      if (it == literalNode.end())
        it = literalNode.emplace(nd.literal, emit(Node::input(AssignmentDecoder::literalVariable(nd.literal)))).first;
      remap[i] = it->second;
    } else if (nd.kind == NnfKind::And) {
      NodeIndex acc = remap[nd.children[0]];
      for (std::size_t k = 1; k < nd.children.size(); ++k) {
        NodeIndex rhs = remap[nd.children[k]];
        auto [it, fresh] = timesNode.try_emplace({acc, rhs}, 0);
        if (fresh) it->second = emit(Node::times(acc, rhs));
        acc = it->second;
      }
      remap[i] = acc;
    } else {
      std::vector<NodeIndex> kids;
      for (auto ch : nd.children) {
        NodeIndex m = remap[ch];
        if (nodes[m].kind == NodeKind::Plus)
          kids.insert(kids.end(), nodes[m].children.begin(), nodes[m].children.end());
        else
          kids.push_back(m);
      }
      std::sort(kids.begin(), kids.end());
      kids.erase(std::unique(kids.begin(), kids.end()), kids.end());
      remap[i] = kids.size() == 1 ? kids[0] : emit(Node::plus(std::move(kids)));
    }
  }
  NodeIndex root = remap.back();
  nodes.resize(root + 1);
  Program prog = Program(std::move(nodes), std::move(names)).compacted();
  return std::make_pair(std::move(prog), AssignmentDecoder(c.numVars));
}

}  // namespace slicecount
