#include "slicecount/program.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <unordered_map>

namespace slicecount {

// ---------------------------------------------------------------- Monomial

Monomial::Monomial(std::initializer_list<VariableId> vars) : vars_(vars) {
  std::sort(vars_.begin(), vars_.end());
  vars_.erase(std::unique(vars_.begin(), vars_.end()), vars_.end());
}

Monomial::Monomial(std::vector<VariableId> vars) : vars_(std::move(vars)) {
  std::sort(vars_.begin(), vars_.end());
  vars_.erase(std::unique(vars_.begin(), vars_.end()), vars_.end());
}

bool Monomial::contains(VariableId v) const {
  return std::binary_search(vars_.begin(), vars_.end(), v);
}

Monomial Monomial::merge(const Monomial& a, const Monomial& b, bool* ok) {
  Monomial out;
  out.vars_.reserve(a.vars_.size() + b.vars_.size());
  std::merge(a.vars_.begin(), a.vars_.end(), b.vars_.begin(), b.vars_.end(),
             std::back_inserter(out.vars_));
  auto last = std::unique(out.vars_.begin(), out.vars_.end());
  bool disjoint = last == out.vars_.end();
  out.vars_.erase(last, out.vars_.end());
  if (ok) *ok = disjoint;
  return out;
}

std::string Monomial::toString(std::span<const std::string> names) const {
  if (vars_.empty()) return "1";
  std::string s;
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (i) s += '*';
    if (vars_[i] < names.size())
      s += names[vars_[i]];
    else
      s += "x" + std::to_string(vars_[i]);
  }
  return s;
}

std::size_t MonomialHash::operator()(const Monomial& m) const noexcept {
  std::size_t h = 0x9e3779b97f4a7c15ULL;
  for (VariableId v : m.vars()) h = (h ^ v) * 0x100000001b3ULL + (h >> 17);
  return h;
}

Monomial restrict(const Monomial& m, const VarSet& vars) {
  std::vector<VariableId> out;
  for (VariableId v : m.vars())
    if (v < vars.size() && vars.test(v)) out.push_back(v);
  return Monomial(std::move(out));
}

bool isSubset(const Monomial& m, const VarSet& vars) {
  return std::all_of(m.vars().begin(), m.vars().end(),
                     [&](VariableId v) { return v < vars.size() && vars.test(v); });
}

// ----------------------------------------------------------------- Program

Program::Program(std::vector<Node> nodes, std::vector<std::string> varNames)
    : nodes_(std::move(nodes)), varNames_(std::move(varNames)) {
  if (nodes_.empty()) throw std::invalid_argument("program has no nodes");
  const std::size_t n = nodes_.size();
  degree_.assign(n, 0);
  height_.assign(n, 0);
  vars_.assign(n, VarSet(varNames_.size()));
  for (NodeIndex q = 0; q < n; ++q) {
    const Node& nd = nodes_[q];
    if (nd.kind == NodeKind::Input) {
      if (nd.var >= varNames_.size()) throw std::invalid_argument("input variable out of range");
      degree_[q] = 1;
      vars_[q].set(nd.var);
      continue;
    }
    if (nd.children.empty()) throw std::invalid_argument("operator node without children");
    std::size_t deg = 0;
    std::size_t h = 0;
    for (NodeIndex c : nd.children) {
      if (c >= q) throw std::invalid_argument("child index does not precede parent");
      deg = nd.kind == NodeKind::Plus ? std::max(deg, degree_[c]) : deg + degree_[c];
      h = std::max(h, height_[c]);
      vars_[q] |= vars_[c];
    }
    degree_[q] = deg;
    height_[q] = h + 1;
  }
}

std::vector<bool> Program::reachable() const {
  std::vector<bool> seen(nodes_.size(), false);
  seen.back() = true;
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    if (!seen[i]) continue;
    for (NodeIndex c : nodes_[i].children) seen[c] = true;
  }
  return seen;
}

Program Program::compacted() const {
  auto seen = reachable();
  std::vector<NodeIndex> remap(nodes_.size(), 0);
  std::vector<Node> out;
  for (NodeIndex q = 0; q < nodes_.size(); ++q) {
    if (!seen[q]) continue;
    Node nd = nodes_[q];
    for (auto& c : nd.children) c = remap[c];
    remap[q] = static_cast<NodeIndex>(out.size());
    out.push_back(std::move(nd));
  }
  return Program(std::move(out), varNames_);
}

std::string Program::toText() const {
  std::ostringstream os;
  for (const Node& nd : nodes_) {
    switch (nd.kind) {
      case NodeKind::Input: os << "input " << varNames_[nd.var]; break;
      case NodeKind::Times: os << "times " << nd.children[0] << ' ' << nd.children[1]; break;
      case NodeKind::Plus:
        os << "plus";
        for (NodeIndex c : nd.children) os << ' ' << c;
        break;
    }
    os << '\n';
  }
  return os.str();
}

namespace {

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> toks;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) toks.push_back(line.substr(i, j - i));
    i = j;
  }
  return toks;
}

NodeIndex parseIndex(std::string_view tok, std::size_t lineNo) {
  NodeIndex v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError(lineNo, "expected node index, got '" + std::string(tok) + "'");
  return v;
}

}  // namespace

Program Program::parse(std::string_view text) {
  std::vector<Node> nodes;
  std::vector<std::string> names;
  std::unordered_map<std::string, VariableId> ids;
  std::size_t lineNo = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++lineNo;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto toks = tokenize(line);
    if (toks.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto self = static_cast<NodeIndex>(nodes.size());
    auto child = [&](std::string_view tok) {
      NodeIndex c = parseIndex(tok, lineNo);
      if (c >= self)
        throw ParseError(lineNo, "forward reference to node " + std::to_string(c) +
                                     " from node " + std::to_string(self));
      return c;
    };
    if (toks[0] == "input") {
      if (toks.size() != 2) throw ParseError(lineNo, "input takes exactly one variable name");
      std::string name(toks[1]);
      auto [it, fresh] = ids.try_emplace(name, static_cast<VariableId>(names.size()));
      if (fresh) names.push_back(name);
      nodes.push_back(Node::input(it->second));
    } else if (toks[0] == "times") {
      if (toks.size() != 3) throw ParseError(lineNo, "times takes exactly two children");
      nodes.push_back(Node::times(child(toks[1]), child(toks[2])));
    } else if (toks[0] == "plus") {
      if (toks.size() < 2) throw ParseError(lineNo, "plus needs at least one child");
      std::vector<NodeIndex> kids;
      for (std::size_t i = 1; i < toks.size(); ++i) kids.push_back(child(toks[i]));
      nodes.push_back(Node::plus(std::move(kids)));
    } else {
      throw ParseError(lineNo, "unknown node kind '" + std::string(toks[0]) + "'");
    }
    if (end == text.size()) break;
  }
  if (nodes.empty()) throw ParseError(lineNo, "empty program");
  return Program(std::move(nodes), std::move(names));
}

// -------------------------------------------------------------- validation

bool ValidationReport::has(ViolationKind k) const {
  return std::any_of(violations.begin(), violations.end(),
                     [k](const Violation& v) { return v.kind == k; });
}

std::string_view toString(ViolationKind k) {
  switch (k) {
    case ViolationKind::ForwardReference: return "forward-reference";
    case ViolationKind::BadArity: return "bad-arity";
    case ViolationKind::NotMultilinear: return "not-multilinear";
    case ViolationKind::NotHomogeneous: return "not-homogeneous";
    case ViolationKind::PlusChildOfPlus: return "plus-child-of-plus";
    case ViolationKind::ChildOrder: return "child-order";
    case ViolationKind::BadVariable: return "bad-variable";
    case ViolationKind::Empty: return "empty";
  }
  return "?";
}

std::string ValidationReport::toString() const {
  std::string s;
  for (const auto& v : violations)
    s += "node " + std::to_string(v.node) + ": " + std::string(slicecount::toString(v.kind)) +
         " (" + v.message + ")\n";
  return s;
}

ValidationReport validateNodes(const std::vector<Node>& nodes, std::size_t numVars) {
  ValidationReport rep;
  auto add = [&](ViolationKind k, NodeIndex q, std::string msg) {
    rep.violations.push_back({k, q, std::move(msg)});
  };
  if (nodes.empty()) {
    add(ViolationKind::Empty, 0, "no nodes");
    return rep;
  }
  std::vector<std::size_t> deg(nodes.size(), 0);
  std::vector<VarSet> vars(nodes.size(), VarSet(numVars));
  for (NodeIndex q = 0; q < nodes.size(); ++q) {
    const Node& nd = nodes[q];
    if (nd.kind == NodeKind::Input) {
      if (nd.var >= numVars) {
        add(ViolationKind::BadVariable, q, "variable id out of range");
        continue;
      }
      deg[q] = 1;
      vars[q].set(nd.var);
      continue;
    }
    bool indicesOk = true;
    for (NodeIndex c : nd.children) {
      if (c >= q) {
        add(ViolationKind::ForwardReference, q, "child " + std::to_string(c) + " does not precede");
        indicesOk = false;
      }
    }
    if (!indicesOk) continue;
    if (nd.kind == NodeKind::Times) {
      if (nd.children.size() != 2) {
        add(ViolationKind::BadArity, q, "times node needs exactly 2 children");
        continue;
      }
      NodeIndex a = nd.children[0], b = nd.children[1];
      if (vars[a].intersects(vars[b]))
        add(ViolationKind::NotMultilinear, q, "children share variables");
      deg[q] = deg[a] + deg[b];
      vars[q] = vars[a] | vars[b];
    } else {
      if (nd.children.empty()) {
        add(ViolationKind::BadArity, q, "plus node needs at least 1 child");
        continue;
      }
      std::size_t d0 = deg[nd.children[0]];
      std::size_t dmax = 0;
      bool homogeneous = true;
      for (std::size_t i = 0; i < nd.children.size(); ++i) {
        NodeIndex c = nd.children[i];
        if (deg[c] != d0) homogeneous = false;
        dmax = std::max(dmax, deg[c]);
        vars[q] |= vars[c];
        if (nodes[c].kind == NodeKind::Plus)
          add(ViolationKind::PlusChildOfPlus, q, "child " + std::to_string(c) + " is a plus node");
        if (i > 0 && nd.children[i - 1] >= c)
          add(ViolationKind::ChildOrder, q, "children not in increasing node order");
      }
      if (!homogeneous) add(ViolationKind::NotHomogeneous, q, "children have different degrees");
      deg[q] = dmax;
    }
  }
  return rep;
}

ValidationReport validateProgram(const Program& p) {
  return validateNodes(p.nodes(), p.numVars());
}

}  // namespace slicecount
