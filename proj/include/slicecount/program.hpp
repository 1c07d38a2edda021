#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "slicecount/monomial.hpp"

namespace slicecount {

using VarSet = boost::dynamic_bitset<std::uint64_t>;

enum class NodeKind : std::uint8_t { Input, Times, Plus };

struct Node {
  NodeKind kind = NodeKind::Input;
  VariableId var = 0;               // Input only
  std::vector<NodeIndex> children;  // Times: exactly 2; Plus: >= 1

  static Node input(VariableId v) { return Node{NodeKind::Input, v, {}}; }
  static Node times(NodeIndex a, NodeIndex b) { return Node{NodeKind::Times, 0, {a, b}}; }
  static Node plus(std::vector<NodeIndex> kids) { return Node{NodeKind::Plus, 0, std::move(kids)}; }
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A (+,x) program stored bottom-up: children always precede their parent,
/// and storage order is the total order used for canonical choices.
/// The root is the last node. Degrees, variable sets and heights are cached
/// at construction; structural validity is checked by validateProgram().
class Program {
 public:
  Program() = default;
  Program(std::vector<Node> nodes, std::vector<std::string> varNames);

  std::size_t size() const { return nodes_.size(); }
  std::size_t numVars() const { return varNames_.size(); }
  NodeIndex root() const { return static_cast<NodeIndex>(nodes_.size() - 1); }

  const Node& node(NodeIndex q) const { return nodes_[q]; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<std::string>& varNames() const { return varNames_; }

  /// Inductive degree: 1 at inputs, max over children at +, sum at x.
  std::size_t degree(NodeIndex q) const { return degree_[q]; }
  std::size_t degree() const { return degree_.back(); }
  const VarSet& vars(NodeIndex q) const { return vars_[q]; }
  /// Height in the alternation sense: inputs 0, otherwise 1 + max child.
  std::size_t height(NodeIndex q) const { return height_[q]; }
  std::size_t depth() const { return height_.back(); }

  /// Nodes reachable from the root, as a mask over node indices.
  std::vector<bool> reachable() const;

  /// Copy restricted to nodes reachable from the root, reindexed in order.
  Program compacted() const;

  std::string toText() const;
  static Program parse(std::string_view text);

 private:
  std::vector<Node> nodes_;
  std::vector<std::string> varNames_;
  std::vector<std::size_t> degree_;
  std::vector<std::size_t> height_;
  std::vector<VarSet> vars_;
};

enum class ViolationKind : std::uint8_t {
  ForwardReference,
  BadArity,
  NotMultilinear,
  NotHomogeneous,
  PlusChildOfPlus,
  ChildOrder,
  BadVariable,
  Empty,
};

struct Violation {
  ViolationKind kind;
  NodeIndex node;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  bool has(ViolationKind k) const;
  std::string toString() const;
};

std::string_view toString(ViolationKind k);

ValidationReport validateProgram(const Program& p);

/// Same as validateProgram but on raw nodes, so index monotonicity can be
/// reported before a Program (which assumes it) is built.
ValidationReport validateNodes(const std::vector<Node>& nodes, std::size_t numVars);

inline std::size_t degreeOf(const Program& p, NodeIndex q) { return p.degree(q); }

/// Restriction of a monomial to a variable set.
Monomial restrict(const Monomial& m, const VarSet& vars);
bool isSubset(const Monomial& m, const VarSet& vars);

}  // namespace slicecount
