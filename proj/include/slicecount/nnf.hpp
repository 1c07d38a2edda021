#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "slicecount/program.hpp"

namespace slicecount {

enum class NnfKind : std::uint8_t { Literal, And, Or, True, False };

struct NnfNode {
  NnfKind kind = NnfKind::True;
  int literal = 0;  // Literal only: +v or -v, v in 1..numVars
  std::vector<std::uint32_t> children;

  static NnfNode lit(int l) { return {NnfKind::Literal, l, {}}; }
  static NnfNode conj(std::vector<std::uint32_t> c) { return {NnfKind::And, 0, std::move(c)}; }
  static NnfNode disj(std::vector<std::uint32_t> c) { return {NnfKind::Or, 0, std::move(c)}; }
};

/// Circuit in node order (children precede parents); the root is the last
/// node. Variables are 1-based as in the c2d format.
struct NnfCircuit {
  std::size_t numVars = 0;
  std::vector<NnfNode> nodes;

  std::uint32_t root() const { return static_cast<std::uint32_t>(nodes.size() - 1); }
  /// Sorted variable ids (1-based) below each node.
  std::vector<std::vector<std::uint32_t>> varSets() const;
  bool evaluate(const std::vector<bool>& assignment) const;  // assignment[v-1]
  std::string toText() const;
};

/// c2d format: `nnf <nodes> <edges> <vars>` then `L <lit>`, `A <k> ...`,
/// `O <j> <k> ...`. `A 0` is true and `O 0 0` is false.
NnfCircuit parseNnf(std::string_view text);

struct NnfViolation {
  std::uint32_t node;
  std::string message;
};
using NnfReport = std::vector<NnfViolation>;

NnfReport checkDecomposable(const NnfCircuit& c);
NnfReport checkSmooth(const NnfCircuit& c);

class CircuitShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Propagates True/False constants. The result is either a single constant
/// node or a circuit without constants.
NnfCircuit eliminateConstants(const NnfCircuit& c);

/// Smooth, decomposable, same models, and the root mentions every variable.
/// Missing variables below an Or child (or the root) are padded with
/// (x or not x) gadgets in increasing variable order. Constants are
/// eliminated first. Throws CircuitShapeError on non-decomposable input.
NnfCircuit smooth(const NnfCircuit& c);

/// Maps models (total assignments) to monomials over one variable per literal
/// (x_v -> 2(v-1), not x_v -> 2(v-1)+1) and back.
class AssignmentDecoder {
 public:
  AssignmentDecoder() = default;
  explicit AssignmentDecoder(std::size_t numVars) : numVars_(numVars) {}

  static VariableId literalVariable(int lit) {
    auto v = static_cast<VariableId>(lit > 0 ? lit : -lit);
    return 2 * (v - 1) + (lit > 0 ? 0 : 1);
  }
  Monomial encode(const std::vector<bool>& assignment) const;
  std::vector<bool> decode(const Monomial& m) const;

 private:
  std::size_t numVars_ = 0;
};

/// A constant-valued circuit short-circuits to its model count.
struct ConstantCount {
  std::uint64_t count;
};

using DnnfTranslation = std::variant<std::pair<Program, AssignmentDecoder>, ConstantCount>;

/// Smooth DNNF -> (+,x): And becomes a left-associative chain of Times, Or
/// becomes Plus (nested Or children flattened). Throws CircuitShapeError
/// when the input is not smooth and decomposable.
DnnfTranslation dnnfToPlusTimes(const NnfCircuit& smoothCircuit);

}  // namespace slicecount
