#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "slicecount/program.hpp"

namespace slicecount {

using SymbolId = std::uint32_t;
using Word = std::vector<SymbolId>;  // terminal ids

struct Symbol {
  bool terminal = false;
  SymbolId id = 0;
  friend bool operator==(const Symbol&, const Symbol&) = default;
  friend auto operator<=>(const Symbol&, const Symbol&) = default;
};

struct Rule {
  SymbolId lhs = 0;
  std::vector<Symbol> rhs;  // empty means epsilon
  friend bool operator==(const Rule&, const Rule&) = default;
};

struct Grammar {
  std::vector<std::string> nonterminals;
  std::vector<std::string> terminals;
  std::vector<Rule> rules;
  SymbolId start = 0;

  std::optional<SymbolId> findNonterminal(std::string_view name) const;
  std::optional<SymbolId> findTerminal(std::string_view name) const;
  bool isCnf() const;
  std::string toText() const;
  std::string wordToString(const Word& w) const;
};

/// Grammar text: `LHS -> sym sym | sym ... ;` one rule per line, `#` comments,
/// an empty alternative is epsilon, `@start X` overrides the start symbol.
Grammar parseGrammar(std::string_view text);

/// Chomsky Normal Form with L_n preserved for every n >= 1. Steps run in a
/// fixed order (epsilon removal, unit removal, terminal lifting,
/// binarization) and fresh nonterminals are named deterministically.
Grammar toCnf(const Grammar& g);

/// CYK membership on a CNF grammar.
bool cykAccepts(const Grammar& cnf, std::span<const SymbolId> word);

/// Membership on an arbitrary grammar (epsilon and unit rules allowed), via a
/// fixpoint over substring derivability.
bool derives(const Grammar& g, std::span<const SymbolId> word);

// ------------------------------------------------------- (union, concat)

enum class UcKind : std::uint8_t { Letter, Union, Concat };

struct UcNode {
  UcKind kind = UcKind::Letter;
  SymbolId letter = 0;
  std::vector<std::uint32_t> children;  // Union: >= 1; Concat: exactly 2
};

/// Homogeneous program over languages: children precede parents, the last
/// node is the root. `empty` marks a slice with no words (no nodes then).
struct UnionConcatProgram {
  std::vector<UcNode> nodes;
  std::vector<std::string> alphabet;
  bool empty = false;

  std::uint32_t root() const { return static_cast<std::uint32_t>(nodes.size() - 1); }
  /// Word length of each node, or nullopt when some union mixes lengths.
  std::optional<std::vector<std::size_t>> lengths() const;
  std::string toText() const;
};

/// Node q_{A,i} per nonterminal A and length i <= n; unreachable and empty
/// nodes are pruned; root is q_{S,n}.
UnionConcatProgram cfgSliceProgram(const Grammar& cnf, std::size_t n);

/// Maps words of length n to monomials over variables x_{a,t} (letter a at
/// position t) and back.
class WordDecoder {
 public:
  WordDecoder() = default;
  WordDecoder(std::size_t alphabetSize, std::size_t length)
      : alphabetSize_(alphabetSize), length_(length) {}

  VariableId variable(SymbolId letter, std::size_t position) const {
    return static_cast<VariableId>(position * alphabetSize_ + letter);
  }
  Monomial encode(const Word& w) const;
  /// Throws std::invalid_argument when the monomial is not a word encoding.
  Word decode(const Monomial& m) const;
  std::size_t length() const { return length_; }

 private:
  std::size_t alphabetSize_ = 0;
  std::size_t length_ = 0;
};

/// (union, concat) -> (+, x): node v_i^(r) for each source node and offset r,
/// memoized on (i, r) and built only when reachable from v_root^(0).
std::pair<Program, WordDecoder> ucToPlusTimes(const UnionConcatProgram& uc, std::size_t n);

}  // namespace slicecount
