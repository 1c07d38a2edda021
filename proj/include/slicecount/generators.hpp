#pragma once

#include <cstdint>

#include "slicecount/grammar.hpp"
#include "slicecount/nnf.hpp"
#include "slicecount/program.hpp"

namespace slicecount {

// Seeded instance generators. The same (seed, shape) always gives the same
// instance.

struct GrammarShape {
  std::size_t nonterminals = 4;   // 1..6 in the tests
  std::size_t alphabet = 2;       // 1..3
  std::size_t maxRulesPerNonterminal = 3;
  std::size_t maxRhs = 3;
  double epsilonProbability = 0.1;
  double terminalProbability = 0.45;
};
Grammar randomGrammar(std::uint64_t seed, const GrammarShape& shape = {});

struct DnnfShape {
  std::size_t numVars = 6;
  std::size_t maxDepth = 4;
  std::size_t maxFanout = 3;
  double orProbability = 0.5;
  double constantProbability = 0.0;  // chance of a constant leaf under an Or
  bool smooth = true;
};
NnfCircuit randomDnnf(std::uint64_t seed, const DnnfShape& shape = {});

struct ProgramShape {
  std::size_t numVars = 12;
  std::size_t degree = 3;
  std::size_t minTerms = 1;
  std::size_t maxTerms = 3;      // Times terms under each Plus
  std::size_t minLeafFanin = 1;
  std::size_t maxLeafFanin = 4;  // inputs under a degree-1 Plus
  double reuseProbability = 0.3;
};
/// Valid multilinear homogeneous program (passes validateProgram).
Program randomProgram(std::uint64_t seed, const ProgramShape& shape = {});

/// Left-deep chain of degree n: c_1 = x + y, c_k = c_{k-1} * a_k + c_{k-1} * b_k.
/// Depth 2n - 1.
Program chainProgram(std::size_t n);

/// Comb of degree n whose teeth alternate sides: c_k = plus(times(c_{k-1}, t_k))
/// (or times(t_k, c_{k-1})), with t_k a sum of `teeth` fresh inputs.
Program combProgram(std::size_t n, std::size_t teeth = 2);

}  // namespace slicecount
