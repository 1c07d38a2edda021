#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "slicecount/grammar.hpp"
#include "slicecount/nnf.hpp"
#include "slicecount/program.hpp"
#include "slicecount/rng.hpp"

namespace slicecount {

/// Raised when an exact oracle would exceed its cap. Never a wrong answer.
class OracleRefusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kSupportCap = 2000000;
inline constexpr std::uint64_t kWordCap = 2000000;
inline constexpr std::size_t kAssignmentVarCap = 20;

/// Exact support of node q (default: root), sorted.
std::vector<Monomial> enumerateSupport(const Program& p, std::uint64_t hardCap = kSupportCap);
std::vector<Monomial> enumerateSupport(const Program& p, NodeIndex q, std::uint64_t hardCap);

/// |{w in Sigma^n : w in L(g)}| by CYK over every word.
std::uint64_t bruteCfgCount(const Grammar& g, std::size_t n, std::uint64_t wordCap = kWordCap);

/// Models over all 2^numVars assignments.
std::uint64_t bruteDnnfCount(const NnfCircuit& c, std::size_t varCap = kAssignmentVarCap);

/// Uniform draw from the enumerated root support.
Monomial exactUniformSample(const Program& p, SplitMix64& rng, std::uint64_t hardCap = kSupportCap);

}  // namespace slicecount
