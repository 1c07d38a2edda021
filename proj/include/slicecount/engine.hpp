#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slicecount/grammar.hpp"
#include "slicecount/nnf.hpp"
#include "slicecount/program.hpp"
#include "slicecount/pvalue.hpp"
#include "slicecount/rng.hpp"
#include "slicecount/support.hpp"

namespace slicecount {

enum class Mode : std::uint8_t { PaperStrict, Practical };
std::string_view toString(Mode m);

class ParamError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Overrides {
  std::optional<std::uint64_t> ns, nt, theta, threshold, m, ellMax;
  bool any() const { return ns || nt || theta || threshold || m || ellMax; }
};

struct Params {
  Mode mode = Mode::Practical;
  double epsilon = 0.5;
  double delta = 0.25;
  double epsilonPrime = 0.5;
  Real kappa = 0;
  std::uint64_t n = 1;     // program degree
  std::uint64_t size = 1;  // program node count
  std::uint64_t ns = 1, nt = 1, theta = 1, m = 1;
  std::uint64_t supportThreshold = 1;
  std::uint64_t ellMax = 1;
  /// Fields that differ from the formulas, one line each.
  std::vector<std::string> deviations;

  PContext context() const { return PContext{n, kappa, ellMax}; }
  std::uint64_t samplesPerNode() const { return ns * nt; }
};

/// Practical defaults for fields not overridden.
inline constexpr std::uint64_t kPracticalNs = 200;
inline constexpr std::uint64_t kPracticalNt = 9;
inline constexpr std::uint64_t kPracticalTheta = 1000000;
inline constexpr std::uint64_t kPracticalEllMax = std::uint64_t{1} << 62;

/// PaperStrict: every field from the formulas (overrides rejected).
/// Practical: overrides win; missing n_s, n_t, theta and ellMax use the
/// practical defaults, m and the threshold use the formulas.
Params deriveParams(std::uint64_t degree, std::uint64_t size, double epsilon, double delta, Mode mode,
                    const Overrides& overrides = {});
Params deriveParams(const Program& p, double epsilon, double delta, Mode mode,
                    const Overrides& overrides = {});

struct RunOptions {
  unsigned jobs = 1;
  bool diagnostics = false;
  /// Keep S^r(q) for every processed node (tests only; memory heavy).
  bool keepSamples = false;
};

struct NodeDiagnostics {
  NodeIndex node = 0;
  std::uint32_t effectiveHeight = 0;
  std::string kind;
  std::string p;       // symbolic description
  double pValue = 0;   // shadow, rounded to double
  double meanSetSize = 0;
  std::uint64_t maxSetSize = 0;
};

/// Invariant audit counters filled on every run.
struct InvariantCounts {
  std::uint64_t pChainViolations = 0;   // p(q) > 1 or p(q) > p(child)
  std::uint64_t ratioViolations = 0;    // reduce ratio outside [0, 1]
  std::uint64_t closureViolations = 0;  // p(q) not acceptable at its height
  std::uint64_t checks = 0;
  bool clean() const { return pChainViolations == 0 && ratioViolations == 0 && closureViolations == 0; }
  InvariantCounts& operator+=(const InvariantCounts& o);
};

struct RunResult {
  double estimate = 0;
  std::string estimateText;  // 30 significant digits
  bool aborted = false;
  bool exactPath = false;
  std::string abortReason;
  InvariantCounts invariants;
  std::vector<std::string> deviations;
  std::vector<NodeDiagnostics> nodes;
  /// keepSamples: samples[q][r] as monomials; empty for skipped nodes.
  std::vector<std::vector<std::vector<Monomial>>> samples;
  std::vector<std::optional<PValue>> p;  // per node, when processed
};

/// One run of the bottom-up sampler. Returns |supp(root)| exactly when it is
/// at most params.supportThreshold.
RunResult countCore(const Program& p, const Params& params, std::uint64_t runSeed,
                    const RunOptions& options = {});
RunResult countCore(const Program& p, const SupportInfo& info, const Params& params,
                    std::uint64_t runSeed, const RunOptions& options = {});

/// Seed of run j of a counter call.
inline std::uint64_t runSeed(std::uint64_t seed, std::uint64_t j) { return substreamSeed(seed, {j}); }

struct CountResult {
  double estimate = 0;
  std::string estimateText;
  bool exactPath = false;
  std::uint64_t abortedRuns = 0;
  std::vector<double> runEstimates;
  Params params;
  std::uint64_t seed = 0;
  std::uint64_t inputSize = 0;
  std::uint64_t reducedSize = 0;
  std::uint64_t reducedDepth = 0;
  InvariantCounts invariants;
  std::vector<std::string> deviations;
  std::vector<NodeDiagnostics> nodes;  // first run, when requested
};

/// Depth reduction, parameter derivation, m runs, lower median.
CountResult counter(const Program& p, double epsilon, double delta, Mode mode,
                    const Overrides& overrides, std::uint64_t seed, const RunOptions& options = {});
/// Same, with parameters already fixed and depth reduction skipped.
CountResult counterWithParams(const Program& reduced, const Params& params, std::uint64_t seed,
                              const RunOptions& options = {});

struct CfgCountResult {
  CountResult count;
  bool emptyLanguage = false;
};
CfgCountResult countCfg(const Grammar& g, std::size_t n, double epsilon, double delta, Mode mode,
                        const Overrides& overrides, std::uint64_t seed, const RunOptions& options = {});

struct DnnfCountResult {
  CountResult count;
  bool smoothed = false;
  bool constant = false;
};
DnnfCountResult countDnnf(const NnfCircuit& c, double epsilon, double delta, Mode mode,
                          const Overrides& overrides, std::uint64_t seed, const RunOptions& options = {});

/// reduce(Z, t) over Z in its given order: each element kept independently
/// with probability t.
std::vector<Monomial> reduceSet(const std::vector<Monomial>& z, double t, SplitMix64& rng);

/// union(q; S_1..S_k): drops an element of S_i that lies in the support of
/// an earlier child of q. Result sorted.
std::vector<Monomial> unionFilter(const Program& p, NodeIndex q,
                                  const std::vector<std::vector<Monomial>>& sets,
                                  MembershipOracle& oracle);

/// S^r(q) for a height-0 node q exactly as a countCore run with this seed
/// would draw it.
std::vector<Monomial> heightZeroSample(const Program& p, const SupportInfo& info, NodeIndex q,
                                       const Params& params, std::uint64_t runSeed, std::uint64_t r);

}  // namespace slicecount
