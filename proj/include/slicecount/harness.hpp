#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "slicecount/engine.hpp"

namespace slicecount {

struct TrialReport {
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;  // estimates strictly inside (1 - eps, 1 + eps) * exact
  double empiricalCoverage = 0;
  double wilsonLowerBound = 0;
  double abortRate = 0;  // aborted countCore runs over all runs
  std::uint64_t abortedRuns = 0;
  std::uint64_t totalRuns = 0;
  std::uint64_t seedBase = 0;
  std::uint64_t exact = 0;
  double epsilon = 0;
  bool exactPath = false;
  InvariantCounts invariants;
  std::vector<double> estimates;
};

/// Lower end of the Wilson score interval (z = 1.96 gives 95%).
double wilsonLowerBound(std::uint64_t hits, std::uint64_t trials, double z = 1.959963984540054);

/// Runs counter with seeds seedBase + i and scores each estimate against the
/// enumerated support size (or `exact` when given).
TrialReport runCoverageTrials(const Program& p, double epsilon, double delta, Mode mode,
                              const Overrides& overrides, std::uint64_t trials, std::uint64_t seedBase,
                              const RunOptions& options = {}, std::optional<std::uint64_t> exact = {});

struct ProbeResult {
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;
  double frequency = 0;
  double expected = 0;  // p(q), or p(q)^2 for pairs
  double sigma = 0;     // binomial standard deviation of the frequency
  bool withinThreeSigma() const;
};

/// Frequency of alpha in S^1(q) over runs with seeds seedBase + i, at a node
/// of effective height 0.
ProbeResult inclusionFrequencyProbe(const Program& p, NodeIndex q, const Monomial& alpha, const Params& params,
                                    std::uint64_t trials, std::uint64_t seedBase);

/// Frequency of {alpha, beta} both in S^1(q); expected p(q)^2.
ProbeResult coInclusionProbe(const Program& p, NodeIndex q, const Monomial& alpha, const Monomial& beta,
                             const Params& params, std::uint64_t trials, std::uint64_t seedBase);

/// p(q) = min(1, 16n/|supp(q)|) for a height-0 node.
double heightZeroProbability(const Program& p, const SupportInfo& info, NodeIndex q, const Params& params);

}  // namespace slicecount
