#include "slicecount/harness.hpp"

#include <algorithm>
#include <cmath>

#include "slicecount/depth_reduction.hpp"
#include "slicecount/oracle.hpp"

namespace slicecount {

double wilsonLowerBound(std::uint64_t hits, std::uint64_t trials, double z) {
  if (trials == 0) return 0;
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(hits) / n;
  const double z2 = z * z;
  const double centre = phat + z2 / (2 * n);
  const double margin = z * std::sqrt(phat * (1 - phat) / n + z2 / (4 * n * n));
  return std::max(0.0, (centre - margin) / (1 + z2 / n));
}

TrialReport runCoverageTrials(const Program& p, double epsilon, double delta, Mode mode,
                              const Overrides& overrides, std::uint64_t trials, std::uint64_t seedBase,
                              const RunOptions& options, std::optional<std::uint64_t> exact) {
  if (trials == 0) throw std::invalid_argument("trials must be positive");
  TrialReport rep;
  rep.trials = trials;
  rep.seedBase = seedBase;
  rep.epsilon = epsilon;
  rep.exact = exact ? *exact : enumerateSupport(p).size();

  ValidationReport v = validateProgram(p);
  if (!v.ok()) throw std::invalid_argument("invalid program: " + v.toString());
  Program reduced = reduceDepth(p);
  Params params = deriveParams(reduced, epsilon, delta, mode, overrides);
  const double target = static_cast<double>(rep.exact);
  for (std::uint64_t i = 0; i < trials; ++i) {
    CountResult r = counterWithParams(reduced, params, seedBase + i, options);
    rep.exactPath = r.exactPath;
    rep.invariants += r.invariants;
    rep.abortedRuns += r.abortedRuns;
    rep.totalRuns += r.runEstimates.size();
    rep.estimates.push_back(r.estimate);
    if (std::abs(r.estimate - target) < epsilon * target) ++rep.hits;
  }
  rep.empiricalCoverage = static_cast<double>(rep.hits) / static_cast<double>(trials);
  rep.wilsonLowerBound = wilsonLowerBound(rep.hits, trials);
  rep.abortRate = rep.totalRuns ? static_cast<double>(rep.abortedRuns) / static_cast<double>(rep.totalRuns) : 0;
  return rep;
}

bool ProbeResult::withinThreeSigma() const {
  if (sigma == 0) return frequency == expected;
  return std::abs(frequency - expected) <= 3 * sigma;
}

double heightZeroProbability(const Program& p, const SupportInfo& info, NodeIndex q, const Params& params) {
  (void)p;
  if (!info.isExact(q)) throw std::invalid_argument("node is not of effective height 0");
  return PValue::heightZero(params.context(), info.support(q).size()).value().convert_to<double>();
}

namespace {

ProbeResult probe(const Program& p, NodeIndex q, const std::vector<Monomial>& wanted, const Params& params,
                  std::uint64_t trials, std::uint64_t seedBase) {
  if (trials == 0) throw std::invalid_argument("trials must be positive");
  SupportInfo info = cappedSupport(p, params.supportThreshold);
  if (!info.isExact(q)) throw std::invalid_argument("probe node must have effective height 0");
  for (const Monomial& a : wanted)
    if (!std::binary_search(info.support(q).begin(), info.support(q).end(), a))
      throw std::invalid_argument("monomial " + a.toString(p.varNames()) + " is not in the node's support");
  ProbeResult r;
  r.trials = trials;
  const double pq = heightZeroProbability(p, info, q, params);
  r.expected = std::pow(pq, static_cast<double>(wanted.size()));
  for (std::uint64_t i = 0; i < trials; ++i) {
    auto s = heightZeroSample(p, info, q, params, seedBase + i, 0);
    std::sort(s.begin(), s.end());
    bool all = std::all_of(wanted.begin(), wanted.end(),
                           [&](const Monomial& a) { return std::binary_search(s.begin(), s.end(), a); });
    if (all) ++r.hits;
  }
  r.frequency = static_cast<double>(r.hits) / static_cast<double>(trials);
  r.sigma = std::sqrt(r.expected * (1 - r.expected) / static_cast<double>(trials));
  return r;
}

}  // namespace

ProbeResult inclusionFrequencyProbe(const Program& p, NodeIndex q, const Monomial& alpha, const Params& params,
                                    std::uint64_t trials, std::uint64_t seedBase) {
  return probe(p, q, {alpha}, params, trials, seedBase);
}

ProbeResult coInclusionProbe(const Program& p, NodeIndex q, const Monomial& alpha, const Monomial& beta,
                             const Params& params, std::uint64_t trials, std::uint64_t seedBase) {
  if (alpha == beta) throw std::invalid_argument("co-inclusion needs two distinct monomials");
  return probe(p, q, {alpha, beta}, params, trials, seedBase);
}

}  // namespace slicecount
