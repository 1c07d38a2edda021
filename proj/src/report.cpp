#include "slicecount/report.hpp"

#include <sstream>

namespace slicecount {

using nlohmann::ordered_json;

ordered_json toJson(const Params& p) {
  ordered_json j;
  j["mode"] = std::string(toString(p.mode));
  j["epsilon"] = p.epsilon;
  j["delta"] = p.delta;
  j["epsilon_prime"] = p.epsilonPrime;
  j["kappa"] = p.kappa.str(20);
  j["n"] = p.n;
  j["program_size"] = p.size;
  j["n_s"] = p.ns;
  j["n_t"] = p.nt;
  j["theta"] = p.theta;
  j["m"] = p.m;
  j["support_threshold"] = p.supportThreshold;
  j["ell_max"] = p.ellMax;
  return j;
}

ordered_json toJson(const InvariantCounts& inv) {
  return ordered_json{{"checks", inv.checks},
                      {"p_chain_violations", inv.pChainViolations},
                      {"ratio_violations", inv.ratioViolations},
                      {"closure_violations", inv.closureViolations}};
}

ordered_json toJson(const CountResult& r, bool diagnostics) {
  ordered_json j;
  j["schema"] = kSchemaVersion;
  j["count_estimate"] = r.estimate;
  j["count_estimate_text"] = r.estimateText;
  j["exact_path"] = r.exactPath;
  j["aborted_runs"] = r.abortedRuns;
  j["run_estimates"] = r.runEstimates;
  j["seed"] = r.seed;
  j["params"] = toJson(r.params);
  j["program"] = ordered_json{{"input_size", r.inputSize}, {"reduced_size", r.reducedSize},
                              {"reduced_depth", r.reducedDepth}};
  j["invariants"] = toJson(r.invariants);
  j["deviations"] = r.deviations;
  if (diagnostics) {
    ordered_json nodes = ordered_json::array();
    for (const auto& d : r.nodes)
      nodes.push_back(ordered_json{{"node", d.node},
                                   {"effective_height", d.effectiveHeight},
                                   {"kind", d.kind},
                                   {"p", d.p},
                                   {"p_value", d.pValue},
                                   {"mean_set_size", d.meanSetSize},
                                   {"max_set_size", d.maxSetSize}});
    j["per_node"] = std::move(nodes);
  }
  return j;
}

ordered_json toJson(const TrialReport& r) {
  ordered_json j;
  j["schema"] = kSchemaVersion;
  j["trials"] = r.trials;
  j["hits"] = r.hits;
  j["empirical_coverage"] = r.empiricalCoverage;
  j["wilson_lower_bound"] = r.wilsonLowerBound;
  j["abort_rate"] = r.abortRate;
  j["aborted_runs"] = r.abortedRuns;
  j["total_runs"] = r.totalRuns;
  j["seed_base"] = r.seedBase;
  j["exact"] = r.exact;
  j["epsilon"] = r.epsilon;
  j["exact_path"] = r.exactPath;
  j["invariants"] = toJson(r.invariants);
  return j;
}

std::string toText(const ordered_json& j, int indent) {
  std::ostringstream os;
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  for (auto it = j.begin(); it != j.end(); ++it) {
    os << pad << it.key() << ":";
    if (it->is_object()) {
      os << "\n" << toText(*it, indent + 2);
    } else if (it->is_array() && !it->empty() && it->front().is_object()) {
      os << "\n";
      for (const auto& e : *it) os << toText(e, indent + 2) << pad << "  --\n";
    } else if (it->is_string()) {
      os << " " << it->get<std::string>() << "\n";
    } else {
      os << " " << it->dump() << "\n";
    }
  }
  return os.str();
}

}  // namespace slicecount
