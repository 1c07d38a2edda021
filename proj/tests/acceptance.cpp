// Acceptance run: one PASS/FAIL line per criterion on stdout, details on stderr.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "slicecount/depth_reduction.hpp"
#include "slicecount/derivation.hpp"
#include "slicecount/engine.hpp"
#include "slicecount/generators.hpp"
#include "slicecount/grammar.hpp"
#include "slicecount/harness.hpp"
#include "slicecount/nnf.hpp"
#include "slicecount/oracle.hpp"
#include "slicecount/report.hpp"

using namespace slicecount;

namespace {

struct Outcome {
  bool pass = false;
  std::string summary;
};

InvariantCounts gAudit;  // every randomized run below feeds this

Overrides coverageOverrides() {
  Overrides ov;
  ov.threshold = 4;
  ov.ns = 200;
  ov.nt = 9;
  ov.m = 9;
  ov.theta = 1000000;
  return ov;
}

// ---------------------------------------------------------------- 1

Outcome exactPathEquivalence() {
  int grammars = 0, dnnfs = 0, mismatches = 0, notExact = 0, nonzero = 0;
  for (std::uint64_t seed = 1; grammars < 120; ++seed) {
    GrammarShape shape;
    shape.nonterminals = 1 + seed % 6;
    shape.alphabet = 1 + (seed / 6) % 3;
    const std::size_t n = 1 + (seed / 18) % 6;
    Grammar g = randomGrammar(seed, shape);
    const std::uint64_t expect = bruteCfgCount(g, n);
    nonzero += expect > 0;
    CfgCountResult r = countCfg(g, n, 0.5, 0.25, Mode::Practical, {}, seed);
    ++grammars;
    if (!r.emptyLanguage && !r.count.exactPath) ++notExact;
    if (r.count.estimateText != std::to_string(expect)) {
      ++mismatches;
      std::cerr << "  grammar seed " << seed << " n " << n << ": " << r.count.estimateText << " vs " << expect << "\n";
    }
  }
  for (std::uint64_t seed = 1; dnnfs < 120; ++seed) {
    DnnfShape shape;
    shape.numVars = 2 + seed % 9;
    shape.maxDepth = 2 + seed % 4;
    shape.constantProbability = seed % 5 == 0 ? 0.1 : 0.0;
    NnfCircuit c = randomDnnf(seed, shape);
    const std::uint64_t expect = bruteDnnfCount(c);
    nonzero += expect > 0;
    DnnfCountResult r = countDnnf(c, 0.5, 0.25, Mode::Practical, {}, seed);
    ++dnnfs;
    if (!r.constant && !r.count.exactPath) ++notExact;
    if (r.count.estimateText != std::to_string(expect)) {
      ++mismatches;
      std::cerr << "  dnnf seed " << seed << ": " << r.count.estimateText << " vs " << expect << "\n";
    }
  }
  std::ostringstream os;
  os << grammars << " grammars, " << dnnfs << " smooth DNNFs, " << nonzero << " nonzero counts, " << mismatches << " mismatches, " << notExact
     << " off the exact path";
  return {mismatches == 0 && notExact == 0, os.str()};
}

// ---------------------------------------------------------------- 2

std::vector<Program> coverageInstances() {
  std::vector<Program> out;
  auto scan = [&](ProgramShape shape, std::size_t want) {
    std::size_t got = 0;
    for (std::uint64_t seed = 1; got < want && seed < 1000; ++seed) {
      Program p = randomProgram(seed, shape);
      const std::size_t s = enumerateSupport(p).size();
      if (s < 200 || s > 5000) continue;
      out.push_back(std::move(p));
      ++got;
    }
  };
  ProgramShape wide;
  wide.numVars = 40;
  wide.degree = 2;
  wide.minTerms = wide.maxTerms = 2;
  wide.minLeafFanin = 12;
  wide.maxLeafFanin = 20;
  scan(wide, 16);
  ProgramShape deep;
  deep.numVars = 24;
  deep.degree = 3;
  deep.minTerms = 3;
  deep.maxTerms = 4;
  deep.minLeafFanin = 4;
  deep.maxLeafFanin = 8;
  scan(deep, 4);
  return out;
}

Outcome randomizedCoverage() {
  const auto programs = coverageInstances();
  int ok = 0;
  double worstWilson = 1, worstAbort = 0;
  for (std::size_t i = 0; i < programs.size(); ++i) {
    TrialReport r =
        runCoverageTrials(programs[i], 0.5, 0.25, Mode::Practical, coverageOverrides(), 200, 1000 * (i + 1));
    gAudit += r.invariants;
    const bool pass = !r.exactPath && r.wilsonLowerBound >= 0.75 && r.abortRate <= 0.05;
    ok += pass;
    worstWilson = std::min(worstWilson, r.wilsonLowerBound);
    worstAbort = std::max(worstAbort, r.abortRate);
    std::cerr << "  instance " << i << ": n=" << programs[i].degree() << " |P|=" << programs[i].size()
              << " |supp|=" << r.exact << " coverage=" << r.empiricalCoverage << " wilson=" << r.wilsonLowerBound
              << " abort=" << r.abortRate << (pass ? "" : "  <-- fails") << "\n";
  }
  std::ostringstream os;
  os << ok << "/" << programs.size() << " instances pass; worst Wilson bound " << worstWilson << ", worst abort rate "
     << worstAbort;
  return {programs.size() >= 20 && ok == static_cast<int>(programs.size()), os.str()};
}

// ---------------------------------------------------------------- 3

// (inputs under one Plus) x w: degree 2, so p = min(1, 32 / k).
Program fan(std::size_t k) {
  std::string text;
  for (std::size_t i = 0; i < k; ++i) text += "input v" + std::to_string(i) + "\n";
  text += "plus";
  for (std::size_t i = 0; i < k; ++i) text += " " + std::to_string(i);
  text += "\ninput w\ntimes " + std::to_string(k) + " " + std::to_string(k + 1) + "\n";
  return Program::parse(text);
}

Outcome heightZeroUniformity() {
  struct Probe {
    std::size_t fanIn;
    VariableId var;
  };
  const std::vector<Probe> probes{{20, 0},  {20, 19},  {32, 7},   {64, 0},   {64, 33},
                                  {64, 63}, {128, 0},  {128, 64}, {128, 99}, {128, 127}};
  int ok = 0;
  std::uint64_t seedBase = 1;
  for (const Probe& pr : probes) {
    Program p = fan(pr.fanIn);
    Params params = deriveParams(p, 0.5, 0.25, Mode::Practical);
    const Monomial alpha{pr.var, static_cast<VariableId>(pr.fanIn)};
    ProbeResult r = inclusionFrequencyProbe(p, p.root(), alpha, params, 10000, seedBase);
    seedBase += 10000;
    ok += r.withinThreeSigma();
    std::cerr << "  fan-in " << pr.fanIn << " var " << pr.var << ": p=" << r.expected << " freq=" << r.frequency
              << " sigma=" << r.sigma << "\n";
  }
  std::ostringstream os;
  os << ok << "/" << probes.size() << " probes (p in {1, 1/2, 1/4}, 10^4 trials) within 3 sigma";
  return {ok == static_cast<int>(probes.size()), os.str()};
}

// ---------------------------------------------------------------- 4, 5

std::vector<Program> deskPrograms() {
  std::vector<Program> out;
  for (std::uint64_t seed = 1; out.size() < 20 && seed < 2000; ++seed) {
    ProgramShape shape;
    shape.numVars = 8 + seed % 5;
    shape.degree = 2 + seed % 4;
    shape.maxTerms = 2 + seed % 2;
    shape.maxLeafFanin = 3;
    Program p = randomProgram(seed, shape);
    const std::size_t s = enumerateSupport(p).size();
    if (s < 10 || s > 500) continue;
    out.push_back(std::move(p));
  }
  return out;
}

std::uint64_t supportSize(const Program& p, NodeIndex q) { return enumerateSupport(p, q, kSupportCap).size(); }

// Groups every a' in supp(q) by lcsn(tree(a), tree(a')) and checks each class
// against |supp(q)| / prod |supp(v)| over v in the class's antichain.
std::uint64_t antichainViolations(const Program& p, std::uint64_t& checks) {
  const auto supp = enumerateSupport(p);
  MembershipOracle oracle(p);
  std::vector<DerivationTree> trees;
  for (const Monomial& a : supp) trees.push_back(derivationTree(p, p.root(), a, oracle));
  std::map<NodeIndex, std::uint64_t> sizes;
  auto sizeOf = [&](NodeIndex q) {
    auto [it, fresh] = sizes.try_emplace(q, 0);
    if (fresh) it->second = supportSize(p, q);
    return it->second;
  };
  std::uint64_t violations = 0;
  for (std::size_t i = 0; i < supp.size(); ++i) {
    std::map<Antichain, std::uint64_t> classes;
    for (std::size_t j = 0; j < supp.size(); ++j) {
      Antichain tau = lastCommonSubtreeNodeset(trees[i], trees[j]);
      if (!isAntichain(trees[i], tau) || !isAntichain(trees[j], tau)) ++violations;
      ++classes[tau];
    }
    for (const auto& [tau, count] : classes) {
      ++checks;
      // count <= |supp| / prod  <=>  count * prod <= |supp|
      long double prod = 1;
      for (NodeIndex v : tau) prod *= static_cast<long double>(sizeOf(v));
      if (static_cast<long double>(count) * prod > static_cast<long double>(supp.size())) ++violations;
    }
  }
  return violations;
}

Outcome antichainAudit() {
  using namespace fixture::running;
  std::uint64_t checks = 0, violations = 0;
  Program fig = fixture::runningExample();
  violations += antichainViolations(fig, checks);
  // The library's class enumeration agrees with the grouping above on the running example.
  SupportInfo info = cappedSupport(fig, 100000);
  const auto supp = enumerateSupport(fig);
  for (const Monomial& a : supp) {
    DerivationTree ta = derivationTree(fig, q0, a);
    std::map<Antichain, std::uint64_t> classes;
    for (const Monomial& b : supp) ++classes[lastCommonSubtreeNodeset(ta, derivationTree(fig, q0, b))];
    for (const auto& [tau, count] : classes)
      if (mutationClass(fig, q0, a, tau, info).size() != count) ++violations;
  }
  const auto programs = deskPrograms();
  for (const Program& p : programs) violations += antichainViolations(p, checks);
  std::ostringstream os;
  os << "running example + " << programs.size() << " random programs, " << checks << " (monomial, antichain) classes, "
     << violations << " violations";
  return {programs.size() >= 20 && violations == 0, os.str()};
}

Outcome derivationTreeBounds() {
  using namespace fixture::running;
  const auto programs = deskPrograms();
  std::uint64_t trees = 0, violations = 0;
  for (const Program& p : programs) {
    MembershipOracle oracle(p);
    for (const Monomial& a : enumerateSupport(p)) {
      ++trees;
      if (derivationTree(p, p.root(), a, oracle).size() > 4 * p.degree()) ++violations;
    }
  }
  Program fig = fixture::runningExample();
  const Antichain lcsn = lastCommonSubtreeNodeset(derivationTree(fig, q0, fixture::x({3, 5, 8, 9})),
                                                  derivationTree(fig, q0, fixture::x({1, 3, 8, 9})));
  const bool canonical = lcsn == Antichain{q6, q13};
  std::ostringstream os;
  os << programs.size() << " programs, " << trees << " trees, " << violations << " over 4n; running-example lcsn "
     << (canonical ? "= {q6, q13}" : "differs");
  return {programs.size() >= 20 && violations == 0 && canonical, os.str()};
}

// ---------------------------------------------------------------- 6

Outcome depthReductionContract() {
  std::vector<Program> programs;
  for (std::size_t n = 2; n <= 10; ++n) programs.push_back(chainProgram(n));
  for (std::size_t n = 2; n <= 10; ++n) programs.push_back(combProgram(n, 2));
  programs.push_back(combProgram(9, 3));
  programs.push_back(combProgram(10, 3));
  int ok = 0;
  std::size_t worstRatioNum = 0, worstRatioDen = 1;
  for (const Program& p : programs) {
    Program r = reduceDepth(p);
    const bool depthOk = r.depth() <= depthBound(p.degree());
    const bool suppOk = testoracle::support(r) == testoracle::support(p);
    const bool sizeOk = r.size() <= kDepthReductionSizeConstant * p.size() * p.size();
    const bool valid = validateProgram(r).ok();
    ok += depthOk && suppOk && sizeOk && valid;
    if (r.size() * worstRatioDen > worstRatioNum * p.size() * p.size()) {
      worstRatioNum = r.size();
      worstRatioDen = p.size() * p.size();
    }
    if (!(depthOk && suppOk && sizeOk && valid))
      std::cerr << "  n=" << p.degree() << " |P|=" << p.size() << " depth " << p.depth() << " -> " << r.depth()
                << " size " << r.size() << "\n";
  }
  std::ostringstream os;
  os << ok << "/" << programs.size() << " chain/comb programs (n <= 10) within depth bound, support-equal, size <= "
     << kDepthReductionSizeConstant << "|P|^2 (worst |out|/|P|^2 = "
     << static_cast<double>(worstRatioNum) / static_cast<double>(worstRatioDen) << ")";
  return {ok == static_cast<int>(programs.size()), os.str()};
}

// ---------------------------------------------------------------- 8

Outcome deterministicReplay() {
  int same = 0, total = 0;
  auto compare = [&](const std::string& what, const std::function<std::string(unsigned)>& run) {
    ++total;
    const std::string a = run(1), b = run(8);
    if (a == b)
      ++same;
    else
      std::cerr << "  " << what << ": JSON differs between 1 and 8 jobs\n";
  };
  auto runOpts = [](unsigned jobs) {
    RunOptions o;
    o.jobs = jobs;
    o.diagnostics = true;
    return o;
  };
  const auto programs = coverageInstances();
  for (std::size_t i = 0; i < 5; ++i)
    compare("program " + std::to_string(i), [&](unsigned jobs) {
      CountResult r = counter(programs[i], 0.5, 0.25, Mode::Practical, coverageOverrides(), 77 + i, runOpts(jobs));
      gAudit += r.invariants;
      return toJson(r, true).dump();
    });
  Overrides small;
  small.threshold = 4;
  small.m = 5;
  compare("grammar", [&](unsigned jobs) {
    CfgCountResult r = countCfg(parseGrammar(fixture::readData("parens.cfg")), 10, 0.5, 0.25, Mode::Practical, small,
                                5, runOpts(jobs));
    gAudit += r.count.invariants;
    return toJson(r.count, true).dump();
  });
  DnnfShape shape;
  shape.numVars = 12;
  compare("dnnf", [&](unsigned jobs) {
    DnnfCountResult r = countDnnf(randomDnnf(3, shape), 0.5, 0.25, Mode::Practical, small, 9, runOpts(jobs));
    gAudit += r.count.invariants;
    return toJson(r.count, true).dump();
  });
  compare("coverage trials", [&](unsigned jobs) {
    TrialReport r = runCoverageTrials(programs[0], 0.5, 0.25, Mode::Practical, small, 5, 3, runOpts(jobs));
    gAudit += r.invariants;
    return toJson(r).dump();
  });
  std::ostringstream os;
  os << same << "/" << total << " randomized runs byte-identical with --jobs 1 and 8";
  return {same == total, os.str()};
}

// ---------------------------------------------------------------- 7

Outcome monotoneChain() {
  std::ostringstream os;
  os << gAudit.checks << " audited checks across all randomized runs, " << gAudit.pChainViolations
     << " p-chain violations (" << gAudit.closureViolations << " closure, " << gAudit.ratioViolations << " ratio)";
  return {gAudit.checks > 0 && gAudit.pChainViolations == 0 && gAudit.closureViolations == 0 &&
              gAudit.ratioViolations == 0,
          os.str()};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  // 7 audits the runs made by 2 and 8, so it runs last.
  const std::vector<Criterion> criteria{
      {1, "exact-path equivalence", exactPathEquivalence},
      {2, "randomized-path coverage", randomizedCoverage},
      {3, "height-0 uniformity", heightZeroUniformity},
      {4, "antichain audit", antichainAudit},
      {5, "derivation-tree bounds", derivationTreeBounds},
      {6, "depth reduction contract", depthReductionContract},
      {8, "deterministic replay", deterministicReplay},
      {7, "monotone p-chain", monotoneChain},
  };
  std::map<int, std::string> lines;
  bool all = true;
  for (const auto& c : criteria) {
    std::cerr << "criterion " << c.id << " (" << c.name << ")\n";
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream line;
    line << (o.pass ? "PASS" : "FAIL") << " [PRIMARY] " << c.id << ". " << c.name << ": " << o.summary << " ("
         << std::fixed;
    line.precision(1);
    line << secs << " s)";
    if (c.id == 1 && secs >= 60) {
      o.pass = false;
      line << " over the one-minute budget";
    }
    lines[c.id] = line.str();
    if (!o.pass) lines[c.id].replace(0, 4, "FAIL");
    all = all && o.pass;
    std::cerr << "  " << lines[c.id] << "\n";
  }
  for (const auto& [id, line] : lines) std::cout << line << "\n";
  return all ? 0 : 1;
}
