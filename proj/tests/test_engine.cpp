#include <doctest.h>

#include <cmath>
#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "slicecount/engine.hpp"
#include "slicecount/generators.hpp"
#include "slicecount/grammar.hpp"
#include "slicecount/nnf.hpp"
#include "slicecount/oracle.hpp"
#include "slicecount/pvalue.hpp"

using namespace slicecount;
using namespace fixture::running;
using fixture::x;

namespace {

Overrides randomizedPath() {
  Overrides ov;
  ov.threshold = 4;
  ov.ns = 40;
  ov.nt = 5;
  ov.m = 3;
  return ov;
}

Program mediumProgram() {
  ProgramShape shape;
  shape.numVars = 40;
  shape.degree = 2;
  shape.minTerms = shape.maxTerms = 2;
  shape.minLeafFanin = 12;
  shape.maxLeafFanin = 20;
  return randomProgram(2, shape);
}

}  // namespace

TEST_CASE("paper-strict parameters") {
  Params p = deriveParams(9, 20, 1.0, 0.25, Mode::PaperStrict);
  CHECK(p.kappa == Real(1) / Real(4000));
  CHECK(p.ns == 192000000);
  CHECK(p.nt == 1440);
  CHECK(p.m == static_cast<std::uint64_t>(std::ceil(16 * std::log(4.0))));
  CHECK(p.supportThreshold == 16 * 9 * 400);
  CHECK(p.ellMax == 512);
  CHECK_THROWS_AS(deriveParams(9, 20, 1.0, 0.25, Mode::PaperStrict, randomizedPath()), ParamError);

  const double fourLn2 = 4 * std::log(2.0);
  CHECK(deriveParams(3, 5, fourLn2, 0.1, Mode::PaperStrict).epsilonPrime == fourLn2);
  CHECK(deriveParams(3, 5, 10.0, 0.1, Mode::PaperStrict).epsilonPrime == doctest::Approx(fourLn2));
}

TEST_CASE("practical parameters") {
  Overrides ov;
  ov.ns = 50;
  ov.nt = 9;
  ov.theta = 100000;
  Params p = deriveParams(4, 10, 0.5, 0.25, Mode::Practical, ov);
  CHECK(p.ns == 50);
  CHECK(p.nt == 9);
  CHECK(p.theta == 100000);
  CHECK(p.supportThreshold == 16 * 4 * 100);
  CHECK_FALSE(p.deviations.empty());
  Params d = deriveParams(4, 10, 0.5, 0.25, Mode::Practical);
  CHECK(d.ns == kPracticalNs);
  CHECK(d.nt == kPracticalNt);
  CHECK_THROWS_AS(deriveParams(4, 10, -1, 0.25, Mode::Practical), ParamError);
  CHECK_THROWS_AS(deriveParams(4, 10, 0.5, 1.5, Mode::Practical), ParamError);
  Overrides zero;
  zero.nt = 0;
  CHECK_THROWS_AS(deriveParams(4, 10, 0.5, 0.25, Mode::Practical, zero), ParamError);
}

TEST_CASE("symbolic values and rounding") {
  PContext ctx{4, Real(1) / Real(64), std::uint64_t{1} << 20};
  SymValue a = SymValue::make(ctx, 3, Rational(5));
  SymValue b = SymValue::make(ctx, -1, Rational(7));
  SymValue ab = SymValue::productOver16n(ctx, a, b);
  CHECK(ab.j == 2);
  CHECK(ab.L == Rational(35));
  CHECK(compare(SymValue::make(ctx, 2, Rational(3)), SymValue::make(ctx, 2, Rational(4))) > 0);

  CHECK(roundDown(ctx, 1, SymValue::one(ctx)).isOne());
  CHECK(roundDown(ctx, 1, SymValue::make(ctx, 0, Rational(1))).isOne());

  PValue g = PValue::grid(ctx, 1, 2, 300);
  PValue again = roundDown(ctx, 2, g.sym);
  CHECK(again.kind == PValue::Kind::Grid);
  CHECK(again.sign == 1);
  CHECK(again.ell == 300);
  CHECK(isAcceptable(ctx, 2, again));

  SymValue nudged = SymValue::make(ctx, 4, Rational(300) / (Rational(1) + Rational(1, 1000000000)));
  PValue r = roundDown(ctx, 2, nudged);
  CHECK(r.ell == 300);
  CHECK(r.sign == 1);
  CHECK(compare(r.sym, nudged) <= 0);

  for (std::uint64_t l = 65; l < 2000; l += 37)
    for (std::int64_t j : {-8, -3, 0, 2, 5}) {
      SymValue v = SymValue::make(ctx, j, Rational(l));
      for (std::uint32_t lvl = 1; lvl <= 3; ++lvl) {
        PValue pv = roundDown(ctx, lvl, v);
        CHECK(compare(pv.sym, v) <= 0);
        CHECK(isAcceptable(ctx, lvl, pv));
      }
    }
}

TEST_CASE("height-zero probabilities") {
  PContext ctx{2, Real(1) / Real(100), 1 << 10};
  CHECK(PValue::heightZero(ctx, 32).isOne());
  CHECK(PValue::heightZero(ctx, 10).isOne());
  PValue half = PValue::heightZero(ctx, 64);
  CHECK(half.value() == Real(0.5));
  CHECK(isAcceptable(ctx, 0, half));
}

TEST_CASE("reduce keeps each element with the given probability") {
  std::vector<Monomial> z;
  for (VariableId v = 0; v < 100; ++v) z.push_back(Monomial::single(v));
  SplitMix64 rng(42);
  CHECK(reduceSet(z, 1.0, rng) == z);
  CHECK(reduceSet({}, 0.3, rng).empty());
  CHECK(reduceSet(z, 0.0, rng).empty());
  for (double t : {0.3, 0.05}) {
    const int trials = 100000;
    double sum = 0;
    for (int i = 0; i < trials; ++i) sum += static_cast<double>(reduceSet(z, t, rng).size());
    const double sigma = std::sqrt(100 * t * (1 - t) / trials);
    CHECK(std::abs(sum / trials - 100 * t) <= 3 * sigma);
  }
}

TEST_CASE("union filter") {
  Program p = fixture::runningExample();
  MembershipOracle oracle(p);
  std::vector<Monomial> s1{x({1, 3, 8, 9})};
  auto u = unionFilter(p, q0, {s1, {x({3, 5, 8, 9}), x({4, 5, 8, 9})}}, oracle);
  CHECK(std::find(u.begin(), u.end(), x({3, 5, 8, 9})) == u.end());
  CHECK(u == s1);

  Program comb = combProgram(2, 2);
  MembershipOracle combOracle(comb);
  const auto combSupp = enumerateSupport(comb);
  CHECK(unionFilter(comb, comb.root(), {combSupp}, combOracle) == combSupp);
  auto disjoint = unionFilter(p, q6, {{x({6, 7})}, {x({8, 9})}}, oracle);
  CHECK(disjoint.size() == 2);
}

TEST_CASE("first-order inclusion at a plus node") {
  // q = q1 + q2 with overlapping exact supports; children sampled at p1, p2
  // and reduced to rho = min(p1, p2). E|S^| = rho * |supp(q)|.
  Program p = Program::parse(
      "input a\ninput b\ninput c\ninput d\n"
      "plus 0 1 2\nplus 1 2 3\n"
      "input e\ninput f\nplus 6 7\n"
      "times 4 8\ntimes 5 8\nplus 9 10\n");
  REQUIRE(validateProgram(p).ok());
  const auto s1 = enumerateSupport(p, 9, kSupportCap), s2 = enumerateSupport(p, 10, kSupportCap);
  const auto sq = enumerateSupport(p, 11, kSupportCap);
  const double p1 = 0.5, p2 = 0.25, rho = 0.25;
  MembershipOracle oracle(p);
  SplitMix64 rng(7);
  const int trials = 10000;
  double sum = 0;
  for (int i = 0; i < trials; ++i) {
    auto a = reduceSet(reduceSet(s1, p1, rng), rho / p1, rng);
    auto b = reduceSet(reduceSet(s2, p2, rng), rho / p2, rng);
    sum += static_cast<double>(unionFilter(p, 11, {a, b}, oracle).size());
  }
  const double n = static_cast<double>(sq.size());
  const double sigma = std::sqrt(n * rho * (1 - rho) / trials);
  CHECK(std::abs(sum / trials - rho * n) <= 3 * sigma);
}

TEST_CASE("exact path") {
  Program p = fixture::runningExample();
  Params params = deriveParams(p, 0.5, 0.25, Mode::Practical);
  RunResult r = countCore(p, params, 1);
  CHECK(r.exactPath);
  CHECK(r.estimate == 8);
  Program one({Node::input(0)}, {"x"});
  CHECK(countCore(one, deriveParams(one, 0.5, 0.25, Mode::Practical), 1).estimate == 1);

  Overrides m1;
  m1.m = 1;
  CountResult c = counter(p, 0.5, 0.25, Mode::Practical, m1, 3);
  CHECK(c.exactPath);
  CHECK(c.estimate == r.estimate);
  CHECK(counter(p, 0.5, 0.25, Mode::PaperStrict, {}, 3).estimate == 8);
}

TEST_CASE("grammar and circuit pipelines") {
  CHECK(countCfg(parseGrammar("S -> a | b"), 1, 0.5, 0.1, Mode::Practical, {}, 1).count.estimate == 2);
  CfgCountResult parens =
      countCfg(parseGrammar(fixture::readData("parens.cfg")), 6, 0.5, 0.1, Mode::Practical, {}, 1);
  CHECK(parens.count.estimate == 5);
  CHECK(parens.count.exactPath);
  CfgCountResult none = countCfg(parseGrammar("S -> a a"), 3, 0.5, 0.1, Mode::Practical, {}, 1);
  CHECK(none.emptyLanguage);
  CHECK(none.count.estimate == 0);
  CHECK_THROWS_AS(countCfg(parseGrammar("S -> a"), 0, 0.5, 0.1, Mode::Practical, {}, 1), ParamError);

  CHECK(countDnnf(parseNnf("nnf 3 2 1\nL 1\nL -1\nO 1 2 0 1\n"), 0.5, 0.1, Mode::Practical, {}, 1)
            .count.estimate == 2);
  DnnfCountResult unsat = countDnnf(parseNnf("nnf 1 0 2\nO 0 0\n"), 0.5, 0.1, Mode::Practical, {}, 1);
  CHECK(unsat.constant);
  CHECK(unsat.count.estimate == 0);
  DnnfCountResult needsSmoothing =
      countDnnf(parseNnf("nnf 3 2 2\nL 1\nL 2\nO 0 2 0 1\n"), 0.5, 0.1, Mode::Practical, {}, 1);
  CHECK(needsSmoothing.smoothed);
  CHECK(needsSmoothing.count.estimate == 3);
  CHECK_THROWS_AS(countDnnf(parseNnf("nnf 3 2 1\nL 1\nL -1\nA 2 0 1\n"), 0.5, 0.1, Mode::Practical, {}, 1),
                  CircuitShapeError);
}

TEST_CASE("randomized path") {
  Program p = mediumProgram();
  const double exact = static_cast<double>(enumerateSupport(p).size());
  Params params = deriveParams(p, 0.5, 0.25, Mode::Practical, randomizedPath());
  SUBCASE("samples lie in the support and invariants hold") {
    RunOptions opt;
    opt.keepSamples = true;
    RunResult r = countCore(p, params, 11, opt);
    REQUIRE_FALSE(r.exactPath);
    CHECK_FALSE(r.aborted);
    CHECK(r.invariants.clean());
    CHECK(r.invariants.checks > 0);
    CHECK(r.estimate > 0.3 * exact);
    CHECK(r.estimate < 3 * exact);
    for (NodeIndex q = 0; q < p.size(); ++q) {
      if (r.samples[q].empty()) continue;
      const auto supp = testoracle::support(p, q);
      for (const auto& set : r.samples[q]) {
        CHECK(std::set<Monomial>(set.begin(), set.end()).size() == set.size());
        for (const Monomial& m : set) CHECK(supp.count({m.vars().begin(), m.vars().end()}) == 1);
      }
    }
    for (NodeIndex q = 0; q < p.size(); ++q)
      if (r.p[q] && !r.p[q]->isOne())
        for (NodeIndex ch : p.node(q).children)
          if (r.p[ch]) CHECK(compare(r.p[q]->sym, r.p[ch]->sym) <= 0);
  }
  SUBCASE("replay does not depend on the thread count") {
    RunOptions one, many;
    many.jobs = 4;
    CountResult a = counterWithParams(p, params, 5, one);
    CountResult b = counterWithParams(p, params, 5, many);
    CHECK(a.estimateText == b.estimateText);
    CHECK(a.runEstimates == b.runEstimates);
    CHECK(counterWithParams(p, params, 6, one).estimateText != a.estimateText);
  }
  SUBCASE("theta of one aborts") {
    Overrides ov = randomizedPath();
    ov.theta = 1;
    RunResult r = countCore(p, deriveParams(p, 0.5, 0.25, Mode::Practical, ov), 3);
    CHECK(r.aborted);
    CHECK(r.estimate == 0);
  }
}

TEST_CASE("substream seeds") {
  CHECK(substreamSeed(1, {2, 3}) == substreamSeed(1, {2, 3}));
  CHECK(substreamSeed(1, {2, 3}) != substreamSeed(1, {3, 2}));
  CHECK(substreamSeed(1, {2}) != substreamSeed(2, {2}));
  CHECK(runSeed(9, 0) != runSeed(9, 1));
}
