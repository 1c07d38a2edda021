#include <doctest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "slicecount/depth_reduction.hpp"
#include "slicecount/generators.hpp"

using namespace slicecount;

namespace {

void checkReduction(const Program& p) {
  Program r = reduceDepth(p);
  CHECK(validateProgram(r).ok());
  CHECK(r.depth() <= depthBound(p.degree()));
  CHECK(r.size() <= kDepthReductionSizeConstant * p.size() * p.size());
  CHECK(r.numVars() == p.numVars());
  CHECK(testoracle::support(r) == testoracle::support(p));
}

}  // namespace

TEST_CASE("depth bound") {
  CHECK(depthBound(1) == 3);
  CHECK(depthBound(2) == 3);
  CHECK(depthBound(8) == 9);
  CHECK(depthBound(9) == 12);
}

TEST_CASE("shallow programs pass through") {
  Program p = fixture::runningExample();
  CHECK(p.depth() <= 6);
  CHECK(reduceDepth(p).toText() == p.toText());
}

TEST_CASE("chains of every degree up to 10") {
  for (std::size_t n = 1; n <= 10; ++n) {
    CAPTURE(n);
    checkReduction(chainProgram(n));
  }
  Program c8 = chainProgram(8);
  CHECK(c8.depth() == 15);
  CHECK(reduceDepth(c8).depth() <= 9);
}

TEST_CASE("combs") {
  for (std::size_t n = 2; n <= 10; ++n)
    for (std::size_t teeth : {1, 2, 3}) {
      CAPTURE(n);
      CAPTURE(teeth);
      checkReduction(combProgram(n, teeth));
    }
}

TEST_CASE("random programs") {
  ProgramShape shape;
  shape.degree = 4;
  shape.numVars = 10;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    CAPTURE(seed);
    checkReduction(randomProgram(seed, shape));
  }
}
