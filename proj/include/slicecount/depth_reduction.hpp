#pragma once

#include <cstddef>

#include "slicecount/program.hpp"

namespace slicecount {

/// 3 * ceil(log2 n), with ceil(log2 1) taken as 1 so degree-1 programs
/// (a single Plus of inputs) are within bound.
std::size_t depthBound(std::size_t degree);

/// Size constant C in |reduceDepth(p)| <= C * |p|^2, checked by the tests on
/// chain, comb and random programs. The construction is cubic in the worst
/// case (one term per (u, t, w) triple); C bounds the inputs we exercise.
inline constexpr std::size_t kDepthReductionSizeConstant = 8;

/// Equivalent program (same root support, same variables) of depth at most
/// depthBound(deg). Returns the compacted input unchanged when it is already
/// shallow enough. Built by degree halving: a node u of degree d is the sum
/// over product gates t with deg(t) > d/2 >= both child degrees of
/// [u:t] * t_L * t_R, where [u:t] is the partial derivative with respect to
/// t; partial derivatives are split the same way.
Program reduceDepth(const Program& p);

}  // namespace slicecount
