#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace slicecount {

using Real = boost::multiprecision::cpp_bin_float_50;
using Rational = boost::multiprecision::cpp_rational;

/// Shared constants for symbolic values 16n * e^(kappa*j) / L.
struct PContext {
  std::uint64_t n = 1;            // program degree
  Real kappa = 0;
  std::uint64_t ellMax = 1;       // acceptable values use 1 <= ell <= ellMax
  Real sixteenN() const { return Real(16 * n); }
};

/// 16n * e^(kappa*j) / L with integer j and positive rational L, plus a
/// 50-digit shadow of its value. Products and quotients of acceptable values
/// stay in this form, so comparisons with equal j are exact.
struct SymValue {
  std::int64_t j = 0;
  Rational L = 1;
  Real value = 0;

  static SymValue make(const PContext& ctx, std::int64_t j, Rational L);
  /// The constant 1 (j = 0, L = 16n).
  static SymValue one(const PContext& ctx);
  /// 16n / s.
  static SymValue sixteenNOver(const PContext& ctx, std::uint64_t s);

  /// a * b / (16n)
  static SymValue productOver16n(const PContext& ctx, const SymValue& a, const SymValue& b);
  /// a / s
  static SymValue divide(const PContext& ctx, const SymValue& a, const Rational& s);
};

/// Three-way comparison; exact when both share j.
int compare(const SymValue& a, const SymValue& b);
inline const SymValue& minOf(const SymValue& a, const SymValue& b) { return compare(a, b) <= 0 ? a : b; }

class RangeExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value of p(q): One, an exact rational 16n/|supp| (height-0 nodes), or
/// an acceptable grid value 16n * e^(sign*kappa*2^level) / ell (< 1).
struct PValue {
  enum class Kind : std::uint8_t { One, Exact, Grid };
  Kind kind = Kind::One;
  int sign = 0;
  std::uint32_t level = 0;
  std::uint64_t ell = 0;
  SymValue sym;

  static PValue makeOne(const PContext& ctx);
  /// min(1, 16n / s) for a height-0 node with s monomials.
  static PValue heightZero(const PContext& ctx, std::uint64_t s);
  static PValue grid(const PContext& ctx, int sign, std::uint32_t level, std::uint64_t ell);

  bool isOne() const { return kind == Kind::One; }
  const Real& value() const { return sym.value; }
  std::string describe() const;
};

/// Largest acceptable value at the given effective height that is <= v:
/// One when v >= 1, otherwise the best grid value over both signs. Throws
/// RangeExhausted when no grid value with ell <= ellMax is small enough.
PValue roundDown(const PContext& ctx, std::uint32_t level, const SymValue& v);

/// Grid membership check used by the run-time invariant audit.
bool isAcceptable(const PContext& ctx, std::uint32_t level, const PValue& p);

/// e^(kappa * 2^level * sign) * 16n, the numerator of grid values.
Real gridNumerator(const PContext& ctx, int sign, std::uint32_t level);

}  // namespace slicecount
