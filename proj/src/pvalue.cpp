#include "slicecount/pvalue.hpp"

#include <boost/multiprecision/cpp_int.hpp>

namespace slicecount {

namespace {

Real toReal(const Rational& r) {
  return Real(boost::multiprecision::numerator(r)) / Real(boost::multiprecision::denominator(r));
}

boost::multiprecision::cpp_int ceilRational(const Rational& r) {
  using boost::multiprecision::cpp_int;
  cpp_int num = boost::multiprecision::numerator(r);
  cpp_int den = boost::multiprecision::denominator(r);
  cpp_int q = num / den;
  if (q * den < num) ++q;
  return q;
}

std::int64_t exponentFor(int sign, std::uint32_t level) {
  if (level >= 62) throw RangeExhausted("effective height too large for the acceptable grid");
  return sign * (std::int64_t{1} << level);
}

}  // namespace

SymValue SymValue::make(const PContext& ctx, std::int64_t j, Rational L) {
  SymValue s;
  s.j = j;
  s.L = std::move(L);
  s.value = ctx.sixteenN() * exp(ctx.kappa * Real(j)) / toReal(s.L);
  return s;
}

SymValue SymValue::one(const PContext& ctx) { return make(ctx, 0, Rational(16 * ctx.n)); }

SymValue SymValue::sixteenNOver(const PContext& ctx, std::uint64_t s) { return make(ctx, 0, Rational(s)); }

SymValue SymValue::productOver16n(const PContext& ctx, const SymValue& a, const SymValue& b) {
  return make(ctx, a.j + b.j, a.L * b.L);
}

SymValue SymValue::divide(const PContext& ctx, const SymValue& a, const Rational& s) {
  return make(ctx, a.j, a.L * s);
}

int compare(const SymValue& a, const SymValue& b) {
  if (a.j == b.j) {
    if (a.L == b.L) return 0;
    return a.L > b.L ? -1 : 1;
  }
  if (a.value == b.value) return 0;
  return a.value < b.value ? -1 : 1;
}

PValue PValue::makeOne(const PContext& ctx) {
  PValue p;
  p.kind = Kind::One;
  p.sym = SymValue::one(ctx);
  return p;
}

PValue PValue::heightZero(const PContext& ctx, std::uint64_t s) {
  if (s <= 16 * ctx.n) return makeOne(ctx);
  PValue p;
  p.kind = Kind::Exact;
  p.sym = SymValue::sixteenNOver(ctx, s);
  return p;
}

PValue PValue::grid(const PContext& ctx, int sign, std::uint32_t level, std::uint64_t ell) {
  PValue p;
  p.kind = Kind::Grid;
  p.sign = sign;
  p.level = level;
  p.ell = ell;
  p.sym = SymValue::make(ctx, exponentFor(sign, level), Rational(ell));
  return p;
}

std::string PValue::describe() const {
  switch (kind) {
    case Kind::One: return "1";
    case Kind::Exact: return "16n/" + sym.L.str();
    case Kind::Grid:
      return std::string("16n*e^(") + (sign < 0 ? "-" : "+") + "kappa*2^" + std::to_string(level) +
             ")/" + std::to_string(ell);
  }
  return "?";
}

Real gridNumerator(const PContext& ctx, int sign, std::uint32_t level) {
  return ctx.sixteenN() * exp(ctx.kappa * Real(exponentFor(sign, level)));
}

PValue roundDown(const PContext& ctx, std::uint32_t level, const SymValue& v) {
  if (compare(v, SymValue::one(ctx)) >= 0) return PValue::makeOne(ctx);
  if (v.value <= 0) throw RangeExhausted("roundDown of a non-positive value");

  const Real ellMax = Real(ctx.ellMax);
  bool found = false;
  PValue best;
  for (int sign : {-1, +1}) {
    const std::int64_t E = exponentFor(sign, level);
    const Real numer = gridNumerator(ctx, sign, level);
    // smallest ell with numer/ell <= v
    Real fit;
    if (E == v.j) {
      fit = Real(ceilRational(v.L));
    } else {
      fit = ceil(numer / v.value);
    }
    // smallest ell with numer/ell < 1
    Real belowOne = floor(numer) + 1;
    Real ell = fit > belowOne ? fit : belowOne;
    if (ell > ellMax) continue;
    auto e = ell.convert_to<std::uint64_t>();
    PValue cand = PValue::grid(ctx, sign, level, e);
    // guard against shadow rounding at the ceiling
    while (compare(cand.sym, v) > 0 && e < ctx.ellMax) cand = PValue::grid(ctx, sign, level, ++e);
    if (compare(cand.sym, v) > 0) continue;
    if (!found || compare(cand.sym, best.sym) > 0) {
      best = std::move(cand);
      found = true;
    }
  }
  if (!found)
    throw RangeExhausted("no acceptable value at height " + std::to_string(level) +
                         " is below the requested value with ell <= " + std::to_string(ctx.ellMax));
  return best;
}

bool isAcceptable(const PContext& ctx, std::uint32_t level, const PValue& p) {
  switch (p.kind) {
    case PValue::Kind::One: return true;
    case PValue::Kind::Exact: return level == 0 && p.sym.j == 0 && p.sym.L > Rational(16 * ctx.n);
    case PValue::Kind::Grid:
      return p.level == level && p.ell >= 1 && p.ell <= ctx.ellMax && (p.sign == 1 || p.sign == -1) &&
             p.sym.j == exponentFor(p.sign, level) && p.sym.L == Rational(p.ell) && p.sym.value < 1;
  }
  return false;
}

}  // namespace slicecount
