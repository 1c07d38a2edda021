#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace slicecount {

using VariableId = std::uint32_t;
using NodeIndex = std::uint32_t;

/// A multilinear monomial: a strictly increasing list of variable ids.
class Monomial {
 public:
  Monomial() = default;
  Monomial(std::initializer_list<VariableId> vars);
  explicit Monomial(std::vector<VariableId> vars);

  static Monomial single(VariableId v) { return Monomial(std::vector<VariableId>{v}); }

  std::span<const VariableId> vars() const { return vars_; }
  std::size_t degree() const { return vars_.size(); }
  bool empty() const { return vars_.empty(); }
  bool contains(VariableId v) const;

  /// Disjoint union. Returns false-flagged result through `ok` when the
  /// operands share a variable.
  static Monomial merge(const Monomial& a, const Monomial& b, bool* ok = nullptr);

  friend auto operator<=>(const Monomial&, const Monomial&) = default;
  friend bool operator==(const Monomial&, const Monomial&) = default;

  std::string toString(std::span<const std::string> names = {}) const;

 private:
  std::vector<VariableId> vars_;
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const noexcept;
};

}  // namespace slicecount
