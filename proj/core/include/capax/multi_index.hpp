#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace capax {

/// Multi-index in three variables. Enumeration is graded lexicographic:
/// total degree first, then lexicographic with x1 > x2 > x3, which fixes
/// the layout of every coefficient table and cache in the library.
struct MultiIndex {
  std::array<int, 3> e{0, 0, 0};

  int order() const { return e[0] + e[1] + e[2]; }
  double factorial() const;  // e1! e2! e3!

  MultiIndex bumped(int axis) const {
    MultiIndex b = *this;
    b.e[axis] += 1;
    return b;
  }

  bool operator==(const MultiIndex&) const = default;

  /// Rank in graded-lex order (0 for (0,0,0)).
  std::size_t rank() const;

  /// Number of multi-indices of total degree <= deg, i.e. binom(deg+3, 3).
  static std::size_t count_up_to(int deg);
  /// Number of multi-indices of total degree == deg, i.e. binom(deg+2, 2).
  static std::size_t count_of_degree(int deg);

  static std::vector<MultiIndex> enumerate_degree(int deg);
  static std::vector<MultiIndex> enumerate_up_to(int deg);
  /// Cached graded-lex table for deg <= 32 (hot evaluation paths).
  static const std::vector<MultiIndex>& table_up_to(int deg);
  static MultiIndex from_rank(std::size_t rank);
};

}  // namespace capax
