#include "capax/multi_index.hpp"

#include "capax/common.hpp"

namespace capax {

double MultiIndex::factorial() const {
  return capax::factorial(e[0]) * capax::factorial(e[1]) * capax::factorial(e[2]);
}

std::size_t MultiIndex::count_up_to(int deg) {
  if (deg < 0) return 0;
  return static_cast<std::size_t>(deg + 1) * (deg + 2) * (deg + 3) / 6;
}

std::size_t MultiIndex::count_of_degree(int deg) {
  if (deg < 0) return 0;
  return static_cast<std::size_t>(deg + 1) * (deg + 2) / 2;
}

std::size_t MultiIndex::rank() const {
  const int j = order();
  // Offset of the degree-j block, then position inside the block. Within a
  // block the order is e1 descending, then e2 descending.
  const std::size_t offset = count_up_to(j - 1);
  const int r = j - e[0];                       // e2 + e3
  const std::size_t in_block = static_cast<std::size_t>(r) * (r + 1) / 2 + e[2];
  return offset + in_block;
}

std::vector<MultiIndex> MultiIndex::enumerate_degree(int deg) {
  std::vector<MultiIndex> out;
  out.reserve(count_of_degree(deg));
  for (int a = deg; a >= 0; --a)
    for (int b = deg - a; b >= 0; --b)
      out.push_back(MultiIndex{{a, b, deg - a - b}});
  return out;
}

std::vector<MultiIndex> MultiIndex::enumerate_up_to(int deg) {
  std::vector<MultiIndex> out;
  out.reserve(count_up_to(deg));
  for (int j = 0; j <= deg; ++j)
    for (const auto& b : enumerate_degree(j)) out.push_back(b);
  return out;
}

const std::vector<MultiIndex>& MultiIndex::table_up_to(int deg) {
  constexpr int kCap = 32;
  static const std::vector<std::vector<MultiIndex>> tables = [] {
    std::vector<std::vector<MultiIndex>> t(kCap + 1);
    for (int d = 0; d <= kCap; ++d) t[d] = enumerate_up_to(d);
    return t;
  }();
  if (deg < 0) deg = 0;
  if (deg > kCap) throw Error("multi-index table capped at degree 32");
  return tables[deg];
}

MultiIndex MultiIndex::from_rank(std::size_t rank) {
  int deg = 0;
  while (count_up_to(deg) <= rank) ++deg;
  std::size_t in_block = rank - count_up_to(deg - 1);
  int r = 0;
  while (static_cast<std::size_t>(r + 1) * (r + 2) / 2 <= in_block) ++r;
  const int e3 = static_cast<int>(in_block - static_cast<std::size_t>(r) * (r + 1) / 2);
  return MultiIndex{{deg - r, r - e3, e3}};
}

}  // namespace capax
