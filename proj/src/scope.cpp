#include "qdag/scope.hpp"

#include <algorithm>
#include <stdexcept>

namespace qdag {

std::size_t table_size(const Scope& scope, const Cardinalities& cards) {
  std::size_t size = 1;
  for (VarIndex v : scope) size *= cards.at(v);
  return size;
}

Scope scope_union(std::span<const Scope* const> scopes) {
  Scope out;
  for (const Scope* s : scopes)
    for (VarIndex v : *s)
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  return out;
}

Scope scope_restrict(const Scope& scope, const Scope& keep) {
  Scope out;
  for (VarIndex v : scope)
    if (std::find(keep.begin(), keep.end(), v) != keep.end()) out.push_back(v);
  return out;
}

std::vector<std::size_t> project_indices(const Scope& from, const Scope& to,
                                         const Cardinalities& cards) {
  // Stride of each `from` position inside the `to` table (0 if absent).
  std::vector<std::size_t> stride(from.size(), 0);
  std::size_t step = 1;
  for (std::size_t j = to.size(); j-- > 0;) {
    auto it = std::find(from.begin(), from.end(), to[j]);
    if (it == from.end()) throw std::invalid_argument("projection target not a subset");
    stride[static_cast<std::size_t>(it - from.begin())] = step;
    step *= cards.at(to[j]);
  }

  const std::size_t n = table_size(from, cards);
  std::vector<std::size_t> out(n);
  std::vector<std::size_t> digit(from.size(), 0);
  std::size_t target = 0;
  for (std::size_t cell = 0; cell < n; ++cell) {
    out[cell] = target;
    // Mixed-radix increment, last variable fastest.
    for (std::size_t k = from.size(); k-- > 0;) {
      if (++digit[k] < cards[from[k]]) {
        target += stride[k];
        break;
      }
      target -= stride[k] * (digit[k] - 1);
      digit[k] = 0;
    }
  }
  return out;
}

}  // namespace qdag
