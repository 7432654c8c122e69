#pragma once

#include <cstddef>
#include <vector>

namespace qdag {

enum class OpKind : unsigned char { Mul, Add };

struct OpRecord {
  OpKind kind;
  std::size_t arity;
  friend bool operator==(const OpRecord&, const OpRecord&) = default;
};

/// Log of k-ary multiply/add requests, in issue order. The numeric clustering
/// oracle fills it with scalar operations; the compiler fills it with node
/// construction requests (before hash-consing), so the two logs can be
/// compared entry by entry.
struct OpCounter {
  std::size_t multiplications = 0;
  std::size_t additions = 0;
  std::vector<OpRecord> trace;

  void record(OpKind kind, std::size_t arity) {
    (kind == OpKind::Mul ? multiplications : additions) += 1;
    trace.push_back({kind, arity});
  }
  std::size_t operations() const { return multiplications + additions; }
};

}  // namespace qdag
