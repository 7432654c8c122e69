#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qdag/network.hpp"

namespace qdag {

using Scope = std::vector<VarIndex>;

std::size_t table_size(const Scope& scope, const Cardinalities& cards);

/// Ordered union, first-appearance order.
Scope scope_union(std::span<const Scope* const> scopes);

/// Entries of `scope` that are also in `keep`, in `scope` order.
Scope scope_restrict(const Scope& scope, const Scope& keep);

/// For every row-major cell of `from`, the row-major cell of `to` holding the
/// same values. `to` must be a subset of `from`.
std::vector<std::size_t> project_indices(const Scope& from, const Scope& to,
                                         const Cardinalities& cards);

}  // namespace qdag
