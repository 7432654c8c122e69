#pragma once

#include <span>
#include <string_view>

#include "qdag/qdag.hpp"

namespace qdag {

/// Entries of `variable` divided by their sum: Pr(variable | e).
/// Throws LookupError if the variable has no query nodes and
/// ZeroProbabilityError if the sum is 0.
Output normalize(const Output& output, std::string_view variable);

/// Expected utility of observing `variable`: Σ_b Pr(variable = b | e) U(b).
///
/// The variable must be both a query variable and an evidence variable of
/// the dag, and must be unobserved ("?") in `evidence`. `utilities` follows
/// the order of the variable's query nodes.
double utility_of_observing(const QDag& dag, std::string_view variable,
                            std::span<const double> utilities, const Evidence& evidence);

}  // namespace qdag
