#pragma once

#include <string>
#include <string_view>

#include "qdag/qdag.hpp"

namespace qdag {

/// Renders the "QDAG 1" text format:
///
///   QDAG 1
///   evars <count>
///   evar <name> <k> <value...>
///   nodes <count>
///   N <decimal> | E <evar-index> <value-index> | M <arity> <id...> | A <arity> <id...>
///   queries <count>
///   Q <variable> <value> <node-id>
///
/// Node ids are implicit line positions starting at 0. Numbers use the
/// shortest decimal that round-trips.
std::string serialize(const QDag& dag);

/// Strict reader for the same format. Throws ParseError carrying the 1-based
/// line number for bad version, malformed lines, forward references,
/// duplicate nodes and truncated input.
QDag deserialize(std::string_view text);

}  // namespace qdag
