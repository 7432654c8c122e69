#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "qdag/qdag.hpp"

namespace qdag {

enum class RewriteRule : unsigned char {
  IdentityElimination,
  NumericReduction,
  AssociativeMerging,
  CommutativeMerging,
};

inline constexpr std::array<RewriteRule, 4> kAllRules = {
    RewriteRule::IdentityElimination, RewriteRule::NumericReduction,
    RewriteRule::AssociativeMerging, RewriteRule::CommutativeMerging};

std::string_view rule_name(RewriteRule rule);
std::optional<RewriteRule> parse_rule(std::string_view name);

/// Nodes that some query node depends on (the query nodes included).
std::vector<bool> reachable_nodes(const QDag& dag);
std::size_t reachable_count(const QDag& dag);

/// Copy keeping only reachable nodes, renumbered in their original order.
QDag collect_garbage(const QDag& dag);

struct RuleResult {
  QDag dag;
  std::size_t applied = 0;
};

/// One bottom-up pass of a single rule, followed by garbage collection.
///
///  - identity-elimination drops Num(1) operands of Mul and Num(0) operands of Add.
///  - numeric-reduction replaces all-numeric operations by their value,
///    collapses a Mul holding Num(0) to Num(0), and folds runs of adjacent
///    unshared numeric operands of mixed nodes into one Num.
///  - associative-merging splices a same-kind operand that feeds nothing else.
///  - commutative-merging sorts operands (numbers by value, then ESNs by
///    variable and value, then operations by id) so that permuted duplicates
///    hash-cons together.
///
/// A node left with a single operand is replaced by that operand.
RuleResult apply_rule(const QDag& dag, RewriteRule rule);

struct ReduceStats {
  std::array<std::size_t, 4> applied{};  // indexed by RewriteRule
  std::size_t rounds = 0;
  std::size_t nodes_before = 0;  // reachable
  std::size_t nodes_after = 0;
  std::size_t total_applied() const;
};

struct ReduceResult {
  QDag dag;
  ReduceStats stats;
};

/// Repeats [numeric-reduction, identity-elimination, associative-merging,
/// commutative-merging, numeric-reduction] until a whole round rewrites
/// nothing.
ReduceResult reduce_fixpoint(const QDag& dag);

}  // namespace qdag
