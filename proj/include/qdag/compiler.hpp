#pragma once

#include <span>
#include <string>
#include <vector>

#include "qdag/jointree.hpp"
#include "qdag/network.hpp"
#include "qdag/op_counter.hpp"
#include "qdag/qdag.hpp"
#include "qdag/scope.hpp"

namespace qdag {

/// Potential whose cells are Q-DAG nodes instead of numbers.
struct SymbolicPotential {
  Scope scope;
  std::vector<NodeId> table;  // row-major over scope
};

/// Cell-wise ⊗ over the ordered union of the input scopes. One Mul request
/// per output cell, operands taken from the inputs in list order. A single
/// input is returned unchanged.
SymbolicPotential symbolic_multiply(QDag& dag, std::span<const SymbolicPotential> factors,
                                    const Cardinalities& cards, OpCounter* trace = nullptr);

/// ⊕ over every variable not in `keep`. The result keeps the original scope
/// order. Throws std::invalid_argument if `keep` is not a subset.
SymbolicPotential symbolic_marginalize(QDag& dag, const SymbolicPotential& p, const Scope& keep,
                                       const Cardinalities& cards, OpCounter* trace = nullptr);

/// Cluster potential per cluster: the product of n(Pr_X) for every assigned
/// family, then n(λ_E) for every assigned evidence variable. Clusters with
/// nothing assigned get an empty-scope entry with no cells.
std::vector<SymbolicPotential> init_symbolic_potentials(QDag& dag, const BeliefNetwork& net,
                                                        const JoinTree& jt,
                                                        std::span<const VarIndex> evidence_vars,
                                                        OpCounter* trace = nullptr);

struct CompileResult {
  QDag dag;
  JoinTree jointree;
  OpCounter trace;  // Mul/Add requests in issue order, before hash-consing
};

/// Symbolic clustering. Evidence variables are registered in the order
/// given, query nodes are registered per query variable (in the order given)
/// and per value. Throws std::invalid_argument on an empty query set and
/// LookupError on unknown names.
CompileResult compile(const BeliefNetwork& net, std::span<const std::string> query_vars,
                      std::span<const std::string> evidence_vars);

}  // namespace qdag
