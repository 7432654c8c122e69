#pragma once

#include <optional>
#include <vector>

#include "qdag/jointree.hpp"
#include "qdag/network.hpp"
#include "qdag/op_counter.hpp"
#include "qdag/scope.hpp"

namespace qdag {

struct NumericPotential {
  Scope scope;
  std::vector<double> table;  // row-major over scope
};

/// Chain-rule product over every CPT. Throws LookupError if `full` leaves a
/// variable unbound.
double joint_probability(const BeliefNetwork& net, const Instantiation& full);

/// Pr(X = x, e) for every x, by summing the joint over all full
/// instantiations consistent with x and e.
NumericPotential marginals_bruteforce(const BeliefNetwork& net, VarIndex query,
                                      const Instantiation& evidence);

NumericPotential multiply(std::span<const NumericPotential> factors, const Cardinalities& cards,
                          OpCounter* counter = nullptr);
NumericPotential marginalize(const NumericPotential& p, const Scope& keep,
                             const Cardinalities& cards, OpCounter* counter = nullptr);

struct ClusterInferOptions {
  /// Variables that get a likelihood vector. nullopt means every variable,
  /// with all-ones vectors for unobserved ones. Evidence may only bind
  /// variables in this set.
  std::optional<std::vector<VarIndex>> likelihood_vars;
};

/// Pr(X, e) by the join-tree clustering algorithm: initialize cluster
/// potentials as products of their CPTs and likelihood vectors, collect
/// messages toward the lowest-id cluster containing X along
/// collect_schedule(), multiply into the posterior and sum out everything
/// but X. Every scalar operation is logged in `counter` when given.
NumericPotential cluster_infer(const BeliefNetwork& net, const JoinTree& jt, VarIndex query,
                               const Instantiation& evidence, OpCounter* counter = nullptr,
                               const ClusterInferOptions& options = {});

}  // namespace qdag
