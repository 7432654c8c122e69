#include "qdag/compiler.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>

namespace qdag {

namespace {

bool is_unit(const SymbolicPotential& p) { return p.table.empty(); }

std::vector<VarIndex> unique_in_order(std::vector<VarIndex> vars) {
  std::vector<VarIndex> out;
  for (VarIndex v : vars)
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  return out;
}

}  // namespace

SymbolicPotential symbolic_multiply(QDag& dag, std::span<const SymbolicPotential> factors,
                                    const Cardinalities& cards, OpCounter* trace) {
  if (factors.empty()) throw std::invalid_argument("symbolic_multiply of no potentials");
  if (factors.size() == 1) return factors.front();

  std::vector<const Scope*> scopes;
  for (const auto& f : factors) scopes.push_back(&f.scope);
  SymbolicPotential out{scope_union(scopes), {}};
  const std::size_t n = table_size(out.scope, cards);
  std::vector<std::vector<std::size_t>> index;
  for (const auto& f : factors) index.push_back(project_indices(out.scope, f.scope, cards));

  out.table.reserve(n);
  std::vector<NodeId> operands(factors.size());
  for (std::size_t cell = 0; cell < n; ++cell) {
    for (std::size_t i = 0; i < factors.size(); ++i) operands[i] = factors[i].table[index[i][cell]];
    if (trace) trace->record(OpKind::Mul, operands.size());
    out.table.push_back(dag.make_op(NodeKind::Mul, operands));
  }
  return out;
}

SymbolicPotential symbolic_marginalize(QDag& dag, const SymbolicPotential& p, const Scope& keep,
                                       const Cardinalities& cards, OpCounter* trace) {
  for (VarIndex v : keep)
    if (std::find(p.scope.begin(), p.scope.end(), v) == p.scope.end())
      throw std::invalid_argument("symbolic_marginalize: keep is not a subset of the scope");
  SymbolicPotential out{scope_restrict(p.scope, keep), {}};
  if (out.scope.size() == p.scope.size()) return p;

  const auto target = project_indices(p.scope, out.scope, cards);
  std::vector<std::vector<NodeId>> groups(table_size(out.scope, cards));
  for (std::size_t cell = 0; cell < target.size(); ++cell) groups[target[cell]].push_back(p.table[cell]);

  out.table.reserve(groups.size());
  for (const auto& group : groups) {
    if (trace) trace->record(OpKind::Add, group.size());
    out.table.push_back(dag.make_op(NodeKind::Add, group));
  }
  return out;
}

std::vector<SymbolicPotential> init_symbolic_potentials(QDag& dag, const BeliefNetwork& net,
                                                        const JoinTree& jt,
                                                        std::span<const VarIndex> evidence_vars,
                                                        OpCounter* trace) {
  const auto& cards = net.cardinalities();
  std::vector<bool> is_evidence(net.size(), false);
  for (VarIndex e : evidence_vars) is_evidence.at(e) = true;

  std::vector<SymbolicPotential> psi(jt.clusters.size());
  for (const auto& cluster : jt.clusters) {
    std::vector<SymbolicPotential> factors;
    for (VarIndex x : cluster.assigned_families) {
      SymbolicPotential cpt{net.parents(x), {}};
      cpt.scope.push_back(x);
      for (double p : net.cpt(x).table) cpt.table.push_back(dag.make_num(p));
      factors.push_back(std::move(cpt));
    }
    for (VarIndex x : cluster.assigned_families) {
      if (!is_evidence[x]) continue;
      const auto evar = dag.find_evidence_var(net.variable(x).name);
      if (!evar) throw std::logic_error("evidence variable not registered in the dag");
      SymbolicPotential lambda{{x}, {}};
      for (std::uint32_t v = 0; v < cards[x]; ++v) lambda.table.push_back(dag.make_esn(*evar, v));
      factors.push_back(std::move(lambda));
    }
    if (!factors.empty()) psi[cluster.id] = symbolic_multiply(dag, factors, cards, trace);
  }
  return psi;
}

CompileResult compile(const BeliefNetwork& net, std::span<const std::string> query_names,
                      std::span<const std::string> evidence_names) {
  if (query_names.empty()) throw std::invalid_argument("empty query set");
  const auto queries = unique_in_order(net.resolve(query_names));
  const auto evidence = unique_in_order(net.resolve(evidence_names));
  const auto& cards = net.cardinalities();

  CompileResult result{QDag{}, build_jointree(net), OpCounter{}};
  QDag& dag = result.dag;
  const JoinTree& jt = result.jointree;
  OpCounter* trace = &result.trace;

  for (VarIndex e : evidence) dag.add_evidence_var(net.variable(e).name, net.variable(e).values);

  const auto psi = init_symbolic_potentials(dag, net, jt, evidence, trace);

  // Messages and posteriors are computed at most once; later query
  // variables reuse whatever earlier collect passes produced.
  std::map<DirectedEdge, SymbolicPotential> messages;
  std::map<std::size_t, SymbolicPotential> posteriors;

  auto combine = [&](std::size_t cluster, std::size_t skip) {
    std::vector<SymbolicPotential> inputs;
    if (!is_unit(psi[cluster])) inputs.push_back(psi[cluster]);
    for (std::size_t k : jt.neighbors[cluster]) {
      if (k == skip) continue;
      const auto& m = messages.at({k, cluster});
      if (!is_unit(m)) inputs.push_back(m);
    }
    if (inputs.empty()) return SymbolicPotential{};
    return symbolic_multiply(dag, inputs, cards, trace);
  };

  for (VarIndex x : queries) {
    const std::size_t pivot = jt.pivot_for(x);
    if (!posteriors.count(pivot)) {
      for (const auto& edge : collect_schedule(jt, pivot)) {
        if (messages.count(edge)) continue;
        auto product = combine(edge.first, edge.second);
        if (is_unit(product)) {
          messages.emplace(edge, std::move(product));
          continue;
        }
        Scope keep = scope_restrict(product.scope, jt.clusters[edge.second].scope);
        messages.emplace(edge, symbolic_marginalize(dag, product, keep, cards, trace));
      }
      posteriors.emplace(pivot, combine(pivot, jt.clusters.size()));
    }
    const auto& posterior = posteriors.at(pivot);
    if (std::find(posterior.scope.begin(), posterior.scope.end(), x) == posterior.scope.end())
      throw std::logic_error("query variable missing from pivot posterior");
    const auto qnode = symbolic_marginalize(dag, posterior, {x}, cards, trace);
    const auto& var = net.variable(x);
    for (std::size_t v = 0; v < var.cardinality(); ++v) dag.add_query(var.name, var.values[v], qnode.table[v]);
  }
  return result;
}

}  // namespace qdag
