#include "qdag/oracle.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "qdag/error.hpp"

namespace qdag {

double joint_probability(const BeliefNetwork& net, const Instantiation& full) {
  double p = 1.0;
  for (VarIndex v = 0; v < net.size(); ++v) p *= net.conditional(v, full);
  return p;
}

NumericPotential marginals_bruteforce(const BeliefNetwork& net, VarIndex query,
                                      const Instantiation& evidence) {
  const auto& cards = net.cardinalities();
  NumericPotential out{{query}, std::vector<double>(cards.at(query), 0.0)};
  const std::size_t n = net.size();
  Instantiation full(n);
  std::vector<std::size_t> digit(n, 0);
  for (VarIndex v = 0; v < n; ++v) full.set(v, 0);

  while (true) {
    bool consistent = true;
    for (VarIndex v = 0; v < n && consistent; ++v)
      if (auto e = evidence.get(v); e && *e != digit[v]) consistent = false;
    if (consistent) out.table[digit[query]] += joint_probability(net, full);

    std::size_t k = n;
    while (k-- > 0) {
      if (++digit[k] < cards[k]) {
        full.set(k, digit[k]);
        break;
      }
      digit[k] = 0;
      full.set(k, 0);
    }
    if (k == static_cast<std::size_t>(-1)) break;
  }
  return out;
}

NumericPotential multiply(std::span<const NumericPotential> factors, const Cardinalities& cards,
                          OpCounter* counter) {
  if (factors.empty()) throw std::invalid_argument("multiply of no potentials");
  if (factors.size() == 1) return factors.front();

  std::vector<const Scope*> scopes;
  for (const auto& f : factors) scopes.push_back(&f.scope);
  NumericPotential out{scope_union(scopes), {}};
  const std::size_t n = table_size(out.scope, cards);
  std::vector<std::vector<std::size_t>> index;
  for (const auto& f : factors) index.push_back(project_indices(out.scope, f.scope, cards));

  out.table.resize(n);
  for (std::size_t cell = 0; cell < n; ++cell) {
    double value = factors[0].table[index[0][cell]];
    for (std::size_t i = 1; i < factors.size(); ++i) value *= factors[i].table[index[i][cell]];
    out.table[cell] = value;
    if (counter) counter->record(OpKind::Mul, factors.size());
  }
  return out;
}

NumericPotential marginalize(const NumericPotential& p, const Scope& keep,
                             const Cardinalities& cards, OpCounter* counter) {
  for (VarIndex v : keep)
    if (std::find(p.scope.begin(), p.scope.end(), v) == p.scope.end())
      throw std::invalid_argument("marginalize: keep is not a subset of the scope");
  NumericPotential out{scope_restrict(p.scope, keep), {}};
  if (out.scope.size() == p.scope.size()) return p;

  const auto target = project_indices(p.scope, out.scope, cards);
  std::vector<std::vector<std::size_t>> groups(table_size(out.scope, cards));
  for (std::size_t cell = 0; cell < target.size(); ++cell) groups[target[cell]].push_back(cell);

  out.table.reserve(groups.size());
  for (const auto& group : groups) {
    double sum = p.table[group[0]];
    for (std::size_t i = 1; i < group.size(); ++i) sum += p.table[group[i]];
    out.table.push_back(sum);
    if (counter) counter->record(OpKind::Add, group.size());
  }
  return out;
}

NumericPotential cluster_infer(const BeliefNetwork& net, const JoinTree& jt, VarIndex query,
                               const Instantiation& evidence, OpCounter* counter,
                               const ClusterInferOptions& options) {
  const auto& cards = net.cardinalities();
  std::vector<bool> has_lambda(net.size(), !options.likelihood_vars.has_value());
  if (options.likelihood_vars)
    for (VarIndex v : *options.likelihood_vars) has_lambda.at(v) = true;
  for (VarIndex v = 0; v < net.size(); ++v)
    if (evidence.bound(v) && !has_lambda[v])
      throw std::invalid_argument("evidence on a variable without a likelihood vector");

  // Cluster potentials; nullopt stands for the empty product.
  std::vector<std::optional<NumericPotential>> psi(jt.clusters.size());
  for (const auto& cluster : jt.clusters) {
    std::vector<NumericPotential> factors;
    for (VarIndex x : cluster.assigned_families) {
      Scope scope = net.parents(x);
      scope.push_back(x);
      factors.push_back({std::move(scope), net.cpt(x).table});
    }
    for (VarIndex x : cluster.assigned_families) {
      if (!has_lambda[x]) continue;
      NumericPotential lambda{{x}, std::vector<double>(cards[x], 1.0)};
      if (auto e = evidence.get(x))
        for (std::size_t v = 0; v < cards[x]; ++v) lambda.table[v] = (v == *e) ? 1.0 : 0.0;
      factors.push_back(std::move(lambda));
    }
    if (!factors.empty()) psi[cluster.id] = multiply(factors, cards, counter);
  }

  std::map<DirectedEdge, std::optional<NumericPotential>> messages;
  auto combine = [&](std::size_t cluster, std::size_t skip) -> std::optional<NumericPotential> {
    std::vector<NumericPotential> inputs;
    if (psi[cluster]) inputs.push_back(*psi[cluster]);
    for (std::size_t k : jt.neighbors[cluster]) {
      if (k == skip) continue;
      if (const auto& m = messages.at({k, cluster})) inputs.push_back(*m);
    }
    if (inputs.empty()) return std::nullopt;
    return multiply(inputs, cards, counter);
  };

  const std::size_t pivot = jt.pivot_for(query);
  for (const auto& [from, to] : collect_schedule(jt, pivot)) {
    auto product = combine(from, to);
    if (!product) {
      messages[{from, to}] = std::nullopt;
      continue;
    }
    Scope keep = scope_restrict(product->scope, jt.clusters[to].scope);
    messages[{from, to}] = marginalize(*product, keep, cards, counter);
  }

  auto posterior = combine(pivot, jt.clusters.size());
  if (!posterior || std::find(posterior->scope.begin(), posterior->scope.end(), query) ==
                        posterior->scope.end())
    throw std::logic_error("query variable missing from pivot posterior");
  return marginalize(*posterior, {query}, cards, counter);
}

}  // namespace qdag
