#include <omp.h>

#include "qdag/qdag.hpp"

namespace qdag {

double evaluate_node(const QDag& dag, NodeId id, std::span<const double> values,
                     const Evidence& evidence) {
  const QNode& n = dag.node(id);
  switch (n.kind) {
    case NodeKind::Num:
      return n.number;
    case NodeKind::Esn: {
      const auto observed = evidence.get(n.evar);
      return (!observed || *observed == n.evalue) ? 1.0 : 0.0;
    }
    case NodeKind::Mul: {
      auto ops = dag.operands(id);
      double acc = values[ops[0]];
      for (std::size_t i = 1; i < ops.size(); ++i) acc *= values[ops[i]];
      return acc;
    }
    case NodeKind::Add: {
      auto ops = dag.operands(id);
      double acc = values[ops[0]];
      for (std::size_t i = 1; i < ops.size(); ++i) acc += values[ops[i]];
      return acc;
    }
  }
  return 0.0;
}

std::vector<double> evaluate_all(const QDag& dag, const Evidence& evidence) {
  std::vector<double> values(dag.size());
  for (NodeId id = 0; id < dag.size(); ++id) values[id] = evaluate_node(dag, id, values, evidence);
  return values;
}

Output read_output(const QDag& dag, std::span<const double> values) {
  Output out;
  out.reserve(dag.queries().size());
  for (const auto& q : dag.queries()) out.push_back({q.variable, q.value, values[q.node]});
  return out;
}

Output evaluate(const QDag& dag, const Evidence& evidence) {
  return read_output(dag, evaluate_all(dag, evidence));
}

std::vector<Output> evaluate_batch_serial(const QDag& dag, std::span<const Evidence> batch) {
  std::vector<Output> out;
  out.reserve(batch.size());
  for (const auto& e : batch) out.push_back(evaluate(dag, e));
  return out;
}

std::vector<Output> evaluate_batch(const QDag& dag, std::span<const Evidence> batch) {
  std::vector<Output> out(batch.size());
  const auto n = static_cast<std::ptrdiff_t>(batch.size());
#pragma omp parallel
  {
    std::vector<double> values(dag.size());
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const Evidence& e = batch[static_cast<std::size_t>(i)];
      for (NodeId id = 0; id < dag.size(); ++id) values[id] = evaluate_node(dag, id, values, e);
      out[static_cast<std::size_t>(i)] = read_output(dag, values);
    }
  }
  return out;
}

}  // namespace qdag
