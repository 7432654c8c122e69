#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace qdag {

using NodeId = std::uint32_t;

enum class NodeKind : std::uint8_t { Num, Esn, Mul, Add };

/// One Q-DAG node. Operands live in the owning QDag's pool; use
/// QDag::operands(id) to read them.
struct QNode {
  NodeKind kind = NodeKind::Num;
  double number = 0.0;       // Num
  std::uint32_t evar = 0;    // Esn: evidence variable index
  std::uint32_t evalue = 0;  // Esn: value index
  std::uint32_t first = 0;   // Mul/Add: offset into the operand pool
  std::uint32_t arity = 0;   // Mul/Add
};

struct EvidenceVar {
  std::string name;
  std::vector<std::string> values;
};

struct QueryBinding {
  std::string variable;
  std::string value;
  NodeId node = 0;
};

/// Query DAG: evidence-variable registry, an append-only hash-consed node
/// store in topological order (operands always have smaller ids), and the
/// query-node registry. Numbers and ESNs are the roots; query nodes are the
/// designated outputs.
class QDag {
 public:
  std::uint32_t add_evidence_var(std::string name, std::vector<std::string> values);
  std::optional<std::uint32_t> find_evidence_var(std::string_view name) const;
  const std::vector<EvidenceVar>& evidence_vars() const { return evars_; }

  /// Numeric root; throws std::domain_error unless p is in [0, 1].
  NodeId make_num(double p);
  /// Evidence-specific node; throws LookupError for unregistered pairs.
  NodeId make_esn(std::uint32_t evar, std::uint32_t value);
  NodeId make_esn(std::string_view variable, std::string_view value);
  /// Mul or Add over `operands` in the given order. A single operand is
  /// returned as is. Throws std::invalid_argument on empty or invalid input.
  NodeId make_op(NodeKind kind, std::span<const NodeId> operands);

  void add_query(std::string variable, std::string value, NodeId node);
  const std::vector<QueryBinding>& queries() const { return queries_; }

  std::size_t size() const { return nodes_.size(); }
  const QNode& node(NodeId id) const { return nodes_.at(id); }
  std::span<const NodeId> operands(NodeId id) const;
  bool is_operation(NodeId id) const {
    return nodes_[id].kind == NodeKind::Mul || nodes_[id].kind == NodeKind::Add;
  }
  std::optional<NodeId> esn(std::uint32_t evar, std::uint32_t value) const;
  std::size_t esn_count() const;

  /// Structural identity: registry, nodes, operand order and queries.
  friend bool operator==(const QDag& a, const QDag& b);

 private:
  std::optional<NodeId> find_existing(NodeId candidate) const;
  NodeId intern_last();
  std::size_t hash_node(NodeId id) const;
  bool same_node(NodeId a, NodeId b) const;

  std::vector<EvidenceVar> evars_;
  std::unordered_map<std::string, std::uint32_t> evar_index_;
  std::vector<std::vector<std::optional<NodeId>>> esn_index_;
  std::vector<QNode> nodes_;
  std::vector<NodeId> pool_;
  std::unordered_multimap<std::size_t, NodeId> cons_;
  std::vector<QueryBinding> queries_;
};

/// Evidence function: every registered variable maps to a value index or to
/// the unknown value (nullopt, spelled "?" in text).
class Evidence {
 public:
  Evidence() = default;
  explicit Evidence(const QDag& dag) : values_(dag.evidence_vars().size()) {}

  void set(std::uint32_t evar, std::optional<std::uint32_t> value) { values_.at(evar) = value; }
  std::optional<std::uint32_t> get(std::uint32_t evar) const { return values_.at(evar); }
  std::size_t size() const { return values_.size(); }

  /// Parses `V=value` or `V=?`; throws LookupError for unknown names.
  void assign(const QDag& dag, std::string_view setting);

  friend bool operator==(const Evidence&, const Evidence&) = default;

 private:
  std::vector<std::optional<std::uint32_t>> values_;
};

struct OutputEntry {
  std::string variable;
  std::string value;
  double probability = 0.0;
};
using Output = std::vector<OutputEntry>;

/// Value of node `id` given already-computed operand values.
double evaluate_node(const QDag& dag, NodeId id, std::span<const double> values,
                     const Evidence& evidence);

/// One forward pass in id order over every node.
std::vector<double> evaluate_all(const QDag& dag, const Evidence& evidence);
Output evaluate(const QDag& dag, const Evidence& evidence);
Output read_output(const QDag& dag, std::span<const double> values);

/// Evaluates the same dag under many evidence functions. The parallel
/// version splits the evidence list across OpenMP threads; the serial one is
/// the reference it is tested against.
std::vector<Output> evaluate_batch(const QDag& dag, std::span<const Evidence> batch);
std::vector<Output> evaluate_batch_serial(const QDag& dag, std::span<const Evidence> batch);

}  // namespace qdag
