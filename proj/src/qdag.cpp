#include "qdag/qdag.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "qdag/error.hpp"

namespace qdag {

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

std::uint32_t QDag::add_evidence_var(std::string name, std::vector<std::string> values) {
  if (name.empty()) throw std::invalid_argument("empty evidence variable name");
  if (values.empty()) throw std::invalid_argument("evidence variable '" + name + "' has no values");
  for (const auto& v : values)
    if (v == "?") throw std::invalid_argument("'?' is reserved for the unknown value");
  const auto index = static_cast<std::uint32_t>(evars_.size());
  if (!evar_index_.emplace(name, index).second)
    throw std::invalid_argument("duplicate evidence variable '" + name + "'");
  esn_index_.emplace_back(values.size());
  evars_.push_back({std::move(name), std::move(values)});
  return index;
}

std::optional<std::uint32_t> QDag::find_evidence_var(std::string_view name) const {
  auto it = evar_index_.find(std::string(name));
  if (it == evar_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t QDag::hash_node(NodeId id) const {
  const QNode& n = nodes_[id];
  std::size_t h = static_cast<std::size_t>(n.kind);
  switch (n.kind) {
    case NodeKind::Num:
      return mix(h, std::bit_cast<std::uint64_t>(n.number));
    case NodeKind::Esn:
      return mix(mix(h, n.evar), n.evalue);
    default:
      for (NodeId op : operands(id)) h = mix(h, op);
      return h;
  }
}

bool QDag::same_node(NodeId a, NodeId b) const {
  const QNode& x = nodes_[a];
  const QNode& y = nodes_[b];
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case NodeKind::Num:
      return std::bit_cast<std::uint64_t>(x.number) == std::bit_cast<std::uint64_t>(y.number);
    case NodeKind::Esn:
      return x.evar == y.evar && x.evalue == y.evalue;
    default: {
      auto ox = operands(a);
      auto oy = operands(b);
      return std::equal(ox.begin(), ox.end(), oy.begin(), oy.end());
    }
  }
}

std::optional<NodeId> QDag::find_existing(NodeId candidate) const {
  auto [lo, hi] = cons_.equal_range(hash_node(candidate));
  for (auto it = lo; it != hi; ++it)
    if (same_node(it->second, candidate)) return it->second;
  return std::nullopt;
}

// Either drops the freshly appended node in favour of an identical one, or
// registers it.
NodeId QDag::intern_last() {
  const auto id = static_cast<NodeId>(nodes_.size() - 1);
  if (auto existing = find_existing(id)) {
    pool_.resize(nodes_.back().first + (is_operation(id) ? nodes_.back().arity : 0));
    nodes_.pop_back();
    return *existing;
  }
  cons_.emplace(hash_node(id), id);
  return id;
}

NodeId QDag::make_num(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("numeric node outside [0, 1]");
  QNode n;
  n.kind = NodeKind::Num;
  n.number = p + 0.0;  // folds -0.0 into +0.0
  n.first = static_cast<std::uint32_t>(pool_.size());
  nodes_.push_back(n);
  return intern_last();
}

NodeId QDag::make_esn(std::uint32_t evar, std::uint32_t value) {
  if (evar >= evars_.size() || value >= evars_[evar].values.size())
    throw LookupError("unregistered evidence pair");
  if (auto existing = esn_index_[evar][value]) return *existing;
  QNode n;
  n.kind = NodeKind::Esn;
  n.evar = evar;
  n.evalue = value;
  n.first = static_cast<std::uint32_t>(pool_.size());
  nodes_.push_back(n);
  const NodeId id = intern_last();
  esn_index_[evar][value] = id;
  return id;
}

NodeId QDag::make_esn(std::string_view variable, std::string_view value) {
  auto evar = find_evidence_var(variable);
  if (!evar) throw LookupError("unknown evidence variable '" + std::string(variable) + "'");
  const auto& values = evars_[*evar].values;
  auto it = std::find(values.begin(), values.end(), value);
  if (it == values.end())
    throw LookupError("unknown value '" + std::string(value) + "' for '" + std::string(variable) + "'");
  return make_esn(*evar, static_cast<std::uint32_t>(it - values.begin()));
}

NodeId QDag::make_op(NodeKind kind, std::span<const NodeId> operands) {
  if (kind != NodeKind::Mul && kind != NodeKind::Add)
    throw std::invalid_argument("make_op needs Mul or Add");
  if (operands.empty()) throw std::invalid_argument("operation with no operands");
  for (NodeId op : operands)
    if (op >= nodes_.size()) throw std::invalid_argument("operand id out of range");
  if (operands.size() == 1) return operands.front();

  QNode n;
  n.kind = kind;
  n.first = static_cast<std::uint32_t>(pool_.size());
  n.arity = static_cast<std::uint32_t>(operands.size());
  pool_.insert(pool_.end(), operands.begin(), operands.end());
  nodes_.push_back(n);
  return intern_last();
}

void QDag::add_query(std::string variable, std::string value, NodeId node) {
  if (node >= nodes_.size()) throw std::invalid_argument("query node id out of range");
  queries_.push_back({std::move(variable), std::move(value), node});
}

std::span<const NodeId> QDag::operands(NodeId id) const {
  const QNode& n = nodes_.at(id);
  if (n.kind != NodeKind::Mul && n.kind != NodeKind::Add) return {};
  return std::span<const NodeId>(pool_).subspan(n.first, n.arity);
}

std::optional<NodeId> QDag::esn(std::uint32_t evar, std::uint32_t value) const {
  return esn_index_.at(evar).at(value);
}

std::size_t QDag::esn_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const QNode& n) {
    return n.kind == NodeKind::Esn;
  }));
}

bool operator==(const QDag& a, const QDag& b) {
  if (a.size() != b.size() || a.evars_.size() != b.evars_.size() ||
      a.queries_.size() != b.queries_.size())
    return false;
  for (std::size_t i = 0; i < a.evars_.size(); ++i)
    if (a.evars_[i].name != b.evars_[i].name || a.evars_[i].values != b.evars_[i].values)
      return false;
  for (NodeId id = 0; id < a.size(); ++id) {
    const QNode& x = a.nodes_[id];
    const QNode& y = b.nodes_[id];
    if (x.kind != y.kind) return false;
    if (x.kind == NodeKind::Num &&
        std::bit_cast<std::uint64_t>(x.number) != std::bit_cast<std::uint64_t>(y.number))
      return false;
    if (x.kind == NodeKind::Esn && (x.evar != y.evar || x.evalue != y.evalue)) return false;
    auto ox = a.operands(id);
    auto oy = b.operands(id);
    if (!std::equal(ox.begin(), ox.end(), oy.begin(), oy.end())) return false;
  }
  for (std::size_t i = 0; i < a.queries_.size(); ++i) {
    const auto& x = a.queries_[i];
    const auto& y = b.queries_[i];
    if (x.variable != y.variable || x.value != y.value || x.node != y.node) return false;
  }
  return true;
}

void Evidence::assign(const QDag& dag, std::string_view setting) {
  const auto eq = setting.find('=');
  if (eq == std::string_view::npos)
    throw LookupError("evidence setting '" + std::string(setting) + "' is not of the form V=value");
  const auto name = setting.substr(0, eq);
  const auto value = setting.substr(eq + 1);
  auto evar = dag.find_evidence_var(name);
  if (!evar) throw LookupError("unknown evidence variable '" + std::string(name) + "'");
  if (value == "?") {
    set(*evar, std::nullopt);
    return;
  }
  const auto& values = dag.evidence_vars()[*evar].values;
  auto it = std::find(values.begin(), values.end(), value);
  if (it == values.end())
    throw LookupError("unknown value '" + std::string(value) + "' for '" + std::string(name) + "'");
  set(*evar, static_cast<std::uint32_t>(it - values.begin()));
}

}  // namespace qdag
