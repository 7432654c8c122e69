#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace qdag {

using VarIndex = std::size_t;
using Cardinalities = std::vector<std::size_t>;

struct Variable {
  std::string name;
  std::vector<std::string> values;

  std::size_t cardinality() const { return values.size(); }
  std::optional<std::size_t> value_index(std::string_view value) const;
};

/// Conditional probability table Pr(child | parents).
///
/// `table` is row-major: one row per parent instantiation (first parent most
/// significant), one column per child value in declared order. Equivalently,
/// it is a potential over the scope [parents..., child].
struct Cpt {
  VarIndex child = 0;
  std::vector<VarIndex> parents;
  std::vector<double> table;
};

/// Partial assignment of value indices to network variables.
class Instantiation {
 public:
  Instantiation() = default;
  explicit Instantiation(std::size_t num_vars) : values_(num_vars) {}

  void set(VarIndex var, std::size_t value) { values_.at(var) = value; }
  void clear(VarIndex var) { values_.at(var).reset(); }
  bool bound(VarIndex var) const { return values_.at(var).has_value(); }
  std::optional<std::size_t> get(VarIndex var) const { return values_.at(var); }
  std::size_t size() const { return values_.size(); }

  friend bool operator==(const Instantiation&, const Instantiation&) = default;

 private:
  std::vector<std::optional<std::size_t>> values_;
};

/// Discrete belief network. Immutable once constructed; the constructor
/// validates every structural and numeric invariant and throws
/// ValidationError naming the first one violated.
class BeliefNetwork {
 public:
  static constexpr double kNormalizationTolerance = 1e-9;

  BeliefNetwork(std::vector<Variable> variables, std::vector<Cpt> cpts);

  std::size_t size() const { return variables_.size(); }
  const std::vector<Variable>& variables() const { return variables_; }
  const Variable& variable(VarIndex v) const { return variables_.at(v); }
  const Cpt& cpt(VarIndex v) const { return cpts_.at(v); }
  const std::vector<VarIndex>& parents(VarIndex v) const { return cpts_.at(v).parents; }
  const std::vector<VarIndex>& children(VarIndex v) const { return children_.at(v); }
  const Cardinalities& cardinalities() const { return cards_; }

  std::optional<VarIndex> find(std::string_view name) const;
  /// Throws LookupError for unknown names.
  VarIndex index_of(std::string_view name) const;
  std::vector<VarIndex> resolve(std::span<const std::string> names) const;

  /// Pr(child = value | parents as in `inst`); all family members must be bound.
  double conditional(VarIndex child, const Instantiation& inst) const;

 private:
  std::vector<Variable> variables_;
  std::vector<Cpt> cpts_;  // indexed by child
  std::vector<std::vector<VarIndex>> children_;
  Cardinalities cards_;
  std::unordered_map<std::string, VarIndex> by_name_;
};

/// Reads the JSON network document. Syntax errors throw ParseError with the
/// byte offset; semantic problems throw ValidationError.
BeliefNetwork parse_network(std::string_view text);
std::string render_network(const BeliefNetwork& net);

/// Removes barren leaves (neither query nor evidence) until none remain.
/// Surviving variables keep their relative order.
BeliefNetwork prune_network(const BeliefNetwork& net,
                            std::span<const std::string> query,
                            std::span<const std::string> evidence);

}  // namespace qdag
