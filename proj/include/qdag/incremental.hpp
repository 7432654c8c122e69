#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "qdag/qdag.hpp"

namespace qdag {

/// Cached node values plus the reverse-edge index needed for event-driven
/// forward propagation. Holds a reference to the dag, which must outlive it.
class EvalState {
 public:
  EvalState(const QDag& dag, Evidence evidence);

  const QDag& dag() const { return *dag_; }
  const Evidence& evidence() const { return current_; }
  std::span<const double> values() const { return values_; }
  std::span<const NodeId> dependents(NodeId id) const;
  Output output() const { return read_output(*dag_, values_); }

  /// Changes one evidence variable and propagates. Returns the number of
  /// operation nodes recomputed.
  std::size_t update(std::uint32_t evar, std::optional<std::uint32_t> value);

 private:
  const QDag* dag_;
  Evidence current_;
  std::vector<double> values_;
  std::vector<std::uint32_t> dep_offset_;  // CSR over dependents
  std::vector<NodeId> dep_;
  std::vector<char> queued_;
};

struct UpdateResult {
  Output output;
  std::size_t recomputed = 0;
};

EvalState init_eval(const QDag& dag, const Evidence& evidence);
UpdateResult update_evidence(EvalState& state, std::uint32_t evar,
                             std::optional<std::uint32_t> value);

}  // namespace qdag
