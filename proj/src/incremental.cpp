#include "qdag/incremental.hpp"

#include <functional>
#include <queue>

#include "qdag/error.hpp"

namespace qdag {

EvalState::EvalState(const QDag& dag, Evidence evidence)
    : dag_(&dag), current_(std::move(evidence)), queued_(dag.size(), 0) {
  if (current_.size() != dag.evidence_vars().size())
    throw std::invalid_argument("evidence does not match the dag's registry");
  values_ = evaluate_all(dag, current_);

  dep_offset_.assign(dag.size() + 1, 0);
  for (NodeId id = 0; id < dag.size(); ++id)
    for (NodeId op : dag.operands(id)) ++dep_offset_[op + 1];
  for (std::size_t i = 1; i < dep_offset_.size(); ++i) dep_offset_[i] += dep_offset_[i - 1];
  dep_.resize(dep_offset_.back());
  std::vector<std::uint32_t> fill(dep_offset_.begin(), dep_offset_.end() - 1);
  for (NodeId id = 0; id < dag.size(); ++id)
    for (NodeId op : dag.operands(id)) dep_[fill[op]++] = id;
}

std::span<const NodeId> EvalState::dependents(NodeId id) const {
  return std::span<const NodeId>(dep_).subspan(dep_offset_[id], dep_offset_[id + 1] - dep_offset_[id]);
}

std::size_t EvalState::update(std::uint32_t evar, std::optional<std::uint32_t> value) {
  const auto& evars = dag_->evidence_vars();
  if (evar >= evars.size()) throw LookupError("unregistered evidence variable");
  if (value && *value >= evars[evar].values.size()) throw LookupError("unregistered value");
  current_.set(evar, value);

  // Min-heap on id: a node is recomputed only after all of its changed
  // operands, since operands always have smaller ids.
  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> pending;
  auto wake = [&](NodeId id) {
    for (NodeId d : dependents(id))
      if (!queued_[d]) {
        queued_[d] = 1;
        pending.push(d);
      }
  };

  for (std::uint32_t v = 0; v < evars[evar].values.size(); ++v) {
    auto id = dag_->esn(evar, v);
    if (!id) continue;
    const double fresh = evaluate_node(*dag_, *id, values_, current_);
    if (fresh != values_[*id]) {
      values_[*id] = fresh;
      wake(*id);
    }
  }

  std::size_t recomputed = 0;
  while (!pending.empty()) {
    const NodeId id = pending.top();
    pending.pop();
    queued_[id] = 0;
    const double fresh = evaluate_node(*dag_, id, values_, current_);
    ++recomputed;
    if (fresh != values_[id]) {
      values_[id] = fresh;
      wake(id);
    }
  }
  return recomputed;
}

EvalState init_eval(const QDag& dag, const Evidence& evidence) { return EvalState(dag, evidence); }

UpdateResult update_evidence(EvalState& state, std::uint32_t evar,
                             std::optional<std::uint32_t> value) {
  UpdateResult r;
  r.recomputed = state.update(evar, value);
  r.output = state.output();
  return r;
}

}  // namespace qdag
