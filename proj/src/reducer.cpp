#include "qdag/reducer.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace qdag {

namespace {

constexpr NodeId kNoImage = std::numeric_limits<NodeId>::max();

// Sums of probabilities coming out of a compiled dag are bounded by 1 in
// exact arithmetic; this absorbs the rounding that can push them just above.
constexpr double kOvershoot = 1e-9;
constexpr std::size_t kMaxRounds = 10000;

std::optional<double> fold(NodeKind kind, const QDag& dag, std::span<const NodeId> ops) {
  double acc = dag.node(ops[0]).number;
  for (std::size_t i = 1; i < ops.size(); ++i) {
    const double v = dag.node(ops[i]).number;
    acc = (kind == NodeKind::Mul) ? acc * v : acc + v;
  }
  if (acc > 1.0) {
    if (acc > 1.0 + kOvershoot) return std::nullopt;
    acc = 1.0;
  }
  return acc;
}

bool is_num(const QDag& dag, NodeId id) { return dag.node(id).kind == NodeKind::Num; }

// Dependents per node among reachable nodes, counting each operand slot and
// each query binding.
std::vector<std::size_t> fanout(const QDag& dag, const std::vector<bool>& live) {
  std::vector<std::size_t> out(dag.size(), 0);
  for (NodeId id = 0; id < dag.size(); ++id)
    if (live[id])
      for (NodeId op : dag.operands(id)) ++out[op];
  for (const auto& q : dag.queries()) ++out[q.node];
  return out;
}

// Copies the reachable part of `src` bottom-up. Leaves are copied as is;
// each operation is handed to `rewrite(out, old_id, kind, mapped_operands)`,
// which returns its image in `out`.
template <class Rewrite>
QDag rebuild(const QDag& src, const std::vector<bool>& live, Rewrite&& rewrite) {
  QDag out;
  for (const auto& ev : src.evidence_vars()) out.add_evidence_var(ev.name, ev.values);
  std::vector<NodeId> image(src.size(), kNoImage);
  std::vector<NodeId> ops;
  for (NodeId id = 0; id < src.size(); ++id) {
    if (!live[id]) continue;
    const QNode& n = src.node(id);
    switch (n.kind) {
      case NodeKind::Num:
        image[id] = out.make_num(n.number);
        break;
      case NodeKind::Esn:
        image[id] = out.make_esn(n.evar, n.evalue);
        break;
      default:
        ops.clear();
        for (NodeId op : src.operands(id)) ops.push_back(image[op]);
        image[id] = rewrite(out, id, n.kind, std::span<const NodeId>(ops));
    }
  }
  for (const auto& q : src.queries()) out.add_query(q.variable, q.value, image[q.node]);
  return out;
}

struct NumericReduction {
  const QDag& src;
  const std::vector<std::size_t>& fanout;
  std::size_t& applied;

  NodeId operator()(QDag& out, NodeId old, NodeKind kind, std::span<const NodeId> ops) {
    if (std::all_of(ops.begin(), ops.end(), [&](NodeId n) { return is_num(out, n); })) {
      if (auto v = fold(kind, out, ops)) {
        ++applied;
        return out.make_num(*v);
      }
    }
    if (kind == NodeKind::Mul && std::any_of(ops.begin(), ops.end(), [&](NodeId n) {
          return is_num(out, n) && out.node(n).number == 0.0;
        })) {
      ++applied;
      return out.make_num(0.0);
    }

    // Runs of adjacent numbers that nothing else uses collapse to one number.
    const auto old_ops = src.operands(old);
    auto foldable = [&](std::size_t i) { return is_num(out, ops[i]) && fanout[old_ops[i]] == 1; };
    std::vector<NodeId> result;
    std::size_t i = 0;
    while (i < ops.size()) {
      if (!foldable(i)) {
        result.push_back(ops[i++]);
        continue;
      }
      std::size_t j = i;
      while (j < ops.size() && foldable(j)) ++j;
      std::optional<double> v;
      if (j - i >= 2) v = fold(kind, out, ops.subspan(i, j - i));
      if (v) {
        ++applied;
        result.push_back(out.make_num(*v));
      } else {
        result.insert(result.end(), ops.begin() + static_cast<std::ptrdiff_t>(i),
                      ops.begin() + static_cast<std::ptrdiff_t>(j));
      }
      i = j;
    }
    return out.make_op(kind, result);
  }
};

struct IdentityElimination {
  std::size_t& applied;

  NodeId operator()(QDag& out, NodeId, NodeKind kind, std::span<const NodeId> ops) {
    const double identity = (kind == NodeKind::Mul) ? 1.0 : 0.0;
    std::vector<NodeId> kept;
    for (NodeId n : ops)
      if (!(is_num(out, n) && out.node(n).number == identity)) kept.push_back(n);
    applied += ops.size() - kept.size();
    if (kept.empty()) return out.make_num(identity);
    return out.make_op(kind, kept);
  }
};

struct AssociativeMerging {
  const QDag& src;
  const std::vector<std::size_t>& fanout;
  std::size_t& applied;

  NodeId operator()(QDag& out, NodeId old, NodeKind kind, std::span<const NodeId> ops) {
    const auto old_ops = src.operands(old);
    std::vector<NodeId> merged;
    for (std::size_t i = 0; i < ops.size(); ++i) {
      const NodeId o = old_ops[i];
      if (src.node(o).kind == kind && fanout[o] == 1 && out.node(ops[i]).kind == kind) {
        auto inner = out.operands(ops[i]);
        merged.insert(merged.end(), inner.begin(), inner.end());
        ++applied;
      } else {
        merged.push_back(ops[i]);
      }
    }
    return out.make_op(kind, merged);
  }
};

struct CommutativeMerging {
  std::size_t& applied;

  NodeId operator()(QDag& out, NodeId, NodeKind kind, std::span<const NodeId> ops) {
    auto key = [&](NodeId n) {
      const QNode& q = out.node(n);
      switch (q.kind) {
        case NodeKind::Num:
          return std::make_tuple(0, q.number, 0u, 0u, NodeId{0});
        case NodeKind::Esn:
          return std::make_tuple(1, 0.0, q.evar, q.evalue, NodeId{0});
        default:
          return std::make_tuple(2, 0.0, 0u, 0u, n);
      }
    };
    std::vector<NodeId> sorted(ops.begin(), ops.end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [&](NodeId a, NodeId b) { return key(a) < key(b); });
    if (!std::equal(sorted.begin(), sorted.end(), ops.begin())) ++applied;
    const std::size_t before = out.size();
    const NodeId id = out.make_op(kind, sorted);
    if (id < before && out.is_operation(id)) ++applied;  // joined an existing node
    return id;
  }
};

}  // namespace

std::string_view rule_name(RewriteRule rule) {
  switch (rule) {
    case RewriteRule::IdentityElimination:
      return "identity-elimination";
    case RewriteRule::NumericReduction:
      return "numeric-reduction";
    case RewriteRule::AssociativeMerging:
      return "associative-merging";
    case RewriteRule::CommutativeMerging:
      return "commutative-merging";
  }
  return "unknown";
}

std::optional<RewriteRule> parse_rule(std::string_view name) {
  for (RewriteRule r : kAllRules)
    if (rule_name(r) == name) return r;
  return std::nullopt;
}

std::vector<bool> reachable_nodes(const QDag& dag) {
  std::vector<bool> live(dag.size(), false);
  for (const auto& q : dag.queries()) live[q.node] = true;
  for (NodeId id = static_cast<NodeId>(dag.size()); id-- > 0;)
    if (live[id])
      for (NodeId op : dag.operands(id)) live[op] = true;
  return live;
}

std::size_t reachable_count(const QDag& dag) {
  const auto live = reachable_nodes(dag);
  return static_cast<std::size_t>(std::count(live.begin(), live.end(), true));
}

QDag collect_garbage(const QDag& dag) {
  return rebuild(dag, reachable_nodes(dag),
                 [](QDag& out, NodeId, NodeKind kind, std::span<const NodeId> ops) {
                   return out.make_op(kind, ops);
                 });
}

RuleResult apply_rule(const QDag& dag, RewriteRule rule) {
  const auto live = reachable_nodes(dag);
  const auto fan = fanout(dag, live);
  RuleResult result;
  QDag rewritten;
  switch (rule) {
    case RewriteRule::IdentityElimination:
      rewritten = rebuild(dag, live, IdentityElimination{result.applied});
      break;
    case RewriteRule::NumericReduction:
      rewritten = rebuild(dag, live, NumericReduction{dag, fan, result.applied});
      break;
    case RewriteRule::AssociativeMerging:
      rewritten = rebuild(dag, live, AssociativeMerging{dag, fan, result.applied});
      break;
    case RewriteRule::CommutativeMerging:
      rewritten = rebuild(dag, live, CommutativeMerging{result.applied});
      break;
  }
  result.dag = collect_garbage(rewritten);
  return result;
}

std::size_t ReduceStats::total_applied() const {
  return std::accumulate(applied.begin(), applied.end(), std::size_t{0});
}

ReduceResult reduce_fixpoint(const QDag& dag) {
  static constexpr std::array<RewriteRule, 5> kRound = {
      RewriteRule::NumericReduction, RewriteRule::IdentityElimination,
      RewriteRule::AssociativeMerging, RewriteRule::CommutativeMerging,
      RewriteRule::NumericReduction};

  ReduceResult result{collect_garbage(dag), {}};
  result.stats.nodes_before = reachable_count(dag);
  while (true) {
    if (result.stats.rounds == kMaxRounds) throw std::logic_error("reduction did not converge");
    ++result.stats.rounds;
    std::size_t round_applied = 0;
    for (RewriteRule rule : kRound) {
      auto step = apply_rule(result.dag, rule);
      result.stats.applied[static_cast<std::size_t>(rule)] += step.applied;
      round_applied += step.applied;
      result.dag = std::move(step.dag);
    }
    if (round_applied == 0) break;
  }
  result.stats.nodes_after = result.dag.size();
  return result;
}

}  // namespace qdag
