#include <doctest.h>

#include <algorithm>
#include <random>

#include "qdag/compiler.hpp"
#include "qdag/incremental.hpp"
#include "qdag/reducer.hpp"
#include "support/random_network.hpp"
#include "support/reference.hpp"

using namespace qdag;
using qdag::testing::close_relative;
using qdag::testing::load_network;

namespace {

const std::string kData = QDAG_DATA_DIR;

NodeId op(QDag& d, NodeKind k, std::initializer_list<NodeId> ops) {
  return d.make_op(k, std::vector<NodeId>(ops));
}

void check_equivalent(const QDag& a, const QDag& b) {
  REQUIRE(a.evidence_vars().size() == b.evidence_vars().size());
  for (const Evidence& e : qdag::testing::all_evidence(a)) {
    const auto x = evaluate(a, e);
    const auto y = evaluate(b, e);
    REQUIRE(x.size() == y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(x[i].variable == y[i].variable);
      CHECK(x[i].value == y[i].value);
      CHECK(close_relative(x[i].probability, y[i].probability, 1e-12));
    }
  }
}

bool has_esn_ancestor(const QDag& d, NodeId id, std::vector<int>& memo) {
  if (memo[id] >= 0) return memo[id];
  bool r = d.node(id).kind == NodeKind::Esn;
  for (NodeId o : d.operands(id)) r = has_esn_ancestor(d, o, memo) || r;
  memo[id] = r;
  return r;
}

std::vector<QDag> corpus(std::uint64_t seed, int count) {
  std::vector<QDag> dags;
  for (const char* f : {"fork", "pair", "barren_chain", "chain", "diamond"}) {
    const auto net = load_network(kData + "/networks/" + f + ".json");
    std::vector<std::string> all;
    for (const auto& v : net.variables()) all.push_back(v.name);
    const std::vector<std::string> first{all.front()}, last{all.back()};
    dags.push_back(compile(net, last, first).dag);
    dags.push_back(compile(net, all, all).dag);
  }
  std::mt19937_64 rng(seed);
  for (int i = 0; i < count; ++i) {
    qdag::testing::RandomNetworkOptions opts;
    opts.variables = 6;
    opts.zero_probability = 0.15;
    const auto net = qdag::testing::random_network(rng, opts);
    std::vector<std::string> q, e;
    std::bernoulli_distribution coin(0.4);
    for (const auto& v : net.variables()) {
      if (coin(rng)) q.push_back(v.name);
      if (coin(rng)) e.push_back(v.name);
    }
    if (q.empty()) q.push_back(net.variable(0).name);
    dags.push_back(compile(net, q, e).dag);
  }
  return dags;
}

}  // namespace

TEST_CASE("rule names round trip") {
  for (RewriteRule r : kAllRules) CHECK(parse_rule(rule_name(r)) == r);
  CHECK_FALSE(parse_rule("constant-folding").has_value());
}

TEST_CASE("numeric reduction folds an all-numeric sub-DAG") {
  QDag d;
  const NodeId five = d.make_num(0.5);
  const NodeId root = op(d, NodeKind::Add, {op(d, NodeKind::Mul, {d.make_num(0.9), five}),
                                            op(d, NodeKind::Mul, {d.make_num(0.1), five})});
  d.add_query("X", "x", root);
  QDag cur = d;
  std::size_t total = 0;
  for (int i = 0; i < 2; ++i) {
    auto r = apply_rule(cur, RewriteRule::NumericReduction);
    total += r.applied;
    cur = std::move(r.dag);
  }
  CHECK(total == 3);
  REQUIRE(cur.size() == 1);
  CHECK(cur.node(0).kind == NodeKind::Num);
  CHECK(cur.node(0).number == 0.5);
}

TEST_CASE("identity elimination") {
  QDag d;
  d.add_evidence_var("V", {"a", "b"});
  const NodeId x = d.make_esn("V", "a");
  d.add_query("Q", "1", op(d, NodeKind::Mul, {d.make_num(1.0), x}));
  d.add_query("Q", "2", op(d, NodeKind::Add, {d.make_num(0.0), x, d.make_esn("V", "b")}));
  const auto r = apply_rule(d, RewriteRule::IdentityElimination);
  CHECK(r.applied == 2);
  CHECK(r.dag.node(r.dag.queries()[0].node).kind == NodeKind::Esn);
  CHECK(r.dag.operands(r.dag.queries()[1].node).size() == 2);
  check_equivalent(d, r.dag);
}

TEST_CASE("associative merging splices unshared operands only") {
  QDag d;
  d.add_evidence_var("V", {"a", "b", "c"});
  const NodeId x = d.make_esn("V", "a"), y = d.make_esn("V", "b"), z = d.make_esn("V", "c");
  d.add_query("Q", "1", op(d, NodeKind::Mul, {x, op(d, NodeKind::Mul, {y, z})}));
  const NodeId shared = op(d, NodeKind::Add, {x, y});
  d.add_query("Q", "2", op(d, NodeKind::Add, {shared, z}));
  d.add_query("Q", "3", op(d, NodeKind::Mul, {shared, z}));
  const auto r = apply_rule(d, RewriteRule::AssociativeMerging);
  CHECK(r.applied == 1);
  const auto ops = r.dag.operands(r.dag.queries()[0].node);
  CHECK(ops.size() == 3);
  CHECK(r.dag.operands(r.dag.queries()[1].node).size() == 2);
  check_equivalent(d, r.dag);
}

TEST_CASE("commutative merging shares permuted duplicates") {
  QDag d;
  d.add_evidence_var("V", {"a", "b"});
  const NodeId a = d.make_esn("V", "a"), b = d.make_num(0.25);
  d.add_query("Q", "1", op(d, NodeKind::Mul, {a, b}));
  d.add_query("Q", "2", op(d, NodeKind::Mul, {b, a}));
  const auto r = apply_rule(d, RewriteRule::CommutativeMerging);
  CHECK(r.applied >= 1);
  CHECK(r.dag.queries()[0].node == r.dag.queries()[1].node);
  const auto ops = r.dag.operands(r.dag.queries()[0].node);
  CHECK(r.dag.node(ops[0]).kind == NodeKind::Num);
  check_equivalent(d, r.dag);
}

TEST_CASE("zero annihilates a product") {
  QDag d;
  d.add_evidence_var("V", {"a", "b"});
  d.add_query("Q", "1", op(d, NodeKind::Mul, {d.make_esn("V", "a"), d.make_num(0.0)}));
  const auto r = apply_rule(d, RewriteRule::NumericReduction);
  CHECK(r.dag.node(r.dag.queries()[0].node).number == 0.0);
  check_equivalent(d, r.dag);
}

TEST_CASE("every rule preserves equivalence, shrinks and leaves its postcondition") {
  for (const QDag& d : corpus(61, 25)) {
    for (RewriteRule rule : kAllRules) {
      CAPTURE(rule_name(rule));
      const auto r = apply_rule(d, rule);
      check_equivalent(d, r.dag);
      CHECK(reachable_count(r.dag) <= reachable_count(d));
      CHECK(r.dag.size() == reachable_count(r.dag));
      for (NodeId id = 0; id < r.dag.size(); ++id) {
        if (!r.dag.is_operation(id)) continue;
        const auto ops = r.dag.operands(id);
        CHECK(ops.size() >= 2);
        if (rule == RewriteRule::NumericReduction) {
          CHECK_FALSE(std::all_of(ops.begin(), ops.end(),
                                  [&](NodeId o) { return r.dag.node(o).kind == NodeKind::Num; }));
        }
      }
    }
  }
}

TEST_CASE("fixpoint: equivalence, postconditions, idempotence, caching") {
  for (const QDag& d : corpus(67, 25)) {
    const auto r = reduce_fixpoint(d);
    check_equivalent(d, r.dag);
    CHECK(r.stats.nodes_before == reachable_count(d));
    CHECK(r.stats.nodes_after == r.dag.size());
    CHECK(r.stats.nodes_after <= r.stats.nodes_before);

    const auto again = reduce_fixpoint(r.dag);
    CHECK(again.stats.total_applied() == 0);
    CHECK(again.dag == r.dag);

    std::vector<int> memo(r.dag.size(), -1);
    for (NodeId id = 0; id < r.dag.size(); ++id) {
      const QNode& n = r.dag.node(id);
      if (!r.dag.is_operation(id)) continue;
      // Evidence-independent values are single numeric roots.
      CHECK(has_esn_ancestor(r.dag, id, memo));
      for (NodeId o : r.dag.operands(id)) {
        const QNode& c = r.dag.node(o);
        if (c.kind != NodeKind::Num) continue;
        CHECK(c.number != (n.kind == NodeKind::Mul ? 1.0 : 0.0));
        if (n.kind == NodeKind::Mul) CHECK(c.number != 0.0);
      }
    }

    // Incremental updates never touch evidence-independent work.
    if (r.dag.evidence_vars().empty()) continue;
    EvalState state(r.dag, Evidence(r.dag));
    for (std::uint32_t v = 0; v < r.dag.evidence_vars().size(); ++v) {
      const auto u = update_evidence(state, v, 0);
      CHECK(u.recomputed <= qdag::testing::operation_descendants_of_esns(r.dag, v));
    }
  }
}

TEST_CASE("pruning is subsumed by reduction on the chain") {
  const auto net = load_network(kData + "/networks/barren_chain.json");
  const std::vector<std::string> q{"A"}, e{"B"};
  const auto unpruned = compile(net, q, e).dag;
  const auto pruned = compile(prune_network(net, q, e), q, e).dag;
  const auto reduced = reduce_fixpoint(unpruned).dag;
  CHECK(reachable_count(reduced) == reachable_count(pruned));
  // Same nodes up to the canonical operand order commutative merging imposes.
  CHECK(reduced.size() == pruned.size());
  check_equivalent(reduced, pruned);
  check_equivalent(reduced, unpruned);
  CHECK(reduced == reduce_fixpoint(pruned).dag);
}
