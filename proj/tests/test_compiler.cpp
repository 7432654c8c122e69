#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>
#include <stdexcept>

#include "qdag/compiler.hpp"
#include "qdag/error.hpp"
#include "qdag/oracle.hpp"
#include "support/random_network.hpp"
#include "support/reference.hpp"

using namespace qdag;
using qdag::testing::close_relative;
using qdag::testing::load_network;

namespace {

const std::string kData = QDAG_DATA_DIR;

// Renders a node as bracketed infix.
std::string show(const QDag& d, NodeId id) {
  const QNode& n = d.node(id);
  switch (n.kind) {
    case NodeKind::Num: {
      std::ostringstream s;
      s << "n(" << n.number << ")";
      return s.str();
    }
    case NodeKind::Esn:
      return "n(" + d.evidence_vars()[n.evar].name + "," + d.evidence_vars()[n.evar].values[n.evalue] + ")";
    default: {
      std::string out = "[";
      const auto ops = d.operands(id);
      for (std::size_t i = 0; i < ops.size(); ++i) {
        if (i) out += n.kind == NodeKind::Mul ? "*" : "+";
        out += show(d, ops[i]);
      }
      return out + "]";
    }
  }
}

double value_of(const QDag& d, NodeId id, const Evidence& e) { return evaluate_all(d, e)[id]; }

Instantiation to_instantiation(const BeliefNetwork& net, const QDag& d, const Evidence& e) {
  Instantiation inst(net.size());
  for (std::uint32_t v = 0; v < e.size(); ++v)
    if (auto x = e.get(v)) inst.set(net.index_of(d.evidence_vars()[v].name), *x);
  return inst;
}

struct Split {
  std::vector<std::string> query, evidence;
};

Split random_split(const BeliefNetwork& net, std::mt19937_64& rng) {
  Split s;
  std::bernoulli_distribution coin(0.45);
  for (const auto& v : net.variables()) {
    if (coin(rng)) s.query.push_back(v.name);
    if (coin(rng)) s.evidence.push_back(v.name);
  }
  if (s.query.empty()) s.query.push_back(net.variables().back().name);
  return s;
}

}  // namespace

TEST_CASE("fork compiles to the expected Q-DAG") {
  const auto net = load_network(kData + "/networks/fork.json");
  const std::vector<std::string> q{"B"}, e{"C"};
  const auto r = compile(net, q, e);
  const QDag& d = r.dag;
  REQUIRE(d.queries().size() == 2);
  CHECK(d.queries()[0].variable == "B");
  CHECK(d.queries()[0].value == "ON");
  CHECK(d.esn_count() == 2);
  // Ψ₂(A, B) cells are the products Pr(A) Pr(B | A); they evaluate to the
  // joint entries .075, .225, .56, .14.
  CHECK(show(d, d.queries()[0].node) ==
        "[[[n(0.3)*n(0.25)]*[[n(0.9)*n(C,ON)]+[n(0.1)*n(C,OFF)]]]+"
        "[[n(0.7)*n(0.8)]*[[n(0.5)*n(C,ON)]+[n(0.5)*n(C,OFF)]]]]");
  CHECK(show(d, d.queries()[1].node) ==
        "[[[n(0.3)*n(0.75)]*[[n(0.9)*n(C,ON)]+[n(0.1)*n(C,OFF)]]]+"
        "[[n(0.7)*n(0.2)]*[[n(0.5)*n(C,ON)]+[n(0.5)*n(C,OFF)]]]]");

  const std::vector<VarIndex> ev{2};
  QDag scratch;
  scratch.add_evidence_var("C", {"ON", "OFF"});
  const auto psi = init_symbolic_potentials(scratch, net, r.jointree, ev);
  REQUIRE(psi.size() == 2);
  CHECK(psi[1].scope == Scope{0, 2});
  CHECK(show(scratch, psi[1].table[0]) == "[n(0.9)*n(C,ON)]");
  CHECK(show(scratch, psi[1].table[1]) == "[n(0.1)*n(C,OFF)]");
  CHECK(show(scratch, psi[1].table[2]) == "[n(0.5)*n(C,ON)]");
  CHECK(show(scratch, psi[1].table[3]) == "[n(0.5)*n(C,OFF)]");
  const double joint[] = {0.075, 0.225, 0.56, 0.14};
  Evidence none(scratch);
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(value_of(scratch, psi[0].table[i], none) - joint[i]) <= 1e-15);
}

TEST_CASE("compile rejects bad requests") {
  const auto net = load_network(kData + "/networks/fork.json");
  const std::vector<std::string> none, q{"B"}, bad{"Z"};
  CHECK_THROWS_AS(compile(net, none, q), std::invalid_argument);
  CHECK_THROWS_AS(compile(net, bad, q), LookupError);
  CHECK_THROWS_AS(compile(net, q, bad), LookupError);
}

TEST_CASE("symbolic multiply and marginalize mirror the numeric operations") {
  const Cardinalities cards{2, 3};
  QDag d;
  d.add_evidence_var("V0", {"a", "b"});
  d.add_evidence_var("V1", {"a", "b", "c"});
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0, 1);
  // Cells are Num ⊗ ESN so their value depends on the evidence.
  auto random_potential = [&](Scope scope) {
    SymbolicPotential p{scope, {}};
    for (std::size_t i = 0; i < table_size(scope, cards); ++i) {
      const NodeId ops[] = {d.make_num(u(rng)), d.make_esn(scope.empty() ? 0 : scope.back(), i % cards[scope.empty() ? 0 : scope.back()])};
      p.table.push_back(d.make_op(NodeKind::Mul, ops));
    }
    return p;
  };
  const SymbolicPotential a = random_potential({0}), b = random_potential({1, 0}), s = random_potential({});
  const SymbolicPotential ab[] = {a, b, s};
  const auto prod = symbolic_multiply(d, ab, cards);
  CHECK(prod.scope == Scope{0, 1});
  for (NodeId cell : prod.table) CHECK(d.operands(cell).size() == 3);  // the scalar adds one operand
  const auto marg = symbolic_marginalize(d, prod, {1}, cards);
  const auto whole = symbolic_marginalize(d, prod, {}, cards);
  CHECK(whole.table.size() == 1);
  CHECK(d.operands(whole.table[0]).size() == 6);
  CHECK_THROWS_AS(symbolic_marginalize(d, prod, {2}, cards), std::invalid_argument);

  for (const Evidence& e : qdag::testing::all_evidence(d)) {
    const auto values = evaluate_all(d, e);
    auto numeric = [&](const SymbolicPotential& p) {
      NumericPotential n{p.scope, {}};
      for (NodeId c : p.table) n.table.push_back(values[c]);
      return n;
    };
    const NumericPotential nab[] = {numeric(a), numeric(b), numeric(s)};
    const auto np = multiply(nab, cards);
    const auto nm = marginalize(np, {1}, cards);
    CHECK(numeric(prod).table == np.table);
    CHECK(numeric(marg).table == nm.table);
  }
}

TEST_CASE("cluster potentials evaluate to the numeric potentials") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto net = qdag::testing::random_network(rng);
    const auto jt = build_jointree(net);
    const auto split = random_split(net, rng);
    const auto evidence = net.resolve(split.evidence);
    QDag d;
    for (VarIndex v : evidence) d.add_evidence_var(net.variable(v).name, net.variable(v).values);
    const auto psi = init_symbolic_potentials(d, net, jt, evidence);
    CHECK(d.esn_count() == [&] {
      std::size_t n = 0;
      for (VarIndex v : evidence) n += net.variable(v).cardinality();
      return n;
    }());
    std::vector<Evidence> sample = qdag::testing::all_evidence(d);
    if (sample.size() > 50) sample.resize(50);
    for (const Evidence& e : sample) {
      const auto values = evaluate_all(d, e);
      const auto inst = to_instantiation(net, d, e);
      for (const auto& c : jt.clusters) {
        std::vector<NumericPotential> factors;
        for (VarIndex x : c.assigned_families) {
          NumericPotential f{net.parents(x), net.cpt(x).table};
          f.scope.push_back(x);
          factors.push_back(f);
        }
        for (VarIndex x : c.assigned_families) {
          if (std::find(evidence.begin(), evidence.end(), x) == evidence.end()) continue;
          NumericPotential lambda{{x}, {}};
          for (std::size_t v = 0; v < net.variable(x).cardinality(); ++v)
            lambda.table.push_back(!inst.bound(x) || inst.get(x) == v ? 1.0 : 0.0);
          factors.push_back(lambda);
        }
        if (factors.empty()) {
          CHECK(psi[c.id].table.empty());
          continue;
        }
        const auto expected = multiply(factors, net.cardinalities());
        REQUIRE(psi[c.id].scope == expected.scope);
        for (std::size_t i = 0; i < expected.table.size(); ++i) CHECK(values[psi[c.id].table[i]] == expected.table[i]);
      }
    }
  }
}

TEST_CASE("compiled dags match brute force under every evidence function") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 15; ++trial) {
    qdag::testing::RandomNetworkOptions opts;
    opts.variables = 6;
    const auto net = qdag::testing::random_network(rng, opts);
    const auto split = random_split(net, rng);
    const auto d = compile(net, split.query, split.evidence).dag;
    for (const Evidence& e : qdag::testing::all_evidence(d)) {
      const auto out = evaluate(d, e);
      const auto inst = to_instantiation(net, d, e);
      std::size_t k = 0;
      for (const auto& name : split.query) {
        const auto p = marginals_bruteforce(net, net.index_of(name), inst);
        for (double x : p.table) {
          const double got = out.at(k++).probability;
          CHECK((close_relative(got, x, 1e-9) || std::abs(got - x) <= 1e-12));
        }
      }
    }
  }
}

TEST_CASE("construction trace is isomorphic to the clustering trace") {
  std::mt19937_64 rng(37);
  std::vector<BeliefNetwork> nets;
  for (const char* f : {"fork", "pair", "barren_chain", "chain", "diamond"}) nets.push_back(load_network(kData + "/networks/" + f + ".json"));
  for (int i = 0; i < 25; ++i) nets.push_back(qdag::testing::random_network(rng));
  for (const auto& net : nets) {
    const auto split = random_split(net, rng);
    const auto evidence = net.resolve(split.evidence);
    const auto jt = build_jointree(net);
    for (VarIndex x = 0; x < net.size(); ++x) {
      const std::vector<std::string> q{net.variable(x).name};
      const auto r = compile(net, q, split.evidence);
      OpCounter oracle;
      ClusterInferOptions opts;
      opts.likelihood_vars = evidence;
      cluster_infer(net, jt, x, Instantiation(net.size()), &oracle, opts);
      CHECK(r.trace.trace == oracle.trace);
      CHECK(r.trace.multiplications == oracle.multiplications);
      CHECK(r.trace.additions == oracle.additions);
      // Hash-consing only removes nodes.
      std::size_t ops = 0;
      for (NodeId id = 0; id < r.dag.size(); ++id) ops += r.dag.is_operation(id);
      CHECK(ops <= oracle.operations());
      for (const auto& ev : r.dag.evidence_vars()) {
        const auto idx = *r.dag.find_evidence_var(ev.name);
        for (std::uint32_t v = 0; v < ev.values.size(); ++v) CHECK(r.dag.esn(idx, v).has_value());
      }
      std::size_t budget = 0;
      for (VarIndex v : evidence) budget += net.variable(v).cardinality();
      CHECK(r.dag.esn_count() == budget);
    }
  }
}

TEST_CASE("multi-query compilation shares messages") {
  const auto net = load_network(kData + "/networks/diamond.json");
  std::vector<std::string> all;
  for (const auto& v : net.variables()) all.push_back(v.name);
  const auto together = compile(net, all, all);
  std::size_t separate = 0;
  for (const auto& name : all) {
    const std::vector<std::string> q{name};
    separate += compile(net, q, all).trace.operations();
  }
  CHECK(together.trace.operations() < separate);
}

TEST_CASE("polytrees compile with family clusters and no fill-in") {
  const auto net = load_network(kData + "/networks/chain.json");
  const auto tri = moralize_and_triangulate(net);
  CHECK(tri.fill_in == 0);
  const auto jt = build_jointree(net);
  for (const auto& c : jt.clusters) {
    bool is_family = false;
    for (VarIndex x = 0; x < net.size(); ++x) {
      Scope fam = net.parents(x);
      fam.push_back(x);
      std::sort(fam.begin(), fam.end());
      is_family |= fam == c.scope;
    }
    CHECK(is_family);
  }
}
