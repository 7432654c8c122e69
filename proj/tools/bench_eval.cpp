// Times batch evaluation of one compiled dag over many evidence functions,
// OpenMP against the serial reference.
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <random>

#include <omp.h>

#include "qdag/compiler.hpp"
#include "qdag/reducer.hpp"
#include "support/random_network.hpp"

int main(int argc, char** argv) {
  const std::size_t variables = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 24;
  const std::size_t batch_size = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 20000;

  std::mt19937_64 rng(7);
  qdag::testing::RandomNetworkOptions opts;
  opts.variables = variables;
  opts.max_parents = 2;
  const auto net = qdag::testing::random_network(rng, opts);

  std::vector<std::string> query{net.variable(net.size() - 1).name};
  std::vector<std::string> evidence;
  for (std::size_t i = 0; i + 1 < net.size(); i += 2) evidence.push_back(net.variable(i).name);
  const auto dag = qdag::reduce_fixpoint(qdag::compile(net, query, evidence).dag).dag;

  std::vector<qdag::Evidence> batch;
  for (std::size_t b = 0; b < batch_size; ++b) {
    qdag::Evidence e(dag);
    for (std::uint32_t v = 0; v < e.size(); ++v) {
      const auto k = dag.evidence_vars()[v].values.size();
      const auto pick = std::uniform_int_distribution<std::size_t>(0, k)(rng);
      if (pick < k) e.set(v, static_cast<std::uint32_t>(pick));
    }
    batch.push_back(std::move(e));
  }

  auto time = [&](auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    auto out = fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::make_pair(std::chrono::duration<double>(t1 - t0).count(), std::move(out));
  };
  const auto [serial_s, serial] = time([&] { return qdag::evaluate_batch_serial(dag, batch); });
  const auto [parallel_s, parallel] = time([&] { return qdag::evaluate_batch(dag, batch); });

  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < batch.size(); ++i)
    for (std::size_t j = 0; j < serial[i].size(); ++j)
      if (serial[i][j].probability != parallel[i][j].probability) ++mismatches;

  std::cout << "nodes " << dag.size() << '\n'
            << "batch " << batch.size() << '\n'
            << "threads " << omp_get_max_threads() << '\n'
            << "serial_seconds " << serial_s << '\n'
            << "parallel_seconds " << parallel_s << '\n'
            << "speedup " << (parallel_s > 0 ? serial_s / parallel_s : 0.0) << '\n'
            << "mismatches " << mismatches << '\n';
  return mismatches == 0 ? 0 : 1;
}
