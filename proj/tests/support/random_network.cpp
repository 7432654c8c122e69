#include "support/random_network.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace qdag::testing {

BeliefNetwork random_network(std::mt19937_64& rng, const RandomNetworkOptions& options) {
  std::uniform_int_distribution<std::size_t> card_dist(options.min_cardinality, options.max_cardinality);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Variable> vars;
  for (std::size_t i = 0; i < options.variables; ++i) {
    Variable v;
    v.name = "X" + std::to_string(i);
    const std::size_t k = card_dist(rng);
    for (std::size_t j = 0; j < k; ++j) v.values.push_back("v" + std::to_string(j));
    vars.push_back(std::move(v));
  }

  std::vector<Cpt> cpts;
  for (std::size_t i = 0; i < options.variables; ++i) {
    Cpt cpt;
    cpt.child = i;
    std::vector<std::size_t> candidates(i);
    std::iota(candidates.begin(), candidates.end(), std::size_t{0});
    std::shuffle(candidates.begin(), candidates.end(), rng);
    std::uniform_int_distribution<std::size_t> np_dist(0, std::min(options.max_parents, i));
    candidates.resize(np_dist(rng));
    std::sort(candidates.begin(), candidates.end());
    std::size_t rows = 1;
    for (std::size_t p : candidates) {
      cpt.parents.push_back(p);
      rows *= vars[p].values.size();
    }
    const std::size_t k = vars[i].values.size();
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<double> row(k);
      for (auto& x : row) x = unit(rng) < options.zero_probability ? 0.0 : 0.05 + unit(rng);
      double total = std::accumulate(row.begin(), row.end(), 0.0);
      if (total == 0.0) {
        row[0] = 1.0;
        total = 1.0;
      }
      for (auto& x : row) x /= total;
      cpt.table.insert(cpt.table.end(), row.begin(), row.end());
    }
    cpts.push_back(std::move(cpt));
  }
  return BeliefNetwork(std::move(vars), std::move(cpts));
}

}  // namespace qdag::testing
