#include "qdag/voi.hpp"

#include <stdexcept>
#include <string>

#include "qdag/error.hpp"

namespace qdag {

Output normalize(const Output& output, std::string_view variable) {
  Output selected;
  double total = 0.0;
  for (const auto& entry : output)
    if (entry.variable == variable) {
      selected.push_back(entry);
      total += entry.probability;
    }
  if (selected.empty())
    throw LookupError("'" + std::string(variable) + "' is not a query variable");
  if (total == 0.0) throw ZeroProbabilityError();
  for (auto& entry : selected) entry.probability /= total;
  return selected;
}

double utility_of_observing(const QDag& dag, std::string_view variable,
                            std::span<const double> utilities, const Evidence& evidence) {
  const auto evar = dag.find_evidence_var(variable);
  if (!evar)
    throw std::invalid_argument("'" + std::string(variable) + "' is not an evidence variable");
  if (evidence.get(*evar))
    throw std::invalid_argument("'" + std::string(variable) + "' is already observed");
  const Output conditional = normalize(evaluate(dag, evidence), variable);
  if (conditional.size() != utilities.size())
    throw std::invalid_argument("expected " + std::to_string(conditional.size()) +
                                " utilities for '" + std::string(variable) + "'");
  double expected = 0.0;
  for (std::size_t i = 0; i < conditional.size(); ++i)
    expected += conditional[i].probability * utilities[i];
  return expected;
}

}  // namespace qdag
