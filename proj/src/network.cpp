#include "qdag/network.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include <json.hpp>

#include "qdag/error.hpp"

namespace qdag {

namespace {

using nlohmann::json;

// Tokens end up in whitespace-separated files and `V=x` arguments.
bool valid_token(std::string_view s) {
  if (s.empty()) return false;
  return std::none_of(s.begin(), s.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '=' || c == ',';
  });
}

std::size_t product(const Cardinalities& cards, const std::vector<VarIndex>& vars) {
  std::size_t p = 1;
  for (VarIndex v : vars) p *= cards[v];
  return p;
}

}  // namespace

std::optional<std::size_t> Variable::value_index(std::string_view value) const {
  auto it = std::find(values.begin(), values.end(), value);
  if (it == values.end()) return std::nullopt;
  return static_cast<std::size_t>(it - values.begin());
}

BeliefNetwork::BeliefNetwork(std::vector<Variable> variables, std::vector<Cpt> cpts)
    : variables_(std::move(variables)) {
  const std::size_t n = variables_.size();
  for (VarIndex v = 0; v < n; ++v) {
    const Variable& var = variables_[v];
    if (!valid_token(var.name))
      throw ValidationError("invalid variable name '" + var.name + "'");
    if (!by_name_.emplace(var.name, v).second)
      throw ValidationError("duplicate variable '" + var.name + "'");
    if (var.values.empty())
      throw ValidationError("variable '" + var.name + "' has no values");
    std::set<std::string_view> seen;
    for (const auto& value : var.values) {
      if (value == "?")
        throw ValidationError("variable '" + var.name + "' uses reserved value name '?'");
      if (!valid_token(value))
        throw ValidationError("invalid value name '" + value + "' in variable '" + var.name + "'");
      if (!seen.insert(value).second)
        throw ValidationError("duplicate value '" + value + "' in variable '" + var.name + "'");
    }
    cards_.push_back(var.cardinality());
  }

  cpts_.resize(n);
  std::vector<bool> have(n, false);
  for (auto& cpt : cpts) {
    if (cpt.child >= n) throw ValidationError("CPT for unknown variable");
    if (have[cpt.child])
      throw ValidationError("duplicate CPT for variable '" + variables_[cpt.child].name + "'");
    have[cpt.child] = true;
    std::set<VarIndex> distinct;
    for (VarIndex p : cpt.parents) {
      if (p >= n) throw ValidationError("unknown parent");
      if (p == cpt.child || !distinct.insert(p).second)
        throw ValidationError("invalid parent list for '" + variables_[cpt.child].name + "'");
    }
    const std::size_t rows = product(cards_, cpt.parents);
    const std::size_t cols = cards_[cpt.child];
    if (cpt.table.size() != rows * cols)
      throw ValidationError("CPT for '" + variables_[cpt.child].name + "' has " +
                            std::to_string(cpt.table.size()) + " entries, expected " +
                            std::to_string(rows * cols));
    for (std::size_t r = 0; r < rows; ++r) {
      double sum = 0.0;
      for (std::size_t c = 0; c < cols; ++c) {
        const double p = cpt.table[r * cols + c];
        if (!(p >= 0.0 && p <= 1.0))
          throw ValidationError("CPT entry out of [0,1] for '" + variables_[cpt.child].name + "'");
        sum += p;
      }
      if (std::abs(sum - 1.0) > kNormalizationTolerance)
        throw ValidationError("row not normalized: CPT for '" + variables_[cpt.child].name +
                              "' row " + std::to_string(r) + " sums to " + std::to_string(sum));
    }
    cpts_[cpt.child] = std::move(cpt);
  }
  for (VarIndex v = 0; v < n; ++v)
    if (!have[v]) throw ValidationError("missing CPT for variable '" + variables_[v].name + "'");

  children_.assign(n, {});
  for (VarIndex v = 0; v < n; ++v)
    for (VarIndex p : cpts_[v].parents) children_[p].push_back(v);

  // Kahn's algorithm; anything left over sits on a cycle.
  std::vector<std::size_t> indegree(n);
  for (VarIndex v = 0; v < n; ++v) indegree[v] = cpts_[v].parents.size();
  std::vector<VarIndex> ready;
  for (VarIndex v = 0; v < n; ++v)
    if (indegree[v] == 0) ready.push_back(v);
  std::size_t visited = 0;
  while (!ready.empty()) {
    VarIndex v = ready.back();
    ready.pop_back();
    ++visited;
    for (VarIndex c : children_[v])
      if (--indegree[c] == 0) ready.push_back(c);
  }
  if (visited != n) throw ValidationError("cyclic graph");
}

std::optional<VarIndex> BeliefNetwork::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

VarIndex BeliefNetwork::index_of(std::string_view name) const {
  if (auto v = find(name)) return *v;
  throw LookupError("unknown variable '" + std::string(name) + "'");
}

std::vector<VarIndex> BeliefNetwork::resolve(std::span<const std::string> names) const {
  std::vector<VarIndex> out;
  out.reserve(names.size());
  for (const auto& name : names) out.push_back(index_of(name));
  return out;
}

double BeliefNetwork::conditional(VarIndex child, const Instantiation& inst) const {
  const Cpt& cpt = cpts_.at(child);
  std::size_t row = 0;
  for (VarIndex p : cpt.parents) {
    auto value = inst.get(p);
    if (!value) throw LookupError("unbound variable '" + variables_[p].name + "'");
    row = row * cards_[p] + *value;
  }
  auto value = inst.get(child);
  if (!value) throw LookupError("unbound variable '" + variables_[child].name + "'");
  return cpt.table[row * cards_[child] + *value];
}

BeliefNetwork parse_network(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("syntax error at byte ") + std::to_string(e.byte) + ": " +
                         e.what(),
                     e.byte);
  }

  auto fail = [](const std::string& msg) -> ParseError { return ParseError(msg, 0); };
  if (!doc.is_object()) throw fail("network document must be an object");
  if (!doc.contains("variables") || !doc["variables"].is_array())
    throw fail("missing 'variables' list");
  if (!doc.contains("cpts") || !doc["cpts"].is_array()) throw fail("missing 'cpts' list");

  std::vector<Variable> variables;
  std::unordered_map<std::string, VarIndex> index;
  for (const auto& item : doc["variables"]) {
    if (!item.is_object() || !item.contains("name") || !item["name"].is_string() ||
        !item.contains("values") || !item["values"].is_array())
      throw fail("each variable needs a string 'name' and a 'values' list");
    Variable var;
    var.name = item["name"].get<std::string>();
    for (const auto& value : item["values"]) {
      if (!value.is_string()) throw fail("value names of '" + var.name + "' must be strings");
      var.values.push_back(value.get<std::string>());
    }
    if (!index.emplace(var.name, variables.size()).second)
      throw ValidationError("duplicate variable '" + var.name + "'");
    variables.push_back(std::move(var));
  }

  auto lookup = [&](const std::string& name, const char* what) {
    auto it = index.find(name);
    if (it == index.end())
      throw ValidationError(std::string(what) + " '" + name + "'");
    return it->second;
  };

  std::vector<Cpt> cpts;
  for (const auto& item : doc["cpts"]) {
    if (!item.is_object() || !item.contains("child") || !item["child"].is_string() ||
        !item.contains("table") || !item["table"].is_array())
      throw fail("each CPT needs a string 'child' and a 'table' list");
    Cpt cpt;
    cpt.child = lookup(item["child"].get<std::string>(), "CPT for unknown variable");
    if (item.contains("parents")) {
      if (!item["parents"].is_array()) throw fail("'parents' must be a list");
      for (const auto& p : item["parents"]) {
        if (!p.is_string()) throw fail("parent names must be strings");
        cpt.parents.push_back(lookup(p.get<std::string>(), "unknown parent"));
      }
    }
    for (const auto& x : item["table"]) {
      if (!x.is_number()) throw fail("CPT table entries must be numbers");
      cpt.table.push_back(x.get<double>());
    }
    cpts.push_back(std::move(cpt));
  }
  return BeliefNetwork(std::move(variables), std::move(cpts));
}

std::string render_network(const BeliefNetwork& net) {
  json doc;
  doc["variables"] = json::array();
  for (const auto& var : net.variables())
    doc["variables"].push_back({{"name", var.name}, {"values", var.values}});
  doc["cpts"] = json::array();
  for (VarIndex v = 0; v < net.size(); ++v) {
    const Cpt& cpt = net.cpt(v);
    json parents = json::array();
    for (VarIndex p : cpt.parents) parents.push_back(net.variable(p).name);
    doc["cpts"].push_back(
        {{"child", net.variable(v).name}, {"parents", parents}, {"table", cpt.table}});
  }
  return doc.dump(2) + "\n";
}

BeliefNetwork prune_network(const BeliefNetwork& net, std::span<const std::string> query,
                            std::span<const std::string> evidence) {
  const std::size_t n = net.size();
  std::vector<bool> keep_always(n, false);
  for (VarIndex v : net.resolve(query)) keep_always[v] = true;
  for (VarIndex v : net.resolve(evidence)) keep_always[v] = true;

  std::vector<bool> alive(n, true);
  std::vector<std::size_t> live_children(n);
  for (VarIndex v = 0; v < n; ++v) live_children[v] = net.children(v).size();

  bool changed = true;
  while (changed) {
    changed = false;
    for (VarIndex v = 0; v < n; ++v) {
      if (alive[v] && !keep_always[v] && live_children[v] == 0) {
        alive[v] = false;
        for (VarIndex p : net.parents(v)) --live_children[p];
        changed = true;
      }
    }
  }

  std::vector<VarIndex> remap(n, n);
  std::vector<Variable> variables;
  for (VarIndex v = 0; v < n; ++v) {
    if (!alive[v]) continue;
    remap[v] = variables.size();
    variables.push_back(net.variable(v));
  }
  std::vector<Cpt> cpts;
  for (VarIndex v = 0; v < n; ++v) {
    if (!alive[v]) continue;
    Cpt cpt = net.cpt(v);
    cpt.child = remap[v];
    for (auto& p : cpt.parents) p = remap[p];
    cpts.push_back(std::move(cpt));
  }
  return BeliefNetwork(std::move(variables), std::move(cpts));
}

}  // namespace qdag
