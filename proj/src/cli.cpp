#include "qdag/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qdag/compiler.hpp"
#include "qdag/error.hpp"
#include "qdag/incremental.hpp"
#include "qdag/number_format.hpp"
#include "qdag/oracle.hpp"
#include "qdag/reducer.hpp"
#include "qdag/serialize.hpp"
#include "qdag/voi.hpp"

namespace qdag::cli {

namespace {

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write '" + path + "'");
  f << text;
}

void print_output(const Output& output, std::ostream& out) {
  for (const auto& e : output) out << e.variable << '=' << e.value << ' ' << format_number(e.probability) << '\n';
}

std::vector<std::string> trimmed_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    auto e = line.find_last_not_of(" \t\r");
    lines.push_back(line.substr(b, e - b + 1));
  }
  return lines;
}

Evidence build_evidence(const QDag& dag, const std::string& evidence_file,
                        const std::vector<std::string>& settings) {
  Evidence e(dag);
  if (!evidence_file.empty())
    for (const auto& line : trimmed_lines(read_file(evidence_file))) e.assign(dag, line);
  for (const auto& s : settings) e.assign(dag, s);
  return e;
}

struct CompileArgs {
  std::string network, output;
  std::vector<std::string> query, evidence;
  bool no_reduce = false;
};

int do_compile(const CompileArgs& a, std::ostream& out) {
  const auto net = parse_network(read_file(a.network));
  auto compiled = compile(net, a.query, a.evidence);
  QDag dag = a.no_reduce ? std::move(compiled.dag) : reduce_fixpoint(compiled.dag).dag;
  write_output(a.output, serialize(dag), out);
  return kOk;
}

struct ReduceArgs {
  std::string input, output;
  std::vector<std::string> rules;
  bool report = false;
};

int do_reduce(const ReduceArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<RewriteRule> rules;
  for (const auto& name : a.rules) {
    auto r = parse_rule(name);
    if (!r) {
      err << "unknown rule '" << name << "'\n";
      return kUsage;
    }
    rules.push_back(*r);
  }
  QDag dag = deserialize(read_file(a.input));
  ReduceStats stats;
  stats.nodes_before = reachable_count(dag);
  if (rules.empty()) {
    auto r = reduce_fixpoint(dag);
    dag = std::move(r.dag);
    stats = r.stats;
  } else {
    for (RewriteRule rule : rules) {
      auto r = apply_rule(dag, rule);
      stats.applied[static_cast<std::size_t>(rule)] += r.applied;
      dag = std::move(r.dag);
    }
    stats.rounds = 1;
    stats.nodes_after = dag.size();
  }
  write_output(a.output, serialize(dag), out);
  if (a.report) {
    std::ostream& rep = a.output.empty() ? err : out;
    for (RewriteRule rule : kAllRules)
      rep << rule_name(rule) << ' ' << stats.applied[static_cast<std::size_t>(rule)] << '\n';
    rep << "rounds " << stats.rounds << '\n';
    rep << "nodes_before " << stats.nodes_before << '\n';
    rep << "nodes_after " << stats.nodes_after << '\n';
  }
  return kOk;
}

struct EvalArgs {
  std::string dag, evidence_file, normalize;
  std::vector<std::string> settings;
  bool watch = false;
};

void print_eval(const Output& output, const std::string& normalize_var, std::ostream& out) {
  print_output(output, out);
  if (normalize_var.empty()) return;
  for (const auto& e : normalize(output, normalize_var))
    out << "Pr(" << e.variable << '=' << e.value << "|e) " << format_number(e.probability) << '\n';
}

int do_eval(const EvalArgs& a, std::istream& in, std::ostream& out) {
  const QDag dag = deserialize(read_file(a.dag));
  const Evidence evidence = build_evidence(dag, a.evidence_file, a.settings);
  if (!a.watch) {
    print_eval(evaluate(dag, evidence), a.normalize, out);
    return kOk;
  }
  EvalState state(dag, evidence);
  print_eval(state.output(), a.normalize, out);
  std::string line;
  while (std::getline(in, line)) {
    auto lines = trimmed_lines(line);
    if (lines.empty()) continue;
    const std::string& setting = lines.front();
    Evidence next = state.evidence();
    next.assign(dag, setting);
    const std::uint32_t changed = *dag.find_evidence_var(setting.substr(0, setting.find('=')));
    const auto result = update_evidence(state, changed, next.get(changed));
    out << "--\n";
    print_eval(result.output, a.normalize, out);
    out << "recomputed " << result.recomputed << '\n';
  }
  return kOk;
}

struct OracleArgs {
  std::string network, query;
  std::vector<std::string> settings;
  bool bruteforce = false;
};

int do_oracle(const OracleArgs& a, std::ostream& out) {
  const auto net = parse_network(read_file(a.network));
  const VarIndex x = net.index_of(a.query);
  Instantiation e(net.size());
  for (const auto& s : a.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw LookupError("evidence setting '" + s + "' is not of the form V=value");
    const VarIndex v = net.index_of(s.substr(0, eq));
    const auto value = s.substr(eq + 1);
    if (value == "?") {
      e.clear(v);
      continue;
    }
    auto idx = net.variable(v).value_index(value);
    if (!idx) throw LookupError("unknown value '" + value + "' for '" + net.variable(v).name + "'");
    e.set(v, *idx);
  }
  const auto p = a.bruteforce ? marginals_bruteforce(net, x, e)
                              : cluster_infer(net, build_jointree(net), x, e);
  const auto& var = net.variable(x);
  for (std::size_t i = 0; i < var.cardinality(); ++i)
    out << var.name << '=' << var.values[i] << ' ' << format_number(p.table[i]) << '\n';
  return kOk;
}

int do_stats(const std::string& path, std::ostream& out) {
  const auto net = parse_network(read_file(path));
  const auto tri = moralize_and_triangulate(net);
  const auto jt = build_jointree(net);
  out << "variables " << net.size() << '\n';
  out << "clusters " << jt.clusters.size() << '\n';
  out << "max_cluster_size " << jt.max_cluster_size() << '\n';
  out << "total_table_size " << jt.total_table_size(net.cardinalities()) << '\n';
  out << "fill_in " << tri.fill_in << '\n';
  return kOk;
}

struct VoiArgs {
  std::string dag, variable, evidence_file;
  std::vector<double> utilities;
  std::vector<std::string> settings;
};

int do_voi(const VoiArgs& a, std::ostream& out) {
  const QDag dag = deserialize(read_file(a.dag));
  const Evidence evidence = build_evidence(dag, a.evidence_file, a.settings);
  out << format_number(utility_of_observing(dag, a.variable, a.utilities, evidence)) << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compile belief networks into Query DAGs and evaluate them", "qdagc"};
  app.require_subcommand(1);

  CompileArgs compile_args;
  auto* compile_cmd = app.add_subcommand("compile", "Compile a network into a Q-DAG");
  compile_cmd->add_option("network", compile_args.network, "Network document (JSON)")->required();
  compile_cmd->add_option("--query", compile_args.query, "Query variables")->delimiter(',')->required();
  compile_cmd->add_option("--evidence", compile_args.evidence, "Evidence variables")->delimiter(',');
  compile_cmd->add_option("-o,--output", compile_args.output, "Output file (default stdout)");
  compile_cmd->add_flag("--no-reduce", compile_args.no_reduce, "Skip reduction");

  ReduceArgs reduce_args;
  auto* reduce_cmd = app.add_subcommand("reduce", "Apply rewrite rules to a Q-DAG");
  reduce_cmd->add_option("input", reduce_args.input, "Q-DAG file")->required();
  reduce_cmd->add_option("-o,--output", reduce_args.output, "Output file (default stdout)");
  reduce_cmd->add_option("--rule", reduce_args.rules, "Apply one pass of this rule (repeatable)");
  reduce_cmd->add_flag("--report", reduce_args.report, "Print rewrite counts");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a Q-DAG under evidence");
  eval_cmd->add_option("dag", eval_args.dag, "Q-DAG file")->required();
  eval_cmd->add_option("--set", eval_args.settings, "Evidence V=value or V=?");
  eval_cmd->add_option("--evidence-file", eval_args.evidence_file, "File of V=value lines");
  eval_cmd->add_option("--normalize", eval_args.normalize, "Also print Pr(V | e)");
  eval_cmd->add_flag("--watch", eval_args.watch, "Read evidence updates from stdin");

  OracleArgs oracle_args;
  auto* oracle_cmd = app.add_subcommand("oracle", "Reference inference on a network");
  oracle_cmd->add_option("network", oracle_args.network, "Network document (JSON)")->required();
  oracle_cmd->add_option("--query", oracle_args.query, "Query variable")->required();
  oracle_cmd->add_option("--set", oracle_args.settings, "Evidence V=value");
  oracle_cmd->add_flag("--bruteforce", oracle_args.bruteforce, "Enumerate the joint instead of clustering");

  std::string stats_network;
  auto* stats_cmd = app.add_subcommand("stats", "Join tree statistics for a network");
  stats_cmd->add_option("network", stats_network, "Network document (JSON)")->required();

  VoiArgs voi_args;
  auto* voi_cmd = app.add_subcommand("voi", "Expected utility of observing a variable");
  voi_cmd->add_option("dag", voi_args.dag, "Q-DAG file")->required();
  voi_cmd->add_option("--var", voi_args.variable, "Variable to observe")->required();
  voi_cmd->add_option("--utility", voi_args.utilities, "Utility per value")->delimiter(',')->required();
  voi_cmd->add_option("--set", voi_args.settings, "Evidence V=value or V=?");
  voi_cmd->add_option("--evidence-file", voi_args.evidence_file, "File of V=value lines");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "qdagc: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*compile_cmd) return do_compile(compile_args, out);
    if (*reduce_cmd) return do_reduce(reduce_args, out, err);
    if (*eval_cmd) return do_eval(eval_args, in, out);
    if (*oracle_cmd) return do_oracle(oracle_args, out);
    if (*stats_cmd) return do_stats(stats_network, out);
    if (*voi_cmd) return do_voi(voi_args, out);
  } catch (const ZeroProbabilityError& e) {
    err << "qdagc: " << e.what() << '\n';
    return kSemantic;
  } catch (const LookupError& e) {
    err << "qdagc: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "qdagc: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    err << "qdagc: " << e.what() << '\n';
    return kInputFormat;
  } catch (const ValidationError& e) {
    err << "qdagc: " << e.what() << '\n';
    return kInputFormat;
  } catch (const InputError& e) {
    err << "qdagc: " << e.what() << '\n';
    return kInputFormat;
  }
  return kUsage;
}

}  // namespace qdag::cli
