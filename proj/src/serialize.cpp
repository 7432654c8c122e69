#include "qdag/serialize.hpp"

#include <charconv>
#include <sstream>
#include <vector>

#include "qdag/error.hpp"
#include "qdag/number_format.hpp"

namespace qdag {

std::string serialize(const QDag& dag) {
  std::ostringstream out;
  out << "QDAG 1\n";
  out << "evars " << dag.evidence_vars().size() << '\n';
  for (const auto& ev : dag.evidence_vars()) {
    out << "evar " << ev.name << ' ' << ev.values.size();
    for (const auto& v : ev.values) out << ' ' << v;
    out << '\n';
  }
  out << "nodes " << dag.size() << '\n';
  for (NodeId id = 0; id < dag.size(); ++id) {
    const QNode& n = dag.node(id);
    switch (n.kind) {
      case NodeKind::Num:
        out << "N " << format_number(n.number);
        break;
      case NodeKind::Esn:
        out << "E " << n.evar << ' ' << n.evalue;
        break;
      case NodeKind::Mul:
      case NodeKind::Add:
        out << (n.kind == NodeKind::Mul ? "M " : "A ") << n.arity;
        for (NodeId op : dag.operands(id)) out << ' ' << op;
        break;
    }
    out << '\n';
  }
  out << "queries " << dag.queries().size() << '\n';
  for (const auto& q : dag.queries()) out << "Q " << q.variable << ' ' << q.value << ' ' << q.node << '\n';
  return out.str();
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  // Next line split into space-separated tokens. Throws on end of input.
  std::vector<std::string_view> next(const char* expecting) {
    if (pos_ >= text_.size()) fail(std::string("truncated input: expected ") + expecting, line_ + 1);
    auto end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    std::string_view line = text_.substr(pos_, end - pos_);
    pos_ = end + 1;
    ++line_;
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
      if (line[i] == ' ') {
        ++i;
        continue;
      }
      auto j = line.find(' ', i);
      if (j == std::string_view::npos) j = line.size();
      tokens.push_back(line.substr(i, j - i));
      i = j;
    }
    return tokens;
  }

  bool at_end() const {
    for (std::size_t i = pos_; i < text_.size(); ++i)
      if (text_[i] != '\n') return false;
    return true;
  }
  std::size_t line() const { return line_; }

  [[noreturn]] void fail(const std::string& msg) const { fail(msg, line_); }
  [[noreturn]] static void fail(const std::string& msg, std::size_t line) {
    throw ParseError("line " + std::to_string(line) + ": " + msg, line);
  }

  std::size_t integer(std::string_view token) const {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size())
      fail("expected a non-negative integer, got '" + std::string(token) + "'");
    return value;
  }

  std::size_t header(std::string_view keyword) {
    auto t = next(std::string(keyword).c_str());
    if (t.size() != 2 || t[0] != keyword)
      fail("expected '" + std::string(keyword) + " <count>'");
    return integer(t[1]);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
};

}  // namespace

QDag deserialize(std::string_view text) {
  LineReader in(text);
  {
    auto t = in.next("header");
    if (t.size() != 2 || t[0] != "QDAG") in.fail("missing 'QDAG' header");
    if (t[1] != "1") in.fail("unsupported version '" + std::string(t[1]) + "'");
  }

  QDag dag;
  const std::size_t evar_count = in.header("evars");
  for (std::size_t i = 0; i < evar_count; ++i) {
    auto t = in.next("evar line");
    if (t.size() < 3 || t[0] != "evar") in.fail("expected 'evar <name> <k> <value...>'");
    const std::size_t k = in.integer(t[2]);
    if (t.size() != 3 + k) in.fail("evar value count does not match");
    std::vector<std::string> values(t.begin() + 3, t.end());
    try {
      dag.add_evidence_var(std::string(t[1]), std::move(values));
    } catch (const std::invalid_argument& e) {
      in.fail(e.what());
    }
  }

  const std::size_t node_count = in.header("nodes");
  for (std::size_t i = 0; i < node_count; ++i) {
    auto t = in.next("node line");
    if (t.empty()) in.fail("empty node line");
    NodeId got = 0;
    if (t[0] == "N") {
      if (t.size() != 2) in.fail("expected 'N <decimal>'");
      auto p = parse_number(t[1]);
      if (!p) in.fail("bad number '" + std::string(t[1]) + "'");
      if (!(*p >= 0.0 && *p <= 1.0)) in.fail("number outside [0, 1]");
      got = dag.make_num(*p);
    } else if (t[0] == "E") {
      if (t.size() != 3) in.fail("expected 'E <evar-index> <value-index>'");
      const std::size_t ev = in.integer(t[1]);
      const std::size_t val = in.integer(t[2]);
      if (ev >= dag.evidence_vars().size() || val >= dag.evidence_vars()[ev].values.size())
        in.fail("ESN references an unregistered evidence pair");
      got = dag.make_esn(static_cast<std::uint32_t>(ev), static_cast<std::uint32_t>(val));
    } else if (t[0] == "M" || t[0] == "A") {
      if (t.size() < 2) in.fail("expected '" + std::string(t[0]) + " <arity> <id...>'");
      const std::size_t arity = in.integer(t[1]);
      if (arity < 2) in.fail("operation arity must be at least 2");
      if (t.size() != 2 + arity) in.fail("operand count does not match arity");
      std::vector<NodeId> ops;
      for (std::size_t j = 0; j < arity; ++j) {
        const std::size_t op = in.integer(t[2 + j]);
        if (op >= i) in.fail("forward reference to node " + std::to_string(op) + " from node " + std::to_string(i));
        ops.push_back(static_cast<NodeId>(op));
      }
      got = dag.make_op(t[0] == "M" ? NodeKind::Mul : NodeKind::Add, ops);
    } else {
      in.fail("unknown node tag '" + std::string(t[0]) + "'");
    }
    if (got != i) in.fail("duplicate of node " + std::to_string(got));
  }

  const std::size_t query_count = in.header("queries");
  for (std::size_t i = 0; i < query_count; ++i) {
    auto t = in.next("query line");
    if (t.size() != 4 || t[0] != "Q") in.fail("expected 'Q <variable> <value> <node-id>'");
    const std::size_t node = in.integer(t[3]);
    if (node >= dag.size()) in.fail("query references unknown node " + std::to_string(node));
    dag.add_query(std::string(t[1]), std::string(t[2]), static_cast<NodeId>(node));
  }
  if (!in.at_end()) in.fail("trailing content after queries");
  return dag;
}

}  // namespace qdag
