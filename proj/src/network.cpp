#include "poscop/network.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <utility>

#include "text_util.hpp"

namespace poscop {

// --- validation ---------------------------------------------------------------

PossibilisticNet::PossibilisticNet(Frame frame, std::vector<NodeTable> nodes)
    : frame_(std::move(frame)), nodes_(std::move(nodes)) {
  const std::size_t n = frame_.size();
  std::vector<char> has_table(n, 0);

  for (const NodeTable& node : nodes_) {
    if (node.variable >= n) throw ModelError("node variable index out of range");
    const std::string& name = frame_.name(static_cast<std::uint32_t>(node.variable));
    if (has_table[node.variable]) throw ModelError("variable '" + name + "' has two tables");
    has_table[node.variable] = 1;

    std::vector<char> parent_seen(n, 0);
    for (const std::size_t p : node.parents) {
      if (p >= n) throw ModelError("parent index out of range for variable '" + name + "'");
      if (p == node.variable) throw ModelError("variable '" + name + "' lists itself as parent");
      if (parent_seen[p])
        throw ModelError("variable '" + name + "' lists parent '" +
                         frame_.name(static_cast<std::uint32_t>(p)) + "' twice");
      parent_seen[p] = 1;
    }

    const std::size_t expected = std::size_t{1} << node.parents.size();
    if (node.rows.size() != expected)
      throw ModelError("variable '" + name + "' has " + std::to_string(node.rows.size()) +
                       " rows, expected " + std::to_string(expected));
    for (const auto& row : node.rows) {
      for (const double v : row)
        if (v < -kDensityTolerance || v > 1.0 + kDensityTolerance)
          throw ModelError("variable '" + name + "' has value " + std::to_string(v) +
                           " outside [0,1]");
      if (std::abs(std::max(row[0], row[1]) - 1.0) > kDensityTolerance)
        throw ModelError("variable '" + name + "' has a row with maximum " +
                         std::to_string(std::max(row[0], row[1])) + " (expected 1)");
    }
  }

  for (std::size_t v = 0; v < n; ++v)
    if (!has_table[v])
      throw ModelError("variable '" + frame_.name(static_cast<std::uint32_t>(v)) +
                       "' has no prior or cond line");

  // Kahn's algorithm over parent -> child edges; leftovers witness a cycle.
  std::vector<std::size_t> indegree(n, 0);
  std::vector<std::vector<std::size_t>> children(n);
  for (const NodeTable& node : nodes_) {
    indegree[node.variable] = node.parents.size();
    for (const std::size_t p : node.parents) children[p].push_back(node.variable);
  }
  std::vector<std::size_t> ready;
  for (std::size_t v = 0; v < n; ++v)
    if (indegree[v] == 0) ready.push_back(v);
  std::size_t processed = 0;
  while (!ready.empty()) {
    const std::size_t v = ready.back();
    ready.pop_back();
    ++processed;
    for (const std::size_t c : children[v])
      if (--indegree[c] == 0) ready.push_back(c);
  }
  if (processed != n) {
    std::string cycle;
    for (std::size_t v = 0; v < n; ++v)
      if (indegree[v] > 0) cycle += (cycle.empty() ? "" : ", ") +
                                    frame_.name(static_cast<std::uint32_t>(v));
    throw ModelError("the net has a cycle involving: " + cycle);
  }
}

const NodeTable& PossibilisticNet::node_for(std::size_t variable) const {
  for (const NodeTable& node : nodes_)
    if (node.variable == variable) return node;
  throw ModelError("no table for variable index " + std::to_string(variable));
}

// --- parsing ---------------------------------------------------------------------

namespace {

struct OpenBlock {
  std::size_t node = 0;
  std::size_t remaining = 0;
  std::vector<char> row_seen;
  std::size_t header_line = 0;
};

std::uint32_t require_variable(const Frame& frame, std::string_view name, std::size_t line) {
  if (const auto idx = frame.index_of(name)) return *idx;
  throw UnknownPrimitiveError("unknown variable '" + std::string(name) + "'", line,
                              std::string(name));
}

std::array<double, 2> parse_value_pair(std::span<const std::string_view> tokens,
                                       std::size_t line) {
  if (tokens.size() != 2)
    throw ParseError("expected exactly two values (for T and F)", line);
  const std::array<double, 2> pair = {detail::parse_decimal_value(tokens[0], line, 6),
                                      detail::parse_decimal_value(tokens[1], line, 6)};
  if (std::abs(std::max(pair[0], pair[1]) - 1.0) > kDensityTolerance)
    throw ParseError("row maximum is " + std::string(std::max(pair[0], pair[1]) == pair[0]
                                                         ? tokens[0]
                                                         : tokens[1]) +
                         " (expected 1)",
                     line);
  return pair;
}

}  // namespace

PossibilisticNet load_net(std::string_view text) {
  std::optional<Frame> frame;
  std::vector<NodeTable> nodes;
  std::vector<char> declared;
  std::optional<OpenBlock> open;

  auto require_fresh = [&](std::uint32_t variable, std::size_t line) {
    if (declared[variable])
      throw ParseError("variable '" + frame->name(variable) + "' already has a table", line);
    declared[variable] = 1;
  };

  detail::for_each_content_line(text, [&](std::string_view line, std::size_t line_no) {
    if (!frame) {
      if (!line.starts_with("vars:")) throw ParseError("expected a 'vars:' line first", line_no);
      const auto names = detail::split_ws(line.substr(5));
      if (names.empty()) throw ParseError("the vars line lists no variables", line_no);
      std::vector<std::string> prims;
      prims.reserve(names.size());
      for (const auto n : names) prims.emplace_back(n);
      frame.emplace(std::move(prims));
      declared.assign(frame->size(), 0);
      return;
    }

    const bool keyword = line.starts_with("prior ") || line.starts_with("cond ") ||
                         line.starts_with("vars:");
    if (open && keyword)
      throw ParseError("missing table rows for variable '" +
                           frame->name(static_cast<std::uint32_t>(nodes[open->node].variable)) +
                           "' (" + std::to_string(open->remaining) + " more expected)",
                       line_no);

    const std::size_t colon = line.find(':');
    if (colon == std::string_view::npos)
      throw ParseError("expected ':' separating configuration and values", line_no);
    const auto head = detail::split_ws(line.substr(0, colon));
    const auto rest = detail::split_ws(line.substr(colon + 1));

    if (open) {
      NodeTable& node = nodes[open->node];
      if (head.size() != node.parents.size())
        throw ParseError("expected " + std::to_string(node.parents.size()) +
                             " parent literals in the table row",
                         line_no);
      std::size_t cfg = 0;
      for (const auto tok : head) {
        if (tok == "T")
          cfg = cfg << 1;
        else if (tok == "F")
          cfg = (cfg << 1) | 1u;
        else
          throw ParseError("bad literal '" + std::string(tok) + "' (use T or F)", line_no);
      }
      if (open->row_seen[cfg]) throw ParseError("duplicate table row", line_no);
      open->row_seen[cfg] = 1;
      node.rows[cfg] = parse_value_pair(rest, line_no);
      if (--open->remaining == 0) open.reset();
      return;
    }

    if (head.empty()) throw ParseError("expected 'prior' or 'cond'", line_no);

    if (head[0] == "prior") {
      if (head.size() != 2) throw ParseError("expected 'prior <var>: <T-value> <F-value>'", line_no);
      const std::uint32_t variable = require_variable(*frame, head[1], line_no);
      require_fresh(variable, line_no);
      nodes.push_back({variable, {}, {parse_value_pair(rest, line_no)}});
      return;
    }

    if (head[0] == "cond") {
      if (head.size() < 4 || head[2] != "|")
        throw ParseError("expected 'cond <var> | <parents...>:'", line_no);
      if (!rest.empty())
        throw ParseError("the cond header ends at ':'; rows follow on their own lines", line_no);
      const std::uint32_t variable = require_variable(*frame, head[1], line_no);
      require_fresh(variable, line_no);
      std::vector<std::size_t> parents;
      for (std::size_t i = 3; i < head.size(); ++i)
        parents.push_back(require_variable(*frame, head[i], line_no));
      if (parents.size() > 16)
        throw ParseError("more than 16 parents are not supported", line_no);
      const std::size_t row_count = std::size_t{1} << parents.size();
      nodes.push_back({variable, std::move(parents),
                       std::vector<std::array<double, 2>>(row_count, {0.0, 0.0})});
      open = OpenBlock{nodes.size() - 1, row_count, std::vector<char>(row_count, 0), line_no};
      return;
    }

    throw ParseError("expected 'prior', 'cond', or a table row", line_no);
  });

  if (!frame) throw ParseError("empty model text", 0);
  if (open)
    throw ParseError("missing table rows for variable '" +
                         frame->name(static_cast<std::uint32_t>(nodes[open->node].variable)) +
                         "' (" + std::to_string(open->remaining) + " more expected)",
                     open->header_line);
  return PossibilisticNet(std::move(*frame), std::move(nodes));
}

// --- rendering ----------------------------------------------------------------------

std::string format_net(const PossibilisticNet& net) {
  const Frame& frame = net.frame();
  std::ostringstream out;
  out << "vars:";
  for (const std::string& name : frame.primitives()) out << ' ' << name;
  out << "\n";
  for (const NodeTable& node : net.nodes()) {
    const std::string& name = frame.name(static_cast<std::uint32_t>(node.variable));
    if (node.parents.empty()) {
      out << "prior " << name << ": " << format_value(node.rows[0][0]) << ' '
          << format_value(node.rows[0][1]) << "\n";
      continue;
    }
    out << "cond " << name << " |";
    for (const std::size_t p : node.parents) out << ' '
                                                 << frame.name(static_cast<std::uint32_t>(p));
    out << ":\n";
    for (std::size_t cfg = 0; cfg < node.rows.size(); ++cfg) {
      out << " ";
      for (std::size_t i = 0; i < node.parents.size(); ++i) {
        const bool truth = ((cfg >> (node.parents.size() - 1 - i)) & 1u) == 0;
        out << ' ' << (truth ? 'T' : 'F');
      }
      out << " : " << format_value(node.rows[cfg][0]) << ' ' << format_value(node.rows[cfg][1])
          << "\n";
    }
  }
  return out.str();
}

// --- the joint and the oracle ----------------------------------------------------------

Density joint_density(const PossibilisticNet& net) {
  const Frame& frame = net.frame();
  const std::uint32_t worlds = frame.world_count();
  std::vector<double> values(worlds, 1.0);
  for (const NodeTable& node : net.nodes()) {
    for (WorldIndex w = 0; w < worlds; ++w) {
      std::size_t cfg = 0;
      for (const std::size_t p : node.parents)
        cfg = (cfg << 1) | (frame.literal_of(w, static_cast<std::uint32_t>(p)) ? 0u : 1u);
      const bool truth = frame.literal_of(w, static_cast<std::uint32_t>(node.variable));
      values[w] *= node.rows[cfg][truth ? 0 : 1];
    }
  }
  return Density(frame, std::move(values));
}

double conditional_from_joint(const Density& joint, const Event& target, const Event& evidence) {
  if (!(joint.frame() == target.frame()) || !(joint.frame() == evidence.frame()))
    throw FrameMismatchError("joint, target, and evidence must share one frame");
  const double pi_evidence = measure(joint, evidence);
  if (pi_evidence <= 0.0) throw ImpossibleEvidenceError("evidence has possibility 0");
  return measure(joint, intersect(target, evidence)) / pi_evidence;
}

double oracle_conditional(const PossibilisticNet& net, const Formula& target,
                          const Formula& evidence) {
  if (!(net.frame() == target.frame()) || !(net.frame() == evidence.frame()))
    throw FrameMismatchError("net, target, and evidence must share one frame");
  const Density joint = joint_density(net);
  return conditional_from_joint(joint, models(target), models(evidence));
}

// --- the bundled example ------------------------------------------------------------------

std::string_view alarm_model_text() {
  static constexpr std::string_view text =
      "# Six-variable alarm net: burglary, earthquake, alarm, radio report,\n"
      "# and two phone calls.\n"
      "vars: B E A R W G\n"
      "\n"
      "prior B: 1.0 1.0\n"
      "prior E: 1.0 1.0\n"
      "\n"
      "cond A | B E:\n"
      "  T T : 1.0 0.05\n"
      "  T F : 1.0 0.4\n"
      "  F T : 1.0 0.85\n"
      "  F F : 0.05 1.0\n"
      "\n"
      "cond R | E:\n"
      "  T : 1.0 0.05\n"
      "  F : 0.0 1.0\n"
      "\n"
      "cond W | A:\n"
      "  T : 1.0 0.8\n"
      "  F : 1.0 1.0\n"
      "\n"
      "cond G | A:\n"
      "  T : 1.0 0.8\n"
      "  F : 1.0 1.0\n";
  return text;
}

}  // namespace poscop
