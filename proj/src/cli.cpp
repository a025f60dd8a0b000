#include "poscop/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "poscop/axioms.hpp"
#include "poscop/conditioning.hpp"
#include "poscop/error.hpp"
#include "poscop/logic.hpp"
#include "poscop/network.hpp"
#include "poscop/possibility.hpp"
#include "poscop/propagation.hpp"
#include "text_util.hpp"

namespace poscop {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read file '" + path + "'");
  std::ostringstream body;
  body << in.rdbuf();
  return body.str();
}

// Loads a model file; the name "alarm" falls back to the embedded example
// when no such file exists in the working directory.
PossibilisticNet load_model(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe && path == "alarm") return load_net(alarm_model_text());
  probe.close();
  return load_net(read_file(path));
}

Density load_density(const std::string& path) { return parse_density(read_file(path)); }

// Extracts the literal conjunction expressed by `f`; the constant true stands
// for the empty conjunction.  Throws when `f` has any other shape.
void collect_literals(const Formula::NodePtr& node, std::vector<Literal>& out) {
  switch (node->kind) {
    case FormulaKind::True:
      return;
    case FormulaKind::Primitive:
      out.push_back({node->primitive, true});
      return;
    case FormulaKind::Not:
      if (node->left->kind == FormulaKind::Primitive) {
        out.push_back({node->left->primitive, false});
        return;
      }
      break;
    case FormulaKind::And:
      collect_literals(node->left, out);
      collect_literals(node->right, out);
      return;
    default:
      break;
  }
  throw Error(
      "the propagate engine accepts only evidence that is a conjunction of "
      "literals; use --engine oracle for general formulas");
}

std::vector<Literal> literal_conjunction(const Formula& f) {
  std::vector<Literal> literals;
  collect_literals(f.root(), literals);
  return literals;
}

Formula parse_evidence(const std::string& text, const Frame& frame) {
  if (detail::strip(text).empty()) return Formula::constant(frame, true);
  return parse_formula(text, frame);
}

std::vector<std::string> frame_names(const Frame& frame) {
  std::vector<std::string> names;
  names.reserve(frame.size());
  for (std::uint32_t i = 0; i < frame.size(); ++i) names.emplace_back(frame.name(i));
  return names;
}

std::vector<std::string> mask_names(const Frame& frame, VarMask mask) {
  std::vector<std::string> names;
  for (std::uint32_t i = 0; i < frame.size(); ++i)
    if ((mask >> i) & 1u) names.emplace_back(frame.name(i));
  return names;
}

ordered_json density_values_json(const Density& d) {
  ordered_json values = ordered_json::object();
  for (WorldIndex w = 0; w < d.world_count(); ++w) values[d.frame().world_label(w)] = d[w];
  return values;
}

ordered_json report_json(const AxiomReport& report) {
  ordered_json checks = ordered_json::array();
  for (const AxiomCheck& check : report.checks) {
    ordered_json witnesses = ordered_json::array();
    for (const AxiomWitness& w : check.violations) {
      witnesses.push_back({{"axiom", w.axiom},
                           {"beta", w.beta_hex},
                           {"gamma", w.gamma_hex},
                           {"lhs", w.lhs},
                           {"rhs", w.rhs},
                           {"detail", w.detail}});
    }
    checks.push_back({{"axiom", check.axiom},
                      {"pass", check.pass},
                      {"checked", check.checked},
                      {"violations", check.violation_count},
                      {"witnesses", std::move(witnesses)}});
  }
  return checks;
}

ordered_json grid_json(const JointGrid& grid) {
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < grid.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (std::size_t j = 0; j < grid.cols(); ++j) row.push_back(grid.at(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

void print_grid(std::ostream& out, const JointGrid& grid, const MarginalSpec& a) {
  out << "joint:\n";
  for (std::size_t i = 0; i < grid.rows(); ++i) {
    out << "  " << a.labels[i] << ":";
    for (std::size_t j = 0; j < grid.cols(); ++j) out << ' ' << format_value(grid.at(i, j));
    out << '\n';
  }
}

std::vector<double> parse_marginal_csv(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    const std::string_view token = detail::strip(std::string_view(text).substr(start, comma - start));
    if (token.empty()) throw Error("empty value in " + flag + " '" + text + "'");
    values.push_back(detail::parse_decimal_value(token, 0, -1));
    if (comma == text.size()) break;
    start = comma + 1;
  }
  return values;
}

std::vector<std::string> indexed_labels(std::string_view prefix, std::size_t n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) labels.push_back(std::string(prefix) + std::to_string(i));
  return labels;
}

void emit(std::ostream& out, const std::string& format, const ordered_json& doc,
          const std::string& text) {
  if (format == "json")
    out << doc.dump(2) << '\n';
  else
    out << text;
}

// ---------------------------------------------------------------------------
// Subcommand state and runners.

struct CliState {
  std::string format = "text";

  std::string model_path;
  std::string density_path;
  std::string demo_name;
  std::string evidence_text;
  std::string target;
  std::string engine = "propagate";
  std::string rule_name = "dempster";
  std::string on_text;
  std::string given_text;
  std::string query_text;
  std::string marginal_a;
  std::string marginal_b;
  bool search = false;
  bool all_solutions = false;
  double resolution = 0.01;
  std::uint64_t seed = 0x9e3779b97f4a7c15ull;
  std::size_t samples = 10000;
};

void run_validate(const CliState& cfg, std::ostream& out) {
  const PossibilisticNet net = load_model(cfg.model_path);
  std::size_t priors = 0;
  for (const NodeTable& node : net.nodes())
    if (node.parents.empty()) ++priors;
  const std::size_t conditionals = net.nodes().size() - priors;

  ordered_json doc{{"command", "validate"},
                   {"model", cfg.model_path},
                   {"variables", frame_names(net.frame())},
                   {"priors", priors},
                   {"conditionals", conditionals},
                   {"valid", true}};

  std::ostringstream text;
  text << "model: " << cfg.model_path << '\n' << "variables:";
  for (const std::string& name : frame_names(net.frame())) text << ' ' << name;
  text << '\n'
       << "priors: " << priors << '\n'
       << "conditionals: " << conditionals << '\n'
       << "status: valid\n";
  emit(out, cfg.format, doc, text.str());
}

struct EnginePair {
  QueryResult propagate;
  QueryResult oracle;
  bool has_propagate = false;
  bool has_oracle = false;
};

EnginePair run_engines(const PossibilisticNet& net, const Formula& evidence,
                       std::uint32_t target, const std::string& engine) {
  EnginePair result;
  if (engine == "propagate" || engine == "both") {
    const std::vector<Literal> literals = literal_conjunction(evidence);
    const MarkovTree tree = tree_for_net(net);
    result.propagate = query_target(tree, target, literals);
    result.has_propagate = true;
  }
  if (engine == "oracle" || engine == "both") {
    const Formula target_formula = Formula::primitive(net.frame(), target);
    result.oracle.pi_true = oracle_conditional(net, target_formula, evidence);
    result.oracle.pi_false = oracle_conditional(net, Formula::negation(target_formula), evidence);
    result.has_oracle = true;
  }
  return result;
}

ordered_json pair_json(const QueryResult& r) {
  return ordered_json{{"true", r.pi_true}, {"false", r.pi_false}};
}

double max_difference(const EnginePair& pair) {
  return std::max(std::abs(pair.propagate.pi_true - pair.oracle.pi_true),
                  std::abs(pair.propagate.pi_false - pair.oracle.pi_false));
}

void run_query(const CliState& cfg, std::ostream& out) {
  const PossibilisticNet net = load_model(cfg.model_path);
  const std::uint32_t target = net.frame().require(cfg.target);
  const Formula evidence = parse_evidence(cfg.evidence_text, net.frame());
  const std::string evidence_label = to_string(evidence);
  const std::string target_name = std::string(net.frame().name(target));

  const EnginePair result = run_engines(net, evidence, target, cfg.engine);

  ordered_json results = ordered_json::object();
  if (result.has_propagate) results["propagate"] = pair_json(result.propagate);
  if (result.has_oracle) results["oracle"] = pair_json(result.oracle);
  ordered_json doc{{"command", "query"},
                   {"model", cfg.model_path},
                   {"target", target_name},
                   {"evidence", evidence_label},
                   {"engine", cfg.engine},
                   {"results", std::move(results)}};

  std::ostringstream text;
  text << "model: " << cfg.model_path << '\n'
       << "target: " << target_name << '\n'
       << "evidence: " << evidence_label << '\n';
  const auto line = [&](const char* name, const QueryResult& r) {
    text << name << ": Pi(" << target_name << " | e) = " << format_value(r.pi_true) << ", Pi(!"
         << target_name << " | e) = " << format_value(r.pi_false) << '\n';
  };
  if (result.has_propagate) line("propagate", result.propagate);
  if (result.has_oracle) line("oracle", result.oracle);
  if (result.has_propagate && result.has_oracle) {
    const double diff = max_difference(result);
    doc["max_difference"] = diff;
    text << "max |difference| = " << format_value(diff) << '\n';
  }
  emit(out, cfg.format, doc, text.str());
}

void run_condition(const CliState& cfg, std::ostream& out) {
  const Density prior = load_density(cfg.density_path);
  const Formula on = parse_formula(cfg.on_text, prior.frame());
  const Rule rule = Rule::from_name(cfg.rule_name);
  const Event evidence = models(on);
  const double pi_evidence = measure(prior, evidence);
  const Density cond = confidence_transfer(prior, evidence, rule);

  ordered_json doc{{"command", "condition"},
                   {"density", cfg.density_path},
                   {"rule", rule.name()},
                   {"evidence", to_string(on)},
                   {"evidence_possibility", pi_evidence},
                   {"frame", frame_names(prior.frame())},
                   {"values", density_values_json(cond)}};

  std::ostringstream text;
  text << "# rule: " << rule.name() << '\n'
       << "# evidence: " << to_string(on) << '\n'
       << "# Pi(evidence) = " << format_value(pi_evidence) << '\n'
       << format_density(cond);
  emit(out, cfg.format, doc, text.str());
}

void run_axioms(const CliState& cfg, std::ostream& out) {
  const Density prior = load_density(cfg.density_path);
  const Formula on = parse_formula(cfg.on_text, prior.frame());
  const Rule rule = Rule::from_name(cfg.rule_name);
  const Event evidence = models(on);
  const Density cond = confidence_transfer(prior, evidence, rule);
  const AxiomReport report = check_d_axioms(prior, evidence, cond, cfg.seed, cfg.samples);

  ordered_json doc{{"command", "axioms"},
                   {"density", cfg.density_path},
                   {"rule", rule.name()},
                   {"evidence", to_string(on)},
                   {"all_pass", report.all_pass()},
                   {"checks", report_json(report)}};

  std::ostringstream text;
  text << "rule: " << rule.name() << '\n'
       << "evidence: " << to_string(on) << '\n'
       << format_certificates(report)
       << "result: " << (report.all_pass() ? "all axioms hold" : "VIOLATIONS FOUND") << '\n';
  emit(out, cfg.format, doc, text.str());
}

void run_entails(const CliState& cfg, std::ostream& out) {
  const Density d = load_density(cfg.density_path);
  const Formula given = parse_formula(cfg.given_text, d.frame());
  const Formula query = parse_formula(cfg.query_text, d.frame());
  const Event alpha = models(given);
  const Event gamma = models(query);
  const double co_implication = necessity(d, unite(alpha.complement(), gamma));
  const double co_not_given = necessity(d, alpha.complement());
  const bool entails = rott_entails(d, alpha, gamma);

  ordered_json doc{{"command", "entails"},
                   {"density", cfg.density_path},
                   {"given", to_string(given)},
                   {"query", to_string(query)},
                   {"co_implication", co_implication},
                   {"co_not_given", co_not_given},
                   {"entails", entails}};

  std::ostringstream text;
  text << "given: " << to_string(given) << '\n'
       << "query: " << to_string(query) << '\n'
       << "Co(given -> query) = " << format_value(co_implication) << '\n'
       << "Co(!given) = " << format_value(co_not_given) << '\n'
       << "entails: " << (entails ? "true" : "false") << '\n';
  emit(out, cfg.format, doc, text.str());
}

void print_certificates(std::ostream& text, const AxiomReport& report) {
  text << format_certificates(report);
}

void run_independence(const CliState& cfg, std::ostream& out) {
  const Rule rule = Rule::from_name(cfg.rule_name);
  std::vector<double> a_values = parse_marginal_csv(cfg.marginal_a, "--marginal-a");
  std::vector<double> b_values = parse_marginal_csv(cfg.marginal_b, "--marginal-b");
  std::vector<std::string> a_labels = indexed_labels("a", a_values.size());
  std::vector<std::string> b_labels = indexed_labels("b", b_values.size());
  const MarginalSpec a(std::move(a_labels), std::move(a_values));
  const MarginalSpec b(std::move(b_labels), std::move(b_values));

  ordered_json doc{{"command", "independence"}, {"rule", rule.name()},
                   {"marginal_a", a.values},    {"marginal_b", b.values},
                   {"mode", "product"}};
  std::ostringstream text;
  text << "rule: " << rule.name() << '\n' << "marginal a:";
  for (double v : a.values) text << ' ' << format_value(v);
  text << '\n' << "marginal b:";
  for (double v : b.values) text << ' ' << format_value(v);
  text << '\n';

  if (!cfg.search && !cfg.all_solutions) {
    const JointGrid grid = independence_product(a, b);
    const AxiomReport report = verify_independence(grid, a, b, rule);
    doc["joint"] = grid_json(grid);
    doc["independent"] = report.all_pass();
    doc["checks"] = report_json(report);
    print_grid(text, grid, a);
    print_certificates(text, report);
    text << "result: " << (report.all_pass() ? "independent" : "NOT independent") << '\n';
    emit(out, cfg.format, doc, text.str());
    return;
  }

  doc["mode"] = cfg.all_solutions ? "search-all" : "search";
  doc["resolution"] = cfg.resolution;
  text << "resolution: " << format_value(cfg.resolution) << '\n';

  if (cfg.all_solutions) {
    const std::vector<JointGrid> joints = all_independent_joints(a, b, rule, cfg.resolution);
    doc["count"] = joints.size();
    ordered_json all = ordered_json::array();
    for (const JointGrid& g : joints) all.push_back(grid_json(g));
    doc["joints"] = std::move(all);
    text << "solutions: " << joints.size() << '\n';
    for (const JointGrid& g : joints) print_grid(text, g, a);
    emit(out, cfg.format, doc, text.str());
    return;
  }

  const std::optional<JointGrid> found = search_independent_joint(a, b, rule, cfg.resolution);
  doc["found"] = found.has_value();
  if (found) {
    const AxiomReport report = verify_independence(*found, a, b, rule);
    doc["joint"] = grid_json(*found);
    doc["checks"] = report_json(report);
    text << "search: found\n";
    print_grid(text, *found, a);
    print_certificates(text, report);
  } else {
    text << "search: no independent joint exists on this lattice\n";
  }
  emit(out, cfg.format, doc, text.str());
}

void run_demo(const CliState& cfg, std::ostream& out) {
  const PossibilisticNet net = load_net(alarm_model_text());
  const Frame& frame = net.frame();
  const MarkovTree tree = tree_for_net(net);

  ordered_json doc{{"command", "demo"},
                   {"model", cfg.demo_name},
                   {"variables", frame_names(frame)}};
  std::ostringstream text;
  text << "model: " << cfg.demo_name << " (embedded)\n";

  text << "\n== family potentials ==\n";
  ordered_json potentials = ordered_json::array();
  for (std::size_t i = 0; i < tree.node_count(); ++i) {
    const Potential& g = tree.potential_of(i);
    text << "node " << i << ":\n" << format_potential(g) << '\n';
    potentials.push_back({{"node", i},
                          {"vars", mask_names(frame, g.scope())},
                          {"table", std::vector<double>(g.table().begin(), g.table().end())}});
  }
  doc["potentials"] = std::move(potentials);

  text << "== markov tree ==\n" << format_tree(tree);
  ordered_json nodes = ordered_json::array();
  for (std::size_t i = 0; i < tree.node_count(); ++i)
    nodes.push_back({{"id", i}, {"vars", mask_names(frame, tree.vars_of(i))}});
  ordered_json edges = ordered_json::array();
  for (const auto& [u, v] : tree.edges()) edges.push_back({u, v});
  doc["tree"] = ordered_json{{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};

  ordered_json queries = ordered_json::array();
  for (const std::string& evidence_text : {std::string("W & R"), std::string("!W")}) {
    const Formula evidence = parse_evidence(evidence_text, frame);
    text << "\n== query: evidence " << to_string(evidence) << " ==\n";
    ordered_json rows = ordered_json::array();
    for (std::uint32_t t = 0; t < frame.size(); ++t) {
      const EnginePair pair = run_engines(net, evidence, t, "both");
      const double diff = max_difference(pair);
      text << frame.name(t) << ": propagate=(" << format_value(pair.propagate.pi_true) << ", "
           << format_value(pair.propagate.pi_false) << ") oracle=("
           << format_value(pair.oracle.pi_true) << ", " << format_value(pair.oracle.pi_false)
           << ") |diff|=" << format_value(diff) << '\n';
      rows.push_back({{"target", std::string(frame.name(t))},
                      {"propagate", pair_json(pair.propagate)},
                      {"oracle", pair_json(pair.oracle)},
                      {"difference", diff}});
    }
    queries.push_back({{"evidence", to_string(evidence)}, {"results", std::move(rows)}});
  }
  doc["queries"] = std::move(queries);
  emit(out, cfg.format, doc, text.str());
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"possibilistic inference: conditioning, axioms, and tree propagation"};
  app.require_subcommand(1);
  CliState cfg;

  const auto add_format = [&cfg](CLI::App* target) {
    target->add_option("--format", cfg.format, "output format")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
  };
  add_format(&app);

  CLI::App* validate = app.add_subcommand("validate", "check a model file and report its shape");
  validate->add_option("model", cfg.model_path, "model file ('alarm' = embedded example)")
      ->required();
  add_format(validate);

  CLI::App* query = app.add_subcommand("query", "conditional possibility of a target variable");
  query->add_option("model", cfg.model_path, "model file ('alarm' = embedded example)")
      ->required();
  query->add_option("--target", cfg.target, "target variable")->required();
  query->add_option("--evidence", cfg.evidence_text,
                    "evidence formula (default: none; propagate needs a literal conjunction)");
  query->add_option("--engine", cfg.engine, "inference engine")
      ->check(CLI::IsMember({"propagate", "oracle", "both"}))
      ->capture_default_str();
  add_format(query);

  CLI::App* condition = app.add_subcommand("condition", "condition a density on a formula");
  condition->add_option("density", cfg.density_path, "density file")->required();
  condition->add_option("--on", cfg.on_text, "evidence formula")->required();
  condition->add_option("--rule", cfg.rule_name, "confidence-transfer rule")
      ->check(CLI::IsMember({"dempster", "minimum", "yager"}))
      ->capture_default_str();
  add_format(condition);

  CLI::App* axioms = app.add_subcommand("axioms", "check the conditioning axioms D1-D3");
  axioms->add_option("density", cfg.density_path, "density file")->required();
  axioms->add_option("--on", cfg.on_text, "evidence formula")->required();
  axioms->add_option("--rule", cfg.rule_name, "confidence-transfer rule")
      ->check(CLI::IsMember({"dempster", "minimum", "yager"}))
      ->capture_default_str();
  axioms->add_option("--seed", cfg.seed, "seed for sampled event pairs (frames > 3 variables)")
      ->capture_default_str();
  axioms->add_option("--samples", cfg.samples, "sample count for large frames")
      ->capture_default_str();
  add_format(axioms);

  CLI::App* entails = app.add_subcommand("entails", "entailment under zero-confidence rejection");
  entails->add_option("density", cfg.density_path, "density file")->required();
  entails->add_option("--given", cfg.given_text, "antecedent formula")->required();
  entails->add_option("--query", cfg.query_text, "consequent formula")->required();
  add_format(entails);

  CLI::App* independence =
      app.add_subcommand("independence", "belief independence of two marginals");
  independence->add_option("--rule", cfg.rule_name, "confidence-transfer rule")
      ->check(CLI::IsMember({"dempster", "minimum", "yager"}))
      ->capture_default_str();
  independence->add_option("--marginal-a", cfg.marginal_a, "comma-separated marginal values")
      ->required();
  independence->add_option("--marginal-b", cfg.marginal_b, "comma-separated marginal values")
      ->required();
  independence->add_flag("--search", cfg.search,
                         "search the value lattice for an independent 2x2 joint");
  independence->add_flag("--all", cfg.all_solutions, "list every solution (implies --search)");
  independence->add_option("--resolution", cfg.resolution, "lattice step (must divide 1 evenly)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_format(independence);

  CLI::App* demo = app.add_subcommand("demo", "walk through the embedded example model");
  demo->add_option("example", cfg.demo_name, "example name")
      ->required()
      ->check(CLI::IsMember({"alarm"}));
  add_format(demo);

  std::vector<std::string> argv(args);
  try {
    // CLI11 consumes the vector back to front.
    std::reverse(argv.begin(), argv.end());
    app.parse(std::move(argv));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    std::ostringstream buffer;
    if (*validate)
      run_validate(cfg, buffer);
    else if (*query)
      run_query(cfg, buffer);
    else if (*condition)
      run_condition(cfg, buffer);
    else if (*axioms)
      run_axioms(cfg, buffer);
    else if (*entails)
      run_entails(cfg, buffer);
    else if (*independence)
      run_independence(cfg, buffer);
    else if (*demo)
      run_demo(cfg, buffer);
    out << buffer.str();
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace poscop
