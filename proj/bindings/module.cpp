// Python bindings for the poscop core: frames, densities, conditioning,
// axiom checks, causal nets, and tree propagation.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "poscop/axioms.hpp"
#include "poscop/cli.hpp"
#include "poscop/conditioning.hpp"
#include "poscop/error.hpp"
#include "poscop/logic.hpp"
#include "poscop/network.hpp"
#include "poscop/possibility.hpp"
#include "poscop/propagation.hpp"

namespace py = pybind11;
using namespace poscop;

namespace {

template <class T>
std::vector<T> to_vector(std::span<const T> view) {
  return std::vector<T>(view.begin(), view.end());
}

}  // namespace

PYBIND11_MODULE(_poscop, m) {
  m.doc() = "Possibilistic inference: conditioning, axioms, and tree propagation";
  m.attr("__version__") = "0.1.0";

  // Exceptions.  Register base classes first: translators run newest-first,
  // so derived classes must come after their base to win the dispatch.
  auto error = py::register_exception<Error>(m, "PoscopError");
  auto parse_error = py::register_exception<ParseError>(m, "ParseError", error);
  py::register_exception<UnknownPrimitiveError>(m, "UnknownPrimitiveError", parse_error);
  py::register_exception<FrameMismatchError>(m, "FrameMismatchError", error);
  py::register_exception<CapacityError>(m, "CapacityError", error);
  py::register_exception<InvalidDensityError>(m, "InvalidDensityError", error);
  py::register_exception<ZeroPossibilityError>(m, "ZeroPossibilityError", error);
  auto impossible = py::register_exception<ImpossibleEvidenceError>(m, "ImpossibleEvidenceError", error);
  py::register_exception<NotCombinableError>(m, "NotCombinableError", impossible);
  py::register_exception<RuleContractError>(m, "RuleContractError", error);
  py::register_exception<ModelError>(m, "ModelError", error);
  py::register_exception<DimensionMismatchError>(m, "DimensionMismatchError", error);

  // Logic.
  py::class_<Frame>(m, "Frame")
      .def(py::init<std::vector<std::string>>(), py::arg("primitives"))
      .def("size", &Frame::size)
      .def("world_count", &Frame::world_count)
      .def("primitives", &Frame::primitives)
      .def("name", &Frame::name, py::arg("primitive"))
      .def("index_of", [](const Frame& f, const std::string& n) { return f.index_of(n); },
           py::arg("name"))
      .def("require", [](const Frame& f, const std::string& n) { return f.require(n); },
           py::arg("name"))
      .def("literal_of", &Frame::literal_of, py::arg("world"), py::arg("primitive"))
      .def("world_label", &Frame::world_label, py::arg("world"))
      .def("__eq__", [](const Frame& a, const Frame& b) { return a == b; })
      .def("__len__", &Frame::size)
      .def("__repr__", [](const Frame& f) {
        std::string r = "Frame([";
        for (std::uint32_t i = 0; i < f.size(); ++i) {
          if (i) r += ", ";
          r += "'" + f.name(i) + "'";
        }
        return r + "])";
      });

  py::class_<World>(m, "World")
      .def(py::init<Frame, WorldIndex>(), py::arg("frame"), py::arg("index"))
      .def("frame", &World::frame)
      .def("index", &World::index)
      .def("value", [](const World& w, const std::string& n) { return w.value(n); },
           py::arg("name"))
      .def("label", &World::label);

  py::class_<Event>(m, "Event")
      .def_static("none", &Event::none, py::arg("frame"))
      .def_static("all", &Event::all, py::arg("frame"))
      .def_static("of",
                  [](Frame f, const std::vector<WorldIndex>& worlds) {
                    return Event::of(std::move(f), std::span<const WorldIndex>(worlds));
                  },
                  py::arg("frame"), py::arg("worlds"))
      .def_static("single", &Event::single, py::arg("frame"), py::arg("world"))
      .def_static("from_mask", &Event::from_mask, py::arg("frame"), py::arg("mask"))
      .def_static("from_hex",
                  [](Frame f, const std::string& hex) { return Event::from_hex(std::move(f), hex); },
                  py::arg("frame"), py::arg("hex"))
      .def("frame", &Event::frame)
      .def("contains", &Event::contains, py::arg("world"))
      .def("count", &Event::count)
      .def("empty", &Event::empty)
      .def("worlds", &Event::worlds)
      .def("to_hex", &Event::to_hex)
      .def("complement", &Event::complement)
      .def("__eq__", [](const Event& a, const Event& b) { return a == b; })
      .def("__repr__", [](const Event& e) { return "Event(0x" + e.to_hex() + ")"; });

  m.def("intersect", &intersect, py::arg("a"), py::arg("b"));
  m.def("unite", &unite, py::arg("a"), py::arg("b"));

  py::class_<Formula>(m, "Formula")
      .def_static("constant", &Formula::constant, py::arg("frame"), py::arg("value"))
      .def_static("primitive",
                  [](Frame f, const std::string& name) {
                    return Formula::primitive(std::move(f), name);
                  },
                  py::arg("frame"), py::arg("name"))
      .def_static("negation", &Formula::negation, py::arg("f"))
      .def_static("conjunction", &Formula::conjunction, py::arg("a"), py::arg("b"))
      .def_static("disjunction", &Formula::disjunction, py::arg("a"), py::arg("b"))
      .def_static("implication", &Formula::implication, py::arg("a"), py::arg("b"))
      .def("frame", &Formula::frame)
      .def("__eq__", [](const Formula& a, const Formula& b) { return a == b; })
      .def("__str__", [](const Formula& f) { return to_string(f); })
      .def("__repr__", [](const Formula& f) { return "Formula('" + to_string(f) + "')"; });

  m.def("parse_formula",
        [](const std::string& text, const Frame& f) { return parse_formula(text, f); },
        py::arg("text"), py::arg("frame"));
  m.def("to_string", [](const Formula& f) { return to_string(f); }, py::arg("formula"));
  m.def("evaluate", &evaluate, py::arg("formula"), py::arg("world"));
  m.def("models", &models, py::arg("formula"));

  // Possibility.
  py::class_<Density>(m, "Density")
      .def(py::init<Frame, std::vector<double>>(), py::arg("frame"), py::arg("values"))
      .def_static("normalized", &Density::normalized, py::arg("frame"), py::arg("values"))
      .def_static("unchecked", &Density::unchecked, py::arg("frame"), py::arg("values"))
      .def("frame", &Density::frame)
      .def("values", [](const Density& d) { return to_vector(d.values()); })
      .def("world_count", &Density::world_count)
      .def("__getitem__",
           [](const Density& d, WorldIndex w) {
             if (w >= d.world_count()) throw py::index_error();
             return d[w];
           })
      .def("__len__", &Density::world_count)
      .def("__eq__", [](const Density& a, const Density& b) { return a == b; });

  m.def("measure", &measure, py::arg("density"), py::arg("event"));
  m.def("necessity", &necessity, py::arg("density"), py::arg("event"));

  py::class_<MValueFunction>(m, "MValueFunction")
      .def(py::init<std::vector<Event>, std::vector<double>>(), py::arg("focal_chain"),
           py::arg("masses"))
      .def("focal_chain", &MValueFunction::focal_chain)
      .def("masses", &MValueFunction::masses)
      .def("size", &MValueFunction::size)
      .def("belief", &MValueFunction::belief, py::arg("event"));

  m.def("to_mvalue", &to_mvalue, py::arg("density"));
  m.def("from_mvalue", &from_mvalue, py::arg("mvalue"));

  py::enum_<Ordering>(m, "Ordering")
      .value("Less", Ordering::Less)
      .value("Equal", Ordering::Equal)
      .value("Greater", Ordering::Greater);

  m.def("compare_expectation", &compare_expectation, py::arg("density"), py::arg("a"),
        py::arg("b"));

  py::class_<ExpectationViolation>(m, "ExpectationViolation")
      .def_readonly("axiom", &ExpectationViolation::axiom)
      .def_readonly("sample_ids", &ExpectationViolation::sample_ids)
      .def_readonly("detail", &ExpectationViolation::detail);

  py::class_<ExpectationReport>(m, "ExpectationReport")
      .def_readonly("e1_checked", &ExpectationReport::e1_checked)
      .def_readonly("e2_checked", &ExpectationReport::e2_checked)
      .def_readonly("e3_checked", &ExpectationReport::e3_checked)
      .def_readonly("e4_checked", &ExpectationReport::e4_checked)
      .def_readonly("violations", &ExpectationReport::violations)
      .def("ok", &ExpectationReport::ok);

  m.def("check_expectation_axioms",
        [](const Density& d, const std::vector<Formula>& sample) {
          return check_expectation_axioms(d, sample);
        },
        py::arg("density"), py::arg("sample"));

  m.def("parse_density", [](const std::string& text) { return parse_density(text); },
        py::arg("text"));
  m.def("format_density", &format_density, py::arg("density"));
  m.def("format_value", &format_value, py::arg("value"));

  // Conditioning.
  py::class_<Strata>(m, "Strata")
      .def_readonly("blocks", &Strata::blocks)
      .def_readonly("levels", &Strata::levels)
      .def("size", &Strata::size)
      .def("evidence_possibility", &Strata::evidence_possibility)
      .def("normalization_constant", &Strata::normalization_constant);

  py::class_<Rule>(m, "Rule")
      .def_static("dempster", &Rule::dempster)
      .def_static("minimum", &Rule::minimum)
      .def_static("yager", &Rule::yager)
      .def_static("from_name", [](const std::string& n) { return Rule::from_name(n); },
                  py::arg("name"))
      .def_static("custom",
                  [](std::string name, py::function strategy) {
                    return Rule::custom(
                        std::move(name),
                        [strategy](std::span<const double> levels, double constant) {
                          const std::vector<double> copy(levels.begin(), levels.end());
                          return strategy(copy, constant).cast<std::vector<double>>();
                        });
                  },
                  py::arg("name"), py::arg("strategy"))
      .def("name", &Rule::name)
      .def("coefficients", &Rule::coefficients, py::arg("strata"));

  m.def("stratify", &stratify, py::arg("density"), py::arg("evidence"));
  m.def("confidence_transfer", &confidence_transfer, py::arg("density"), py::arg("evidence"),
        py::arg("rule"));
  m.def("conditional_measure", &conditional_measure, py::arg("density"), py::arg("target"),
        py::arg("evidence"), py::arg("rule"));
  m.def("conditional_necessity", &conditional_necessity, py::arg("density"), py::arg("target"),
        py::arg("evidence"), py::arg("rule"));

  // Axioms.
  py::class_<AxiomWitness>(m, "AxiomWitness")
      .def_readonly("axiom", &AxiomWitness::axiom)
      .def_readonly("beta_hex", &AxiomWitness::beta_hex)
      .def_readonly("gamma_hex", &AxiomWitness::gamma_hex)
      .def_readonly("lhs", &AxiomWitness::lhs)
      .def_readonly("rhs", &AxiomWitness::rhs)
      .def_readonly("detail", &AxiomWitness::detail);

  py::class_<AxiomCheck>(m, "AxiomCheck")
      .def_readonly("axiom", &AxiomCheck::axiom)
      .def_readonly("pass_", &AxiomCheck::pass)
      .def_readonly("checked", &AxiomCheck::checked)
      .def_readonly("violation_count", &AxiomCheck::violation_count)
      .def_readonly("violations", &AxiomCheck::violations);

  py::class_<AxiomReport>(m, "AxiomReport")
      .def_readonly("checks", &AxiomReport::checks)
      .def("all_pass", &AxiomReport::all_pass);

  m.def("format_certificates", &format_certificates, py::arg("report"));
  m.def("check_d_axioms", &check_d_axioms, py::arg("prior"), py::arg("alpha"), py::arg("cond"),
        py::arg("seed") = std::uint64_t{0x9e3779b97f4a7c15ull}, py::arg("samples") = 10000);
  m.def("rott_entails",
        [](const Density& d, const Event& a, const Event& g) { return rott_entails(d, a, g); },
        py::arg("density"), py::arg("alpha"), py::arg("gamma"));
  m.def("rott_entails",
        [](const Density& d, const Formula& a, const Formula& g) { return rott_entails(d, a, g); },
        py::arg("density"), py::arg("alpha"), py::arg("gamma"));
  m.def("recover_coefficients", &recover_coefficients, py::arg("prior"), py::arg("alpha"),
        py::arg("cond"));

  py::class_<MarginalSpec>(m, "MarginalSpec")
      .def(py::init<std::vector<double>>(), py::arg("values"))
      .def(py::init<std::vector<std::string>, std::vector<double>>(), py::arg("labels"),
           py::arg("values"))
      .def_readonly("labels", &MarginalSpec::labels)
      .def_readonly("values", &MarginalSpec::values)
      .def("size", &MarginalSpec::size);

  py::class_<JointGrid>(m, "JointGrid")
      .def(py::init<std::size_t, std::size_t, std::vector<double>>(), py::arg("rows"),
           py::arg("cols"), py::arg("cells"))
      .def("rows", &JointGrid::rows)
      .def("cols", &JointGrid::cols)
      .def("at", &JointGrid::at, py::arg("row"), py::arg("col"))
      .def("cells", [](const JointGrid& g) { return to_vector(g.cells()); })
      .def("__eq__", [](const JointGrid& a, const JointGrid& b) { return a == b; });

  m.def("independence_product", &independence_product, py::arg("a"), py::arg("b"));
  m.def("verify_independence", &verify_independence, py::arg("grid"), py::arg("a"), py::arg("b"),
        py::arg("rule"));
  m.def("search_independent_joint", &search_independent_joint, py::arg("a"), py::arg("b"),
        py::arg("rule"), py::arg("resolution"));
  m.def("all_independent_joints", &all_independent_joints, py::arg("a"), py::arg("b"),
        py::arg("rule"), py::arg("resolution"));

  // Networks.
  py::class_<NodeTable>(m, "NodeTable")
      .def(py::init<>())
      .def_readwrite("variable", &NodeTable::variable)
      .def_readwrite("parents", &NodeTable::parents)
      .def_readwrite("rows", &NodeTable::rows);

  py::class_<PossibilisticNet>(m, "PossibilisticNet")
      .def(py::init<Frame, std::vector<NodeTable>>(), py::arg("frame"), py::arg("nodes"))
      .def("frame", &PossibilisticNet::frame)
      .def("nodes", &PossibilisticNet::nodes)
      .def("node_for", &PossibilisticNet::node_for, py::arg("variable"));

  m.def("load_net", [](const std::string& text) { return load_net(text); }, py::arg("text"));
  m.def("format_net", &format_net, py::arg("net"));
  m.def("joint_density", &joint_density, py::arg("net"));
  m.def("conditional_from_joint", &conditional_from_joint, py::arg("joint"), py::arg("target"),
        py::arg("evidence"));
  m.def("oracle_conditional", &oracle_conditional, py::arg("net"), py::arg("target"),
        py::arg("evidence"));
  m.def("alarm_model_text", [] { return std::string(alarm_model_text()); });

  // Propagation.
  py::class_<Literal>(m, "Literal")
      .def(py::init([](std::size_t variable, bool value) {
             return Literal{variable, value};
           }),
           py::arg("variable"), py::arg("value") = true)
      .def_readwrite("variable", &Literal::variable)
      .def_readwrite("value", &Literal::value);

  py::class_<Potential>(m, "Potential")
      .def(py::init<Frame, VarMask, std::vector<double>>(), py::arg("frame"), py::arg("scope"),
           py::arg("table"))
      .def_static("ones", &Potential::ones, py::arg("frame"), py::arg("scope"))
      .def_static("observation", &Potential::observation, py::arg("frame"), py::arg("literal"))
      .def("frame", &Potential::frame)
      .def("scope", &Potential::scope)
      .def("table", [](const Potential& g) { return to_vector(g.table()); })
      .def("at", &Potential::at, py::arg("config"))
      .def("size", &Potential::size)
      .def("variables", &Potential::variables)
      .def("__eq__", [](const Potential& a, const Potential& b) { return a == b; });

  m.def("combine", &combine, py::arg("g"), py::arg("k"));
  m.def("marginalize", &marginalize, py::arg("g"), py::arg("target"));
  m.def("format_potential", &format_potential, py::arg("potential"), py::arg("precision") = 2);

  py::class_<MarkovTree>(m, "MarkovTree")
      .def(py::init<Frame, std::vector<VarMask>, std::vector<Potential>,
                    std::vector<std::pair<std::size_t, std::size_t>>>(),
           py::arg("frame"), py::arg("node_vars"), py::arg("potentials"), py::arg("edges"))
      .def("frame", &MarkovTree::frame)
      .def("node_count", &MarkovTree::node_count)
      .def("vars_of", &MarkovTree::vars_of, py::arg("id"))
      .def("potential_of", &MarkovTree::potential_of, py::arg("id"))
      .def("edges", &MarkovTree::edges)
      .def("neighbors", &MarkovTree::neighbors, py::arg("id"))
      .def("with_potential", &MarkovTree::with_potential, py::arg("id"), py::arg("potential"));

  m.def("check_markov_property", &check_markov_property, py::arg("tree"));
  m.def("build_markov_tree",
        [](const Frame& f, const std::vector<VarMask>& families) {
          return build_markov_tree(f, families);
        },
        py::arg("frame"), py::arg("families"));
  m.def("tree_for_net", &tree_for_net, py::arg("net"));
  m.def("attach_evidence",
        [](const MarkovTree& tree, const std::vector<Literal>& evidence) {
          return attach_evidence(tree, evidence);
        },
        py::arg("tree"), py::arg("evidence"));
  m.def("collect", &collect, py::arg("tree"), py::arg("root"));
  m.def("format_tree", &format_tree, py::arg("tree"));

  py::class_<QueryResult>(m, "QueryResult")
      .def_readonly("pi_true", &QueryResult::pi_true)
      .def_readonly("pi_false", &QueryResult::pi_false)
      .def("__repr__", [](const QueryResult& q) {
        return "QueryResult(pi_true=" + format_value(q.pi_true) +
               ", pi_false=" + format_value(q.pi_false) + ")";
      });

  m.def("query_target",
        [](const MarkovTree& tree, std::size_t target, const std::vector<Literal>& evidence) {
          return query_target(tree, target, evidence);
        },
        py::arg("tree"), py::arg("target"), py::arg("evidence"));

  // CLI entry point, for driving the command surface from Python.
  m.def("run_cli",
        [](const std::vector<std::string>& args) {
          std::ostringstream out, err;
          const int code = run_cli(args, out, err);
          return std::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
