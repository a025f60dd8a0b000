#include <array>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "poscop/error.hpp"
#include "poscop/logic.hpp"
#include "poscop/network.hpp"

using namespace poscop;

#ifndef POSCOP_SOURCE_DIR
#define POSCOP_SOURCE_DIR "."
#endif

namespace {
std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(bool(in), "cannot open " << path);
  std::ostringstream body;
  body << in.rdbuf();
  return body.str();
}
}  // namespace

TEST_SUITE("network") {
  TEST_CASE("the bundled model file matches the embedded text byte for byte") {
    const std::string bundled = slurp(std::string(POSCOP_SOURCE_DIR) + "/data/alarm");
    CHECK(bundled == std::string(alarm_model_text()));
  }

  TEST_CASE("the embedded model parses to the expected tables bit-exactly") {
    const PossibilisticNet net = load_net(alarm_model_text());
    const Frame& f = net.frame();
    REQUIRE(f.size() == 6);
    CHECK(f.name(0) == "B");
    CHECK(f.name(5) == "G");

    const NodeTable& b = net.node_for(f.require("B"));
    CHECK(b.parents.empty());
    REQUIRE(b.rows.size() == 1);
    CHECK(b.rows[0] == std::array<double, 2>{1.0, 1.0});

    const NodeTable& a = net.node_for(f.require("A"));
    REQUIRE(a.parents.size() == 2);
    CHECK(a.parents[0] == f.require("B"));
    CHECK(a.parents[1] == f.require("E"));
    REQUIRE(a.rows.size() == 4);
    CHECK(a.rows[0] == std::array<double, 2>{1.0, 0.05});  // B=T E=T
    CHECK(a.rows[1] == std::array<double, 2>{1.0, 0.4});   // B=T E=F
    CHECK(a.rows[2] == std::array<double, 2>{1.0, 0.85});  // B=F E=T
    CHECK(a.rows[3] == std::array<double, 2>{0.05, 1.0});  // B=F E=F

    const NodeTable& r = net.node_for(f.require("R"));
    REQUIRE(r.rows.size() == 2);
    CHECK(r.rows[0] == std::array<double, 2>{1.0, 0.05});
    CHECK(r.rows[1] == std::array<double, 2>{0.0, 1.0});

    const NodeTable& w = net.node_for(f.require("W"));
    CHECK(w.rows[0] == std::array<double, 2>{1.0, 0.8});
    CHECK(w.rows[1] == std::array<double, 2>{1.0, 1.0});
  }

  TEST_CASE("format and reload reproduce the same net") {
    const PossibilisticNet net = load_net(alarm_model_text());
    const PossibilisticNet again = load_net(format_net(net));
    CHECK(again.frame() == net.frame());
    REQUIRE(again.nodes().size() == net.nodes().size());
    for (std::size_t i = 0; i < net.nodes().size(); ++i) {
      CHECK(again.nodes()[i].variable == net.nodes()[i].variable);
      CHECK(again.nodes()[i].parents == net.nodes()[i].parents);
      CHECK(again.nodes()[i].rows == net.nodes()[i].rows);
    }
  }

  TEST_CASE("joint density of the embedded model: spot worlds") {
    const PossibilisticNet net = load_net(alarm_model_text());
    const Density joint = joint_density(net);
    const Frame& f = net.frame();
    REQUIRE(joint.world_count() == 64);
    // All-true world: every factor is 1.
    CHECK(joint[0] == 1.0);
    // B=T E=T A=F R=T W=T G=T: the only non-1 factor is A|TT = 0.05, but
    // W|A=F and G|A=F are 1 and R|E=T is 1.
    WorldIndex w = 0;
    const auto set_false = [&](const char* name) {
      w |= 1u << (5 - f.require(name));
    };
    set_false("A");
    CHECK(joint[w] == 0.05);
    // E=F and R=T forces factor 0.
    w = 0;
    set_false("E");
    CHECK(joint[w] == 0.0);
  }

  TEST_CASE("oracle conditionals reproduce the published spot values") {
    const PossibilisticNet net = load_net(alarm_model_text());
    const Frame& f = net.frame();
    const Formula e = parse_formula("E", f);
    const Formula r = parse_formula("R", f);
    CHECK(oracle_conditional(net, e, r) == 1.0);
    CHECK(oracle_conditional(net, Formula::negation(e), r) == 0.0);
    const Formula a = parse_formula("A", f);
    const Formula not_w = parse_formula("!W", f);
    CHECK(oracle_conditional(net, a, not_w) == 0.8);
    CHECK(oracle_conditional(net, Formula::negation(a), not_w) == 1.0);
  }

  TEST_CASE("conditional_from_joint rejects impossible evidence") {
    const PossibilisticNet net = load_net(alarm_model_text());
    const Density joint = joint_density(net);
    const Frame& f = net.frame();
    const Event none = Event::none(f);
    CHECK_THROWS_AS(conditional_from_joint(joint, Event::all(f), none),
                    ImpossibleEvidenceError);
    // R & !E has possibility zero in this model.
    CHECK_THROWS_AS(oracle_conditional(net, parse_formula("B", f),
                                       parse_formula("R & !E", f)),
                    ImpossibleEvidenceError);
  }

  TEST_CASE("parser accepts priors and conditionals in any declaration order") {
    const PossibilisticNet net = load_net(
        "vars: X Y\n"
        "cond Y | X:\n"
        "  T : 1 0.5\n"
        "  F : 0.25 1\n"
        "prior X: 1 0.75\n");
    CHECK(net.nodes().size() == 2);
    CHECK(net.nodes()[0].variable == 1);  // declaration order preserved
    const Density joint = joint_density(net);
    CHECK(joint[0] == 1.0);           // X=T Y=T
    CHECK(joint[1] == 0.5);           // X=T Y=F
    CHECK(joint[2] == 0.75 * 0.25);   // X=F Y=T
    CHECK(joint[3] == 0.75);          // X=F Y=F
  }

  TEST_CASE("parser and validator reject malformed models") {
    // No vars line first.
    CHECK_THROWS_AS(load_net("prior X: 1 1\n"), ParseError);
    // Unknown variable.
    CHECK_THROWS_AS(load_net("vars: X\nprior Y: 1 1\n"), UnknownPrimitiveError);
    // Duplicate table (diagnosed at the offending line).
    CHECK_THROWS_AS(load_net("vars: X\nprior X: 1 1\nprior X: 1 0\n"), ParseError);
    // Missing table.
    CHECK_THROWS_AS(load_net("vars: X Y\nprior X: 1 1\n"), ModelError);
    // Row maximum below 1.
    CHECK_THROWS_AS(load_net("vars: X\nprior X: 0.5 0.5\n"), ParseError);
    // Too many fraction digits.
    CHECK_THROWS_AS(load_net("vars: X\nprior X: 1 0.1234567\n"), ParseError);
    // Value out of range.
    CHECK_THROWS_AS(load_net("vars: X\nprior X: 1 1.5\n"), ParseError);
    // Wrong row count.
    CHECK_THROWS_AS(load_net("vars: X Y\nprior X: 1 1\ncond Y | X:\n  T : 1 1\n"), ParseError);
    // Duplicate row.
    CHECK_THROWS_AS(
        load_net("vars: X Y\nprior X: 1 1\ncond Y | X:\n  T : 1 1\n  T : 1 0\n"), ParseError);
    // Row for the wrong parent count.
    CHECK_THROWS_AS(
        load_net("vars: X Y\nprior X: 1 1\ncond Y | X:\n  T T : 1 1\n  F F : 1 1\n"),
        ParseError);
    // A keyword line while a block is still open.
    CHECK_THROWS_AS(load_net("vars: X Y\ncond Y | X:\nprior X: 1 1\n"), ParseError);
    // Self-parent.
    CHECK_THROWS_AS(load_net("vars: X\ncond X | X:\n  T : 1 1\n  F : 1 1\n"), ModelError);
    // Cycle.
    CHECK_THROWS_AS(load_net("vars: X Y\n"
                             "cond X | Y:\n  T : 1 1\n  F : 1 1\n"
                             "cond Y | X:\n  T : 1 1\n  F : 1 1\n"),
                    ModelError);
  }

  TEST_CASE("net construction validates tables directly") {
    const Frame f({"X", "Y"});
    // Row maximum must be 1.
    CHECK_THROWS_AS(PossibilisticNet(f, {{0, {}, {{0.5, 0.5}}}, {1, {}, {{1.0, 1.0}}}}),
                    ModelError);
    // Wrong number of rows for one parent.
    CHECK_THROWS_AS(PossibilisticNet(f, {{0, {}, {{1.0, 1.0}}}, {1, {0}, {{1.0, 1.0}}}}),
                    ModelError);
    // Parent out of range.
    CHECK_THROWS_AS(
        PossibilisticNet(f, {{0, {}, {{1.0, 1.0}}}, {1, {7}, {{1.0, 1.0}, {1.0, 1.0}}}}),
        ModelError);
  }
}
