#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "generators.hpp"
#include "poscop/error.hpp"
#include "poscop/network.hpp"
#include "poscop/propagation.hpp"

using namespace poscop;
namespace ts = poscop::testsupport;

namespace {
bool near(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

bool check_pair(const QueryResult& got, double pi_true, double pi_false) {
  return near(got.pi_true, pi_true) && near(got.pi_false, pi_false);
}
}  // namespace

TEST_SUITE("propagation") {
  TEST_CASE("potential construction and validation") {
    const Frame f({"A", "B", "C"});
    const Potential g(f, 0b011, {1.0, 0.5, 0.25, 0.125});
    CHECK(g.scope() == 0b011u);
    CHECK(g.size() == 4);
    CHECK(g.variables() == std::vector<std::size_t>{0, 1});
    CHECK(g.at(1) == 0.5);

    CHECK_THROWS_AS(Potential(f, 0b1000, {1.0, 0.0}), ModelError);  // var beyond frame
    CHECK_THROWS_AS(Potential(f, 0b011, {1.0, 0.5}), DimensionMismatchError);
    CHECK_THROWS_AS(Potential(f, 0b001, {1.0, 1.5}), InvalidDensityError);

    const Potential ones = Potential::ones(f, 0b101);
    CHECK(ones.size() == 4);
    for (double v : ones.table()) CHECK(v == 1.0);

    const Potential obs_t = Potential::observation(f, {1, true});
    CHECK(obs_t.scope() == 0b010u);
    CHECK(obs_t.at(0) == 1.0);
    CHECK(obs_t.at(1) == 0.0);
    const Potential obs_f = Potential::observation(f, {1, false});
    CHECK(obs_f.at(0) == 0.0);
    CHECK(obs_f.at(1) == 1.0);
  }

  TEST_CASE("combine multiplies on the union scope") {
    const Frame f({"A", "B", "C"});
    const Potential g1(f, 0b011, {1.0, 0.5, 0.25, 0.125});    // over A,B
    const Potential g2(f, 0b110, {1.0, 0.75, 0.0, 1.0});      // over B,C
    const Potential both = combine(g1, g2);
    CHECK(both.scope() == 0b111u);
    REQUIRE(both.size() == 8);
    const std::vector<double> expected{1.0, 0.75, 0.0, 0.5, 0.25, 0.1875, 0.0, 0.125};
    for (std::size_t c = 0; c < 8; ++c) CHECK(both.at(c) == expected[c]);
  }

  TEST_CASE("combine with a same-scope potential is pointwise") {
    const Frame f({"A"});
    const Potential g(f, 0b1, {1.0, 0.5});
    const Potential h(f, 0b1, {0.25, 1.0});
    const Potential gh = combine(g, h);
    CHECK(gh.at(0) == 0.25);
    CHECK(gh.at(1) == 0.5);
  }

  TEST_CASE("an all-zero product is not combinable") {
    const Frame f({"A"});
    const Potential g(f, 0b1, {1.0, 0.0});
    const Potential h(f, 0b1, {0.0, 1.0});
    CHECK_THROWS_AS(combine(g, h), NotCombinableError);
  }

  TEST_CASE("marginalize is max-projection") {
    const Frame f({"A", "B", "C"});
    const Potential g(f, 0b111, {1.0, 0.75, 0.0, 0.5, 0.25, 0.1875, 0.0, 0.125});
    const Potential to_b = marginalize(g, 0b010);
    REQUIRE(to_b.size() == 2);
    CHECK(to_b.at(0) == 1.0);
    CHECK(to_b.at(1) == 0.5);

    const Potential scalar = marginalize(g, 0);
    REQUIRE(scalar.size() == 1);
    CHECK(scalar.at(0) == 1.0);

    CHECK(marginalize(g, 0b111) == g);  // identity
    CHECK_THROWS_AS(marginalize(to_b, 0b001), DimensionMismatchError);  // not a subset
  }

  TEST_CASE("format_potential renders aligned truth tables") {
    const Frame f({"A", "B"});
    const Potential g(f, 0b11, {1.0, 0.5, 0.25, 0.125});
    CHECK(format_potential(g) ==
          "A B | value\n"
          "T T | 1.00\n"
          "T F | 0.50\n"
          "F T | 0.25\n"
          "F F | 0.12\n");
  }

  TEST_CASE("markov tree construction validates tree-ness") {
    const Frame f({"A", "B"});
    const auto ones = [&](VarMask m) { return Potential::ones(f, m); };
    // One node, no edges: fine.
    CHECK(MarkovTree(f, {0b01}, {ones(0b01)}, {}).node_count() == 1);
    // Wrong edge count.
    CHECK_THROWS_AS(MarkovTree(f, {0b01, 0b10}, {ones(0b01), ones(0b10)}, {}), ModelError);
    // Self loop.
    CHECK_THROWS_AS(MarkovTree(f, {0b01, 0b10}, {ones(0b01), ones(0b10)}, {{0, 0}}),
                    ModelError);
    // Disconnected two-component graph with an extra edge inside one part.
    CHECK_THROWS_AS(MarkovTree(f, {0b01, 0b01, 0b10}, {ones(0b01), ones(0b01), ones(0b10)},
                               {{0, 1}, {0, 1}}),
                    ModelError);
    // Potential scope must fit the node.
    CHECK_THROWS_AS(MarkovTree(f, {0b01}, {ones(0b11)}, {}), ModelError);
  }

  TEST_CASE("the markov property detects split variables") {
    const Frame f({"A", "B"});
    const auto ones = [&](VarMask m) { return Potential::ones(f, m); };
    const MarkovTree good(f, {0b01, 0b11, 0b10}, {ones(0b01), ones(0b11), ones(0b10)},
                          {{0, 1}, {1, 2}});
    CHECK(check_markov_property(good));
    // A appears at both ends but not in the middle.
    const MarkovTree bad(f, {0b01, 0b10, 0b01}, {ones(0b01), ones(0b10), ones(0b01)},
                         {{0, 1}, {1, 2}});
    CHECK_FALSE(check_markov_property(bad));
  }

  TEST_CASE("tree construction covers the published example") {
    const PossibilisticNet net = load_net(alarm_model_text());
    const MarkovTree tree = tree_for_net(net);
    REQUIRE(tree.node_count() == 6);
    // Families: B, E, {B,E,A}, {E,R}, {A,W}, {A,G}; every neighbor is node 2.
    CHECK(tree.vars_of(0) == 0b000001u);
    CHECK(tree.vars_of(1) == 0b000010u);
    CHECK(tree.vars_of(2) == 0b000111u);
    CHECK(tree.vars_of(3) == 0b001010u);
    CHECK(tree.vars_of(4) == 0b010100u);
    CHECK(tree.vars_of(5) == 0b100100u);
    REQUIRE(tree.edges().size() == 5);
    for (std::size_t i = 0; i < 6; ++i)
      if (i != 2) CHECK(tree.neighbors(i) == std::vector<std::size_t>{2});
    CHECK(check_markov_property(tree));
    CHECK(format_tree(tree) ==
          "node 0: {B}\n"
          "node 1: {E}\n"
          "node 2: {B,E,A}\n"
          "node 3: {E,R}\n"
          "node 4: {A,W}\n"
          "node 5: {A,G}\n"
          "edge 0 - 2\n"
          "edge 1 - 2\n"
          "edge 2 - 3\n"
          "edge 2 - 4\n"
          "edge 2 - 5\n");
  }

  TEST_CASE("elimination adds a clique node for a family triangle") {
    const Frame f({"A", "B", "C"});
    const std::vector<VarMask> families{0b011, 0b110, 0b101};
    const MarkovTree tree = build_markov_tree(f, families);
    REQUIRE(tree.node_count() == 4);
    CHECK(tree.vars_of(3) == 0b111u);
    CHECK(check_markov_property(tree));
    for (std::size_t i = 0; i < 3; ++i) CHECK(tree.neighbors(i) == std::vector<std::size_t>{3});
  }

  TEST_CASE("a single family gives a single node and no edges") {
    const Frame f({"A", "B"});
    const MarkovTree tree = build_markov_tree(f, std::vector<VarMask>{0b11});
    CHECK(tree.node_count() == 1);
    CHECK(tree.edges().empty());
  }

  TEST_CASE("disconnected families are linked into one tree") {
    const Frame f({"A", "B", "C", "D"});
    const std::vector<VarMask> families{0b0011, 0b1100};
    const MarkovTree tree = build_markov_tree(f, families);
    CHECK(tree.node_count() == 2);
    REQUIRE(tree.edges().size() == 1);
    CHECK(check_markov_property(tree));
  }

  TEST_CASE("families must cover the frame") {
    const Frame f({"A", "B"});
    CHECK_THROWS_AS(build_markov_tree(f, std::vector<VarMask>{0b01}), ModelError);
  }

  TEST_CASE("attach_evidence adds observation leaves at the smallest host") {
    const PossibilisticNet net = load_net(alarm_model_text());
    const MarkovTree tree = tree_for_net(net);
    const std::vector<Literal> evidence{{4, false}};  // W = F
    const MarkovTree with = attach_evidence(tree, evidence);
    REQUIRE(with.node_count() == 7);
    CHECK(with.vars_of(6) == 0b010000u);  // {W}
    // The leaf hangs off node 4 = {A, W}.
    CHECK(with.neighbors(6) == std::vector<std::size_t>{4});
    CHECK(with.potential_of(6).at(1) == 1.0);
    CHECK(with.potential_of(6).at(0) == 0.0);
  }

  TEST_CASE("collect to a root reproduces the evidence possibility") {
    const PossibilisticNet net = load_net(alarm_model_text());
    const MarkovTree tree = tree_for_net(net);
    const std::vector<Literal> evidence{{4, false}};  // W = F: possibility 1
    const MarkovTree with = attach_evidence(tree, evidence);
    const Potential root = collect(with, 0);
    CHECK(marginalize(root, 0).at(0) == 1.0);
  }

  TEST_CASE("queries on the published example match the oracle table") {
    const PossibilisticNet net = load_net(alarm_model_text());
    const MarkovTree tree = tree_for_net(net);
    const Frame& f = net.frame();
    const std::vector<Literal> wr{{f.require("W"), true}, {f.require("R"), true}};
    CHECK(check_pair(query_target(tree, 0, wr), 1.0, 1.0));   // B
    CHECK(check_pair(query_target(tree, 1, wr), 1.0, 0.0));   // E
    CHECK(check_pair(query_target(tree, 2, wr), 1.0, 0.85));  // A
    CHECK(check_pair(query_target(tree, 3, wr), 1.0, 0.0));   // R
    CHECK(check_pair(query_target(tree, 4, wr), 1.0, 0.0));   // W
    CHECK(check_pair(query_target(tree, 5, wr), 1.0, 0.85));  // G

    const std::vector<Literal> not_w{{f.require("W"), false}};
    CHECK(check_pair(query_target(tree, 0, not_w), 0.8, 1.0));
    CHECK(check_pair(query_target(tree, 1, not_w), 0.85, 1.0));
    CHECK(check_pair(query_target(tree, 2, not_w), 0.8, 1.0));
    CHECK(check_pair(query_target(tree, 3, not_w), 0.85, 1.0));
    CHECK(check_pair(query_target(tree, 4, not_w), 0.0, 1.0));
    CHECK(check_pair(query_target(tree, 5, not_w), 1.0, 1.0));
  }

  TEST_CASE("impossible evidence raises on query") {
    const PossibilisticNet net = load_net(alarm_model_text());
    const MarkovTree tree = tree_for_net(net);
    const Frame& f = net.frame();
    // Contradictory literals on one variable.
    const std::vector<Literal> clash{{f.require("W"), true}, {f.require("W"), false}};
    CHECK_THROWS_AS(query_target(tree, 0, clash), ImpossibleEvidenceError);
    // R observed true with E observed false has possibility 0.
    const std::vector<Literal> zero{{f.require("R"), true}, {f.require("E"), false}};
    CHECK_THROWS_AS(query_target(tree, 0, zero), ImpossibleEvidenceError);
  }

  TEST_CASE("query_target rejects variables outside the tree") {
    const Frame f({"A"});
    const MarkovTree tiny = build_markov_tree(f, std::vector<VarMask>{0b1});
    const std::vector<Literal> no_evidence;
    CHECK_THROWS_AS(query_target(tiny, 5, no_evidence), ModelError);
  }

  TEST_CASE("propagation agrees with the joint-density oracle on random nets") {
    ts::Rng rng(ts::kSeed + 30);
    for (int trial = 0; trial < 40; ++trial) {
      const PossibilisticNet net = ts::random_net(rng, 6, 3);
      const Density joint = joint_density(net);
      const MarkovTree tree = tree_for_net(net);
      const std::vector<Literal> evidence = ts::satisfiable_evidence(rng, net, joint);
      const Event e = ts::event_of_literals(net.frame(), evidence);
      const double pe = measure(joint, e);
      for (std::uint32_t t = 0; t < net.frame().size(); ++t) {
        const QueryResult got = query_target(tree, t, evidence);
        const Event t_true = ts::literal_event(net.frame(), t, true);
        CHECK(near(got.pi_true, measure(joint, intersect(e, t_true)) / pe));
        CHECK(near(got.pi_false, measure(joint, intersect(e, t_true.complement())) / pe));
      }
    }
  }
}
