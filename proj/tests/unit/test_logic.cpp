#include <string>
#include <vector>

#include "doctest.h"
#include "poscop/error.hpp"
#include "poscop/logic.hpp"

using namespace poscop;

TEST_SUITE("logic") {
  TEST_CASE("frame names, indices, and world count") {
    const Frame f({"X", "Y", "Z"});
    CHECK(f.size() == 3);
    CHECK(f.world_count() == 8);
    CHECK(f.name(0) == "X");
    CHECK(f.name(2) == "Z");
    CHECK(f.index_of("Y") == 1u);
    CHECK_FALSE(f.index_of("Q").has_value());
    CHECK(f.require("Z") == 2u);
    CHECK_THROWS_AS(f.require("Q"), UnknownPrimitiveError);
  }

  TEST_CASE("frame construction rejects bad primitive lists") {
    CHECK_THROWS_AS(Frame({}), Error);
    CHECK_THROWS_AS(Frame({"X", "X"}), Error);
    CHECK_THROWS_AS(Frame({"X", ""}), Error);
  }

  TEST_CASE("world encoding: world 0 is all-true, first primitive most significant") {
    const Frame f({"X", "Y"});
    // Worlds in order: TT TF FT FF.
    CHECK(f.literal_of(0, 0));
    CHECK(f.literal_of(0, 1));
    CHECK(f.literal_of(1, 0));
    CHECK_FALSE(f.literal_of(1, 1));
    CHECK_FALSE(f.literal_of(2, 0));
    CHECK(f.literal_of(2, 1));
    CHECK(f.world_label(0) == "T T");
    CHECK(f.world_label(3) == "F F");
  }

  TEST_CASE("world count is capped") {
    std::vector<std::string> names;
    for (int i = 0; i < 25; ++i) names.push_back("P" + std::to_string(i));
    const Frame f(names);
    CHECK_THROWS_AS(f.world_count(), CapacityError);
  }

  TEST_CASE("event construction and set operations") {
    const Frame f({"X", "Y"});
    const Event none = Event::none(f);
    const Event all = Event::all(f);
    CHECK(none.empty());
    CHECK(none.count() == 0);
    CHECK(all.count() == 4);
    const Event e = Event::of(f, {0, 3});
    CHECK(e.contains(0));
    CHECK_FALSE(e.contains(1));
    CHECK(e.count() == 2);
    CHECK(e.complement() == Event::of(f, {1, 2}));
    CHECK(intersect(e, all) == e);
    CHECK(unite(e, e.complement()) == all);
    CHECK(intersect(e, e.complement()) == none);
    CHECK(Event::single(f, 2) == Event::of(f, {2}));
    CHECK(Event::from_mask(f, 0b1001) == e);
  }

  TEST_CASE("event hex round-trip") {
    const Frame f({"X", "Y", "Z"});
    const Event e = Event::of(f, {0, 5, 7});
    CHECK(Event::from_hex(f, e.to_hex()) == e);
  }

  TEST_CASE("formula parsing and printing round-trips") {
    const Frame f({"X", "Y", "Z"});
    for (const char* text : {"X", "!X", "X & Y", "X | Y & Z", "X -> Y -> Z", "!(X | Y)",
                             "(X -> Y) -> Z", "true", "false", "X & !Y & Z"}) {
      const Formula g = parse_formula(text, f);
      const std::string printed = to_string(g);
      CHECK(to_string(parse_formula(printed, f)) == printed);
    }
    CHECK(to_string(parse_formula("X&Y|Z", f)) == "X & Y | Z");
    CHECK(to_string(parse_formula("(X)", f)) == "X");
  }

  TEST_CASE("implication is right associative; and binds tighter than or") {
    const Frame f({"X", "Y", "Z"});
    CHECK(models(parse_formula("X -> Y -> Z", f)) ==
          models(parse_formula("X -> (Y -> Z)", f)));
    CHECK(models(parse_formula("X | Y & Z", f)) ==
          models(parse_formula("X | (Y & Z)", f)));
  }

  TEST_CASE("parse errors carry positions") {
    const Frame f({"X", "Y"});
    CHECK_THROWS_AS(parse_formula("X &", f), ParseError);
    CHECK_THROWS_AS(parse_formula("(X", f), ParseError);
    CHECK_THROWS_AS(parse_formula("", f), ParseError);
    CHECK_THROWS_AS(parse_formula("X Y", f), ParseError);
    CHECK_THROWS_AS(parse_formula("X & Q", f), UnknownPrimitiveError);
    try {
      parse_formula("X & Q", f);
    } catch (const UnknownPrimitiveError& e) {
      CHECK(e.position == 4);
      CHECK(e.name == "Q");
    }
  }

  TEST_CASE("evaluate matches models on every world") {
    const Frame f({"X", "Y", "Z"});
    for (const char* text : {"X -> Y", "!X | Y", "X & (Y | !Z)", "false -> X"}) {
      const Formula g = parse_formula(text, f);
      const Event m = models(g);
      for (WorldIndex w = 0; w < f.world_count(); ++w)
        CHECK(evaluate(g, World(f, w)) == m.contains(w));
    }
  }

  TEST_CASE("models of the connectives") {
    const Frame f({"X", "Y"});
    CHECK(models(parse_formula("X", f)) == Event::of(f, {0, 1}));
    CHECK(models(parse_formula("!X", f)) == Event::of(f, {2, 3}));
    CHECK(models(parse_formula("X & Y", f)) == Event::of(f, {0}));
    CHECK(models(parse_formula("X | Y", f)) == Event::of(f, {0, 1, 2}));
    CHECK(models(parse_formula("X -> Y", f)) == Event::of(f, {0, 2, 3}));
    CHECK(models(parse_formula("true", f)) == Event::all(f));
    CHECK(models(parse_formula("false", f)) == Event::none(f));
  }

  TEST_CASE("formulas and events reject mismatched frames") {
    const Frame f({"X", "Y"});
    const Frame g({"X", "Z"});
    CHECK_FALSE(f == g);
    CHECK_THROWS_AS(Formula::conjunction(parse_formula("X", f), parse_formula("X", g)),
                    FrameMismatchError);
  }
}
