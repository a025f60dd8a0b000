#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "poscop/cli.hpp"

using poscop::run_cli;

#ifndef POSCOP_SOURCE_DIR
#define POSCOP_SOURCE_DIR "."
#endif

namespace {
struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data_path(const char* name) {
  return std::string(POSCOP_SOURCE_DIR) + "/data/" + name;
}
}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("validate reports the embedded model") {
    const CliRun r = run({"validate", "alarm"});
    CHECK(r.code == 0);
    CHECK(r.err.empty());
    CHECK(r.out ==
          "model: alarm\n"
          "variables: B E A R W G\n"
          "priors: 2\n"
          "conditionals: 4\n"
          "status: valid\n");
  }

  TEST_CASE("validate accepts a model file path") {
    const CliRun r = run({"validate", data_path("alarm")});
    CHECK(r.code == 0);
    CHECK(r.out.find("status: valid") != std::string::npos);
  }

  TEST_CASE("query prints both engines and their difference") {
    const CliRun r = run({"query", "alarm", "--evidence", "R", "--target", "E",
                          "--engine", "both"});
    CHECK(r.code == 0);
    CHECK(r.out ==
          "model: alarm\n"
          "target: E\n"
          "evidence: R\n"
          "propagate: Pi(E | e) = 1, Pi(!E | e) = 0\n"
          "oracle: Pi(E | e) = 1, Pi(!E | e) = 0\n"
          "max |difference| = 0\n");
  }

  TEST_CASE("query emits machine-readable json") {
    const CliRun r = run({"query", "alarm", "--evidence", "!W", "--target", "A",
                          "--engine", "both", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["command"] == "query");
    CHECK(doc["target"] == "A");
    CHECK(doc["evidence"] == "!W");
    CHECK(doc["results"]["propagate"]["true"].get<double>() == 0.8);
    CHECK(doc["results"]["propagate"]["false"].get<double>() == 1.0);
    CHECK(doc["results"]["oracle"]["true"].get<double>() == 0.8);
    CHECK(std::abs(doc["max_difference"].get<double>()) <= 1e-12);
  }

  TEST_CASE("query defaults to the propagate engine and empty evidence") {
    const CliRun r = run({"query", "alarm", "--target", "B"});
    CHECK(r.code == 0);
    CHECK(r.out.find("oracle:") == std::string::npos);
    CHECK(r.out.find("propagate: Pi(B | e) = 1, Pi(!B | e) = 1") != std::string::npos);
  }

  TEST_CASE("condition renders a reloadable density") {
    const CliRun r = run({"condition", data_path("d0.poss"), "--on", "!X",
                          "--rule", "minimum"});
    CHECK(r.code == 0);
    CHECK(r.out ==
          "# rule: minimum\n"
          "# evidence: !X\n"
          "# Pi(evidence) = 0.2\n"
          "frame: X Y\n"
          "T T : 0\n"
          "T F : 0\n"
          "F T : 1\n"
          "F F : 0.1\n");
  }

  TEST_CASE("condition json carries the conditional values") {
    const CliRun r = run({"condition", data_path("d0.poss"), "--on", "!X",
                          "--rule", "dempster", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["rule"] == "dempster");
    CHECK(doc["evidence_possibility"].get<double>() == 0.2);
    CHECK(doc["values"]["F T"].get<double>() == 1.0);
    CHECK(std::abs(doc["values"]["F F"].get<double>() - 0.5) <= 1e-12);
    CHECK(doc["values"]["T T"].get<double>() == 0.0);
  }

  TEST_CASE("axioms reports pass for the named rules") {
    const CliRun r = run({"axioms", data_path("d0.poss"), "--on", "!X", "--rule", "yager"});
    CHECK(r.code == 0);
    CHECK(r.out.find("D1: pass") != std::string::npos);
    CHECK(r.out.find("D2: pass") != std::string::npos);
    CHECK(r.out.find("D3: pass") != std::string::npos);
    CHECK(r.out.find("result: all axioms hold") != std::string::npos);
  }

  TEST_CASE("entails answers with its certificate values") {
    const CliRun r = run({"entails", data_path("d0.poss"), "--given", "X", "--query", "Y"});
    CHECK(r.code == 0);
    CHECK(r.out ==
          "given: X\n"
          "query: Y\n"
          "Co(given -> query) = 0.6\n"
          "Co(!given) = 0\n"
          "entails: true\n");
    const CliRun no = run({"entails", data_path("d0.poss"), "--given", "!X",
                           "--query", "!Y"});
    CHECK(no.code == 0);
    CHECK(no.out.find("entails: false") != std::string::npos);
  }

  TEST_CASE("independence verifies the product joint") {
    const CliRun r = run({"independence", "--rule", "dempster", "--marginal-a", "1,0.4",
                          "--marginal-b", "1,0.2"});
    CHECK(r.code == 0);
    CHECK(r.out.find("result: independent") != std::string::npos);
  }

  TEST_CASE("independence search reports presence and absence") {
    const CliRun hit = run({"independence", "--rule", "dempster", "--marginal-a", "1,0.4",
                            "--marginal-b", "1,0.2", "--search", "--format", "json"});
    REQUIRE(hit.code == 0);
    const auto doc = nlohmann::json::parse(hit.out);
    CHECK(doc["found"] == true);
    CHECK(doc["joint"][0][0].get<double>() == 1.0);
    CHECK(doc["joint"][0][1].get<double>() == 0.2);
    CHECK(doc["joint"][1][0].get<double>() == 0.4);
    CHECK(std::abs(doc["joint"][1][1].get<double>() - 0.08) <= 1e-12);

    const CliRun miss = run({"independence", "--rule", "minimum", "--marginal-a", "1,0.4",
                             "--marginal-b", "1,0.2", "--search"});
    CHECK(miss.code == 0);
    CHECK(miss.out.find("no independent joint") != std::string::npos);
  }

  TEST_CASE("demo walks the embedded model") {
    const CliRun r = run({"demo", "alarm"});
    CHECK(r.code == 0);
    CHECK(r.out.find("== family potentials ==") != std::string::npos);
    CHECK(r.out.find("== markov tree ==") != std::string::npos);
    CHECK(r.out.find("node 2: {B,E,A}") != std::string::npos);
    CHECK(r.out.find("== query: evidence W & R ==") != std::string::npos);
    CHECK(r.out.find("== query: evidence !W ==") != std::string::npos);
    CHECK(r.out.find("E: propagate=(1, 0) oracle=(1, 0) |diff|=0") != std::string::npos);
  }

  TEST_CASE("usage errors exit 2") {
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"query", "alarm"}).code == 2);  // missing --target
    CHECK(run({"query", "alarm", "--target", "E", "--engine", "turbo"}).code == 2);
    CHECK(run({"condition", "x", "--on", "X", "--rule", "bayes"}).code == 2);
    CHECK(run({"demo", "unknown"}).code == 2);
  }

  TEST_CASE("domain errors exit 1 and leave stdout clean") {
    const CliRun missing = run({"condition", "no-such-file.poss", "--on", "X"});
    CHECK(missing.code == 1);
    CHECK(missing.out.empty());
    CHECK(missing.err.find("error:") != std::string::npos);

    const CliRun impossible =
        run({"query", "alarm", "--evidence", "R & !R", "--target", "E"});
    CHECK(impossible.code == 1);
    CHECK(impossible.out.empty());

    const CliRun non_literal =
        run({"query", "alarm", "--evidence", "R | W", "--target", "E"});
    CHECK(non_literal.code == 1);
    CHECK(non_literal.err.find("oracle") != std::string::npos);

    const CliRun general_ok =
        run({"query", "alarm", "--evidence", "R | W", "--target", "E", "--engine", "oracle"});
    CHECK(general_ok.code == 0);

    const CliRun bad_formula = run({"entails", data_path("d0.poss"), "--given", "X &",
                                    "--query", "Y"});
    CHECK(bad_formula.code == 1);
  }

  TEST_CASE("help exits 0") {
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"query", "--help"}).code == 0);
  }
}
