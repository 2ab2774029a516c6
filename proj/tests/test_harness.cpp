#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "advlab/adversary.hpp"
#include "advlab/boolfn.hpp"
#include "advlab/errors.hpp"
#include "advlab/harness.hpp"
#include "advlab/json_io.hpp"
#include "doctest.h"

using namespace advlab;

namespace {

// drop the lines that are allowed to differ between identical runs
std::string strip_volatile_lines(const std::string& text) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line))
    if (line.find("wall_ms") == std::string::npos &&
        line.find("timestamp") == std::string::npos)
      out << line << "\n";
  return out.str();
}

}  // namespace

TEST_CASE("function and relation JSON round-trips are exact") {
  for (const auto& g : {identity1(), or_function(2), parity_function(2), majority3()}) {
    const Json j = to_json(g);
    CHECK(function_from_json(j) == g);
    CHECK(to_json(function_from_json(j)) == j);
  }
  for (const auto& f :
       {find_one_relation(2), all_pairs_relation(2, 2), as_relation(parity_function(2))}) {
    const Json j = to_json(f);
    CHECK(relation_from_json(j) == f);
  }
}

TEST_CASE("matrix JSON round-trip preserves every entry") {
  DenseMatrix m(2, 3);
  double v = 0.25;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = (v *= -1.5);
  const DenseMatrix back = matrix_from_json(to_json(m));
  REQUIRE(back.rows() == 2);
  REQUIRE(back.cols() == 3);
  CHECK((back - m).max_abs() == 0.0);
}

TEST_CASE("witness JSON round-trips preserve sparsity structure") {
  const auto w = *curated_functional_witness(parity_function(2));
  const Json j = to_json(w);
  const auto back = functional_witness_from_json(j);
  CHECK(back.arity == w.arity);
  CHECK(back.dim == w.dim);
  CHECK(back.u == w.u);
  CHECK(back.v == w.v);

  const auto rw = best_relational_witness(find_one_relation(2));
  const auto rback = relational_witness_from_json(to_json(rw));
  CHECK(rback.alphabet == rw.alphabet);
  CHECK(rback.sigma == rw.sigma);
  CHECK(check_relational_witness(find_one_relation(2), rback).pass);
}

TEST_CASE("malformed JSON documents raise config errors") {
  CHECK_THROWS_AS(function_from_json(Json{{"arity", 2}}), ConfigError);
  CHECK_THROWS_AS(function_from_json(Json{{"arity", 2}, {"table", {0, 1, 2, 0}}}), ConfigError);
  CHECK_THROWS_AS(function_from_json(Json{{"arity", 0}, {"table", Json::array()}}), ConfigError);
  CHECK_THROWS_AS(relation_from_json(Json{{"arity", 1}, {"k", 2}, {"incidence", {{1}}}}),
                  ConfigError);
  CHECK_THROWS_AS(matrix_from_json(Json{{"rows", 2}, {"cols", 2}, {"data", {1, 2, 3}}}),
                  ConfigError);

  Json w{{"arity", 1}, {"dim", 1}, {"u", {{"5,1", {1.0}}}}, {"v", Json::object()}};
  CHECK_THROWS_AS(functional_witness_from_json(w), ConfigError);  // label out of range
  Json w2{{"arity", 1}, {"dim", 2}, {"u", {{"0,1", {1.0}}}}, {"v", Json::object()}};
  CHECK_THROWS_AS(functional_witness_from_json(w2), ConfigError);  // length != dim
  Json w3{{"arity", 1}, {"dim", 1}, {"u", {{"zero,one", {1.0}}}}, {"v", Json::object()}};
  CHECK_THROWS_AS(functional_witness_from_json(w3), ConfigError);  // bad key form
}

TEST_CASE("json file helpers round-trip through disk") {
  const std::string path = "harness_roundtrip_test.json";
  const Json doc = to_json(or_function(2));
  save_json_file(path, doc);
  const Json back = load_json_file(path);
  CHECK(back == doc);
  std::remove(path.c_str());

  CHECK_THROWS_AS(load_json_file("does_not_exist_anywhere.json"), ConfigError);
}

TEST_CASE("certificate and composition reports serialize with named residuals") {
  const Json j = to_json(solve_adv(or_function(2)));
  CHECK(j.at("value").get<double>() == doctest::Approx(std::sqrt(2.0)));
  CHECK(j.at("kind") == "sdp-solve");
  CHECK(j.at("residuals").contains("duality_gap"));
  CHECK(j.contains("witness"));

  const Json c = to_json(functional_composition_check(parity_function(2), parity_function(2)));
  CHECK(c.at("pass").get<bool>());
  CHECK(c.at("residuals").contains("spectral_identity_gap"));
  CHECK(c.at("residuals").contains("claim_identity_gap"));
  CHECK(c.at("verdicts").contains("routes_agree"));
  CHECK(c.contains("direct_value"));
}

TEST_CASE("fixture registry serves built-ins and rejects unknown names") {
  const FixtureRegistry reg;
  CHECK(reg.function("or2") == or_function(2));
  CHECK(reg.function("maj3") == majority3());
  CHECK(reg.relation("findone2") == totalize(find_one_relation(2)));
  CHECK(reg.relation("parity2-rel") == as_relation(parity_function(2)));
  CHECK_THROWS_AS(reg.function("nope"), ConfigError);
  CHECK_THROWS_AS(reg.relation("nope"), ConfigError);
}

TEST_CASE("fixture files override built-ins") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "advlab_fixture_override";
  fs::create_directories(dir);
  save_json_file((dir / "or2.json").string(), to_json(parity_function(2)));

  const FixtureRegistry reg(dir.string());
  CHECK(reg.function("or2") == parity_function(2));  // the file wins
  CHECK(reg.function("and2") == and_function(2));    // no file: built-in

  std::ofstream((dir / "and2.json").string()) << "this is not json";
  CHECK_THROWS_AS(reg.function("and2"), ConfigError);  // present but broken
  fs::remove_all(dir);
}

TEST_CASE("battery passes every scenario and reports are deterministic") {
  const FixtureRegistry reg;
  const RunReport a = run_battery(7, kDefaultBatteryTol, DirectMode::Auto, reg);
  CHECK(a.pass);
  CHECK(a.failed == 0);
  CHECK(a.scenarios.size() >= 20);
  for (const auto& s : a.scenarios) {
    INFO("scenario ", s.name, " note: ", s.note);
    CHECK(s.pass);
  }

  const RunReport b = run_battery(7, kDefaultBatteryTol, DirectMode::Auto, reg);
  CHECK(strip_volatile_lines(pretty(to_json(a))) == strip_volatile_lines(pretty(to_json(b))));
}

TEST_CASE("battery honours the direct-mode switch for relational composition") {
  const FixtureRegistry reg;
  const RunReport skip = run_battery(7, kDefaultBatteryTol, DirectMode::Skip, reg);
  CHECK(skip.pass);  // direct route skippable without failing the suite
  for (const auto& s : skip.scenarios)
    if (s.name.rfind("compose-rel-", 0) == 0) {
      CHECK(s.values.count("direct") == 0);
      CHECK(s.verdicts.count("routes_agree") == 0);
      CHECK(s.verdicts.at("item1_spectral"));
      CHECK(s.verdicts.at("claim_entrywise"));
    }
}

TEST_CASE("markdown rendering lists every scenario") {
  const FixtureRegistry reg;
  const RunReport rep = run_battery(3, kDefaultBatteryTol, DirectMode::Skip, reg);
  const std::string md = render_markdown(rep);
  for (const auto& s : rep.scenarios) CHECK(md.find("| " + s.name + " |") != std::string::npos);
  CHECK(md.find("FAIL") == std::string::npos);
}
