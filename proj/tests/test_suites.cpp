#include "doctest.h"
#include "json.hpp"
#include "kober/error.hpp"
#include "kober/suites.hpp"

using namespace kober;

TEST_CASE("suite registry") {
  CHECK(suite_names().size() == 7);
  CHECK(is_suite("jacobians"));
  CHECK_FALSE(is_suite("nope"));
  CHECK_THROWS_AS(run_suite("nope", {}), Error);
}

TEST_CASE("JSON report schema and determinism") {
  SuiteOptions o;
  o.p = 2;
  o.seed = 7;
  const SuiteResult a = run_suite("jacobians", o), b = run_suite("jacobians", o);
  CHECK(a.all_pass());
  CHECK(to_json(a) == to_json(b));
  const auto j = nlohmann::json::parse(to_json(a, true));
  CHECK(j.at("suite") == "jacobians");
  CHECK(j.at("seed") == 7);
  CHECK(j.contains("elapsed_ms"));
  CHECK_FALSE(nlohmann::json::parse(to_json(a)).contains("elapsed_ms"));
  for (const char* key : {"id", "paper_ref", "expected", "got", "se", "tol", "pass"})
    CHECK(j.at("cases").at(0).contains(key));
}

TEST_CASE("CSV quoting and number format") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(format12(1.0 / 3.0) == "0.333333333333");
  SuiteResult r;
  r.suite = "x";
  add_case(r, "id,1", "ref", 1.0, 1.5, 0.0, 0.1);
  CHECK_FALSE(r.all_pass());
  CHECK(to_csv(r) == "suite,seed,id,paper_ref,expected,got,se,tol,pass\r\nx,14999063,\"id,1\",ref,1,1.5,0,0.1,false\r\n");
}
