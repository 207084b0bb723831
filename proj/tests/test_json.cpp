#include "spheresep/json_io.hpp"

#include <doctest.h>

#include <limits>

using namespace spheresep;

TEST_SUITE("json") {

TEST_CASE("float forms round-trip bit for bit") {
  const auto f = BivectorForm::random(3, 11);
  const Json j = form_to_json(f);
  CHECK(j["mode"] == "float");
  CHECK(j["entries"].size() == 21);
  const auto g = form_from_json(Json::parse(j.dump()));
  CHECK(g.matrix() == f.matrix());
  CHECK(form_to_json(g) == j);
}

TEST_CASE("exact forms round-trip as p/q strings") {
  std::vector<Rational> u;
  for (int i = 0; i < 21; ++i) u.emplace_back(i - 10, 3);
  for (auto& q : u) q.canonicalize();
  const auto f = BivectorForm::exact(3, u);
  const Json j = form_to_json(f);
  CHECK(j["mode"] == "exact");
  CHECK(j["entries"][0] == "-10/3");
  CHECK(j["entries"][1] == "-3/1");
  const auto g = form_from_json(Json::parse(j.dump()));
  CHECK(g.is_exact());
  CHECK(g.exact_upper() == f.exact_upper());
  CHECK(form_to_json(g) == j);
}

TEST_CASE("schema violations are reported") {
  CHECK_THROWS_AS(form_from_json(Json::parse(R"({"n":2,"mode":"float","entries":[1,2]})")), SchemaError);
  CHECK_THROWS_AS(form_from_json(Json::parse(R"({"n":2,"mode":"fuzzy","entries":[1,0,0,1,0,1]})")), SchemaError);
  CHECK_THROWS_AS(form_from_json(Json::parse(R"({"mode":"float","entries":[]})")), SchemaError);
  CHECK_THROWS_AS(form_from_json(Json::parse(R"({"n":2,"mode":"exact","entries":["1/0",0,0,1,0,1]})")), SchemaError);
  CHECK_THROWS_AS(form_from_json(Json::parse(R"({"n":2,"mode":"exact","entries":[1.5,0,0,1,0,1]})")), SchemaError);
  CHECK_THROWS_AS(form_from_json(Json::parse("[1,2,3]")), SchemaError);
  CHECK_NOTHROW(form_from_json(Json::parse(R"({"n":2,"mode":"exact","entries":["1/2",0,0,1,0,"3"]})")));
}

TEST_CASE("Staeckel systems round-trip") {
  const auto sys = stackel_from_killing(elliptic_form(std::vector<double>{0, 1, 3, 7}).form(), 60, 3);
  const StackelMeta meta{3, 60, "killing"};
  const Json j = stackel_to_json(sys, meta);
  CHECK(j["basis"].size() == 3);
  CHECK(j["version"] == version());
  StackelMeta back;
  const auto sys2 = stackel_from_json(Json::parse(j.dump()), &back);
  CHECK(sys2.coordinate_matrix() == sys.coordinate_matrix());
  CHECK(back.seed == 3);
  CHECK(back.source == "killing");
  CHECK(stackel_to_json(sys2, back) == j);
}

TEST_CASE("residual reports round-trip, including non-finite values") {
  ResidualReport r;
  r.killing_max = 1.25e-17;
  r.nijenhuis_max = {0.0, std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity()};
  r.points_sampled = 9;
  r.seed = 18446744073709551615ULL;
  r.threshold = 1e-9;
  r.pass = false;
  const Json j = report_to_json(r);
  CHECK(j["verdict"] == "FAIL");
  CHECK(j["nijenhuis_max"][1] == "nan");
  const auto r2 = report_from_json(Json::parse(j.dump()));
  CHECK(r2.seed == r.seed);
  CHECK(std::isnan(r2.nijenhuis_max[1]));
  CHECK(report_to_json(r2) == j);
}

TEST_CASE("tree lists and parameter maps") {
  const Json t = trees_to_json(4, 2, enumerate_trees(4, 2));
  CHECK(t["L"] == 4);
  CHECK(t["trees"].size() == 5);
  CHECK(t["trees"][0] == "(((*,*),*),*)");

  const auto p = params_from_json(Json::parse(R"({"":[0,1,4], "1":[0,1], "0.2":[0,0.5,0.75,1]})"));
  CHECK(p.size() == 3);
  CHECK(p.at({}).values()[1] == 0.25);
  CHECK(p.at({1}).arity() == 2);
  CHECK(p.at({0, 2}).moduli() == 2);
  CHECK(params_from_json(params_to_json(p)).size() == 3);
  CHECK(params_to_json(params_from_json(params_to_json(p))) == params_to_json(p));
  CHECK_THROWS_AS(params_from_json(Json::parse(R"({"a":[0,1]})")), SchemaError);
  CHECK_THROWS_AS(params_from_json(Json::parse(R"({"":[0,2,1]})")), SchemaError);
  CHECK_THROWS_AS(params_from_json(Json::parse(R"({"":"x"})")), SchemaError);
}

}  // TEST_SUITE
