#include "wkbgo/errors.hpp"
#include "wkbgo/scenario.hpp"

#include <doctest.h>

using namespace wkbgo;
using nlohmann::json;

namespace {

json base() {
  return json::parse(R"({
    "schema": "wkbgo-scenario/1",
    "dimension": 1,
    "sigma": 1,
    "modes": [{"kappa": [0], "amplitude": [1, 0]}, {"kappa": ["1/2"], "amplitude": {"polar": [2, 0]}}],
    "experiment": {"converge": {"t_final": 0.5, "eps_list": ["1/8", 0.0625]}}
  })");
}

std::string where_of(const json& j) {
  try {
    parse_scenario(j);
  } catch (const ParseError& e) {
    return e.where();
  }
  return "";
}

}  // namespace

TEST_CASE("valid scenario with defaults") {
  const Scenario s = parse_scenario(base());
  CHECK(s.experiment == "converge");
  CHECK(s.lambda == 1.0);
  CHECK(s.converge.eps_list == std::vector<double>{0.125, 0.0625});
  CHECK(s.converge.checkpoints == 9);
  CHECK(s.modes[1].amplitude == Complex(2.0, 0.0));
  const auto iv = s.integer_modes();
  CHECK(iv.scale == 2);
  const json r = resolved_json(s);
  CHECK(r["closure"]["max_generations"] == 8);
  CHECK(r["solver"]["dt"] == 0.0);
  CHECK(r["experiment"]["converge"]["eps_list"] == json::array({"1/8", "1/16"}));
  // Resolved documents parse back to the same resolved document.
  json again = r;
  again["solver"].erase("dt_rule");
  again["solver"].erase("n_rule");
  CHECK(resolved_json(parse_scenario(again)) == r);
}

TEST_CASE("eps must have an integer inverse") {
  json j = base();
  j["experiment"]["converge"]["eps_list"] = json::array({0.3});
  CHECK(where_of(j) == "experiment.converge.eps_list[0]");
  j["experiment"]["converge"]["eps_list"] = json::array({"2/3"});
  CHECK(where_of(j) == "experiment.converge.eps_list[0]");
  j["experiment"]["converge"]["eps_list"] = json::array({"1/8", "1/4"});
  CHECK(where_of(j) == "experiment.converge.eps_list[1]");
}

TEST_CASE("structural errors carry the field path") {
  json j = base();
  j["modes"][1]["kappa"] = json::array({1, 2});
  CHECK(where_of(j) == "modes[1].kappa");
  j = base();
  j["schema"] = "other";
  CHECK(where_of(j) == "schema");
  j = base();
  j["experiment"]["profiles"] = json::object();
  CHECK(where_of(j) == "experiment");
  j = base();
  j["typo"] = 1;
  CHECK(where_of(j) == "$.typo");
  j = base();
  j["modes"][0]["kappa"] = json::array({"1/2"});
  CHECK(where_of(j) == "modes[1].kappa");  // duplicate after parsing
  j = base();
  j["domain"] = {{"type", "euclid"}};
  CHECK(where_of(j) == "modes[0].profile");
  CHECK_THROWS_AS(parse_scenario_text("{"), ParseError);
}

TEST_CASE("gram generators choose exact or real arithmetic") {
  json j = json::parse(R"({"schema": "wkbgo-scenario/1", "dimension": 2,
    "experiment": {"smalldiv": {"gram": {"generators": [[1, "1/2"], [0, 3]]}}}})");
  Scenario s = parse_scenario(j);
  REQUIRE(s.smalldiv.gram);
  CHECK(s.smalldiv.gram->exact);
  j["experiment"]["smalldiv"]["gram"]["generators"] = json::array({json::array({1.0, 1.4142135623730951})});
  s = parse_scenario(j);
  CHECK_FALSE(s.smalldiv.gram->exact);
}
