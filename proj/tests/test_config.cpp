#include <string>

#include "doctest.h"
#include "fctl/config.hpp"

using namespace fctl;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("rates accept decimals and rationals") {
  CHECK(parse_rate("0.15") == 0.15);
  CHECK(parse_rate("1/30") == 1.0 / 30.0);
  CHECK(parse_rate(" 3 ") == 3.0);
  CHECK_THROWS_AS(parse_rate("1/0"), ConfigError);
  CHECK_THROWS_AS(parse_rate("abc"), ConfigError);
  CHECK_THROWS_AS(parse_rate(""), ConfigError);
}

TEST_CASE("single queue with a mixture") {
  const auto cfg = parse_config_text(R"({
    "schema_version": 1,
    "queue": {"name": "q", "green": 2, "red": 1, "arrivals": {"type": "mixture", "scenarios": [
      {"weight": "1/4", "slots": [{"shift": 1}, "0.2", 0]},
      {"weight": 0.75, "slots": [0, {"rate": "1/10", "shift": 2}, 0.3]}]}}
  })");
  REQUIRE(cfg.queue);
  CHECK(cfg.queue->plan.cycle() == 3);
  const auto& sc = cfg.queue->arrivals.scenarios();
  REQUIRE(sc.size() == 2);
  CHECK(sc[0].weight == 0.25);
  CHECK(sc[0].slots[0] == SlotDistribution{1, 0.0});
  CHECK(sc[1].slots[1] == SlotDistribution{2, 0.1});
  CHECK(cfg.as_network().nodes.size() == 1);
}

TEST_CASE("schema errors name the field") {
  CHECK(error_of(R"({"queue": {"green": 1, "red": 1, "arrivals": {"type": "zero"}}})")
            .find("schema_version") != std::string::npos);
  CHECK(error_of(R"({"schema_version": 1, "queue": {"green": 1, "red": 1, "arrivals":
      {"type": "mixture", "scenarios": []}}})")
            .find("queue.arrivals.scenarios: scenarios list is empty") != std::string::npos);
  CHECK(error_of(R"({"schema_version": 1, "queue": {"green": 1, "red": 1, "arrivals":
      {"type": "mixture", "scenarios": [{"weight": 0.5, "slots": [0, 0]},
                                        {"weight": 0.4, "slots": [0, 0]}]}}})")
            .find("sum") != std::string::npos);
  CHECK(error_of(R"({"schema_version": 1, "queue": {"green": 1, "red": 1, "arrivals":
      {"type": "poisson", "rate": "-1"}}})")
            .find("queue.arrivals.rate") != std::string::npos);
  CHECK(error_of(R"({"schema_version": 1, "queue": {"green": 1, "red": 1, "arrivals":
      {"type": "poison", "rate": 1}}})")
            .find("unknown process type") != std::string::npos);
  CHECK(error_of(R"({"schema_version": 1, "queue": {"green": 1, "red": 1, "colour": 3,
      "arrivals": {"type": "zero"}}})")
            .find("unknown field 'colour'") != std::string::npos);
  CHECK(error_of(R"({"schema_version": 2, "queue": {"green": 1, "red": 1, "arrivals": {"type": "zero"}}})")
            .find("unsupported") != std::string::npos);
}

TEST_CASE("syntax errors report line and column") {
  const auto msg = error_of("{\n  \"schema_version\": 1,\n  \"queue\": [,\n}");
  CHECK(msg.find("<string>:3:") != std::string::npos);
}

TEST_CASE("explicit network with named links") {
  const auto cfg = parse_config_text(R"({
    "schema_version": 1,
    "network": {"cycle": 4, "nodes": [
      {"name": "a", "green": 2, "arrivals": {"type": "poisson", "rate": 0.1}},
      {"name": "b", "green": 2, "offset": 1, "upstream": [{"from": "a", "travel_time": 1}]}]},
    "simulation": {"cycles": 500, "warmup_cycles": 10, "seed": 5, "replications": 2}
  })");
  REQUIRE(cfg.network);
  CHECK(cfg.network->nodes[1].upstream[0].from == 0);
  CHECK(cfg.network->nodes[1].plan.red == 2);
  CHECK(cfg.simulation.seed == 5);
  CHECK(error_of(R"({"schema_version": 1, "network": {"cycle": 4, "nodes": [
      {"name": "a", "green": 2, "upstream": [{"from": "zz"}]}]}})")
            .find("network.nodes[0].upstream[0].from") != std::string::npos);
}

TEST_CASE("line shorthand and platoon processes") {
  const auto cfg = parse_config_text(R"({
    "schema_version": 1,
    "line": {"intersections": 3, "green": 10, "red": 10, "travel_time": 5,
             "arrivals": {"type": "poisson", "rate": "0.15"},
             "side": {"green": 3, "offset": 15, "rate": "1/30"}}
  })");
  REQUIRE(cfg.network);
  CHECK(cfg.network->nodes.size() == 5);
  CHECK(cfg.network->nodes[1].external->scenarios()[0].slots[0].rate == 1.0 / 30.0);

  const auto pl = parse_config_text(R"({
    "schema_version": 1,
    "queue": {"green": 3, "red": 3, "arrivals": {"type": "platoon", "start": 2, "rate": 0.1,
              "weights": [0.5, 0.25, 0.25]}}
  })");
  const auto& sc = pl.queue->arrivals.scenarios();
  REQUIRE(sc.size() == 3);
  CHECK(sc[2].slots[1] == SlotDistribution{1, 0.0});
  CHECK(sc[2].slots[2] == SlotDistribution{1, 0.0});
  CHECK(sc[1].slots[2] == SlotDistribution{0, 0.1});
  CHECK(sc[0].slots[0].is_zero());
}
