#include <doctest.h>

#include <string>

#include "coexist/rng.hpp"
#include "coexist/scenario.hpp"

using namespace coexist;
using scenario::ConfigError;

namespace {

std::string error_of(const std::string& text) {
  try {
    scenario::parse_scenario(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::string error_on_desk(const std::string& patch) {
  auto j = scenario::to_json(scenario::desk_defaults());
  j.merge_patch(nlohmann::json::parse(patch));
  return error_of(j.dump());
}

}  // namespace

TEST_CASE("scenario: N=50, n=15 parses with those values") {
  const auto cfg = scenario::parse_scenario(R"({"ai": {"device_count": 50, "required_updates": 15}})");
  CHECK(cfg.n_ai() == 50);
  CHECK(cfg.n_required() == 15);
  CHECK(static_cast<int>(scenario::ai_positions(cfg).size()) == 50);
}

TEST_CASE("scenario: n and N violations are named") {
  CHECK(error_of(R"({"ai": {"device_count": 5, "required_updates": 0}})").find("n must be ≥ 1") !=
        std::string::npos);
  CHECK(error_of(R"({"ai": {"device_count": 15, "required_updates": 16}})").find("n ≤ N violated") !=
        std::string::npos);
}

TEST_CASE("scenario: unknown and mistyped keys are rejected with the field path") {
  CHECK(error_of(R"({"radio": {"carrier": 2.6}})").find("radio.carrier") != std::string::npos);
  CHECK(error_of(R"({"radio": {"num_rbs": "many"}})").find("radio.num_rbs") != std::string::npos);
  CHECK(error_on_desk(R"({"reward": {"upsilon": 1.5}})").find("reward.upsilon") != std::string::npos);
  CHECK(error_of(R"({"urllc": {"devices": [{"speed_mps": 1}]}})").find("position") != std::string::npos);
  CHECK(error_on_desk(R"({"gnbs": [[100, 100, 8]]})").find("gnbs[0]") != std::string::npos);
}

TEST_CASE("scenario: malformed json raises a parse error") {
  CHECK_THROWS_AS(scenario::parse_scenario("{\"ai\": "), nlohmann::json::parse_error);
}

TEST_CASE("scenario: presets validate and round-trip through json") {
  for (const auto& cfg : {scenario::desk_defaults(), scenario::full_scale(), scenario::toy_coexistence()}) {
    CHECK_NOTHROW(scenario::validate(cfg));
    const auto back = scenario::from_json(scenario::to_json(cfg));
    CHECK(back == cfg);
  }
}

TEST_CASE("scenario: desk preset holds the desk-scale counts") {
  const auto cfg = scenario::desk_defaults();
  CHECK(cfg.gnb_positions.size() == 4);
  CHECK(cfg.urllc.devices.size() == 10);
  CHECK(cfg.n_ai() >= cfg.n_required() + 10);
  CHECK(cfg.ai.episode_length == 20);
}

TEST_CASE("rng: streams are reproducible and separated") {
  auto cfg = scenario::desk_defaults();
  cfg.rng_seed = 7;
  Rng a = scenario::derive_rng(cfg, "channel");
  Rng b = scenario::derive_rng(cfg, "channel");
  for (int i = 0; i < 100; ++i) REQUIRE(a() == b());
  Rng c = scenario::derive_rng(cfg, "channel");
  Rng d = scenario::derive_rng(cfg, "traffic");
  CHECK(c() != d());
  auto cfg8 = cfg;
  cfg8.rng_seed = 8;
  Rng e = scenario::derive_rng(cfg, "x");
  Rng f = scenario::derive_rng(cfg8, "x");
  CHECK(e() != f());
}

TEST_CASE("scenario: generated AI layout is deterministic and inside the hall") {
  auto cfg = scenario::full_scale();
  const auto p1 = scenario::ai_positions(cfg);
  const auto p2 = scenario::ai_positions(cfg);
  CHECK(p1 == p2);
  for (const auto& p : p1) {
    CHECK(p.x >= 0.0);
    CHECK(p.x <= cfg.hall.size.x);
    CHECK(p.y >= 0.0);
    CHECK(p.y <= cfg.hall.size.y);
  }
}
