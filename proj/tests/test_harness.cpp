#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "coexist/environment.hpp"
#include "coexist/episode.hpp"
#include "coexist/harness.hpp"

using namespace coexist;
using namespace coexist::harness;

namespace {

scenario::ScenarioConfig quick() {
  auto cfg = scenario::toy_coexistence();
  cfg.ai.episode_length = 3;
  cfg.single_urllc_duration_s = 1.0;
  return cfg;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("seed lists and mode names") {
  CHECK(parse_seeds("3") == std::vector<std::uint64_t>{3});
  CHECK(parse_seeds("1..4") == std::vector<std::uint64_t>{1, 2, 3, 4});
  CHECK(parse_seeds("5,2,9") == std::vector<std::uint64_t>{5, 2, 9});
  CHECK_THROWS(parse_seeds(""));
  CHECK_THROWS(parse_seeds("4..1"));
  for (Mode m : {Mode::SingleUrllc, Mode::MixedServ, Mode::Slicing, Mode::AgentTrain, Mode::AgentEval}) {
    CHECK(parse_mode(to_string(m)) == m);
  }
  CHECK_THROWS(parse_mode("bogus"));
}

TEST_CASE("median and stochastic dominance") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.0);
  CHECK(stochastically_dominates({1.0, 1.0, 0.99}, {0.9, 0.99, 1.0}));
  CHECK_FALSE(stochastically_dominates({0.9, 1.0}, {0.95, 0.95}));
  CHECK(stochastically_dominates({1.0}, {1.0}));
}

TEST_CASE("plan validation") {
  const auto cfg = quick();
  ExperimentPlan p;
  p.m = cfg.n_ai() + 1;
  CHECK_THROWS_AS(run_plan(p, cfg), std::invalid_argument);
  p.m = cfg.n_required() - 1;
  if (p.m >= 1) CHECK_THROWS_AS(run_plan(p, cfg), std::invalid_argument);
  p.m = 0;
  p.mode = Mode::AgentEval;
  CHECK_THROWS_AS(run_plan(p, cfg), std::invalid_argument);
}

TEST_CASE("singleURLLC generates no AI traffic") {
  const auto cfg = quick();
  ExperimentPlan p;
  p.mode = Mode::SingleUrllc;
  p.seeds = {1, 2};
  const auto r = run_plan(p, cfg);
  CHECK(r.ai_packets == 0);
  CHECK(r.delays.empty());
  CHECK(r.availability.size() == static_cast<std::size_t>(2 * 2 * cfg.urllc.devices.size()));
  for (const auto& a : r.availability) {
    CHECK(a.alpha >= 0.0);
    CHECK(a.alpha <= 1.0);
  }
}

TEST_CASE("mixedServ requests exactly m devices every iteration") {
  const auto cfg = quick();
  for (int m : {cfg.n_required(), cfg.n_required() + 1}) {
    ExperimentPlan p;
    p.mode = Mode::MixedServ;
    p.m = m;
    p.seeds = {1, 2};
    const auto r = run_plan(p, cfg);
    CHECK(r.delays.size() == static_cast<std::size_t>(2 * cfg.ai.episode_length));
    for (const auto& d : r.delays) CHECK(d.m == m);
    const auto s = summarize(r);
    CHECK(s.m_pmf.size() == 1);
    CHECK(s.m_pmf.at(m) == 1.0);
    double ratio = 0.0;
    for (double x : s.selection_ratio) ratio += x;
    CHECK(ratio == doctest::Approx(static_cast<double>(m)));
    CHECK(r.ai_packets > 0);
  }
}

TEST_CASE("slicing keeps URLLC within its quarter of the RBs") {
  const auto cfg = quick();
  agent::Environment env(cfg, 4, agent::EnvironmentOptions{0.25});
  env.reset();
  long checked = 0;
  env.engine().on_tti = [&](const ran::Engine& eng) {
    for (const auto& cell : eng.last_allocations()) {
      for (Direction d : kDirections) {
        int urllc = 0;
        for (const auto& a : cell[d]) {
          if (a.flow == Flow::Urllc) urllc += a.count;
        }
        CHECK(urllc <= 0.25 * cfg.radio.num_rbs);
        ++checked;
      }
    }
  };
  env.step(env.random_selection(cfg.n_required()));
  CHECK(checked > 0);
}

TEST_CASE("results are deterministic and written in full") {
  const auto cfg = quick();
  ExperimentPlan p;
  p.mode = Mode::MixedServ;
  p.seeds = {3, 4};
  const auto base = std::filesystem::temp_directory_path() / "coexist_harness_test";
  std::filesystem::remove_all(base);
  for (int rep = 0; rep < 2; ++rep) {
    p.parallelism = rep + 1;
    const auto r = run_plan(p, cfg);
    write_results(base / std::to_string(rep), r, summarize(r), cfg, p);
  }
  for (const char* f : {"availability.csv", "delays.csv", "availability_cdf.csv", "delay_summary.csv",
                        "selection_ratio.csv", "m_pmf.csv"}) {
    const auto a = slurp(base / "0" / f);
    CHECK_MESSAGE(!a.empty(), f);
    CHECK_MESSAGE(a == slurp(base / "1" / f), f);
  }
  CHECK(std::filesystem::exists(base / "0" / "manifest.json"));
  std::filesystem::remove_all(base);
}

TEST_CASE("built-in self test passes") {
  for (const auto& r : selftest()) CHECK_MESSAGE(r.pass, r.name << ' ' << r.detail);
}
