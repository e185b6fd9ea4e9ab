#include <doctest.h>

#include <sstream>

#include "coexist/ran_sim.hpp"
#include "coexist/scenario.hpp"

using namespace coexist;
using namespace coexist::ran;

namespace {

scenario::ScenarioConfig small_cell() {
  auto cfg = scenario::desk_defaults();
  cfg.gnb_positions = {Vec3{20, 20, 8}};
  cfg.urllc.devices.resize(1);
  cfg.urllc.devices[0].initial_position = Vec3{22, 20, 1.5};
  cfg.urllc.devices[0].speed_mps = 0.0;
  cfg.ai.device_count = 2;
  cfg.ai.positions = {Vec3{25, 25, 1.5}, Vec3{15, 15, 1.5}};
  cfg.ai.required_updates = 1;
  return cfg;
}

std::vector<double> urllc_delays(Engine& e, int ttis) {
  std::vector<double> out;
  for (int t = 0; t < ttis; ++t) {
    e.step_tti();
    for (Direction d : kDirections) {
      auto& v = e.window_log().urllc[0][d].delay_s;
      out.insert(out.end(), v.begin(), v.end());
      v.clear();
    }
  }
  return out;
}

}  // namespace

TEST_CASE("engine: perfect channel delivers URLLC one TTI plus processing after arrival") {
  const auto cfg = small_cell();
  Engine e(cfg, 1, EngineOptions{false, 0.0, nullptr});
  e.force_outcome(Flow::Urllc, true);
  const auto delays = urllc_delays(e, 400);
  REQUIRE(!delays.empty());
  const double t = cfg.radio.tti_s;
  for (double d : delays) {
    CHECK(d > cfg.radio.processing_ttis * t);
    CHECK(d <= (2 + cfg.radio.processing_ttis) * t + 1e-12);
  }
  CHECK(e.counters(Flow::Urllc).late == 0);
  CHECK(e.counters(Flow::Ai).generated == 0);
}

TEST_CASE("engine: AI load does not change URLLC service under strict priority") {
  const auto cfg = small_cell();
  Engine quiet(cfg, 3, EngineOptions{true, 0.0, nullptr});
  Engine busy(cfg, 3, EngineOptions{true, 0.0, nullptr});
  quiet.force_outcome(Flow::Urllc, true);
  busy.force_outcome(Flow::Urllc, true);
  busy.enqueue_ai(0, Direction::Dl, 5e6, 1);
  busy.enqueue_ai(1, Direction::Ul, 5e6, 1);
  CHECK(urllc_delays(quiet, 600) == urllc_delays(busy, 600));
}

TEST_CASE("engine: allocations respect the RB budget and URLLC goes first") {
  const auto cfg = scenario::desk_defaults();
  Engine e(cfg, 5, EngineOptions{true, 0.0, nullptr});
  for (int a = 0; a < cfg.n_ai(); ++a) {
    e.enqueue_ai(a, Direction::Dl, 3e5, 1);
    e.enqueue_ai(a, Direction::Ul, 3e5, 1);
  }
  long checked = 0;
  e.on_tti = [&](const Engine& eng) {
    for (const auto& cell : eng.last_allocations()) {
      for (Direction d : kDirections) {
        int total = 0;
        bool seen_ai = false;
        for (const auto& a : cell[d]) {
          total += a.count;
          if (a.flow == Flow::Ai) seen_ai = true;
          if (a.flow == Flow::Urllc) CHECK_FALSE(seen_ai);
          CHECK(a.count >= 1);
        }
        CHECK(total <= cfg.radio.num_rbs);
        ++checked;
      }
    }
  };
  for (int t = 0; t < 2000; ++t) e.step_tti();
  CHECK(checked == 2000L * 4 * 2);
}

TEST_CASE("engine: slicing confines each flow to its share") {
  const auto cfg = scenario::desk_defaults();
  Engine e(cfg, 5, EngineOptions{true, 0.25, nullptr});
  CHECK(e.urllc_rb_cap() == 26);
  CHECK(e.ai_rb_cap() == 79);
  for (int a = 0; a < cfg.n_ai(); ++a) e.enqueue_ai(a, Direction::Dl, 3e5, 1);
  e.on_tti = [&](const Engine& eng) {
    for (const auto& cell : eng.last_allocations()) {
      for (Direction d : kDirections) {
        int urllc = 0;
        int ai = 0;
        for (const auto& a : cell[d]) {
          if (a.flow == Flow::Urllc) {
            urllc += a.count;
            CHECK(a.start + a.count <= eng.urllc_rb_cap());
          } else {
            ai += a.count;
            CHECK(a.start >= cfg.radio.num_rbs - eng.ai_rb_cap());
            CHECK(a.start + a.count <= cfg.radio.num_rbs);
          }
        }
        CHECK(urllc <= eng.urllc_rb_cap());
        CHECK(ai <= eng.ai_rb_cap());
      }
    }
  };
  for (int t = 0; t < 2000; ++t) e.step_tti();
}

TEST_CASE("engine: AI packets are conserved") {
  const auto cfg = scenario::desk_defaults();
  Engine e(cfg, 9);
  for (int a = 0; a < cfg.n_ai(); ++a) e.enqueue_ai(a, Direction::Dl, 2e5, 1);
  long events = 0;
  for (int t = 0; t < 3000; ++t) events += static_cast<long>(e.step_tti().size());
  const auto& c = e.counters(Flow::Ai);
  CHECK(c.generated == c.delivered + c.dropped + c.flushed + static_cast<long>(e.outstanding_packets(Flow::Ai)));
  CHECK(events == c.delivered + c.dropped);
  e.flush_ai();
  CHECK(e.outstanding_packets(Flow::Ai) == 0);
  for (int a = 0; a < cfg.n_ai(); ++a) CHECK(e.buffered_bytes(Flow::Ai, a, Direction::Dl) == 0.0);
}

TEST_CASE("engine: failed URLLC transmissions surface as missed deadlines") {
  const auto cfg = small_cell();
  Engine e(cfg, 1, EngineOptions{false, 0.0, nullptr});
  e.force_outcome(Flow::Urllc, false);
  for (int t = 0; t < 400; ++t) e.step_tti();
  const auto& c = e.counters(Flow::Urllc);
  CHECK(c.delivered == 0);
  CHECK(c.late + c.dropped + static_cast<long>(e.outstanding_packets(Flow::Urllc)) == c.generated);
  e.settle_availability(e.now());
  CHECK(e.availability(0, Direction::Dl).estimate(0.0, e.now()) < 0.5);
}

TEST_CASE("engine: identical seeds give identical traces") {
  const auto cfg = scenario::desk_defaults();
  auto run = [&](std::uint64_t seed) {
    std::ostringstream out;
    Engine e(cfg, seed, EngineOptions{true, 0.0, &out});
    for (int a = 0; a < 6; ++a) e.enqueue_ai(a, Direction::Ul, 1e5, 1);
    for (int t = 0; t < 1500; ++t) e.step_tti();
    return out.str();
  };
  const std::string a = run(4);
  CHECK(a == run(4));
  CHECK(a != run(5));
}

TEST_CASE("engine: URLLC mobility stays inside the hall and on its segment") {
  const auto cfg = scenario::desk_defaults();
  Engine e(cfg, 2);
  for (int u = 0; u < e.num_urllc(); ++u) {
    const Vec3 p0 = e.urllc_position(u, 0.0);
    for (double t = 0.0; t < 5.0; t += 0.01) {
      const Vec3 p = e.urllc_position(u, t);
      CHECK(p.x >= 0.0);
      CHECK(p.x <= cfg.hall.size.x);
      CHECK(distance_2d(p, p0) <= cfg.urllc.devices[static_cast<std::size_t>(u)].span_m + 1e-9);
    }
  }
}
