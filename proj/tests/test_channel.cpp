#include <doctest.h>

#include <cmath>
#include <random>

#include "coexist/channel.hpp"
#include "coexist/link_adaptation.hpp"

using namespace coexist;
using namespace coexist::channel;

namespace {

LinkGeometry geom(double d2, double d3, double fc) {
  LinkGeometry g;
  g.d_2d = d2;
  g.d_3d = d3;
  g.f_c_ghz = fc;
  return g;
}

}  // namespace

TEST_CASE("path loss: closed-form values") {
  CHECK(std::abs(path_loss_los(geom(10, 10, 2.6)) - 61.22) < 0.01);
  CHECK(std::abs(path_loss_nlos(geom(10, 10, 2.6)) - 63.83) < 0.01);
  CHECK(path_loss_los(geom(1, 1, 1)) == doctest::Approx(31.84));
  CHECK(path_loss_nlos(geom(1, 1, 1)) == doctest::Approx(33.63));
}

TEST_CASE("path loss: monotone in distance and NLOS dominates") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(1.0, 60.0);
  std::uniform_real_distribution<double> f(0.5, 6.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = d(rng);
    const double fc = f(rng);
    CHECK(path_loss_los(geom(a, 2 * a, fc)) > path_loss_los(geom(a, a, fc)));
    CHECK(path_loss_nlos(geom(a, a, fc)) >= path_loss_los(geom(a, a, fc)));
  }
  CHECK_THROWS_AS(path_loss_los(geom(0, 0, 2.6)), std::domain_error);
  CHECK_THROWS_AS(path_loss_los(geom(1, 1, 0)), std::domain_error);
}

TEST_CASE("LOS probability: boundary and worked values") {
  CHECK(los_probability(geom(0, 6.5, 2.6)) == doctest::Approx(1.0));
  CHECK(std::abs(los_probability(geom(10, 12, 2.6)) - 0.0419) < 1e-3);
  CHECK(los_probability(geom(1e4, 1e4, 2.6)) < 1e-12);
  auto bad = geom(10, 10, 2.6);
  bad.r_clut = 1.0;
  CHECK_THROWS_AS(los_probability(bad), std::domain_error);
  bad = geom(10, 10, 2.6);
  bad.h_gnb = bad.h_device;
  CHECK_THROWS_AS(los_probability(bad), std::domain_error);
}

TEST_CASE("sinr: thermal noise arithmetic") {
  LinkState s;
  const double snr = sinr_db(s, 1.0, {}, 40e6, 9.0);
  const double expected = -10.0 * std::log10(kBoltzmann * 290.0 * 40e6 * std::pow(10.0, 0.9));
  CHECK(snr == doctest::Approx(expected).epsilon(1e-12));
  CHECK(std::abs(snr - 118.95) < 0.01);
}

TEST_CASE("sinr: symmetric interferer and monotone denominator") {
  LinkState s;
  s.path_loss_db = 60.0;
  const double with = sinr_db(s, 1.0, {{s, 1.0}}, 1.0, 0.0);
  CHECK(std::abs(with) < 1e-9);
  const double base = sinr_db(s, 1.0, {}, 40e6, 9.0);
  LinkState far = s;
  far.path_loss_db = 120.0;
  CHECK(sinr_db(s, 1.0, {{far, 0.1}}, 40e6, 9.0) < base);
  CHECK(std::isinf(sinr_db(s, 0.0, {}, 40e6, 9.0)));
}

TEST_CASE("link cache: draws once per quantised pair and ignores query order") {
  const auto cfg = scenario::desk_defaults();
  LinkCache a(cfg, 11);
  LinkCache b(cfg, 11);
  const Vec3 p{12.2, 9.9, 1.5};
  const Vec3 q{30.0, 30.0, 1.5};
  const double la = a.get(p, 0).total_loss_db();
  a.get(q, 1);
  b.get(q, 1);
  CHECK(b.get(p, 0).total_loss_db() == la);
  CHECK(a.get(Vec3{12.1, 10.1, 1.5}, 0).total_loss_db() == la);
  CHECK(a.draws() == 2);
  LinkCache c(cfg, 12);
  CHECK(c.get(p, 0).total_loss_db() != la);
}

TEST_CASE("link abstraction: logistic midpoint and asymptotes") {
  for (int m = 0; m < link::kNumMcs; ++m) {
    CHECK(link::per_from_sinr(link::midpoint_db(m), 100.0, m) == doctest::Approx(0.5));
    CHECK(link::per_from_sinr(80.0, 100.0, m) < 1e-12);
    CHECK(link::per_from_sinr(-80.0, 100.0, m) == doctest::Approx(1.0));
  }
  CHECK(link::midpoint_db(0) ==
        doctest::Approx(10.0 * std::log10((std::pow(2.0, 0.15) - 1.0) * std::pow(10.0, 0.1))));
}

TEST_CASE("link abstraction: larger blocks never lower PER") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> s(-15.0, 30.0);
  std::uniform_real_distribution<double> b(10.0, 5e4);
  for (int i = 0; i < 2000; ++i) {
    const double snr = s(rng);
    const double bytes = b(rng);
    const int m = static_cast<int>(rng() % link::kNumMcs);
    CHECK(link::per_from_sinr(snr, 2 * bytes, m) >= link::per_from_sinr(snr, bytes, m));
  }
  CHECK(link::code_blocks(1) == 1);
  CHECK(link::code_blocks(1056) == 1);
  CHECK(link::code_blocks(1057) == 2);
}

TEST_CASE("link abstraction: MCS selection saturates and is monotone") {
  CHECK(link::select_mcs(-10.0) == 0);
  CHECK(link::select_mcs(40.0) == link::kNumMcs - 1);
  int last = 0;
  for (double s = -15.0; s <= 45.0; s += 0.05) {
    const int m = link::select_mcs(s);
    CHECK(m >= last);
    last = m;
  }
  for (int m = 1; m < link::kNumMcs; ++m) {
    const double th = link::selection_threshold_db(m, 0.1);
    CHECK(link::predicted_per(th, m) <= 0.1 + 1e-6);
    CHECK(link::predicted_per(th - 0.01, m) > 0.1);
  }
  CHECK(link::bits_per_rb(7) == doctest::Approx(5.55 * 144));
}
