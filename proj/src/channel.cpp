#include "coexist/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace coexist::channel {

LinkGeometry make_geometry(const Vec3& device, const Vec3& gnb, double f_c_ghz,
                           const scenario::PropagationParams& prop) {
  LinkGeometry g;
  g.d_2d = distance_2d(device, gnb);
  g.d_3d = distance_3d(device, gnb);
  g.f_c_ghz = f_c_ghz;
  g.h_gnb = gnb.z;
  g.h_device = device.z;
  g.h_clut = prop.h_clut_m;
  g.d_clut = prop.d_clut_m;
  g.r_clut = prop.r_clut;
  return g;
}

namespace {
void check_domain(const LinkGeometry& g) {
  if (!(g.d_3d > 0.0)) throw std::domain_error("path loss needs d_3d > 0");
  if (!(g.f_c_ghz > 0.0)) throw std::domain_error("path loss needs f_c > 0");
}
}  // namespace

double path_loss_los(const LinkGeometry& g) {
  check_domain(g);
  return 31.84 + 21.5 * std::log10(g.d_3d) + 19.0 * std::log10(g.f_c_ghz);
}

double path_loss_dense_high(const LinkGeometry& g) {
  check_domain(g);
  return 33.63 + 21.9 * std::log10(g.d_3d) + 20.0 * std::log10(g.f_c_ghz);
}

double path_loss_nlos(const LinkGeometry& g) {
  return std::max(path_loss_los(g), path_loss_dense_high(g));
}

double los_probability(const LinkGeometry& g) {
  if (!(g.r_clut > 0.0 && g.r_clut < 1.0)) throw std::domain_error("r_clut must be in (0,1)");
  if (g.h_gnb == g.h_device) throw std::domain_error("h_gnb must differ from h_device");
  const double p = std::exp(g.d_2d * std::log(1.0 - g.r_clut) * (g.h_clut - g.h_device) /
                            (g.d_clut * (g.h_gnb - g.h_device)));
  return std::clamp(p, 0.0, 1.0);
}

double LinkState::gain() const { return std::pow(10.0, -total_loss_db() / 10.0); }

double thermal_noise_w(double bandwidth_hz, double noise_figure_db) {
  return kBoltzmann * kNoiseTemperatureK * bandwidth_hz * db_to_linear(noise_figure_db);
}

double sinr_db(const LinkState& link, double tx_power_w,
               const std::vector<std::pair<LinkState, double>>& interferers, double bandwidth_hz,
               double noise_figure_db, double signal_gain_db) {
  if (!(bandwidth_hz > 0.0)) return -std::numeric_limits<double>::infinity();
  const double signal = tx_power_w * link.gain() * db_to_linear(signal_gain_db);
  if (!(signal > 0.0)) return -std::numeric_limits<double>::infinity();
  double denom = thermal_noise_w(bandwidth_hz, noise_figure_db);
  for (const auto& [state, power] : interferers) denom += power * state.gain();
  return linear_to_db(signal / denom);
}

LinkCache::LinkCache(const scenario::ScenarioConfig& cfg, std::uint64_t seed)
    : gnbs_(cfg.gnb_positions),
      prop_(cfg.propagation),
      f_c_ghz_(cfg.radio.carrier_ghz),
      grid_m_(cfg.radio.position_grid_m),
      seed_(seed) {}

std::uint64_t LinkCache::key(const Vec3& d, int gnb) const {
  auto q = [&](double v) {
    return static_cast<std::uint64_t>(std::llround(v / grid_m_) + (1 << 19)) & 0xFFFFFu;
  };
  return (q(d.x) << 44) | (q(d.y) << 24) | (q(d.z) << 4) | static_cast<std::uint64_t>(gnb & 0xF);
}

const LinkState& LinkCache::get(const Vec3& device, int gnb) { return mutable_get(device, gnb); }

LinkState& LinkCache::mutable_get(const Vec3& device, int gnb) {
  const std::uint64_t k = key(device, gnb);
  auto it = cache_.find(k);
  if (it != cache_.end()) return it->second;

  Vec3 snapped{std::round(device.x / grid_m_) * grid_m_, std::round(device.y / grid_m_) * grid_m_,
               device.z};
  const Vec3& g = gnbs_.at(static_cast<std::size_t>(gnb));
  LinkGeometry geom = make_geometry(snapped, g, f_c_ghz_, prop_);
  geom.d_3d = std::max(geom.d_3d, 1.0);

  Rng rng = make_stream(seed_, streams::kChannel, k);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LinkState s;
  s.los = u(rng) < los_probability(geom);
  s.path_loss_db = s.los ? path_loss_los(geom) : path_loss_nlos(geom);
  std::normal_distribution<double> shadow(
      0.0, s.los ? prop_.shadowing_los_db : prop_.shadowing_nlos_db);
  s.shadowing_db = shadow(rng);
  ++draws_;
  return cache_.emplace(k, s).first->second;
}

}  // namespace coexist::channel
