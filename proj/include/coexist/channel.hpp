#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "coexist/rng.hpp"
#include "coexist/scenario.hpp"
#include "coexist/types.hpp"

namespace coexist::channel {

inline constexpr double kBoltzmann = 1.380649e-23;
inline constexpr double kNoiseTemperatureK = 290.0;

struct LinkGeometry {
  double d_2d = 0.0;
  double d_3d = 0.0;
  double f_c_ghz = 2.6;
  double h_gnb = 8.0;
  double h_device = 1.5;
  double h_clut = 6.0;
  double d_clut = 2.0;
  double r_clut = 0.6;
};

LinkGeometry make_geometry(const Vec3& device, const Vec3& gnb, double f_c_ghz,
                           const scenario::PropagationParams& prop);

// InF-DH path loss in dB. Throw std::domain_error for d_3d <= 0 or f_c <= 0.
double path_loss_los(const LinkGeometry& g);
double path_loss_dense_high(const LinkGeometry& g);
double path_loss_nlos(const LinkGeometry& g);

// Throws std::domain_error if r_clut is outside (0,1) or h_gnb == h_device.
double los_probability(const LinkGeometry& g);

struct LinkState {
  bool los = false;
  double shadowing_db = 0.0;
  double path_loss_db = 0.0;
  PerDirection<std::optional<double>> last_sinr_db;

  double total_loss_db() const { return path_loss_db + shadowing_db; }
  double gain() const;  // linear 10^(-total_loss/10)
};

double thermal_noise_w(double bandwidth_hz, double noise_figure_db);

// Received power over thermal noise plus interference. `signal_gain_db` is
// added on top of the desired link (fading and combining). Returns -inf when
// the desired power is zero or the bandwidth is not positive.
double sinr_db(const LinkState& link, double tx_power_w,
               const std::vector<std::pair<LinkState, double>>& interferers, double bandwidth_hz,
               double noise_figure_db, double signal_gain_db = 0.0);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

// One LOS/shadowing realisation per (grid-quantised device position, gNB)
// pair. The draw for a pair comes from a stream keyed by the pair itself, so
// it does not depend on query order.
class LinkCache {
 public:
  LinkCache(const scenario::ScenarioConfig& cfg, std::uint64_t seed);

  const LinkState& get(const Vec3& device, int gnb);
  LinkState& mutable_get(const Vec3& device, int gnb);

  std::size_t draws() const { return draws_; }
  std::size_t size() const { return cache_.size(); }

 private:
  std::uint64_t key(const Vec3& device, int gnb) const;

  std::vector<Vec3> gnbs_;
  scenario::PropagationParams prop_;
  double f_c_ghz_;
  double grid_m_;
  std::uint64_t seed_;
  std::unordered_map<std::uint64_t, LinkState> cache_;
  std::size_t draws_ = 0;
};

}  // namespace coexist::channel
