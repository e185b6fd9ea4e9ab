#include "coexist/mdp.hpp"

#include <algorithm>
#include <cmath>

namespace coexist::agent {

namespace {

double unit(double x, double lo, double hi) {
  if (!std::isfinite(x)) return x > 0 ? 1.0 : 0.0;
  return std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
}

void push_triple(std::vector<double>& v, const metrics::Triple& t, double lo, double hi) {
  v.push_back(t.present ? unit(t.a, lo, hi) : 0.0);
  v.push_back(t.present ? unit(t.b, lo, hi) : 0.0);
  v.push_back(t.present ? unit(t.c, lo, hi) : 0.0);
  v.push_back(t.present ? 1.0 : 0.0);
}

}  // namespace

Normalization normalization_for(const scenario::ScenarioConfig& cfg) {
  Normalization n;
  const double bound = std::max(cfg.urllc.delay_bound_s.ul, cfg.urllc.delay_bound_s.dl);
  n.urllc_delay_max_s = 2.0 * bound;
  const double tsv = std::max(cfg.urllc.survival_time_s.ul, cfg.urllc.survival_time_s.dl);
  n.downtime_max_s = 10.0 * std::max(tsv, cfg.radio.tti_s);
  double pkt = 1.0;
  for (const auto& d : cfg.urllc.devices) pkt = std::max<double>({pkt, static_cast<double>(d.ul_bytes),
                                                                  static_cast<double>(d.dl_bytes)});
  n.urllc_buffer_max_bytes = 10.0 * pkt;
  n.ai_delay_max_s = cfg.ai.t_max_s;
  n.ai_buffer_max_bytes = cfg.ai.message_bytes;
  n.rbs_max = cfg.radio.num_rbs;
  return n;
}

int state_dimension(int urllc_devices, int ai_devices, int cells) {
  return urllc_devices * (2 * kUrllcDirectionEntries + cells) + ai_devices * kAiEntries +
         cells * kGnbEntries;
}

int state_dimension(const scenario::ScenarioConfig& cfg) {
  return state_dimension(static_cast<int>(cfg.urllc.devices.size()), cfg.n_ai(),
                         static_cast<int>(cfg.gnb_positions.size()));
}

Eigen::VectorXd encode_state(const metrics::WindowStats& w, int cells, const Normalization& nm) {
  std::vector<double> v;
  for (const auto& u : w.urllc) {
    for (Direction d : kDirections) {
      const auto& s = u.dir[d];
      v.push_back(std::clamp(s.per, 0.0, 1.0));
      v.push_back(unit(s.mean_downtime_s, 0.0, nm.downtime_max_s));
      v.push_back(unit(s.buffer_bytes, 0.0, nm.urllc_buffer_max_bytes));
      push_triple(v, s.sinr_db, nm.sinr_min_db, nm.sinr_max_db);
      push_triple(v, s.delay_s, 0.0, nm.urllc_delay_max_s);
    }
    for (int c = 0; c < cells; ++c) v.push_back(u.cell == c ? 1.0 : 0.0);
  }
  for (const auto& a : w.ai) {
    v.push_back(a.selected ? 1.0 : 0.0);
    for (const auto& delay : {a.dl_delay_s, a.ul_delay_s}) {
      const bool present = delay.has_value() && std::isfinite(*delay);
      v.push_back(present ? unit(*delay, 0.0, nm.ai_delay_max_s) : 0.0);
      v.push_back(present ? 1.0 : 0.0);
    }
    for (Direction d : kDirections) v.push_back(unit(a.buffer_bytes[d], 0.0, nm.ai_buffer_max_bytes));
    for (Direction d : kDirections) push_triple(v, a.sinr_db[d], nm.sinr_min_db, nm.sinr_max_db);
  }
  for (const auto& g : w.gnb) {
    for (Direction d : kDirections) {
      v.push_back(unit(g.urllc_rbs[d], 0.0, nm.rbs_max));
      v.push_back(unit(g.ai_rbs[d], 0.0, nm.rbs_max));
    }
  }
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<int> map_action(const Eigen::VectorXd& a, int n) {
  const auto size = static_cast<std::size_t>(a.size());
  std::vector<int> sel(size, 0);
  std::size_t nonneg = 0;
  for (std::size_t i = 0; i < size; ++i) nonneg += a[static_cast<Eigen::Index>(i)] >= 0.0;
  if (static_cast<int>(nonneg) >= n) {
    for (std::size_t i = 0; i < size; ++i) sel[i] = a[static_cast<Eigen::Index>(i)] >= 0.0;
    return sel;
  }
  std::vector<double> sorted(a.data(), a.data() + a.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double threshold = sorted[static_cast<std::size_t>(std::clamp<int>(n, 1, static_cast<int>(size)) - 1)];
  for (std::size_t i = 0; i < size; ++i) sel[i] = a[static_cast<Eigen::Index>(i)] >= threshold;
  return sel;
}

double reward_from(double worst_gap, double d_ai_s, double t_max_s, double upsilon, double zeta) {
  const double urllc = upsilon * std::exp(zeta * std::min(worst_gap, 0.0));
  const double ai = (1.0 - upsilon) * (t_max_s - std::clamp(d_ai_s, 0.0, t_max_s)) / t_max_s;
  return urllc + ai;
}

double compute_reward(const metrics::WindowStats& w, double d_ai_s,
                      const scenario::ScenarioConfig& cfg) {
  double gap = w.worst_availability_gap(cfg.availability_req);
  if (!std::isfinite(gap)) gap = 0.0;
  return reward_from(gap, d_ai_s, cfg.ai.t_max_s, cfg.reward.upsilon, cfg.reward.zeta);
}

}  // namespace coexist::agent
