#pragma once

#include <vector>

#include <Eigen/Dense>

#include "coexist/metrics.hpp"
#include "coexist/scenario.hpp"

namespace coexist::agent {

// Fixed min-max ranges used to bring every state entry into [0, 1].
struct Normalization {
  double sinr_min_db = -20.0;
  double sinr_max_db = 60.0;
  double urllc_delay_max_s = 0.012;
  double downtime_max_s = 0.06;
  double urllc_buffer_max_bytes = 800.0;
  double ai_delay_max_s = 10.0;
  double ai_buffer_max_bytes = 2e6;
  double rbs_max = 106.0;
};

Normalization normalization_for(const scenario::ScenarioConfig& cfg);

// Entries per block.
inline constexpr int kUrllcDirectionEntries = 11;  // per, downtime, buffer, 3 sinr + bit, 3 delay + bit
inline constexpr int kAiEntries = 15;              // selected, dl + bit, ul + bit, 2 buffers, 2 x (3 sinr + bit)
inline constexpr int kGnbEntries = 4;

int state_dimension(int urllc_devices, int ai_devices, int cells);
int state_dimension(const scenario::ScenarioConfig& cfg);

Eigen::VectorXd encode_state(const metrics::WindowStats& w, int cells, const Normalization& norm);

// Selection from a continuous action: every nonnegative entry if there are at
// least n of them, otherwise every entry >= the n-th largest.
std::vector<int> map_action(const Eigen::VectorXd& a, int n);

// upsilon exp(zeta min(worst_gap, 0)) + (1 - upsilon)(t_max - d_ai)/t_max
double reward_from(double worst_gap, double d_ai_s, double t_max_s, double upsilon, double zeta);
double compute_reward(const metrics::WindowStats& w, double d_ai_s,
                      const scenario::ScenarioConfig& cfg);

}  // namespace coexist::agent
