#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "coexist/rng.hpp"
#include "coexist/types.hpp"

namespace coexist::scenario {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class MobilityPolicy { Fixed, RandomPerSeed };

struct UrllcProfile {
  Vec3 initial_position;
  double speed_mps = 30.0 / 3.6;
  MobilityPolicy mobility = MobilityPolicy::RandomPerSeed;
  double heading_deg = 0.0;  // used when mobility is Fixed
  double span_m = 2.0;       // back-and-forth movement span along the heading
  double packet_period_s = 0.006;
  int ul_bytes = 64;
  int dl_bytes = 80;

  friend bool operator==(const UrllcProfile&, const UrllcProfile&) = default;
};

struct HallGeometry {
  Vec3 size{40.0, 40.0, 10.0};
  friend bool operator==(const HallGeometry&, const HallGeometry&) = default;
};

struct RadioParams {
  double carrier_ghz = 2.6;
  double bandwidth_hz = 40e6;
  int num_rbs = 106;
  double rb_bandwidth_hz = 360e3;
  double tti_s = 0.0005;
  double ul_tx_power_w = 0.2;
  double dl_tx_power_w = 0.5;
  double noise_figure_db = 9.0;
  double combining_gain_db = 3.0;
  double target_bler = 0.1;
  int processing_ttis = 1;
  int harq_feedback_ttis = 1;
  double pf_smoothing = 0.05;
  double position_grid_m = 1.0;

  friend bool operator==(const RadioParams&, const RadioParams&) = default;
};

struct PropagationParams {
  double h_clut_m = 6.0;
  double d_clut_m = 2.0;
  double r_clut = 0.6;
  double h_device_m = 1.5;
  double shadowing_los_db = 4.3;
  double shadowing_nlos_db = 4.0;

  friend bool operator==(const PropagationParams&, const PropagationParams&) = default;
};

struct UrllcService {
  PerDirection<double> delay_bound_s{0.006, 0.004};
  PerDirection<double> survival_time_s{0.006, 0.006};
  PerDirection<int> max_harq_tx{3, 2};
  std::vector<UrllcProfile> devices;

  friend bool operator==(const UrllcService&, const UrllcService&) = default;
};

enum class TaskKind { Quadratic, Nonconvex, FederatedAveraging };

std::string_view to_string(TaskKind k);

struct TaskParams {
  TaskKind kind = TaskKind::Quadratic;
  int dimension = 10;
  double mu = 1.0;              // smallest curvature (quadratic / FL)
  double smoothness = 1.0;      // largest curvature L (quadratic / FL)
  double heterogeneity = 0.0;   // spread of local minimizers b_i around the global one
  double noise_sigma2 = 1.0;    // E||e||^2 per device
  double learning_rate = 0.1;
  int local_epochs = 1;         // FL only
  double well_amplitude = 1.0;  // nonconvex only
  double well_frequency = 1.5;  // nonconvex only
  double init_distance = 3.0;   // ||w_1 - w*||
  double epsilon = 1e-6;        // convergence threshold on f(w) - f(w*)

  friend bool operator==(const TaskParams&, const TaskParams&) = default;
};

struct AiService {
  int device_count = 0;
  std::vector<Vec3> positions;  // empty = placed from layout_seed
  std::uint64_t layout_seed = 1;
  int required_updates = 1;
  double message_bytes = 2e6;
  PerDirection<int> max_harq_tx{10, 10};
  PerDirection<int> max_rlc_retx{8, 8};
  double compute_median_s = 0.05;
  double compute_sigma = 0.5;
  double server_compute_s = 0.01;
  double t_max_s = 10.0;
  int episode_length = 20;
  TaskParams task;

  friend bool operator==(const AiService&, const AiService&) = default;
};

struct RewardWeights {
  double upsilon = 0.5;
  double zeta = 100.0;
  friend bool operator==(const RewardWeights&, const RewardWeights&) = default;
};

enum class TemperatureMode { Fixed, Auto };
enum class ReplayMode { Prioritized, Uniform };

struct AgentHyperparams {
  double discount = 0.1;
  int minibatch = 200;
  int replay_capacity = 1000000;
  std::vector<int> hidden{128, 128};
  double priority_alpha = 0.6;
  double priority_beta = 0.4;
  double learning_rate = 3e-4;
  double soft_update = 0.002;
  TemperatureMode temperature_mode = TemperatureMode::Auto;
  double temperature = 0.2;  // fixed value, or initial value when auto-tuned
  int min_buffer = 200;
  ReplayMode replay = ReplayMode::Prioritized;
  int train_interval = 200;  // environment iterations between training calls
  int gradient_steps = 1;    // gradient steps per training call
  double grad_clip = 10.0;
  int episodes = 200;

  friend bool operator==(const AgentHyperparams&, const AgentHyperparams&) = default;
};

struct ScenarioConfig {
  std::uint64_t rng_seed = 1;
  HallGeometry hall;
  std::vector<Vec3> gnb_positions;
  RadioParams radio;
  PropagationParams propagation;
  UrllcService urllc;
  AiService ai;
  double availability_req = 0.99;
  double sensitivity = 0.1;
  RewardWeights reward;
  double slicing_fraction = 0.0;
  double single_urllc_duration_s = 20.0;
  AgentHyperparams agent;

  int n_required() const { return ai.required_updates; }
  int n_ai() const { return ai.device_count; }

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

// Parse + validate. Throws nlohmann::json::parse_error on malformed text and
// ConfigError naming the field on any invalid or unknown entry.
ScenarioConfig load_scenario(const std::filesystem::path& path);
ScenarioConfig parse_scenario(std::string_view text);
ScenarioConfig from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScenarioConfig& cfg);

void validate(const ScenarioConfig& cfg);

// Deterministic stream for (cfg.rng_seed, label, keys).
Rng derive_rng(const ScenarioConfig& cfg, std::string_view label, std::uint64_t key_a = 0,
               std::uint64_t key_b = 0);

// AI device positions, generating them from layout_seed when not listed.
std::vector<Vec3> ai_positions(const ScenarioConfig& cfg);

// Built-in presets. The desk preset is what the acceptance suite runs.
ScenarioConfig desk_defaults();
ScenarioConfig full_scale();
ScenarioConfig toy_coexistence();

}  // namespace coexist::scenario
