#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "coexist/environment.hpp"
#include "coexist/replay.hpp"
#include "coexist/sac.hpp"

namespace coexist::agent {

enum class RunMode { Train, Evaluate };

struct EpisodeTrace {
  std::vector<learn::IterationOutcome> iterations;
  std::vector<double> rewards;
  std::vector<int> selected_counts;
  std::vector<PerDirection<double>> availability;  // per URLLC device over the episode
  std::vector<TrainReport> reports;
  std::size_t transitions_stored = 0;
  double duration_s = 0.0;

  double mean_reward() const;
};

// Shared state of the training loop across episodes.
struct TrainerClock {
  long iterations = 0;
  long since_train = 0;
  Rng replay_rng;
};

// One SAC-driven episode. In training mode every transition goes to the
// buffer and training runs every `train_interval` iterations once the buffer
// holds `min_buffer` transitions. Evaluation uses the deterministic policy
// and never touches the buffer.
EpisodeTrace run_episode(Environment& env, Sac& agent, ReplayBuffer* buffer, RunMode mode,
                         Rng& rng, TrainerClock* clock = nullptr);

// Episode under an arbitrary selection rule (baselines).
using SelectionPolicy = std::function<std::vector<int>(const Eigen::VectorXd& state, Environment&)>;
EpisodeTrace run_policy_episode(Environment& env, const SelectionPolicy& policy);

struct TrainingCurvePoint {
  int episode = 0;
  long iterations = 0;
  double mean_reward = 0.0;
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double entropy = 0.0;
  double temperature = 0.0;
};

struct TrainingResult {
  std::vector<TrainingCurvePoint> curve;
  long iterations = 0;
};

// Trains on episodes with run seeds seed_base, seed_base + 1, ...
TrainingResult train_agent(const scenario::ScenarioConfig& cfg, Sac& agent, int episodes,
                           std::uint64_t seed_base, EnvironmentOptions opts = {},
                           const std::function<void(const TrainingCurvePoint&)>& progress = {});

}  // namespace coexist::agent
