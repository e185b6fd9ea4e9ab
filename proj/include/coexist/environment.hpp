#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "coexist/learning_task.hpp"
#include "coexist/mdp.hpp"
#include "coexist/metrics.hpp"
#include "coexist/protocol.hpp"
#include "coexist/ran_sim.hpp"
#include "coexist/scenario.hpp"

namespace coexist::agent {

struct EnvironmentOptions {
  double slicing_fraction = 0.0;
};

// One episode of the device-selection problem: each step runs one n-sync
// iteration with the given selection and observes the window it spanned.
class Environment {
 public:
  struct Step {
    Eigen::VectorXd state;
    double reward = 0.0;
    bool converged = false;
    bool done = false;
    learn::IterationOutcome outcome;
    metrics::WindowStats stats;
  };

  Environment(const scenario::ScenarioConfig& cfg, std::uint64_t run_seed,
              EnvironmentOptions opts = {});

  // Runs the initial iteration on n random devices and returns the first state.
  Eigen::VectorXd reset();
  Step step(const std::vector<int>& selection);

  int state_dim() const { return state_dimension(cfg_); }
  int action_dim() const { return cfg_.n_ai(); }
  int iterations_done() const { return steps_; }
  int episode_length() const { return cfg_.ai.episode_length; }

  // m distinct devices chosen uniformly at random.
  std::vector<int> random_selection(int m);

  const scenario::ScenarioConfig& config() const { return cfg_; }
  ran::Engine& engine() { return *engine_; }
  const learn::LearningTask& task() const { return task_; }
  const learn::ModelState& model() const { return model_; }

 private:
  Step run(const std::vector<int>& selection);

  scenario::ScenarioConfig cfg_;
  std::uint64_t seed_;
  EnvironmentOptions opts_;
  std::unique_ptr<ran::Engine> engine_;
  std::unique_ptr<learn::Protocol> protocol_;
  learn::LearningTask task_;
  learn::ModelState model_;
  Normalization norm_;
  Rng selection_rng_;
  int steps_ = 0;
};

}  // namespace coexist::agent
