#pragma once

#include <cstdint>
#include <vector>

#include "coexist/learning_task.hpp"
#include "coexist/ran_sim.hpp"
#include "coexist/rng.hpp"
#include "coexist/scenario.hpp"

namespace coexist::learn {

struct IterationOutcome {
  int k = 0;
  std::vector<int> selected;            // indices of requested devices
  std::vector<double> dl_delay_s;       // per AI device, +inf if not delivered
  std::vector<double> compute_delay_s;  // per AI device, +inf if not started
  std::vector<double> ul_delay_s;       // per AI device, +inf if not delivered
  std::vector<double> totals_s;         // d^D + d^pr + d^U per AI device, +inf if incomplete
  double server_delay_s = 0.0;
  double d_ai_s = 0.0;
  std::vector<int> first_n;  // empty on timeout
  bool timeout = false;
  double t_start_s = 0.0;
  double t_end_s = 0.0;

  // Totals restricted to the selected devices, in selection order.
  std::vector<double> selected_totals() const;
};

// n-sync round over the simulated network. The server sends the model to the
// selected devices, each device computes after its download and uploads its
// message; the round ends after the first n uploads plus server processing,
// or at t_max with the model unchanged.
class Protocol {
 public:
  Protocol(const scenario::ScenarioConfig& cfg, std::uint64_t run_seed);

  // selection: 0/1 per AI device. Throws ProtocolError if fewer than n are set.
  IterationOutcome run_iteration(ran::Engine& engine, const std::vector<int>& selection,
                                 const LearningTask& task, ModelState& model);

 private:
  scenario::ScenarioConfig cfg_;
  Rng compute_rng_;
  Rng noise_rng_;
  std::uint64_t round_ = 0;
};

}  // namespace coexist::learn
