#include "coexist/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace coexist::agent {

Environment::Environment(const scenario::ScenarioConfig& cfg, std::uint64_t run_seed,
                         EnvironmentOptions opts)
    : cfg_(cfg),
      seed_(run_seed),
      opts_(opts),
      task_(cfg.ai.task, cfg.n_ai(), cfg.rng_seed),
      norm_(normalization_for(cfg)),
      selection_rng_(make_stream(run_seed, streams::kSelection)) {}

std::vector<int> Environment::random_selection(int m) {
  std::vector<int> idx(static_cast<std::size_t>(cfg_.n_ai()));
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<int> sel(idx.size(), 0);
  for (int k = 0; k < m; ++k) {
    std::uniform_int_distribution<int> pick(k, static_cast<int>(idx.size()) - 1);
    std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(pick(selection_rng_))]);
    sel[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])] = 1;
  }
  return sel;
}

Eigen::VectorXd Environment::reset() {
  ran::EngineOptions eo;
  eo.slicing_fraction = opts_.slicing_fraction;
  engine_ = std::make_unique<ran::Engine>(cfg_, seed_, eo);
  protocol_ = std::make_unique<learn::Protocol>(cfg_, seed_);
  model_ = learn::ModelState{task_.initial_point(), 0, false};
  steps_ = 0;
  Step s = run(random_selection(cfg_.n_required()));
  return s.state;
}

Environment::Step Environment::step(const std::vector<int>& selection) {
  Step s = run(selection);
  ++steps_;
  s.done = s.converged || steps_ >= cfg_.ai.episode_length;
  return s;
}

Environment::Step Environment::run(const std::vector<int>& selection) {
  Step s;
  engine_->reset_window();
  s.outcome = protocol_->run_iteration(*engine_, selection, task_, model_);
  const double t_end = engine_->now();
  engine_->settle_availability(t_end);

  std::vector<PerDirection<const metrics::AvailabilityRecord*>> recs;
  std::vector<PerDirection<double>> ubuf;
  for (int u = 0; u < engine_->num_urllc(); ++u) {
    recs.push_back({&engine_->availability(u, Direction::Ul), &engine_->availability(u, Direction::Dl)});
    ubuf.push_back({engine_->buffered_bytes(Flow::Urllc, u, Direction::Ul),
                    engine_->buffered_bytes(Flow::Urllc, u, Direction::Dl)});
  }
  metrics::AiIterationInfo info;
  for (int i = 0; i < cfg_.n_ai(); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    info.selected.push_back(selection[idx] != 0);
    auto opt = [](double v) -> std::optional<double> {
      if (std::isfinite(v)) return v;
      return std::nullopt;
    };
    info.dl_delay_s.push_back(opt(s.outcome.dl_delay_s[idx]));
    info.ul_delay_s.push_back(opt(s.outcome.ul_delay_s[idx]));
    info.buffer_bytes.push_back({engine_->buffered_bytes(Flow::Ai, i, Direction::Ul),
                                 engine_->buffered_bytes(Flow::Ai, i, Direction::Dl)});
  }
  s.stats = metrics::window_stats(engine_->window_log(), t_end, recs, engine_->urllc_cells(), ubuf,
                                  info);
  s.state = encode_state(s.stats, engine_->num_cells(), norm_);
  s.reward = compute_reward(s.stats, s.outcome.d_ai_s, cfg_);
  s.converged = model_.converged;
  return s;
}

}  // namespace coexist::agent
