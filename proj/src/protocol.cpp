#include "coexist/protocol.hpp"

#include <cmath>
#include <limits>

#include "coexist/metrics.hpp"

namespace coexist::learn {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::vector<double> IterationOutcome::selected_totals() const {
  std::vector<double> out;
  for (int i : selected) out.push_back(totals_s[static_cast<std::size_t>(i)]);
  return out;
}

Protocol::Protocol(const scenario::ScenarioConfig& cfg, std::uint64_t run_seed)
    : cfg_(cfg),
      compute_rng_(make_stream(run_seed, streams::kCompute)),
      noise_rng_(make_stream(run_seed, streams::kGradientNoise)) {}

IterationOutcome Protocol::run_iteration(ran::Engine& engine, const std::vector<int>& selection,
                                         const LearningTask& task, ModelState& model) {
  const int n_dev = cfg_.n_ai();
  const int n = cfg_.n_required();
  const double t_max = cfg_.ai.t_max_s;
  const double msg = cfg_.ai.message_bytes;

  IterationOutcome out;
  out.k = model.k;
  for (int i = 0; i < n_dev && i < static_cast<int>(selection.size()); ++i) {
    if (selection[static_cast<std::size_t>(i)]) out.selected.push_back(i);
  }
  if (static_cast<int>(out.selected.size()) < n) {
    throw ProtocolError("selection has fewer than n devices");
  }
  out.dl_delay_s.assign(static_cast<std::size_t>(n_dev), kInf);
  out.compute_delay_s.assign(static_cast<std::size_t>(n_dev), kInf);
  out.ul_delay_s.assign(static_cast<std::size_t>(n_dev), kInf);
  out.totals_s.assign(static_cast<std::size_t>(n_dev), kInf);
  out.server_delay_s = cfg_.ai.server_compute_s;

  const std::uint64_t tag = ++round_;
  engine.flush_ai();
  const double t0 = engine.now();
  out.t_start_s = t0;
  for (int i : out.selected) engine.enqueue_ai(i, Direction::Dl, msg, tag);

  std::lognormal_distribution<double> compute(std::log(cfg_.ai.compute_median_s),
                                              cfg_.ai.compute_sigma);
  std::vector<double> ul_ready(static_cast<std::size_t>(n_dev), kInf);
  std::vector<bool> ul_queued(static_cast<std::size_t>(n_dev), false);
  std::vector<double> finished;
  double end_time = t0 + t_max;

  while (engine.now() < end_time - 1e-12) {
    for (int i : out.selected) {
      const auto idx = static_cast<std::size_t>(i);
      if (!ul_queued[idx] && ul_ready[idx] <= engine.now() + 1e-12) {
        engine.enqueue_ai(i, Direction::Ul, msg, tag);
        ul_queued[idx] = true;
      }
    }
    for (const ran::DeliveryEvent& ev : engine.step_tti()) {
      if (ev.tag != tag || ev.kind != ran::DeliveryEvent::Kind::Delivered) continue;
      const auto idx = static_cast<std::size_t>(ev.device);
      if (ev.dir == Direction::Dl) {
        out.dl_delay_s[idx] = ev.time_s - t0;
        out.compute_delay_s[idx] = cfg_.ai.compute_median_s > 0 ? compute(compute_rng_) : 0.0;
        ul_ready[idx] = ev.time_s + out.compute_delay_s[idx];
      } else {
        out.ul_delay_s[idx] = ev.time_s - ul_ready[idx];
        out.totals_s[idx] = ev.time_s - t0;
        finished.push_back(out.totals_s[idx]);
        if (static_cast<int>(finished.size()) == n) {
          end_time = std::min(t0 + t_max, ev.time_s + out.server_delay_s);
        }
      }
    }
  }

  out.d_ai_s = metrics::training_delay(out.selected_totals(), out.server_delay_s, n, t_max);
  std::vector<double> sel = out.selected_totals();
  std::vector<int> order = metrics::first_n(sel, n);
  out.timeout = !(static_cast<int>(finished.size()) >= n &&
                  sel[static_cast<std::size_t>(order.back())] + out.server_delay_s < t_max);
  if (!out.timeout) {
    std::vector<Vector> messages;
    for (int j : order) {
      const int dev = out.selected[static_cast<std::size_t>(j)];
      out.first_n.push_back(dev);
      messages.push_back(local_update(task, model.w, dev, noise_rng_));
    }
    model.w = global_update(task, model.w, messages, n);
  }
  ++model.k;
  model.converged = is_converged(task, model.w);
  out.t_end_s = engine.now();
  return out;
}

}  // namespace coexist::learn
