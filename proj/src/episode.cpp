#include "coexist/episode.hpp"

#include <numeric>

namespace coexist::agent {

double EpisodeTrace::mean_reward() const {
  if (rewards.empty()) return 0.0;
  return std::accumulate(rewards.begin(), rewards.end(), 0.0) / static_cast<double>(rewards.size());
}

namespace {

void close_episode(Environment& env, EpisodeTrace& trace) {
  auto& eng = env.engine();
  trace.duration_s = eng.now();
  eng.settle_availability(trace.duration_s);
  for (int u = 0; u < eng.num_urllc(); ++u) {
    PerDirection<double> a;
    for (Direction d : kDirections) {
      a[d] = trace.duration_s > 0 ? eng.availability(u, d).estimate(0.0, trace.duration_s) : 1.0;
    }
    trace.availability.push_back(a);
  }
}

void record(EpisodeTrace& trace, const Environment::Step& st, const std::vector<int>& sel) {
  trace.iterations.push_back(st.outcome);
  trace.rewards.push_back(st.reward);
  trace.selected_counts.push_back(std::accumulate(sel.begin(), sel.end(), 0));
}

}  // namespace

EpisodeTrace run_episode(Environment& env, Sac& agent, ReplayBuffer* buffer, RunMode mode,
                         Rng& rng, TrainerClock* clock) {
  EpisodeTrace trace;
  const bool train = mode == RunMode::Train;
  Eigen::VectorXd s = env.reset();
  const int n = env.config().n_required();
  const auto& hp = agent.hyper();
  while (true) {
    const Eigen::VectorXd a = agent.act(s, !train, rng);
    const std::vector<int> sel = map_action(a, n);
    Environment::Step st = env.step(sel);
    record(trace, st, sel);
    if (train && buffer) {
      buffer->add(Transition{s, a, st.reward, st.state, st.converged ? 0.0 : 1.0});
      ++trace.transitions_stored;
      if (clock) {
        ++clock->iterations;
        if (++clock->since_train >= hp.train_interval &&
            buffer->size() >= static_cast<std::size_t>(hp.min_buffer)) {
          clock->since_train = 0;
          for (int g = 0; g < hp.gradient_steps; ++g) trace.reports.push_back(agent.train_step(*buffer, clock->replay_rng));
        }
      }
    }
    s = st.state;
    if (st.done) break;
  }
  close_episode(env, trace);
  return trace;
}

EpisodeTrace run_policy_episode(Environment& env, const SelectionPolicy& policy) {
  EpisodeTrace trace;
  Eigen::VectorXd s = env.reset();
  while (true) {
    const std::vector<int> sel = policy(s, env);
    Environment::Step st = env.step(sel);
    record(trace, st, sel);
    s = st.state;
    if (st.done) break;
  }
  close_episode(env, trace);
  return trace;
}

TrainingResult train_agent(const scenario::ScenarioConfig& cfg, Sac& agent, int episodes,
                           std::uint64_t seed_base, EnvironmentOptions opts,
                           const std::function<void(const TrainingCurvePoint&)>& progress) {
  const auto& hp = agent.hyper();
  ReplayBuffer buffer(static_cast<std::size_t>(hp.replay_capacity), hp.priority_alpha,
                      hp.priority_beta, hp.replay);
  Rng rng = make_stream(seed_base, streams::kExploration);
  TrainerClock clock;
  clock.replay_rng = make_stream(seed_base, streams::kReplay);
  TrainingResult result;
  for (int e = 0; e < episodes; ++e) {
    Environment env(cfg, seed_base + static_cast<std::uint64_t>(e), opts);
    EpisodeTrace tr = run_episode(env, agent, &buffer, RunMode::Train, rng, &clock);
    TrainingCurvePoint pt;
    pt.episode = e;
    pt.iterations = clock.iterations;
    pt.mean_reward = tr.mean_reward();
    pt.temperature = agent.temperature();
    int trained = 0;
    for (const auto& r : tr.reports) {
      if (!r.trained) continue;
      ++trained;
      pt.critic_loss += r.critic_loss;
      pt.actor_loss += r.actor_loss;
      pt.entropy += r.entropy;
    }
    if (trained > 0) {
      pt.critic_loss /= trained;
      pt.actor_loss /= trained;
      pt.entropy /= trained;
    }
    result.curve.push_back(pt);
    if (progress) progress(pt);
  }
  result.iterations = clock.iterations;
  return result;
}

}  // namespace coexist::agent
