#pragma once

#include <cstdint>
#include <ostream>
#include <istream>
#include <vector>

#include "coexist/nn.hpp"
#include "coexist/replay.hpp"
#include "coexist/rng.hpp"
#include "coexist/scenario.hpp"

namespace coexist::agent {

using nn::Matrix;

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;

struct Batch {
  Matrix s;       // state_dim x B
  Matrix a;       // action_dim x B
  Vector r;       // B
  Matrix s_next;  // state_dim x B
  Vector not_done;
  Vector weights;  // importance weights
};

Batch make_batch(const ReplayBuffer& buffer, const std::vector<std::size_t>& indices,
                 const std::vector<double>& weights);

// Squashed Gaussian evaluated for given standard-normal noise chi.
struct PolicyEval {
  Matrix mean;
  Matrix log_std;  // clamped
  Matrix raw_log_std;
  Matrix u;        // pre-squash sample
  Matrix action;   // tanh(u)
  Vector log_prob;
  nn::Mlp::Cache cache;
};

PolicyEval evaluate_policy(const nn::Mlp& actor, const Matrix& states, const Matrix& chi);

// log(1 - tanh(u)^2) computed without cancellation.
double log_one_minus_tanh2(double u);

struct TrainReport {
  bool trained = false;
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double temperature = 0.0;
  double entropy = 0.0;  // -mean log pi
};

class Sac {
 public:
  Sac(int state_dim, int action_dim, const scenario::AgentHyperparams& hp, std::uint64_t seed);

  int state_dim() const { return state_dim_; }
  int action_dim() const { return action_dim_; }

  // Stochastic sample tanh(mu + sigma chi) or deterministic tanh(mu).
  Vector act(const Vector& state, bool deterministic, Rng& rng) const;
  Vector act_with_noise(const Vector& state, const Vector& chi) const;
  double log_prob(const Vector& state, const Vector& chi) const;

  // r + I lambda (min target Q(s', a') - psi log pi_target(a'|s')), a' drawn
  // from the target actor with noise chi_next.
  Vector critic_target(const Batch& b, const Matrix& chi_next) const;

  // Weighted squared TD loss of critic `which` (0 or 1) against fixed targets.
  double critic_loss(int which, const Batch& b, const Vector& y, std::vector<nn::Layer>* grads,
                     Vector* td = nullptr) const;
  // mean(psi log pi(a|s) - min_i Q_i(s, a)), a reparameterised with chi.
  double actor_loss(const Matrix& states, const Matrix& chi, std::vector<nn::Layer>* grads,
                    Vector* log_probs = nullptr) const;

  TrainReport train_step(ReplayBuffer& buffer, Rng& rng);

  double temperature() const;
  void set_temperature(double psi);
  double target_entropy() const { return target_entropy_; }

  nn::Mlp& actor() { return actor_; }
  const nn::Mlp& actor() const { return actor_; }
  nn::Mlp& critic(int i) { return critic_[i]; }
  const nn::Mlp& critic(int i) const { return critic_[i]; }
  nn::Mlp& target_critic(int i) { return target_critic_[i]; }
  nn::Mlp& target_actor() { return target_actor_; }
  const scenario::AgentHyperparams& hyper() const { return hp_; }

  void save(std::ostream& out) const;
  void load(std::istream& in);

 private:
  int state_dim_;
  int action_dim_;
  scenario::AgentHyperparams hp_;
  nn::Mlp actor_;
  nn::Mlp target_actor_;
  nn::Mlp critic_[2];
  nn::Mlp target_critic_[2];
  nn::Adam actor_opt_;
  nn::Adam critic_opt_[2];
  double log_temp_;
  nn::Adam temp_opt_;
  double target_entropy_;
};

}  // namespace coexist::agent
