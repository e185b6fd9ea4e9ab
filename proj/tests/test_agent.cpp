#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "coexist/episode.hpp"
#include "coexist/mdp.hpp"
#include "coexist/nn.hpp"
#include "coexist/replay.hpp"
#include "coexist/sac.hpp"
#include "oracles.hpp"

using namespace coexist;
using namespace coexist::agent;
using coexist::nn::Mlp;

namespace {

scenario::AgentHyperparams small_hp() {
  scenario::AgentHyperparams hp;
  hp.hidden = {7, 5};
  hp.minibatch = 16;
  hp.min_buffer = 16;
  hp.temperature_mode = scenario::TemperatureMode::Fixed;
  hp.temperature = 0.3;
  hp.discount = 0.7;
  return hp;
}

Matrix normals(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = z(rng);
  return m;
}

scenario::ScenarioConfig short_toy(int length) {
  auto cfg = scenario::toy_coexistence();
  cfg.ai.episode_length = length;
  cfg.agent.min_buffer = 1;
  cfg.agent.minibatch = 2;
  cfg.agent.hidden = {8};
  return cfg;
}

}  // namespace

TEST_CASE("mlp: backward matches central differences") {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    Mlp net(3 + trial % 3, {6, 4}, 2, rng);
    const Matrix x = normals(net.input_size(), 5, rng);
    const Matrix w = normals(2, 5, rng);
    auto f = [&] { return net.forward(x).cwiseProduct(w).sum(); };
    Mlp::Cache cache;
    net.forward(x, cache);
    auto grads = net.zero_grads();
    const Matrix dx = net.backward(cache, w, &grads);
    CHECK(oracle::relative_error(nn::flatten(grads), oracle::numeric_gradient(net, f)) < 1e-4);
    Matrix xp = x;
    Eigen::VectorXd num(x.size());
    Eigen::VectorXd ana(x.size());
    for (int i = 0; i < x.size(); ++i) {
      const double keep = xp.data()[i];
      xp.data()[i] = keep + 1e-6;
      const double up = net.forward(xp).cwiseProduct(w).sum();
      xp.data()[i] = keep - 1e-6;
      const double dn = net.forward(xp).cwiseProduct(w).sum();
      xp.data()[i] = keep;
      num[i] = (up - dn) / 2e-6;
      ana[i] = dx.data()[i];
    }
    CHECK(oracle::relative_error(ana, num) < 1e-4);
  }
}

TEST_CASE("mlp: flat round trip, soft update and clipping") {
  Rng rng(2);
  Mlp a(4, {3}, 2, rng);
  Mlp b(4, {3}, 2, rng);
  const auto fa = a.flat();
  const auto fb = b.flat();
  CHECK(fa.size() == a.num_parameters());
  b.soft_update(a, 0.25);
  CHECK((b.flat() - (0.25 * fa + 0.75 * fb)).norm() < 1e-14);
  const double before = (b.flat() - fa).norm();
  b.soft_update(a, 0.25);
  CHECK((b.flat() - fa).norm() == doctest::Approx(0.75 * before));
  Eigen::VectorXd g = Eigen::VectorXd::Constant(4, 3.0);
  CHECK(nn::clip_norm(g, 1.0) == doctest::Approx(6.0));
  CHECK(g.norm() == doctest::Approx(1.0));
}

TEST_CASE("sac: critic loss gradient matches central differences") {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const int sd = 2 + trial % 4;
    const int ad = 1 + trial % 3;
    Sac sac(sd, ad, small_hp(), 100 + trial);
    const Batch b = oracle::random_batch(sd, ad, trial == 0 ? 2 : 6, rng);
    const Vector y = sac.critic_target(b, normals(ad, static_cast<int>(b.r.size()), rng));
    for (int which = 0; which < 2; ++which) {
      auto grads = sac.critic(which).zero_grads();
      sac.critic_loss(which, b, y, &grads);
      auto f = [&] { return sac.critic_loss(which, b, y, nullptr); };
      CHECK(oracle::relative_error(nn::flatten(grads), oracle::numeric_gradient(sac.critic(which), f)) <
            1e-4);
    }
  }
}

TEST_CASE("sac: actor loss gradient matches central differences") {
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const int sd = 2 + trial % 3;
    const int ad = 1 + trial % 4;
    Sac sac(sd, ad, small_hp(), 200 + trial);
    const Matrix s = normals(sd, 6, rng);
    const Matrix chi = normals(ad, 6, rng);
    auto grads = sac.actor().zero_grads();
    sac.actor_loss(s, chi, &grads);
    auto f = [&] { return sac.actor_loss(s, chi, nullptr); };
    CHECK(oracle::relative_error(nn::flatten(grads), oracle::numeric_gradient(sac.actor(), f)) < 1e-4);
  }
}

TEST_CASE("sac: tanh correction is stable for large pre-activations") {
  for (double u : {-40.0, -5.0, 0.0, 0.3, 5.0, 40.0}) {
    const double naive = std::log(1.0 - std::tanh(u) * std::tanh(u));
    if (std::isfinite(naive) && std::abs(u) < 10) CHECK(log_one_minus_tanh2(u) == doctest::Approx(naive));
    CHECK(std::isfinite(log_one_minus_tanh2(u)));
  }
}

TEST_CASE("sac: actions stay inside the open box and collapse without noise") {
  Sac sac(4, 3, small_hp(), 5);
  Rng rng(6);
  for (int i = 0; i < 500; ++i) {
    const Vector s = normals(4, 1, rng).col(0) * 5.0;
    const Vector a = sac.act(s, false, rng);
    CHECK(a.cwiseAbs().maxCoeff() < 1.0);
  }
  auto& last = sac.actor().layers().back();
  last.w.bottomRows(3).setZero();
  last.b.tail(3).setConstant(-30.0);
  for (int i = 0; i < 20; ++i) {
    const Vector s = normals(4, 1, rng).col(0);
    CHECK((sac.act(s, false, rng) - sac.act(s, true, rng)).norm() < 1e-7);
  }
}

TEST_CASE("sac: log-probability agrees with a binned sample density") {
  Sac sac(3, 1, small_hp(), 9);
  Vector s(3);
  s << 0.4, -0.2, 0.9;
  const Matrix out = sac.actor().forward(s);
  const double mean = out(0, 0);
  const double sigma = std::exp(std::clamp(out(1, 0), kLogStdMin, kLogStdMax));
  Rng rng(10);
  std::normal_distribution<double> z(0.0, 1.0);
  for (double offset : {0.0, 0.8}) {
    const double u0 = mean + offset * sigma;
    const double a0 = std::tanh(u0);
    const double half = 0.01;
    int hits = 0;
    const int draws = 1000000;
    for (int i = 0; i < draws; ++i) {
      const double a = std::tanh(mean + sigma * z(rng));
      if (std::abs(a - a0) < half) ++hits;
    }
    const double density = hits / (draws * 2.0 * half);
    Vector chi(1);
    chi[0] = offset;
    CHECK(density == doctest::Approx(std::exp(sac.log_prob(s, chi))).epsilon(0.05));
  }
}

TEST_CASE("sac: critic target terminal cut, zero discount and twin minimum") {
  Rng rng(41);
  Sac sac(3, 2, small_hp(), 3);
  Batch b = oracle::random_batch(3, 2, 8, rng);
  const Matrix chi = normals(2, 8, rng);
  b.not_done.setZero();
  b.r[0] = 0.7;
  const Vector y0 = sac.critic_target(b, chi);
  CHECK(y0[0] == 0.7);
  CHECK((y0 - b.r).norm() == 0.0);

  auto hp = small_hp();
  hp.discount = 0.0;
  Sac flat(3, 2, hp, 3);
  b.not_done.setOnes();
  CHECK((flat.critic_target(b, chi) - b.r).norm() == 0.0);

  const Vector y = sac.critic_target(b, chi);
  const PolicyEval e = evaluate_policy(sac.target_actor(), b.s_next, chi);
  Matrix in(5, 8);
  in.topRows(3) = b.s_next;
  in.bottomRows(2) = e.action;
  const Matrix q1 = sac.target_critic(0).forward(in);
  const Matrix q2 = sac.target_critic(1).forward(in);
  for (int j = 0; j < 8; ++j) {
    const double soft = -sac.temperature() * e.log_prob[j];
    CHECK(y[j] <= b.r[j] + 0.7 * (q1(0, j) + soft) + 1e-12);
    CHECK(y[j] <= b.r[j] + 0.7 * (q2(0, j) + soft) + 1e-12);
    CHECK(y[j] == doctest::Approx(b.r[j] + 0.7 * (std::min(q1(0, j), q2(0, j)) + soft)));
  }
}

TEST_CASE("sac: target networks move by the soft-update fraction") {
  auto hp = small_hp();
  hp.soft_update = 0.05;
  Sac sac(3, 2, hp, 4);
  Rng rng(12);
  ReplayBuffer buf(100, 0.6, 0.4, scenario::ReplayMode::Uniform);
  const Batch b = oracle::random_batch(3, 2, 40, rng);
  for (int j = 0; j < 40; ++j) buf.add({b.s.col(j), b.a.col(j), b.r[j], b.s_next.col(j), b.not_done[j]});
  const Vector target_before = sac.target_critic(0).flat();
  CHECK(sac.train_step(buf, rng).trained);
  const Vector online = sac.critic(0).flat();
  const Vector expect = 0.05 * online + 0.95 * target_before;
  CHECK((sac.target_critic(0).flat() - expect).norm() < 1e-12);
  Sac frozen_src(3, 2, hp, 4);
  Mlp target = frozen_src.target_critic(1);
  Mlp src = frozen_src.critic(1);
  src.set_flat(src.flat() + Vector::Ones(src.num_parameters()));
  const double gap = (target.flat() - src.flat()).norm();
  target.soft_update(src, 0.05);
  CHECK((target.flat() - src.flat()).norm() == doctest::Approx(0.95 * gap));
}

TEST_CASE("sac: underfilled buffer is a no-op") {
  Sac sac(3, 2, small_hp(), 4);
  ReplayBuffer buf(100, 0.6, 0.4, scenario::ReplayMode::Prioritized);
  Rng rng(1);
  const Vector before = sac.actor().flat();
  CHECK_FALSE(sac.train_step(buf, rng).trained);
  CHECK(sac.actor().flat() == before);
}

TEST_CASE("sac: larger temperature yields a higher-entropy policy") {
  Rng data_rng(77);
  const Batch b = oracle::random_batch(3, 2, 64, data_rng);
  ReplayBuffer buf(64, 0.6, 0.4, scenario::ReplayMode::Uniform);
  for (int j = 0; j < 64; ++j) {
    buf.add({b.s.col(j), b.a.col(j), b.a.col(j).squaredNorm() * -0.5, b.s_next.col(j), b.not_done[j]});
  }
  std::vector<double> entropy;
  for (double psi : {0.01, 0.1, 1.0}) {
    auto hp = small_hp();
    hp.temperature = psi;
    hp.hidden = {16, 16};
    hp.learning_rate = 3e-3;
    Sac sac(3, 2, hp, 8);
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) sac.train_step(buf, rng);
    Rng eval_rng(6);
    const Matrix chi = normals(2, 64, eval_rng);
    entropy.push_back(-evaluate_policy(sac.actor(), b.s, chi).log_prob.mean());
  }
  CHECK(entropy[0] < entropy[1]);
  CHECK(entropy[1] < entropy[2]);
}

TEST_CASE("sac: checkpoint round trip is exact") {
  auto hp = small_hp();
  hp.temperature_mode = scenario::TemperatureMode::Auto;
  Sac a(4, 2, hp, 1);
  Rng rng(3);
  ReplayBuffer buf(100, 0.6, 0.4, scenario::ReplayMode::Prioritized);
  const Batch b = oracle::random_batch(4, 2, 30, rng);
  for (int j = 0; j < 30; ++j) buf.add({b.s.col(j), b.a.col(j), b.r[j], b.s_next.col(j), b.not_done[j]});
  for (int i = 0; i < 5; ++i) a.train_step(buf, rng);
  std::stringstream ss;
  a.save(ss);
  Sac c(4, 2, hp, 99);
  c.load(ss);
  CHECK(c.actor().flat() == a.actor().flat());
  CHECK(c.critic(1).flat() == a.critic(1).flat());
  CHECK(c.target_critic(0).flat() == a.target_critic(0).flat());
  CHECK(c.temperature() == a.temperature());
  Sac wrong(5, 2, hp, 1);
  std::stringstream again;
  a.save(again);
  CHECK_THROWS(wrong.load(again));
}

TEST_CASE("sum tree: totals and prefix search") {
  SumTree t(5);
  const std::vector<double> v{1.0, 0.0, 2.0, 3.0, 4.0};
  for (std::size_t i = 0; i < v.size(); ++i) t.set(i, v[i]);
  CHECK(t.total() == 10.0);
  CHECK(t.find(0.5) == 0);
  CHECK(t.find(1.0) == 2);
  CHECK(t.find(2.999) == 2);
  CHECK(t.find(3.0) == 3);
  CHECK(t.find(9.999) == 4);
}

TEST_CASE("replay: sampling frequencies follow priorities") {
  ReplayBuffer buf(8, 0.6, 0.4, scenario::ReplayMode::Prioritized);
  for (int i = 0; i < 8; ++i) buf.add({Vector::Zero(1), Vector::Zero(1), 0.0, Vector::Zero(1), 1.0});
  std::vector<std::size_t> idx(8);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<double> td{0.1, 0.5, 1.0, 2.0, 0.3, 4.0, 0.05, 1.5};
  buf.update_priorities(idx, td);
  double z = 0.0;
  for (double d : td) z += std::pow(d + 1e-6, 0.6);
  Rng rng(4);
  std::vector<double> counts(8, 0.0);
  const int rounds = 12500;
  for (int r = 0; r < rounds; ++r) {
    for (std::size_t i : buf.sample(8, rng).indices) counts[i] += 1.0;
  }
  for (std::size_t i = 0; i < 8; ++i) {
    const double p = std::pow(td[i] + 1e-6, 0.6) / z;
    CHECK(buf.probability(i) == doctest::Approx(p));
    const double draws = rounds * 8.0;
    CHECK(std::abs(counts[i] / draws - p) < 4.0 * std::sqrt(p * (1 - p) / draws) + 1e-3);
  }
  const auto smp = buf.sample(8, rng);
  double wmax = 0.0;
  for (std::size_t k = 0; k < smp.indices.size(); ++k) {
    const double w = std::pow(8.0 * buf.probability(smp.indices[k]), -0.4);
    wmax = std::max(wmax, w);
  }
  for (std::size_t k = 0; k < smp.indices.size(); ++k) {
    CHECK(smp.weights[k] == doctest::Approx(std::pow(8.0 * buf.probability(smp.indices[k]), -0.4) / wmax));
    CHECK(smp.weights[k] <= 1.0);
  }
}

TEST_CASE("replay: ring overwrite keeps capacity") {
  ReplayBuffer buf(3, 0.6, 0.4, scenario::ReplayMode::Uniform);
  for (int i = 0; i < 5; ++i) buf.add({Vector::Zero(1), Vector::Zero(1), double(i), Vector::Zero(1), 1.0});
  CHECK(buf.size() == 3);
  std::vector<double> r;
  for (std::size_t i = 0; i < 3; ++i) r.push_back(buf.at(i).r);
  std::sort(r.begin(), r.end());
  CHECK(r == std::vector<double>{2.0, 3.0, 4.0});
}

TEST_CASE("map_action: worked cases") {
  Eigen::VectorXd a(4);
  a << 0.5, -0.2, 0.1, -0.9;
  CHECK(map_action(a, 2) == std::vector<int>{1, 0, 1, 0});
  a << -0.1, -0.2, -0.3, -0.4;
  CHECK(map_action(a, 2) == std::vector<int>{1, 1, 0, 0});
  a.setZero();
  CHECK(map_action(a, 2) == std::vector<int>{1, 1, 1, 1});
  a << -0.5, -0.1, -0.5, -0.7;
  CHECK(map_action(a, 2) == std::vector<int>{1, 1, 1, 0});
}

TEST_CASE("map_action: always selects at least n") {
  Rng rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> size(1, 15);
  for (int t = 0; t < 5000; ++t) {
    const int n_dev = size(rng);
    std::uniform_int_distribution<int> req(1, n_dev);
    const int n = req(rng);
    Eigen::VectorXd a(n_dev);
    for (int i = 0; i < n_dev; ++i) a[i] = u(rng);
    const auto sel = map_action(a, n);
    CHECK(std::accumulate(sel.begin(), sel.end(), 0) >= n);
  }
}

TEST_CASE("reward: worked values") {
  CHECK(reward_from(0.0, 10.0, 10.0, 0.5, 100.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(reward_from(0.02, 0.0, 10.0, 0.5, 100.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(reward_from(-0.01, 5.0, 10.0, 0.5, 100.0) == doctest::Approx(0.4339).epsilon(1e-4));
}

TEST_CASE("reward: range and monotonicity") {
  Rng rng(17);
  std::uniform_real_distribution<double> gap(-1.0, 1.0);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  for (int t = 0; t < 2000; ++t) {
    const double g = gap(rng);
    const double tmax = 1.0 + 20.0 * frac(rng);
    const double d = tmax * frac(rng);
    const double ups = frac(rng);
    const double zeta = 200.0 * frac(rng);
    const double r = reward_from(g, d, tmax, ups, zeta);
    CHECK(r > 0.0);
    CHECK(r <= 1.0 + 1e-12);
    CHECK(reward_from(g, std::min(d + 0.1, tmax), tmax, ups, zeta) <= r + 1e-15);
    CHECK(reward_from(g + 0.01, d, tmax, ups, zeta) >= r - 1e-15);
    const double urllc = reward_from(g, tmax, tmax, ups, zeta);
    CHECK(urllc <= ups + 1e-15);
    CHECK(r - urllc <= 1.0 - ups + 1e-12);
  }
}

TEST_CASE("state encoding has the declared size and lies in the unit box") {
  const auto cfg = short_toy(3);
  Environment env(cfg, 3);
  const auto s0 = env.reset();
  CHECK(s0.size() == state_dimension(cfg));
  CHECK(s0.minCoeff() >= 0.0);
  CHECK(s0.maxCoeff() <= 1.0);
  CHECK(state_dimension(2, 3, 1) == 2 * (2 * kUrllcDirectionEntries + 1) + 3 * kAiEntries + kGnbEntries);
}

TEST_CASE("episodes: evaluation leaves the buffer alone; training stores every iteration") {
  const auto cfg = short_toy(4);
  Sac sac(state_dimension(cfg), cfg.n_ai(), cfg.agent, 1);
  ReplayBuffer buf(100, 0.6, 0.4, scenario::ReplayMode::Prioritized);
  Rng rng(2);
  {
    Environment env(cfg, 1);
    const auto tr = run_episode(env, sac, &buf, RunMode::Evaluate, rng);
    CHECK(buf.size() == 0);
    CHECK(tr.transitions_stored == 0);
    CHECK(tr.iterations.size() == 4);
  }
  {
    Environment env(cfg, 2);
    TrainerClock clock;
    clock.replay_rng = Rng(9);
    const auto tr = run_episode(env, sac, &buf, RunMode::Train, rng, &clock);
    CHECK(tr.transitions_stored == tr.iterations.size());
    CHECK(buf.size() == tr.iterations.size());
    CHECK(clock.iterations == static_cast<long>(tr.iterations.size()));
    for (std::size_t i = 0; i < buf.size(); ++i) CHECK(buf.at(i).not_done == 1.0);
    for (std::size_t k = 0; k < tr.selected_counts.size(); ++k) CHECK(tr.selected_counts[k] >= cfg.n_required());
  }
}

TEST_CASE("episodes: immediate convergence gives one terminal transition") {
  auto cfg = short_toy(10);
  cfg.ai.task.epsilon = 1e12;
  Sac sac(state_dimension(cfg), cfg.n_ai(), cfg.agent, 1);
  ReplayBuffer buf(100, 0.6, 0.4, scenario::ReplayMode::Uniform);
  Rng rng(2);
  Environment env(cfg, 5);
  TrainerClock clock;
  const auto tr = run_episode(env, sac, &buf, RunMode::Train, rng, &clock);
  CHECK(tr.iterations.size() == 1);
  REQUIRE(buf.size() == 1);
  CHECK(buf.at(0).not_done == 0.0);
}
