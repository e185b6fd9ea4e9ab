#pragma once

// Brute-force reference computations shared by the unit tests and the
// acceptance binary. None of these call into the code they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "coexist/rng.hpp"
#include "coexist/sac.hpp"

namespace oracle {

// min over all n-subsets of the largest member, plus server delay, capped.
inline double training_delay(const std::vector<double>& totals, double server, int n, double t_max) {
  const int m = static_cast<int>(totals.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    if (__builtin_popcount(mask) != n) continue;
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      if (mask & (1u << i)) worst = std::max(worst, totals[static_cast<std::size_t>(i)]);
    }
    best = std::min(best, worst);
  }
  return std::min(best + server, t_max);
}

struct Event {
  std::int64_t t_us;
  bool success;
};

// Y downtime on [a, b) sampled at the midpoint of every microsecond cell.
// X starts up; a failure takes it down, the next success brings it back.
// Y is down wherever X has been down for at least the survival time.
inline std::int64_t y_downtime_us(const std::vector<Event>& events, std::int64_t tsv_us,
                                  std::int64_t a_us, std::int64_t b_us) {
  std::int64_t down = 0;
  std::size_t next = 0;
  bool x_up = true;
  double down_since = 0.0;
  for (std::int64_t k = a_us; k < b_us; ++k) {
    const double t = static_cast<double>(k) + 0.5;
    while (next < events.size() && static_cast<double>(events[next].t_us) <= t) {
      const Event& e = events[next++];
      if (e.success) {
        x_up = true;
      } else if (x_up) {
        x_up = false;
        down_since = static_cast<double>(e.t_us);
      }
    }
    if (!x_up && t - down_since >= static_cast<double>(tsv_us)) ++down;
  }
  return down;
}

inline double relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double scale = std::max({a.norm(), b.norm(), 1e-12});
  return (a - b).norm() / scale;
}

// Central differences of f over the flat parameters of `net`.
template <typename F>
Eigen::VectorXd numeric_gradient(coexist::nn::Mlp& net, F&& f, double h = 1e-6) {
  Eigen::VectorXd theta = net.flat();
  Eigen::VectorXd g(theta.size());
  for (int i = 0; i < theta.size(); ++i) {
    const double keep = theta[i];
    theta[i] = keep + h;
    net.set_flat(theta);
    const double up = f();
    theta[i] = keep - h;
    net.set_flat(theta);
    const double dn = f();
    theta[i] = keep;
    g[i] = (up - dn) / (2.0 * h);
  }
  net.set_flat(theta);
  return g;
}

inline coexist::agent::Batch random_batch(int state_dim, int action_dim, int size, coexist::Rng& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> u(-0.95, 0.95);
  std::uniform_real_distribution<double> w(0.2, 1.0);
  coexist::agent::Batch b;
  b.s.resize(state_dim, size);
  b.s_next.resize(state_dim, size);
  b.a.resize(action_dim, size);
  b.r.resize(size);
  b.not_done.resize(size);
  b.weights.resize(size);
  for (int j = 0; j < size; ++j) {
    for (int i = 0; i < state_dim; ++i) b.s(i, j) = z(rng), b.s_next(i, j) = z(rng);
    for (int i = 0; i < action_dim; ++i) b.a(i, j) = u(rng);
    b.r[j] = z(rng);
    b.not_done[j] = j % 3 == 0 ? 0.0 : 1.0;
    b.weights[j] = w(rng);
  }
  return b;
}

}  // namespace oracle
