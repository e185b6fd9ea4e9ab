#include "coexist/learning_task.hpp"

#include <cmath>
#include <random>

namespace coexist::learn {

namespace {

// Minimise g(x) = 1/2 (x - b)^2 + a cos(omega x) on the real line.
double minimise_well(double b, double a, double omega) {
  auto g = [&](double x) { return 0.5 * (x - b) * (x - b) + a * std::cos(omega * x); };
  auto dg = [&](double x) { return (x - b) - a * omega * std::sin(omega * x); };
  auto d2g = [&](double x) { return 1.0 - a * omega * omega * std::cos(omega * x); };
  const double reach = std::abs(a * omega) + 1.0;
  double best = b;
  double best_val = g(b);
  const int steps = 4000;
  for (int i = 0; i <= steps; ++i) {
    const double x = b - reach + 2.0 * reach * i / steps;
    if (g(x) < best_val) best_val = g(x), best = x;
  }
  for (int it = 0; it < 50; ++it) {
    const double h = d2g(best);
    if (h <= 0) break;
    const double next = best - dg(best) / h;
    if (g(next) > g(best)) break;
    best = next;
  }
  return best;
}

}  // namespace

LearningTask::LearningTask(const scenario::TaskParams& params, int num_devices, std::uint64_t seed)
    : params_(params) {
  const int d = params.dimension;
  h_ = Vector(d);
  for (int j = 0; j < d; ++j) {
    h_[j] = d == 1 ? params.mu : params.mu + (params.smoothness - params.mu) * j / (d - 1.0);
  }
  Rng rng = make_stream(seed, streams::kTaskData);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector centre = Vector::Zero(d);
  b_mean_ = Vector::Zero(d);
  for (int i = 0; i < std::max(num_devices, 1); ++i) {
    Vector z(d);
    for (int j = 0; j < d; ++j) z[j] = normal(rng);
    b_.push_back(centre + params.heterogeneity / std::sqrt(static_cast<double>(d)) * z);
    b_mean_ += b_.back();
  }
  b_mean_ /= static_cast<double>(b_.size());

  if (params.kind == scenario::TaskKind::Nonconvex) {
    w_star_ = Vector(d);
    for (int j = 0; j < d; ++j) {
      w_star_[j] = minimise_well(b_mean_[j], params.well_amplitude, params.well_frequency);
    }
  } else {
    w_star_ = b_mean_;
  }
  f_star_ = value(w_star_);

  Vector dir(d);
  for (int j = 0; j < d; ++j) dir[j] = normal(rng);
  if (dir.norm() == 0.0) dir[0] = 1.0;
  w1_ = w_star_ + params.init_distance * dir / dir.norm();
}

double LearningTask::local_value(int i, const Vector& w) const {
  const Vector r = w - b_[static_cast<std::size_t>(i)];
  if (params_.kind == scenario::TaskKind::Nonconvex) {
    double v = 0.5 * r.squaredNorm();
    for (int j = 0; j < w.size(); ++j) v += params_.well_amplitude * std::cos(params_.well_frequency * w[j]);
    return v;
  }
  return 0.5 * r.dot(h_.cwiseProduct(r));
}

Vector LearningTask::local_gradient(int i, const Vector& w) const {
  const Vector r = w - b_[static_cast<std::size_t>(i)];
  if (params_.kind == scenario::TaskKind::Nonconvex) {
    Vector g = r;
    for (int j = 0; j < w.size(); ++j) {
      g[j] -= params_.well_amplitude * params_.well_frequency * std::sin(params_.well_frequency * w[j]);
    }
    return g;
  }
  return h_.cwiseProduct(r);
}

double LearningTask::value(const Vector& w) const {
  double v = 0.0;
  for (int i = 0; i < num_devices(); ++i) v += local_value(i, w);
  return v / num_devices();
}

Vector LearningTask::gradient(const Vector& w) const {
  Vector g = Vector::Zero(w.size());
  for (int i = 0; i < num_devices(); ++i) g += local_gradient(i, w);
  return g / num_devices();
}

double LearningTask::smoothness() const {
  if (params_.kind == scenario::TaskKind::Nonconvex) {
    return 1.0 + std::abs(params_.well_amplitude) * params_.well_frequency * params_.well_frequency;
  }
  return params_.smoothness;
}

double LearningTask::strong_convexity() const {
  return params_.kind == scenario::TaskKind::Nonconvex ? 0.0 : params_.mu;
}

Vector LearningTask::gradient_noise(Rng& rng) const {
  const int d = dimension();
  Vector e(d);
  if (params_.noise_sigma2 <= 0.0) return Vector::Zero(d);
  std::normal_distribution<double> normal(0.0, std::sqrt(params_.noise_sigma2 / d));
  for (int j = 0; j < d; ++j) e[j] = normal(rng);
  return e;
}

Vector local_update(const LearningTask& task, const Vector& w, int device, Rng& rng) {
  const auto& params = task.params();
  if (params.kind == scenario::TaskKind::FederatedAveraging) {
    Vector local = w;
    for (int e = 0; e < params.local_epochs; ++e) {
      local -= params.learning_rate * (task.local_gradient(device, local) + task.gradient_noise(rng));
    }
    return local;
  }
  return task.local_gradient(device, w) + task.gradient_noise(rng);
}

Vector global_update(const LearningTask& task, const Vector& w, const std::vector<Vector>& messages,
                     int n) {
  if (static_cast<int>(messages.size()) != n || n < 1) {
    throw ProtocolError("global update expects exactly n messages");
  }
  Vector sum = Vector::Zero(w.size());
  for (const Vector& m : messages) sum += m;
  if (task.params().kind == scenario::TaskKind::FederatedAveraging) return sum / n;
  return w - task.params().learning_rate / n * sum;
}

bool is_converged(const LearningTask& task, const Vector& w) {
  return task.value(w) - task.optimum() <= task.params().epsilon;
}

}  // namespace coexist::learn
