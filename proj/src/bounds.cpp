#include "coexist/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "coexist/learning_task.hpp"

namespace coexist::bounds {

double kmin_strongly_convex(double w_a, double z_a, double b, double epsilon, int n) {
  if (!(b > 1.0)) throw UndefinedRegime("contraction base b must exceed 1");
  if (!(w_a > 0.0)) throw UndefinedRegime("W must be positive");
  if (n < 1) throw UndefinedRegime("n must be >= 1");
  const double slack = epsilon - z_a / n;
  if (!(slack > 0.0)) throw UndefinedRegime("epsilon must exceed z/n");
  return std::log(w_a / slack) / std::log(b) + 1.0;
}

double kmin_nonconvex(double w_b, double z_b, double epsilon, int n) {
  if (n < 1) throw UndefinedRegime("n must be >= 1");
  const double slack = epsilon - z_b / n;
  if (!(slack > 0.0)) throw UndefinedRegime("epsilon must exceed z/n");
  return w_b / slack;
}

double kmin_fl_proportional(double e, double g2, double s2n, double epsilon, int n) {
  if (e < 1.0) throw UndefinedRegime("local epochs must be >= 1");
  if (n < 1) throw UndefinedRegime("n must be >= 1");
  if (!(epsilon > 0.0)) throw UndefinedRegime("epsilon must be positive");
  return ((1.0 + 1.0 / n) * e * g2 + (s2n + g2) / e + g2) / epsilon;
}

double fl_sampling_rho(int n_total, int n) {
  if (n < 1 || n > n_total) throw UndefinedRegime("need 1 <= n <= N");
  if (n_total == 1) return 0.0;
  return 4.0 * (n_total - n) / (static_cast<double>(n) * (n_total - 1));
}

bool step_size_admissible(const GradientConstants& c) {
  return c.eta > 0.0 && c.eta <= (c.beta1 + 1.0) / ((2.0 * c.beta2 + 1.0) * c.smoothness);
}

double strongly_convex_plateau(const GradientConstants& c) {
  return c.eta * c.smoothness * c.sigma2 / (2.0 * c.n * c.beta1 * c.mu);
}

double strongly_convex_rhs(const GradientConstants& c, double initial_gap, int k) {
  const double plateau = strongly_convex_plateau(c);
  return plateau + std::pow(1.0 - c.eta * c.beta1 * c.mu, k - 1) * (initial_gap - plateau);
}

double nonconvex_rhs(const GradientConstants& c, double initial_gap, int iterations) {
  return c.eta * c.smoothness * c.sigma2 / (c.n * (c.beta1 + 1.0)) +
         2.0 * initial_gap / (c.eta * (c.beta1 + 1.0) * iterations);
}

LinearRate linear_rate(const GradientConstants& c, double initial_gap) {
  const double plateau = strongly_convex_plateau(c);
  return {initial_gap - plateau, c.n * plateau, 1.0 / (1.0 - c.eta * c.beta1 * c.mu)};
}

BoundReport validate_bound_empirically(const scenario::TaskParams& params, Regime regime, int seeds,
                                       int iterations, int n, double beta1, double beta2,
                                       double tolerance) {
  const bool convex = regime == Regime::StronglyConvex;
  if (convex == (params.kind == scenario::TaskKind::Nonconvex) ||
      params.kind == scenario::TaskKind::FederatedAveraging) {
    throw UndefinedRegime("regime does not match task kind");
  }
  learn::LearningTask task(params, n, 0);
  GradientConstants c{params.learning_rate, task.smoothness(), task.strong_convexity(),
                      params.noise_sigma2, beta1, beta2, n};
  const double gap1 = task.value(task.initial_point()) - task.optimum();

  BoundReport rep;
  rep.regime = convex ? "strongly-convex" : "nonconvex";
  std::vector<double> sum(static_cast<std::size_t>(convex ? iterations : 1), 0.0);
  for (int s = 0; s < seeds; ++s) {
    Rng rng = make_stream(static_cast<std::uint64_t>(s), streams::kGradientNoise);
    learn::Vector w = task.initial_point();
    double grad_sum = 0.0;
    for (int k = 1; k <= iterations; ++k) {
      if (convex) {
        sum[static_cast<std::size_t>(k - 1)] += task.value(w) - task.optimum();
      } else {
        grad_sum += task.gradient(w).squaredNorm();
      }
      std::vector<learn::Vector> msgs;
      for (int i = 0; i < n; ++i) msgs.push_back(learn::local_update(task, w, i, rng));
      w = learn::global_update(task, w, msgs, n);
    }
    if (!convex) sum[0] += grad_sum / iterations;
  }
  rep.worst_ratio = 0.0;
  for (std::size_t k = 0; k < sum.size(); ++k) {
    const double emp = sum[k] / seeds;
    const double rhs = convex ? strongly_convex_rhs(c, gap1, static_cast<int>(k) + 1)
                              : nonconvex_rhs(c, gap1, iterations);
    rep.empirical.push_back(emp);
    rep.rhs.push_back(rhs);
    rep.worst_ratio = std::max(rep.worst_ratio, emp / rhs);
  }
  rep.pass = step_size_admissible(c) && rep.worst_ratio <= 1.0 + tolerance;
  return rep;
}

}  // namespace coexist::bounds
