#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "coexist/scenario.hpp"

namespace coexist::bounds {

class UndefinedRegime : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Minimum iterations for epsilon-accuracy under a linear rate:
// log_b(W / (eps - z/n)) + 1.
double kmin_strongly_convex(double w_a, double z_a, double b, double epsilon, int n);

// Non-convex regime: W / (eps - z/n).
double kmin_nonconvex(double w_b, double z_b, double epsilon, int n);

// Federated averaging with random partial participation; the bracketed
// quantity (1/eps)[(1 + 1/n) E G^2 + (sigma^2/N + G^2)/E + G^2]. Only ratios
// and trends of this value are meaningful.
double kmin_fl_proportional(double local_epochs, double g2, double sigma2_over_n_total,
                            double epsilon, int n);

// Sampling-variance factor for n of N devices drawn without replacement.
double fl_sampling_rho(int n_total, int n);

// Constants of the noisy gradient descent analysis. beta1 scales the
// expected descent direction, beta2 bounds the growth of the second moment.
struct GradientConstants {
  double eta = 0.1;
  double smoothness = 1.0;
  double mu = 1.0;
  double sigma2 = 1.0;
  double beta1 = 1.0;
  double beta2 = 0.0;
  int n = 1;
};

bool step_size_admissible(const GradientConstants& c);

// Strongly convex: expected gap after k iterations is at most
// plateau + (1 - eta beta1 mu)^(k-1) (gap_1 - plateau).
double strongly_convex_plateau(const GradientConstants& c);
double strongly_convex_rhs(const GradientConstants& c, double initial_gap, int k);

// Non-convex: average squared gradient norm over K iterations is at most
// eta L sigma^2 / (n (beta1 + 1)) + 2 (f_1 - f_inf) / (eta (beta1 + 1) K).
double nonconvex_rhs(const GradientConstants& c, double initial_gap, int iterations);

// Linear-rate constants derived from the strongly convex bound:
// W = gap_1 - plateau, z = n * plateau, b = 1 / (1 - eta beta1 mu).
struct LinearRate {
  double w = 0.0;
  double z = 0.0;
  double b = 0.0;
};
LinearRate linear_rate(const GradientConstants& c, double initial_gap);

struct BoundReport {
  std::vector<double> empirical;  // per k (strongly convex) or single entry
  std::vector<double> rhs;
  double worst_ratio = 0.0;       // max empirical / rhs
  bool pass = false;
  std::string regime;
};

enum class Regime { StronglyConvex = 1, Nonconvex = 2 };

// Monte Carlo check of the bound on plain noisy gradient descent with n
// averaged device gradients. `iterations` is k_max (strongly convex) or K.
BoundReport validate_bound_empirically(const scenario::TaskParams& task, Regime regime, int seeds,
                                       int iterations, int n, double beta1, double beta2,
                                       double tolerance = 0.05);

}  // namespace coexist::bounds
