#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "coexist/rng.hpp"
#include "coexist/scenario.hpp"

namespace coexist::learn {

using Vector = Eigen::VectorXd;

class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Synthetic learning problems with known optimum.
//   quadratic / fl:  f_i(w) = 1/2 (w - b_i)' H (w - b_i),  H = diag(mu .. L)
//   nonconvex:       f_i(w) = sum_j 1/2 (w_j - b_ij)^2 + a cos(omega w_j)
// The global objective is the average over devices.
class LearningTask {
 public:
  LearningTask(const scenario::TaskParams& params, int num_devices, std::uint64_t seed);

  const scenario::TaskParams& params() const { return params_; }
  int dimension() const { return params_.dimension; }
  int num_devices() const { return static_cast<int>(b_.size()); }

  double value(const Vector& w) const;
  Vector gradient(const Vector& w) const;
  double local_value(int i, const Vector& w) const;
  Vector local_gradient(int i, const Vector& w) const;

  double smoothness() const;
  double strong_convexity() const;  // 0 for the nonconvex task
  const Vector& minimizer() const { return w_star_; }
  double optimum() const { return f_star_; }  // inf f
  const Vector& initial_point() const { return w1_; }
  const Vector& local_minimizer(int i) const { return b_[static_cast<std::size_t>(i)]; }

  // Isotropic Gaussian noise with E||e||^2 = sigma^2.
  Vector gradient_noise(Rng& rng) const;

 private:
  scenario::TaskParams params_;
  Vector h_;  // curvature diagonal
  std::vector<Vector> b_;
  Vector b_mean_;
  Vector w_star_;
  Vector w1_;
  double f_star_ = 0.0;
};

struct ModelState {
  Vector w;
  int k = 0;
  bool converged = false;
};

// C_i: noisy local gradient (DGD) or local model after E SGD steps (FL).
Vector local_update(const LearningTask& task, const Vector& w, int device, Rng& rng);

// A: gradient step with the mean of n messages (DGD) or model averaging (FL).
// Throws ProtocolError if messages.size() != n.
Vector global_update(const LearningTask& task, const Vector& w, const std::vector<Vector>& messages,
                     int n);

bool is_converged(const LearningTask& task, const Vector& w);

}  // namespace coexist::learn
