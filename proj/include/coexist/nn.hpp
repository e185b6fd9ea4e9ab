#pragma once

#include <vector>

#include <Eigen/Dense>

#include "coexist/rng.hpp"

namespace coexist::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Layer {
  Matrix w;  // out x in
  Vector b;
};

// Fully connected network with ReLU hidden layers and a linear output.
// Inputs and outputs are column-per-sample.
class Mlp {
 public:
  struct Cache {
    std::vector<Matrix> inputs;  // input to each layer
    std::vector<Matrix> pre;     // pre-activation of each layer
  };

  Mlp() = default;
  Mlp(int inputs, const std::vector<int>& hidden, int outputs, Rng& rng);

  int input_size() const { return layers_.empty() ? 0 : static_cast<int>(layers_.front().w.cols()); }
  int output_size() const { return layers_.empty() ? 0 : static_cast<int>(layers_.back().w.rows()); }

  Matrix forward(const Matrix& x) const;
  Matrix forward(const Matrix& x, Cache& cache) const;

  // Given dL/d(output), accumulates parameter gradients into `grads` (if not
  // null, shaped like the layers) and returns dL/d(input).
  Matrix backward(const Cache& cache, const Matrix& grad_out, std::vector<Layer>* grads) const;

  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer> zero_grads() const;

  int num_parameters() const;
  Vector flat() const;
  void set_flat(const Vector& v);

  // this <- nu * src + (1 - nu) * this
  void soft_update(const Mlp& src, double nu);

 private:
  std::vector<Layer> layers_;
};

Vector flatten(const std::vector<Layer>& layers);

// Scales g in place so that ||g|| <= max_norm; returns the norm before.
double clip_norm(Vector& g, double max_norm);

class Adam {
 public:
  Adam() = default;
  Adam(int size, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  void step(Vector& params, const Vector& grad);
  double learning_rate() const { return lr_; }

 private:
  double lr_ = 1e-3;
  double b1_ = 0.9;
  double b2_ = 0.999;
  double eps_ = 1e-8;
  long t_ = 0;
  Vector m_;
  Vector v_;
};

}  // namespace coexist::nn
