#include "coexist/nn.hpp"

#include <cmath>
#include <random>

namespace coexist::nn {

Mlp::Mlp(int inputs, const std::vector<int>& hidden, int outputs, Rng& rng) {
  std::vector<int> sizes{inputs};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(outputs);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int in = sizes[l];
    const int out = sizes[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> u(-bound, bound);
    Layer layer{Matrix(out, in), Vector(out)};
    for (int i = 0; i < out; ++i) {
      for (int j = 0; j < in; ++j) layer.w(i, j) = u(rng);
      layer.b[i] = u(rng);
    }
    layers_.push_back(std::move(layer));
  }
}

Matrix Mlp::forward(const Matrix& x) const {
  Matrix h = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Matrix z = layers_[l].w * h;
    z.colwise() += layers_[l].b;
    if (l + 1 < layers_.size()) z = z.cwiseMax(0.0);
    h = std::move(z);
  }
  return h;
}

Matrix Mlp::forward(const Matrix& x, Cache& cache) const {
  cache.inputs.clear();
  cache.pre.clear();
  Matrix h = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    cache.inputs.push_back(h);
    Matrix z = layers_[l].w * h;
    z.colwise() += layers_[l].b;
    cache.pre.push_back(z);
    h = l + 1 < layers_.size() ? Matrix(z.cwiseMax(0.0)) : z;
  }
  return h;
}

Matrix Mlp::backward(const Cache& cache, const Matrix& grad_out, std::vector<Layer>* grads) const {
  Matrix g = grad_out;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    if (l + 1 < layers_.size()) {
      g = g.cwiseProduct((cache.pre[l].array() > 0.0).cast<double>().matrix());
    }
    if (grads) {
      (*grads)[l].w.noalias() += g * cache.inputs[l].transpose();
      (*grads)[l].b += g.rowwise().sum();
    }
    g = layers_[l].w.transpose() * g;
  }
  return g;
}

std::vector<Layer> Mlp::zero_grads() const {
  std::vector<Layer> out;
  for (const Layer& l : layers_) {
    out.push_back({Matrix::Zero(l.w.rows(), l.w.cols()), Vector::Zero(l.b.size())});
  }
  return out;
}

int Mlp::num_parameters() const {
  int n = 0;
  for (const Layer& l : layers_) n += static_cast<int>(l.w.size() + l.b.size());
  return n;
}

Vector flatten(const std::vector<Layer>& layers) {
  int n = 0;
  for (const Layer& l : layers) n += static_cast<int>(l.w.size() + l.b.size());
  Vector v(n);
  int k = 0;
  for (const Layer& l : layers) {
    v.segment(k, l.w.size()) = Eigen::Map<const Vector>(l.w.data(), l.w.size());
    k += static_cast<int>(l.w.size());
    v.segment(k, l.b.size()) = l.b;
    k += static_cast<int>(l.b.size());
  }
  return v;
}

Vector Mlp::flat() const { return flatten(layers_); }

void Mlp::set_flat(const Vector& v) {
  int k = 0;
  for (Layer& l : layers_) {
    Eigen::Map<Vector>(l.w.data(), l.w.size()) = v.segment(k, l.w.size());
    k += static_cast<int>(l.w.size());
    l.b = v.segment(k, l.b.size());
    k += static_cast<int>(l.b.size());
  }
}

void Mlp::soft_update(const Mlp& src, double nu) {
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    layers_[l].w = nu * src.layers_[l].w + (1.0 - nu) * layers_[l].w;
    layers_[l].b = nu * src.layers_[l].b + (1.0 - nu) * layers_[l].b;
  }
}

double clip_norm(Vector& g, double max_norm) {
  const double norm = g.norm();
  if (norm > max_norm && norm > 0.0) g *= max_norm / norm;
  return norm;
}

Adam::Adam(int size, double lr, double beta1, double beta2, double eps)
    : lr_(lr), b1_(beta1), b2_(beta2), eps_(eps), m_(Vector::Zero(size)), v_(Vector::Zero(size)) {}

void Adam::step(Vector& params, const Vector& grad) {
  ++t_;
  m_ = b1_ * m_ + (1.0 - b1_) * grad;
  v_ = b2_ * v_ + (1.0 - b2_) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
  params.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
}

}  // namespace coexist::nn
