#include "coexist/replay.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace coexist::agent {

SumTree::SumTree(std::size_t capacity) : capacity_(std::max<std::size_t>(capacity, 1)), size_(1) {
  while (size_ < capacity_) size_ <<= 1;
  tree_.assign(2 * size_, 0.0);
}

void SumTree::set(std::size_t leaf, double value) {
  std::size_t i = leaf + size_;
  tree_[i] = value;
  for (i >>= 1; i >= 1; i >>= 1) tree_[i] = tree_[2 * i] + tree_[2 * i + 1];
}

std::size_t SumTree::find(double mass) const {
  std::size_t i = 1;
  while (i < size_) {
    const double left = tree_[2 * i];
    if (mass < left || tree_[2 * i + 1] <= 0.0) {
      i = 2 * i;
    } else {
      mass -= left;
      i = 2 * i + 1;
    }
  }
  return std::min(i - size_, capacity_ - 1);
}

ReplayBuffer::ReplayBuffer(std::size_t capacity, double alpha, double beta,
                           scenario::ReplayMode mode)
    : capacity_(capacity), alpha_(alpha), beta_(beta), mode_(mode) {
  if (mode_ == scenario::ReplayMode::Prioritized) tree_ = SumTree(capacity);
}

void ReplayBuffer::add(Transition t) {
  if (data_.size() < capacity_) {
    data_.push_back(std::move(t));
    next_ = data_.size() % capacity_;
    if (mode_ == scenario::ReplayMode::Prioritized) {
      tree_.set(data_.size() - 1, std::pow(max_priority_, alpha_));
    }
    return;
  }
  data_[next_] = std::move(t);
  if (mode_ == scenario::ReplayMode::Prioritized) tree_.set(next_, std::pow(max_priority_, alpha_));
  next_ = (next_ + 1) % capacity_;
}

double ReplayBuffer::probability(std::size_t i) const {
  if (i >= data_.size()) return 0.0;
  if (mode_ == scenario::ReplayMode::Uniform) return 1.0 / static_cast<double>(data_.size());
  return tree_.get(i) / tree_.total();
}

ReplayBuffer::Sample ReplayBuffer::sample(std::size_t batch, Rng& rng) const {
  Sample s;
  if (data_.empty()) return s;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (mode_ == scenario::ReplayMode::Uniform) {
    std::uniform_int_distribution<std::size_t> pick(0, data_.size() - 1);
    for (std::size_t b = 0; b < batch; ++b) {
      s.indices.push_back(pick(rng));
      s.weights.push_back(1.0);
    }
    return s;
  }
  const double total = tree_.total();
  const double segment = total / static_cast<double>(batch);
  double max_w = 0.0;
  for (std::size_t b = 0; b < batch; ++b) {
    const double mass = std::min((static_cast<double>(b) + u(rng)) * segment, total * (1.0 - 1e-12));
    std::size_t idx = tree_.find(mass);
    if (idx >= data_.size()) idx = data_.size() - 1;
    const double p = probability(idx);
    const double w = std::pow(static_cast<double>(data_.size()) * p, -beta_);
    s.indices.push_back(idx);
    s.weights.push_back(w);
    max_w = std::max(max_w, w);
  }
  for (double& w : s.weights) w /= max_w;
  return s;
}

void ReplayBuffer::update_priorities(const std::vector<std::size_t>& indices,
                                     const std::vector<double>& td) {
  if (mode_ != scenario::ReplayMode::Prioritized) return;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const double p = std::abs(td[k]) + 1e-6;
    max_priority_ = std::max(max_priority_, p);
    tree_.set(indices[k], std::pow(p, alpha_));
  }
}

}  // namespace coexist::agent
