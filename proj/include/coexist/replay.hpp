#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "coexist/rng.hpp"
#include "coexist/scenario.hpp"

namespace coexist::agent {

using Vector = Eigen::VectorXd;

struct Transition {
  Vector s;
  Vector a;
  double r = 0.0;
  Vector s_next;
  double not_done = 1.0;  // I: 0 at converged terminal states
};

// Binary sum tree over leaf priorities.
class SumTree {
 public:
  explicit SumTree(std::size_t capacity = 1);
  void set(std::size_t leaf, double value);
  double get(std::size_t leaf) const { return tree_[leaf + size_]; }
  double total() const { return tree_[1]; }
  // Leaf whose cumulative range contains `mass` (0 <= mass < total).
  std::size_t find(double mass) const;
  std::size_t capacity() const { return capacity_; }

 private:
  std::size_t capacity_;
  std::size_t size_;  // power of two >= capacity
  std::vector<double> tree_;
};

class ReplayBuffer {
 public:
  struct Sample {
    std::vector<std::size_t> indices;
    std::vector<double> weights;  // importance weights, max-normalised
  };

  ReplayBuffer(std::size_t capacity, double alpha, double beta, scenario::ReplayMode mode);

  void add(Transition t);
  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& at(std::size_t i) const { return data_[i]; }

  Sample sample(std::size_t batch, Rng& rng) const;
  void update_priorities(const std::vector<std::size_t>& indices, const std::vector<double>& td);

  // Sampling probability of slot i under the current priorities.
  double probability(std::size_t i) const;
  double max_priority() const { return max_priority_; }

 private:
  std::size_t capacity_;
  double alpha_;
  double beta_;
  scenario::ReplayMode mode_;
  std::vector<Transition> data_;
  std::size_t next_ = 0;
  SumTree tree_;
  double max_priority_ = 1.0;
};

}  // namespace coexist::agent
