#include "coexist/availability.hpp"

#include <algorithm>
#include <cmath>

namespace coexist::metrics {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double overlap(const Interval& i, double a, double b) {
  return std::max(0.0, std::min(i.end, b) - std::max(i.begin, a));
}
}  // namespace

AvailabilityRecord::AvailabilityRecord(double survival_time_s, double start_s)
    : survival_(survival_time_s), start_(start_s), last_t_(start_s) {}

void AvailabilityRecord::on_event(double t, bool success) {
  if (t < last_t_) throw OrderingError("availability event out of order");
  last_t_ = t;
  if (success && !x_up_) {
    if (t > open_since_) bursts_.push_back({open_since_, t});
    x_up_ = true;
  } else if (!success && x_up_) {
    open_since_ = t;
    x_up_ = false;
  }
}

std::vector<Interval> AvailabilityRecord::x_down_intervals() const {
  std::vector<Interval> out = bursts_;
  if (!x_up_) out.push_back({open_since_, kInf});
  return out;
}

std::vector<Interval> AvailabilityRecord::y_down_intervals() const {
  std::vector<Interval> out;
  for (const Interval& x : x_down_intervals()) {
    const double begin = x.begin + survival_;
    if (x.end > begin) out.push_back({begin, x.end});
  }
  return out;
}

double AvailabilityRecord::y_downtime(double a, double b) const {
  double sum = 0.0;
  for (const Interval& y : y_down_intervals()) sum += overlap(y, a, b);
  return sum;
}

double AvailabilityRecord::x_downtime(double a, double b) const {
  double sum = 0.0;
  for (const Interval& x : x_down_intervals()) sum += overlap(x, a, b);
  return sum;
}

double AvailabilityRecord::estimate(double a, double b) const {
  if (!(b > a)) throw std::domain_error("availability window must be nonempty");
  return std::clamp(1.0 - y_downtime(a, b) / (b - a), 0.0, 1.0);
}

double AvailabilityRecord::mean_downtime(double a, double b) const {
  double sum = 0.0;
  int count = 0;
  for (const Interval& y : y_down_intervals()) {
    if (y.end > a && y.end <= b) {
      sum += y.length();
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / count;
}

bool AvailabilityRecord::x_at(double t) const {
  for (const Interval& x : x_down_intervals()) {
    if (t >= x.begin && t < x.end) return false;
  }
  return true;
}

bool AvailabilityRecord::y_at(double t) const {
  for (const Interval& y : y_down_intervals()) {
    if (t >= y.begin && t < y.end) return false;
  }
  return true;
}

}  // namespace coexist::metrics
