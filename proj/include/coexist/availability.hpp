#pragma once

#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace coexist::metrics {

class OrderingError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct Interval {
  double begin = 0.0;
  double end = 0.0;  // +inf while open
  double length() const { return end - begin; }
};

// Network state X and application state Y of one URLLC device in one
// direction. X is 1 before the first event, drops to 0 at the deadline of a
// late or lost packet and returns to 1 at the next on-time delivery. Y is 0
// exactly where X has been 0 over the whole trailing survival-time window.
class AvailabilityRecord {
 public:
  explicit AvailabilityRecord(double survival_time_s, double start_s = 0.0);

  // success: on-time delivery at t; failure: missed deadline at t.
  void on_event(double t, bool success);

  double survival_time() const { return survival_; }
  bool network_state() const { return x_up_; }
  double last_event_time() const { return last_t_; }

  // X=0 bursts and the derived Y=0 intervals, the open one ending at +inf.
  std::vector<Interval> x_down_intervals() const;
  std::vector<Interval> y_down_intervals() const;

  // Y on the half-open window [a, b). Throws std::domain_error if b <= a.
  double estimate(double a, double b) const;
  double y_downtime(double a, double b) const;
  double x_downtime(double a, double b) const;
  // Mean length of Y=0 intervals that end inside (a, b]; 0 if none.
  double mean_downtime(double a, double b) const;

  // Instantaneous states (right-continuous).
  bool x_at(double t) const;
  bool y_at(double t) const;

 private:
  double survival_;
  double start_;
  double last_t_;
  bool x_up_ = true;
  std::vector<Interval> bursts_;  // completed X=0 bursts
  double open_since_ = 0.0;
};

// Time-average of Y over the window.
inline double availability_estimate(const AvailabilityRecord& r, double a, double b) {
  return r.estimate(a, b);
}

}  // namespace coexist::metrics
