#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "coexist/availability.hpp"
#include "coexist/types.hpp"

namespace coexist::metrics {

// Central-node delay for one iteration: n-th smallest per-device total plus
// server processing, capped at t_max. Throws std::invalid_argument if fewer
// than n totals are given or n < 1. Totals may be +inf for devices that never
// completed.
double training_delay(const std::vector<double>& totals, double server_delay_s, int n,
                      double t_max_s);

// Indices of the n smallest totals, ties broken by index.
std::vector<int> first_n(const std::vector<double>& totals, int n);

struct RequirementVerdict {
  std::vector<double> violation_probability;  // empirical Pr{alpha <= alpha_req}
  std::vector<bool> satisfied;
  bool fleet = true;
};

RequirementVerdict requirement_satisfied(const std::vector<std::vector<double>>& samples,
                                         double alpha_req, double gamma);

// Nearest-rank percentile (ceil(p n)-th order statistic, p in (0,1]).
// `sorted` must be sorted ascending and nonempty.
double nearest_rank(const std::vector<double>& sorted, double p);

struct FiveNumber {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};
FiveNumber five_number(std::vector<double> samples);

// Three percentile values with a presence flag; absent values are 0.
struct Triple {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  bool present = false;
};

Triple percentiles(std::vector<double> samples, double pa, double pb, double pc);

struct UrllcDirectionStats {
  double per = 0.0;
  double mean_downtime_s = 0.0;
  double buffer_bytes = 0.0;
  Triple sinr_db;  // p1, p5, median
  Triple delay_s;  // median, p95, p99
  double availability = 1.0;
};

struct UrllcDeviceStats {
  int cell = 0;
  PerDirection<UrllcDirectionStats> dir;
};

struct AiDeviceStats {
  bool selected = false;
  std::optional<double> dl_delay_s;
  std::optional<double> ul_delay_s;
  PerDirection<double> buffer_bytes;
  PerDirection<Triple> sinr_db;  // p5, median, p95
};

struct GnbStats {
  PerDirection<double> urllc_rbs;  // mean allocated RBs per TTI
  PerDirection<double> ai_rbs;
};

struct WindowStats {
  double t_begin = 0.0;
  double t_end = 0.0;
  std::vector<UrllcDeviceStats> urllc;
  std::vector<AiDeviceStats> ai;
  std::vector<GnbStats> gnb;

  double worst_availability_gap(double alpha_req) const;
};

// Raw samples gathered by the engine over one window.
struct WindowLog {
  struct UrllcDir {
    std::int64_t blocks = 0;
    std::int64_t failed_blocks = 0;
    std::vector<double> sinr_db;
    std::vector<double> delay_s;
  };
  struct GnbDir {
    PerDirection<double> urllc_rb_sum;
    PerDirection<double> ai_rb_sum;
  };

  double t_begin = 0.0;
  std::int64_t ttis = 0;
  std::vector<PerDirection<UrllcDir>> urllc;
  std::vector<PerDirection<std::vector<double>>> ai_sinr_db;
  std::vector<GnbDir> gnb;

  WindowLog() = default;
  WindowLog(int urllc_devices, int ai_devices, int gnbs, double t_begin);
  void reset(double t);
};

struct AiIterationInfo {
  std::vector<bool> selected;
  std::vector<std::optional<double>> dl_delay_s;
  std::vector<std::optional<double>> ul_delay_s;
  std::vector<PerDirection<double>> buffer_bytes;
};

WindowStats window_stats(const WindowLog& log, double t_end,
                         const std::vector<PerDirection<const AvailabilityRecord*>>& records,
                         const std::vector<int>& urllc_cells,
                         const std::vector<PerDirection<double>>& urllc_buffers,
                         const AiIterationInfo& ai);

}  // namespace coexist::metrics
