#include "coexist/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace coexist::metrics {

double training_delay(const std::vector<double>& totals, double server_delay_s, int n,
                      double t_max_s) {
  if (n < 1) throw std::invalid_argument("training_delay: n must be >= 1");
  if (static_cast<int>(totals.size()) < n) {
    throw std::invalid_argument("training_delay: fewer candidates than n");
  }
  std::vector<double> v = totals;
  std::nth_element(v.begin(), v.begin() + (n - 1), v.end());
  return std::min(v[static_cast<std::size_t>(n - 1)] + server_delay_s, t_max_s);
}

std::vector<int> first_n(const std::vector<double>& totals, int n) {
  std::vector<int> idx(totals.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return totals[a] < totals[b]; });
  idx.resize(std::min<std::size_t>(idx.size(), static_cast<std::size_t>(std::max(n, 0))));
  return idx;
}

RequirementVerdict requirement_satisfied(const std::vector<std::vector<double>>& samples,
                                         double alpha_req, double gamma) {
  RequirementVerdict v;
  for (const auto& s : samples) {
    if (s.empty()) throw std::invalid_argument("requirement_satisfied: device without samples");
    const auto below = std::count_if(s.begin(), s.end(), [&](double a) { return a <= alpha_req; });
    const double p = static_cast<double>(below) / static_cast<double>(s.size());
    v.violation_probability.push_back(p);
    v.satisfied.push_back(p <= gamma);
    v.fleet = v.fleet && p <= gamma;
  }
  return v;
}

double nearest_rank(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("nearest_rank: empty sample");
  const auto n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(p * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

FiveNumber five_number(std::vector<double> s) {
  if (s.empty()) throw std::invalid_argument("five_number: empty sample");
  std::sort(s.begin(), s.end());
  return {s.front(), nearest_rank(s, 0.25), nearest_rank(s, 0.5), nearest_rank(s, 0.75), s.back()};
}

Triple percentiles(std::vector<double> s, double pa, double pb, double pc) {
  Triple t;
  if (s.empty()) return t;
  std::sort(s.begin(), s.end());
  t.a = nearest_rank(s, pa);
  t.b = nearest_rank(s, pb);
  t.c = nearest_rank(s, pc);
  t.present = true;
  return t;
}

double WindowStats::worst_availability_gap(double alpha_req) const {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& u : urllc) {
    for (Direction d : kDirections) worst = std::min(worst, u.dir[d].availability - alpha_req);
  }
  return worst;
}

WindowLog::WindowLog(int urllc_devices, int ai_devices, int gnbs, double t)
    : t_begin(t),
      urllc(static_cast<std::size_t>(urllc_devices)),
      ai_sinr_db(static_cast<std::size_t>(ai_devices)),
      gnb(static_cast<std::size_t>(gnbs)) {}

void WindowLog::reset(double t) {
  *this = WindowLog(static_cast<int>(urllc.size()), static_cast<int>(ai_sinr_db.size()),
                    static_cast<int>(gnb.size()), t);
}

WindowStats window_stats(const WindowLog& log, double t_end,
                         const std::vector<PerDirection<const AvailabilityRecord*>>& records,
                         const std::vector<int>& urllc_cells,
                         const std::vector<PerDirection<double>>& urllc_buffers,
                         const AiIterationInfo& ai) {
  WindowStats w;
  w.t_begin = log.t_begin;
  w.t_end = t_end;
  const bool has_span = t_end > log.t_begin;

  for (std::size_t u = 0; u < log.urllc.size(); ++u) {
    UrllcDeviceStats s;
    s.cell = urllc_cells.at(u);
    for (Direction d : kDirections) {
      const auto& raw = log.urllc[u][d];
      auto& out = s.dir[d];
      out.per = raw.blocks == 0 ? 0.0
                                : static_cast<double>(raw.failed_blocks) / static_cast<double>(raw.blocks);
      out.buffer_bytes = urllc_buffers.at(u)[d];
      out.sinr_db = percentiles(raw.sinr_db, 0.01, 0.05, 0.5);
      out.delay_s = percentiles(raw.delay_s, 0.5, 0.95, 0.99);
      const AvailabilityRecord* rec = records.at(u)[d];
      if (rec && has_span) {
        out.availability = rec->estimate(log.t_begin, t_end);
        out.mean_downtime_s = rec->mean_downtime(log.t_begin, t_end);
      }
    }
    w.urllc.push_back(s);
  }

  for (std::size_t i = 0; i < log.ai_sinr_db.size(); ++i) {
    AiDeviceStats s;
    s.selected = i < ai.selected.size() && ai.selected[i];
    if (i < ai.dl_delay_s.size()) s.dl_delay_s = ai.dl_delay_s[i];
    if (i < ai.ul_delay_s.size()) s.ul_delay_s = ai.ul_delay_s[i];
    if (i < ai.buffer_bytes.size()) s.buffer_bytes = ai.buffer_bytes[i];
    for (Direction d : kDirections) s.sinr_db[d] = percentiles(log.ai_sinr_db[i][d], 0.05, 0.5, 0.95);
    w.ai.push_back(s);
  }

  const double ttis = log.ttis > 0 ? static_cast<double>(log.ttis) : 1.0;
  for (const auto& g : log.gnb) {
    GnbStats s;
    for (Direction d : kDirections) {
      s.urllc_rbs[d] = g.urllc_rb_sum[d] / ttis;
      s.ai_rbs[d] = g.ai_rb_sum[d] / ttis;
    }
    w.gnb.push_back(s);
  }
  return w;
}

}  // namespace coexist::metrics
