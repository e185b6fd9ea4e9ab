#include "coexist/link_adaptation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <utility>

namespace coexist::link {

namespace {

constexpr int kFadingPoints = 64;

const std::array<double, kFadingPoints>& fading_quantiles_db() {
  static const std::array<double, kFadingPoints> q = [] {
    std::array<double, kFadingPoints> out{};
    for (int j = 0; j < kFadingPoints; ++j) {
      const double u = (j + 0.5) / kFadingPoints;
      out[j] = 10.0 * std::log10(-std::log(1.0 - u));
    }
    return out;
  }();
  return q;
}

double logistic_error(double sinr_db, double theta_db) {
  const double x = kLogisticSlope * (sinr_db - theta_db);
  if (x > 40.0) return 0.0;
  if (x < -40.0) return 1.0;
  return 1.0 / (1.0 + std::exp(x));
}

}  // namespace

double bits_per_rb(int mcs) { return kBitsPerRe.at(static_cast<std::size_t>(mcs)) * kDataRePerRb; }

double midpoint_db(int mcs) {
  const double se = kBitsPerRe.at(static_cast<std::size_t>(mcs));
  return 10.0 * std::log10((std::pow(2.0, se) - 1.0) * std::pow(10.0, kShannonGapDb / 10.0));
}

int code_blocks(double block_bytes) {
  return std::max(1, static_cast<int>(std::ceil(block_bytes * 8.0 / kCodeBlockBits)));
}

int rbs_needed(double bytes, int mcs) {
  if (bytes <= 0) return 0;
  return static_cast<int>(std::ceil(bytes * 8.0 / bits_per_rb(mcs) - 1e-9));
}

double per_from_sinr(double sinr_db, double block_bytes, int mcs) {
  if (std::isnan(sinr_db)) return 1.0;
  const double p = logistic_error(sinr_db, midpoint_db(mcs));
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  return -std::expm1(code_blocks(block_bytes) * std::log1p(-p));
}

double predicted_per(double sinr_estimate_db, int mcs, double block_bytes) {
  double sum = 0.0;
  for (double f : fading_quantiles_db()) sum += per_from_sinr(sinr_estimate_db + f, block_bytes, mcs);
  return sum / kFadingPoints;
}

double selection_threshold_db(int mcs, double target_bler) {
  static std::mutex mu;
  static std::map<std::pair<int, double>, double> memo;
  std::lock_guard<std::mutex> lock(mu);
  const auto key = std::make_pair(mcs, target_bler);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  double lo = -40.0;
  double hi = 100.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (predicted_per(mid, mcs) <= target_bler) hi = mid;
    else lo = mid;
  }
  memo[key] = hi;
  return hi;
}

int select_mcs(double sinr_estimate_db, double target_bler) {
  for (int m = kNumMcs - 1; m > 0; --m) {
    if (sinr_estimate_db >= selection_threshold_db(m, target_bler)) return m;
  }
  return 0;
}

}  // namespace coexist::link
