#pragma once

#include <array>

namespace coexist::link {

// Abstract link-level model: an 8-entry MCS table in information bits per
// resource element, a logistic block error curve per code block centred at a
// Shannon-gap threshold, and MCS selection against the fading-averaged curve.
inline constexpr int kNumMcs = 8;
inline constexpr std::array<double, kNumMcs> kBitsPerRe{0.15, 0.38, 0.88, 1.48,
                                                         2.41, 3.32, 4.52, 5.55};
inline constexpr double kDataRePerRb = 144.0;
inline constexpr double kCodeBlockBits = 8448.0;
inline constexpr double kShannonGapDb = 1.0;
inline constexpr double kLogisticSlope = 2.0;  // per dB

double bits_per_rb(int mcs);
double midpoint_db(int mcs);
int code_blocks(double block_bytes);
int rbs_needed(double bytes, int mcs);

// Transport block error probability at an instantaneous SINR.
double per_from_sinr(double sinr_db, double block_bytes, int mcs);

// PER averaged over unit-mean exponential fading around the estimate.
double predicted_per(double sinr_estimate_db, int mcs, double block_bytes = 1.0);

// Smallest estimate at which predicted_per(.., mcs) <= target.
double selection_threshold_db(int mcs, double target_bler);

int select_mcs(double sinr_estimate_db, double target_bler = 0.1);

}  // namespace coexist::link
