#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "coexist/metrics.hpp"
#include "coexist/sac.hpp"
#include "coexist/scenario.hpp"

namespace coexist::harness {

enum class Mode { SingleUrllc, MixedServ, Slicing, AgentTrain, AgentEval };

std::string to_string(Mode m);
Mode parse_mode(const std::string& s);  // singleURLLC | mixedServ | slicing | train | evaluate

struct ExperimentPlan {
  Mode mode = Mode::MixedServ;
  int m = 0;  // 0 = n
  std::vector<std::uint64_t> seeds{1};
  double slicing_fraction = 0.25;
  int parallelism = 1;
};

// "a..b", "a,b,c" or "a".
std::vector<std::uint64_t> parse_seeds(const std::string& text);

struct AvailabilitySample {
  std::uint64_t run = 0;
  int device = 0;
  Direction dir = Direction::Ul;
  double alpha = 1.0;
};

struct DelaySample {
  std::uint64_t run = 0;
  int iteration = 0;
  int m = 0;
  double d_ai_s = 0.0;
  bool timeout = false;
};

struct ResultSet {
  Mode mode = Mode::MixedServ;
  std::vector<AvailabilitySample> availability;
  std::vector<DelaySample> delays;
  std::vector<double> selection_counts;  // per AI device
  std::vector<double> rewards;           // per iteration, run order
  std::int64_t iterations = 0;
  std::int64_t ai_packets = 0;

  std::vector<double> availability_values() const;
  std::vector<double> delay_values() const;
};

// Plan/config mismatches (e.g. m > N) throw std::invalid_argument. Agent
// modes need `agent`.
ResultSet run_plan(const ExperimentPlan& plan, const scenario::ScenarioConfig& cfg,
                   agent::Sac* agent = nullptr);

struct Summary {
  std::vector<std::pair<double, double>> availability_cdf;  // (alpha, F(alpha))
  metrics::FiveNumber delay;
  bool has_delay = false;
  std::vector<double> selection_ratio;
  std::map<int, double> m_pmf;
};

Summary summarize(const ResultSet& r);

// Empirical CDF of `a` lies at or below that of `b` everywhere.
bool stochastically_dominates(std::vector<double> a, std::vector<double> b);

double median(std::vector<double> v);

// Writes availability.csv, delays.csv, availability_cdf.csv, delay_summary.csv,
// selection_ratio.csv, m_pmf.csv and manifest.json under `dir`.
void write_results(const std::filesystem::path& dir, const ResultSet& r, const Summary& s,
                   const scenario::ScenarioConfig& cfg, const ExperimentPlan& plan);

struct SelftestResult {
  std::string name;
  bool pass = false;
  std::string detail;
};
std::vector<SelftestResult> selftest();

std::string version();

}  // namespace coexist::harness
