#include "coexist/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "coexist/bounds.hpp"
#include "coexist/channel.hpp"
#include "coexist/environment.hpp"
#include "coexist/episode.hpp"
#include "coexist/mdp.hpp"
#include "coexist/ran_sim.hpp"

namespace coexist::harness {

std::string version() { return "coexist 1.0.0"; }

std::string to_string(Mode m) {
  switch (m) {
    case Mode::SingleUrllc: return "singleURLLC";
    case Mode::MixedServ: return "mixedServ";
    case Mode::Slicing: return "slicing";
    case Mode::AgentTrain: return "train";
    case Mode::AgentEval: return "evaluate";
  }
  return "?";
}

Mode parse_mode(const std::string& s) {
  if (s == "singleURLLC") return Mode::SingleUrllc;
  if (s == "mixedServ") return Mode::MixedServ;
  if (s == "slicing") return Mode::Slicing;
  if (s == "train" || s == "dRlAgent-train") return Mode::AgentTrain;
  if (s == "evaluate" || s == "dRlAgent-eval") return Mode::AgentEval;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  if (auto pos = text.find(".."); pos != std::string::npos) {
    const auto a = std::stoull(text.substr(0, pos));
    const auto b = std::stoull(text.substr(pos + 2));
    if (b < a) throw std::invalid_argument("seed range is empty");
    for (auto s = a; s <= b; ++s) out.push_back(s);
    return out;
  }
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stoull(tok));
  }
  if (out.empty()) throw std::invalid_argument("no seeds given");
  return out;
}

std::vector<double> ResultSet::availability_values() const {
  std::vector<double> v;
  for (const auto& a : availability) v.push_back(a.alpha);
  return v;
}

std::vector<double> ResultSet::delay_values() const {
  std::vector<double> v;
  for (const auto& d : delays) v.push_back(d.d_ai_s);
  return v;
}

namespace {

void append_trace(ResultSet& r, std::uint64_t seed, const agent::EpisodeTrace& tr) {
  for (std::size_t k = 0; k < tr.iterations.size(); ++k) {
    const auto& it = tr.iterations[k];
    r.delays.push_back({seed, static_cast<int>(k), static_cast<int>(it.selected.size()), it.d_ai_s,
                        it.timeout});
    for (int i : it.selected) r.selection_counts[static_cast<std::size_t>(i)] += 1.0;
  }
  r.rewards.insert(r.rewards.end(), tr.rewards.begin(), tr.rewards.end());
  r.iterations += static_cast<std::int64_t>(tr.iterations.size());
  for (std::size_t u = 0; u < tr.availability.size(); ++u) {
    for (Direction d : kDirections) r.availability.push_back({seed, static_cast<int>(u), d, tr.availability[u][d]});
  }
}

ResultSet run_one(const ExperimentPlan& plan, const scenario::ScenarioConfig& cfg,
                  std::uint64_t seed, agent::Sac* sac) {
  ResultSet r;
  r.mode = plan.mode;
  r.selection_counts.assign(static_cast<std::size_t>(cfg.n_ai()), 0.0);
  switch (plan.mode) {
    case Mode::SingleUrllc: {
      ran::Engine eng(cfg, seed, ran::EngineOptions{false, 0.0, nullptr});
      const auto ttis = static_cast<std::int64_t>(std::llround(cfg.single_urllc_duration_s / cfg.radio.tti_s));
      for (std::int64_t t = 0; t < ttis; ++t) eng.step_tti();
      const double end = eng.now();
      eng.settle_availability(end);
      for (int u = 0; u < eng.num_urllc(); ++u) {
        for (Direction d : kDirections) r.availability.push_back({seed, u, d, eng.availability(u, d).estimate(0.0, end)});
      }
      r.ai_packets = eng.counters(Flow::Ai).generated;
      break;
    }
    case Mode::MixedServ:
    case Mode::Slicing: {
      const int m = plan.m > 0 ? plan.m : cfg.n_required();
      agent::EnvironmentOptions eo;
      if (plan.mode == Mode::Slicing) eo.slicing_fraction = plan.slicing_fraction;
      agent::Environment env(cfg, seed, eo);
      auto tr = agent::run_policy_episode(
          env, [m](const Eigen::VectorXd&, agent::Environment& e) { return e.random_selection(m); });
      r.ai_packets = env.engine().counters(Flow::Ai).generated;
      append_trace(r, seed, tr);
      break;
    }
    case Mode::AgentEval: {
      agent::Environment env(cfg, seed);
      Rng rng = make_stream(seed, streams::kExploration);
      auto tr = agent::run_episode(env, *sac, nullptr, agent::RunMode::Evaluate, rng);
      r.ai_packets = env.engine().counters(Flow::Ai).generated;
      append_trace(r, seed, tr);
      break;
    }
    case Mode::AgentTrain:
      break;
  }
  return r;
}

void merge(ResultSet& into, const ResultSet& from) {
  into.availability.insert(into.availability.end(), from.availability.begin(), from.availability.end());
  into.delays.insert(into.delays.end(), from.delays.begin(), from.delays.end());
  into.rewards.insert(into.rewards.end(), from.rewards.begin(), from.rewards.end());
  for (std::size_t i = 0; i < into.selection_counts.size(); ++i) into.selection_counts[i] += from.selection_counts[i];
  into.iterations += from.iterations;
  into.ai_packets += from.ai_packets;
}

}  // namespace

ResultSet run_plan(const ExperimentPlan& plan, const scenario::ScenarioConfig& cfg, agent::Sac* sac) {
  if (plan.seeds.empty()) throw std::invalid_argument("plan needs at least one seed");
  if (plan.mode == Mode::MixedServ || plan.mode == Mode::Slicing) {
    const int m = plan.m > 0 ? plan.m : cfg.n_required();
    if (m < cfg.n_required() || m > cfg.n_ai()) throw std::invalid_argument("m must lie in [n, N]");
  }
  if ((plan.mode == Mode::AgentEval || plan.mode == Mode::AgentTrain) && !sac) {
    throw std::invalid_argument("agent mode needs an agent");
  }

  ResultSet total;
  total.mode = plan.mode;
  total.selection_counts.assign(static_cast<std::size_t>(cfg.n_ai()), 0.0);

  if (plan.mode == Mode::AgentTrain) {
    auto res = agent::train_agent(cfg, *sac, cfg.agent.episodes, plan.seeds.front());
    for (const auto& p : res.curve) total.rewards.push_back(p.mean_reward);
    total.iterations = res.iterations;
    return total;
  }

  std::vector<ResultSet> parts(plan.seeds.size());
  const int jobs = std::max(1, std::min<int>(plan.parallelism, static_cast<int>(plan.seeds.size())));
  if (jobs == 1) {
    for (std::size_t i = 0; i < plan.seeds.size(); ++i) parts[i] = run_one(plan, cfg, plan.seeds[i], sac);
  } else {
    std::mutex mu;
    std::size_t next = 0;
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) {
      pool.emplace_back([&] {
        while (true) {
          std::size_t i;
          {
            std::lock_guard<std::mutex> lock(mu);
            if (next >= plan.seeds.size()) return;
            i = next++;
          }
          parts[i] = run_one(plan, cfg, plan.seeds[i], sac);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& p : parts) merge(total, p);
  return total;
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty sample");
  std::sort(v.begin(), v.end());
  return metrics::nearest_rank(v, 0.5);
}

bool stochastically_dominates(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) return false;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<double> pts = a;
  pts.insert(pts.end(), b.begin(), b.end());
  for (double x : pts) {
    const double fa = static_cast<double>(std::upper_bound(a.begin(), a.end(), x) - a.begin()) / a.size();
    const double fb = static_cast<double>(std::upper_bound(b.begin(), b.end(), x) - b.begin()) / b.size();
    if (fa > fb + 1e-12) return false;
  }
  return true;
}

Summary summarize(const ResultSet& r) {
  Summary s;
  std::vector<double> a = r.availability_values();
  std::sort(a.begin(), a.end());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i + 1 < a.size() && a[i + 1] == a[i]) continue;
    s.availability_cdf.emplace_back(a[i], static_cast<double>(i + 1) / a.size());
  }
  std::vector<double> d = r.delay_values();
  if (!d.empty()) {
    s.delay = metrics::five_number(d);
    s.has_delay = true;
  }
  std::map<int, int> counts;
  for (const auto& x : r.delays) ++counts[x.m];
  for (const auto& [m, c] : counts) s.m_pmf[m] = static_cast<double>(c) / r.delays.size();
  for (double c : r.selection_counts) {
    s.selection_ratio.push_back(r.iterations > 0 ? c / static_cast<double>(r.iterations) : 0.0);
  }
  return s;
}

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

void write_results(const std::filesystem::path& dir, const ResultSet& r, const Summary& s,
                   const scenario::ScenarioConfig& cfg, const ExperimentPlan& plan) {
  std::filesystem::create_directories(dir);
  const std::string mode = to_string(r.mode);
  {
    std::ofstream f(dir / "availability.csv");
    f << "mode,run,device,direction,alpha\n";
    for (const auto& a : r.availability) {
      f << mode << ',' << a.run << ',' << a.device << ',' << coexist::to_string(a.dir) << ',' << num(a.alpha) << '\n';
    }
  }
  {
    std::ofstream f(dir / "delays.csv");
    f << "mode,run,iteration,m,d_ai_s,timeout\n";
    for (const auto& d : r.delays) {
      f << mode << ',' << d.run << ',' << d.iteration << ',' << d.m << ',' << num(d.d_ai_s) << ','
        << (d.timeout ? 1 : 0) << '\n';
    }
  }
  {
    std::ofstream f(dir / "availability_cdf.csv");
    f << "alpha,cdf\n";
    for (const auto& [x, p] : s.availability_cdf) f << num(x) << ',' << num(p) << '\n';
  }
  {
    std::ofstream f(dir / "delay_summary.csv");
    f << "min,q1,median,q3,max\n";
    if (s.has_delay) {
      f << num(s.delay.min) << ',' << num(s.delay.q1) << ',' << num(s.delay.median) << ','
        << num(s.delay.q3) << ',' << num(s.delay.max) << '\n';
    }
  }
  {
    std::ofstream f(dir / "selection_ratio.csv");
    f << "device,ratio\n";
    for (std::size_t i = 0; i < s.selection_ratio.size(); ++i) f << i << ',' << num(s.selection_ratio[i]) << '\n';
  }
  {
    std::ofstream f(dir / "m_pmf.csv");
    f << "m,probability\n";
    for (const auto& [m, p] : s.m_pmf) f << m << ',' << num(p) << '\n';
  }
  if (!r.rewards.empty()) {
    std::ofstream f(dir / "rewards.csv");
    f << "index,reward\n";
    for (std::size_t i = 0; i < r.rewards.size(); ++i) f << i << ',' << num(r.rewards[i]) << '\n';
  }
  nlohmann::json manifest{
      {"version", version()},
      {"mode", mode},
      {"m", plan.m > 0 ? plan.m : cfg.n_required()},
      {"seeds", plan.seeds},
      {"slicing_fraction", plan.mode == Mode::Slicing ? plan.slicing_fraction : 0.0},
      {"config", scenario::to_json(cfg)},
  };
  const auto norm = agent::normalization_for(cfg);
  manifest["normalization"] = {
      {"sinr_db", {norm.sinr_min_db, norm.sinr_max_db}},   {"urllc_delay_max_s", norm.urllc_delay_max_s},
      {"downtime_max_s", norm.downtime_max_s},             {"urllc_buffer_max_bytes", norm.urllc_buffer_max_bytes},
      {"ai_delay_max_s", norm.ai_delay_max_s},             {"ai_buffer_max_bytes", norm.ai_buffer_max_bytes},
      {"rbs_max", norm.rbs_max}};
  std::ofstream f(dir / "manifest.json");
  f << manifest.dump(2) << '\n';
}

std::vector<SelftestResult> selftest() {
  std::vector<SelftestResult> out;
  auto check = [&](std::string name, bool ok, std::string detail = {}) {
    out.push_back({std::move(name), ok, std::move(detail)});
  };

  channel::LinkGeometry g;
  g.d_2d = 10.0;
  g.d_3d = 10.0;
  g.f_c_ghz = 2.6;
  check("path loss LOS at 10 m", std::abs(channel::path_loss_los(g) - 61.22) < 0.01,
        num(channel::path_loss_los(g)));
  check("path loss NLOS at 10 m", std::abs(channel::path_loss_nlos(g) - 63.83) < 0.01,
        num(channel::path_loss_nlos(g)));
  check("LOS probability at 10 m", std::abs(channel::los_probability(g) - 0.0419) < 1e-3,
        num(channel::los_probability(g)));

  check("training delay example", metrics::training_delay({3.0, 1.0, 5.0}, 0.5, 2, 10.0) == 3.5);
  check("training delay cap", metrics::training_delay({9.0, 9.8, 9.9}, 0.5, 2, 10.0) == 10.0);

  metrics::AvailabilityRecord rec(0.006);
  rec.on_event(0.020, false);
  rec.on_event(0.030, true);
  check("availability 10 ms burst", std::abs(rec.estimate(0.0, 0.1) - 0.96) < 1e-12,
        num(rec.estimate(0.0, 0.1)));

  Eigen::VectorXd a(4);
  a << 0.5, -0.2, 0.1, -0.9;
  check("action mapping first branch", agent::map_action(a, 2) == std::vector<int>{1, 0, 1, 0});
  a << -0.1, -0.2, -0.3, -0.4;
  check("action mapping second branch", agent::map_action(a, 2) == std::vector<int>{1, 1, 0, 0});

  check("reward worked example",
        std::abs(agent::reward_from(-0.01, 5.0, 10.0, 0.5, 100.0) - 0.4339) < 1e-4);
  check("kmin strongly convex example",
        std::abs(bounds::kmin_strongly_convex(1.0, 0.05, 2.0, 0.1, 1) - (std::log2(20.0) + 1.0)) < 1e-12);
  check("kmin nonconvex example", std::abs(bounds::kmin_nonconvex(10.0, 0.05, 0.1, 1) - 200.0) < 1e-9);
  const double ratio = bounds::kmin_fl_proportional(1, 1, 0, 1, 1) / 3.0;
  check("FL ratio n=1 vs large n", std::abs(ratio - 4.0 / 3.0) < 1e-12, num(ratio));
  return out;
}

}  // namespace coexist::harness
