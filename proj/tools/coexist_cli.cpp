#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "coexist/bounds.hpp"
#include "coexist/episode.hpp"
#include "coexist/harness.hpp"
#include "coexist/learning_task.hpp"
#include "coexist/mdp.hpp"
#include "coexist/sac.hpp"
#include "coexist/scenario.hpp"

using namespace coexist;

namespace {

scenario::ScenarioConfig load_config(const std::string& path, const std::string& preset) {
  if (!path.empty()) return scenario::load_scenario(path);
  if (preset == "desk") return scenario::desk_defaults();
  if (preset == "full") return scenario::full_scale();
  if (preset == "toy") return scenario::toy_coexistence();
  throw std::invalid_argument("unknown preset '" + preset + "'");
}

agent::Sac make_agent(const scenario::ScenarioConfig& cfg) {
  return agent::Sac(agent::state_dimension(cfg), cfg.n_ai(), cfg.agent,
                    cfg.rng_seed);
}

double initial_gap(const scenario::ScenarioConfig& cfg) {
  learn::LearningTask task(cfg.ai.task, cfg.n_ai(), cfg.rng_seed);
  return task.value(task.initial_point()) - task.optimum();
}

struct Sweep {
  std::string param = "n";
  double lo = 1, hi = 1, step = 1;
};

Sweep parse_sweep(const std::string& s, int n_total) {
  Sweep w;
  if (s.empty()) {
    w.hi = n_total;
    return w;
  }
  const auto eq = s.find('=');
  if (eq == std::string::npos) throw std::invalid_argument("sweep must look like param=lo:hi:step");
  w.param = s.substr(0, eq);
  const std::string rest = s.substr(eq + 1);
  if (std::sscanf(rest.c_str(), "%lf:%lf:%lf", &w.lo, &w.hi, &w.step) != 3 || !(w.step > 0.0)) {
    throw std::invalid_argument("sweep must look like param=lo:hi:step");
  }
  if (w.param != "n" && w.param != "epsilon" && w.param != "local_epochs" && w.param != "eta") {
    throw std::invalid_argument("sweep parameter must be n, epsilon, local_epochs or eta");
  }
  return w;
}

double kmin_for(int regime, const scenario::ScenarioConfig& cfg, double gap1, int n, double eps,
                double epochs, double eta) {
  const auto& t = cfg.ai.task;
  bounds::GradientConstants c;
  c.eta = eta;
  c.smoothness = t.smoothness;
  c.mu = t.mu;
  c.sigma2 = t.noise_sigma2;
  c.n = n;
  if (regime == 1) {
    c.beta1 = 1.0;
    const auto r = bounds::linear_rate(c, gap1);
    return bounds::kmin_strongly_convex(r.w, r.z, r.b, eps, n);
  }
  if (regime == 2) {
    c.beta1 = 0.0;
    const double w = 2.0 * gap1 / (eta * (c.beta1 + 1.0));
    const double z = eta * t.smoothness * t.noise_sigma2 / (c.beta1 + 1.0);
    return bounds::kmin_nonconvex(w, z, eps, n);
  }
  const double g2 = t.noise_sigma2 + t.heterogeneity * t.heterogeneity;
  return bounds::kmin_fl_proportional(epochs, g2, t.noise_sigma2 / cfg.n_ai(), eps, n);
}

int run_bounds(const scenario::ScenarioConfig& cfg, int regime, const std::string& sweep_text,
               bool validate, int seeds, int iterations) {
  if (regime < 1 || regime > 3) throw std::invalid_argument("regime must be 1, 2 or 3");
  if (validate) {
    if (regime == 3) throw std::invalid_argument("empirical validation covers regimes 1 and 2");
    const auto reg = static_cast<bounds::Regime>(regime);
    const double beta1 = regime == 1 ? 1.0 : 0.0;
    auto rep = bounds::validate_bound_empirically(cfg.ai.task, reg, seeds, iterations,
                                                  cfg.n_required(), beta1, 0.0);
    std::cout << "k,empirical,rhs\n";
    for (std::size_t i = 0; i < rep.empirical.size(); ++i) {
      std::cout << i + 1 << ',' << rep.empirical[i] << ',' << rep.rhs[i] << '\n';
    }
    std::cerr << rep.regime << " worst ratio " << rep.worst_ratio << (rep.pass ? " pass" : " FAIL")
              << '\n';
    return rep.pass ? 0 : 1;
  }
  const Sweep sw = parse_sweep(sweep_text, cfg.n_ai());
  const double gap1 = initial_gap(cfg);
  std::cout << sw.param << ",kmin\n";
  for (double v = sw.lo; v <= sw.hi + 1e-9; v += sw.step) {
    int n = cfg.n_required();
    double eps = cfg.ai.task.epsilon;
    double epochs = cfg.ai.task.local_epochs;
    double eta = cfg.ai.task.learning_rate;
    if (sw.param == "n") n = static_cast<int>(v);
    if (sw.param == "epsilon") eps = v;
    if (sw.param == "local_epochs") epochs = v;
    if (sw.param == "eta") eta = v;
    std::cout << v << ',';
    try {
      std::cout << kmin_for(regime, cfg, gap1, n, eps, epochs, eta) << '\n';
    } catch (const bounds::UndefinedRegime&) {
      std::cout << "undefined\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coexistence simulator for URLLC and distributed learning traffic"};
  app.set_version_flag("--version", harness::version());
  app.require_subcommand(1);

  std::string config_path, preset = "desk", out_dir = "results", seeds_text = "1", checkpoint;
  std::string mode_text = "mixedServ";
  int m = 0, jobs = 1, episodes = 0;
  double fraction = 0.25;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Scenario JSON file");
    sub->add_option("--preset", preset, "Built-in scenario when no config is given")
        ->check(CLI::IsMember({"desk", "full", "toy"}));
  };

  auto* sim = app.add_subcommand("simulate", "Run a benchmark over a set of seeds");
  add_common(sim);
  sim->add_option("--mode", mode_text, "singleURLLC, mixedServ or slicing")->required();
  sim->add_option("--seeds", seeds_text, "Seed list: a..b, a,b,c or a");
  sim->add_option("--m", m, "Devices requested per iteration (default n)");
  sim->add_option("--slicing-fraction", fraction, "URLLC share of RBs in slicing mode");
  sim->add_option("--out", out_dir, "Output directory");
  sim->add_option("--jobs", jobs, "Runs executed in parallel");

  auto* train = app.add_subcommand("train", "Train the selection agent");
  add_common(train);
  train->add_option("--episodes", episodes, "Episodes (default from config)");
  train->add_option("--seed-base", seeds_text, "First run seed");
  train->add_option("--checkpoint", checkpoint, "Where to write the trained agent")->required();
  train->add_option("--out", out_dir, "Output directory for the training curve");

  auto* eval = app.add_subcommand("evaluate", "Evaluate a trained agent");
  add_common(eval);
  eval->add_option("--checkpoint", checkpoint, "Trained agent")->required();
  eval->add_option("--seeds", seeds_text, "Seed list");
  eval->add_option("--out", out_dir, "Output directory");
  eval->add_option("--jobs", jobs, "Runs executed in parallel");

  int regime = 1, bound_seeds = 200, bound_iters = 100;
  std::string sweep;
  bool validate = false;
  auto* bnd = app.add_subcommand("bounds", "Iteration-count calculators and bound checks");
  add_common(bnd);
  bnd->add_option("--regime", regime, "1 strongly convex, 2 non-convex, 3 federated averaging");
  bnd->add_option("--sweep", sweep, "param=lo:hi:step with param in n, epsilon, local_epochs, eta");
  bnd->add_flag("--validate", validate, "Monte Carlo check of the bound instead of a sweep");
  bnd->add_option("--bound-seeds", bound_seeds, "Seeds for --validate");
  bnd->add_option("--iterations", bound_iters, "Iterations for --validate");

  auto* self = app.add_subcommand("selftest", "Run built-in oracle checks");

  auto* dump = app.add_subcommand("config", "Print a scenario as JSON");
  add_common(dump);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*self) {
      int failures = 0;
      for (const auto& r : harness::selftest()) {
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.name;
        if (!r.detail.empty()) std::cout << " (" << r.detail << ')';
        std::cout << '\n';
        failures += r.pass ? 0 : 1;
      }
      return failures == 0 ? 0 : 1;
    }

    const auto cfg = load_config(config_path, preset);

    if (*dump) {
      std::cout << scenario::to_json(cfg).dump(2) << '\n';
      return 0;
    }
    if (*bnd) return run_bounds(cfg, regime, sweep, validate, bound_seeds, bound_iters);

    if (*sim) {
      harness::ExperimentPlan plan;
      plan.mode = harness::parse_mode(mode_text);
      if (plan.mode == harness::Mode::AgentTrain || plan.mode == harness::Mode::AgentEval) {
        throw std::invalid_argument("use the train or evaluate subcommands for agent modes");
      }
      plan.m = m;
      plan.seeds = harness::parse_seeds(seeds_text);
      plan.slicing_fraction = fraction;
      plan.parallelism = jobs;
      const auto res = harness::run_plan(plan, cfg);
      const auto sum = harness::summarize(res);
      harness::write_results(out_dir, res, sum, cfg, plan);
      if (sum.has_delay) std::cerr << "median d_ai " << sum.delay.median << " s\n";
      return 0;
    }

    if (*train) {
      agent::Sac sac = make_agent(cfg);
      const int ep = episodes > 0 ? episodes : cfg.agent.episodes;
      const auto seed_base = harness::parse_seeds(seeds_text).front();
      std::filesystem::create_directories(out_dir);
      std::ofstream curve(std::filesystem::path(out_dir) / "training_curve.csv");
      curve << "episode,iterations,mean_reward,critic_loss,actor_loss,entropy,temperature\n";
      agent::train_agent(cfg, sac, ep, seed_base, {}, [&](const agent::TrainingCurvePoint& p) {
        curve << p.episode << ',' << p.iterations << ',' << p.mean_reward << ',' << p.critic_loss
              << ',' << p.actor_loss << ',' << p.entropy << ',' << p.temperature << '\n';
        std::cerr << "episode " << p.episode << " reward " << p.mean_reward << '\n';
      });
      std::ofstream ck(checkpoint);
      if (!ck) throw std::runtime_error("cannot write checkpoint " + checkpoint);
      sac.save(ck);
      return 0;
    }

    if (*eval) {
      agent::Sac sac = make_agent(cfg);
      std::ifstream ck(checkpoint);
      if (!ck) throw std::runtime_error("cannot read checkpoint " + checkpoint);
      sac.load(ck);
      harness::ExperimentPlan plan;
      plan.mode = harness::Mode::AgentEval;
      plan.seeds = harness::parse_seeds(seeds_text);
      plan.parallelism = jobs;
      const auto res = harness::run_plan(plan, cfg, &sac);
      const auto sum = harness::summarize(res);
      harness::write_results(out_dir, res, sum, cfg, plan);
      if (sum.has_delay) std::cerr << "median d_ai " << sum.delay.median << " s\n";
      return 0;
    }
  } catch (const scenario::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
