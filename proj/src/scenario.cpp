#include "coexist/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace coexist::scenario {

using nlohmann::json;

std::string_view to_string(TaskKind k) {
  switch (k) {
    case TaskKind::Quadratic: return "quadratic";
    case TaskKind::Nonconvex: return "nonconvex";
    case TaskKind::FederatedAveraging: return "fl";
  }
  return "?";
}

namespace {

// Reads fields from one JSON object, remembering which keys were consumed so
// anything left over can be rejected as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string field(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  bool has(std::string_view key) const { return j_.contains(std::string(key)); }

  template <typename T>
  void get(std::string_view key, T& out) {
    const std::string k(key);
    seen_.insert(k);
    if (!j_.contains(k)) return;
    try {
      out = j_.at(k).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(field(key), std::string("wrong type (") + e.what() + ")");
    }
  }

  const json* child(std::string_view key) {
    const std::string k(key);
    seen_.insert(k);
    if (!j_.contains(k)) return nullptr;
    return &j_.at(k);
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.contains(k)) throw ConfigError(field(k), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Vec3 read_vec3(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(field, "expected [x, y, z]");
  try {
    return Vec3{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
  } catch (const json::exception&) {
    throw ConfigError(field, "expected numeric [x, y, z]");
  }
}

json write_vec3(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

template <typename T>
void read_per_direction(ObjectReader& parent, std::string_view key, PerDirection<T>& out) {
  const json* c = parent.child(key);
  if (!c) return;
  ObjectReader r(*c, parent.field(key));
  r.get("ul", out.ul);
  r.get("dl", out.dl);
  r.finish();
}

template <typename T>
json write_per_direction(const PerDirection<T>& v) {
  return json{{"ul", v.ul}, {"dl", v.dl}};
}

std::vector<Vec3> read_positions(const json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError(field, "expected a list of [x, y, z]");
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(read_vec3(j[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

UrllcProfile read_urllc_profile(const json& j, const std::string& field) {
  UrllcProfile p;
  ObjectReader r(j, field);
  if (const json* pos = r.child("position")) p.initial_position = read_vec3(*pos, r.field("position"));
  else throw ConfigError(r.field("position"), "required");
  r.get("speed_mps", p.speed_mps);
  std::string mob = "random";
  r.get("direction", mob);
  if (mob == "random") p.mobility = MobilityPolicy::RandomPerSeed;
  else if (mob == "fixed") p.mobility = MobilityPolicy::Fixed;
  else throw ConfigError(r.field("direction"), "expected \"fixed\" or \"random\"");
  r.get("heading_deg", p.heading_deg);
  r.get("span_m", p.span_m);
  r.get("period_s", p.packet_period_s);
  r.get("ul_bytes", p.ul_bytes);
  r.get("dl_bytes", p.dl_bytes);
  r.finish();
  return p;
}

TaskParams read_task(const json& j, const std::string& field) {
  TaskParams t;
  ObjectReader r(j, field);
  std::string kind = std::string(to_string(t.kind));
  r.get("kind", kind);
  if (kind == "quadratic") t.kind = TaskKind::Quadratic;
  else if (kind == "nonconvex") t.kind = TaskKind::Nonconvex;
  else if (kind == "fl") t.kind = TaskKind::FederatedAveraging;
  else throw ConfigError(r.field("kind"), "expected quadratic | nonconvex | fl");
  r.get("dimension", t.dimension);
  r.get("mu", t.mu);
  r.get("smoothness", t.smoothness);
  r.get("heterogeneity", t.heterogeneity);
  r.get("noise_sigma2", t.noise_sigma2);
  r.get("learning_rate", t.learning_rate);
  r.get("local_epochs", t.local_epochs);
  r.get("well_amplitude", t.well_amplitude);
  r.get("well_frequency", t.well_frequency);
  r.get("init_distance", t.init_distance);
  r.get("epsilon", t.epsilon);
  r.finish();
  return t;
}

AgentHyperparams read_agent(const json& j, const std::string& field) {
  AgentHyperparams a;
  ObjectReader r(j, field);
  r.get("discount", a.discount);
  r.get("minibatch", a.minibatch);
  r.get("replay_capacity", a.replay_capacity);
  r.get("hidden", a.hidden);
  r.get("priority_alpha", a.priority_alpha);
  r.get("priority_beta", a.priority_beta);
  r.get("learning_rate", a.learning_rate);
  r.get("soft_update", a.soft_update);
  std::string mode = "auto";
  r.get("temperature_mode", mode);
  if (mode == "auto") a.temperature_mode = TemperatureMode::Auto;
  else if (mode == "fixed") a.temperature_mode = TemperatureMode::Fixed;
  else throw ConfigError(r.field("temperature_mode"), "expected \"auto\" or \"fixed\"");
  r.get("temperature", a.temperature);
  r.get("min_buffer", a.min_buffer);
  std::string replay = "prioritized";
  r.get("replay", replay);
  if (replay == "prioritized") a.replay = ReplayMode::Prioritized;
  else if (replay == "uniform") a.replay = ReplayMode::Uniform;
  else throw ConfigError(r.field("replay"), "expected \"prioritized\" or \"uniform\"");
  r.get("train_interval", a.train_interval);
  r.get("gradient_steps", a.gradient_steps);
  r.get("grad_clip", a.grad_clip);
  r.get("episodes", a.episodes);
  r.finish();
  return a;
}

void require(bool ok, const std::string& field, const std::string& msg) {
  if (!ok) throw ConfigError(field, msg);
}

bool inside(const Vec3& p, const HallGeometry& h) {
  return p.x >= 0 && p.y >= 0 && p.z >= 0 && p.x <= h.size.x && p.y <= h.size.y &&
         p.z <= h.size.z;
}

}  // namespace

ScenarioConfig from_json(const json& j) {
  ScenarioConfig c;
  c.gnb_positions.clear();
  ObjectReader root(j, "");
  root.get("rng_seed", c.rng_seed);

  if (const json* h = root.child("hall")) {
    ObjectReader r(*h, "hall");
    if (const json* s = r.child("size_m")) c.hall.size = read_vec3(*s, "hall.size_m");
    r.finish();
  }
  if (const json* g = root.child("gnbs")) c.gnb_positions = read_positions(*g, "gnbs");

  if (const json* rj = root.child("radio")) {
    ObjectReader r(*rj, "radio");
    auto& p = c.radio;
    r.get("carrier_ghz", p.carrier_ghz);
    r.get("bandwidth_hz", p.bandwidth_hz);
    r.get("num_rbs", p.num_rbs);
    r.get("rb_bandwidth_hz", p.rb_bandwidth_hz);
    r.get("tti_s", p.tti_s);
    r.get("ul_tx_power_w", p.ul_tx_power_w);
    r.get("dl_tx_power_w", p.dl_tx_power_w);
    r.get("noise_figure_db", p.noise_figure_db);
    r.get("combining_gain_db", p.combining_gain_db);
    r.get("target_bler", p.target_bler);
    r.get("processing_ttis", p.processing_ttis);
    r.get("harq_feedback_ttis", p.harq_feedback_ttis);
    r.get("pf_smoothing", p.pf_smoothing);
    r.get("position_grid_m", p.position_grid_m);
    r.finish();
  }

  if (const json* pj = root.child("propagation")) {
    ObjectReader r(*pj, "propagation");
    auto& p = c.propagation;
    r.get("h_clut_m", p.h_clut_m);
    r.get("d_clut_m", p.d_clut_m);
    r.get("r_clut", p.r_clut);
    r.get("h_device_m", p.h_device_m);
    r.get("shadowing_los_db", p.shadowing_los_db);
    r.get("shadowing_nlos_db", p.shadowing_nlos_db);
    r.finish();
  }

  if (const json* uj = root.child("urllc")) {
    ObjectReader r(*uj, "urllc");
    read_per_direction(r, "delay_bound_s", c.urllc.delay_bound_s);
    read_per_direction(r, "survival_time_s", c.urllc.survival_time_s);
    read_per_direction(r, "max_harq_tx", c.urllc.max_harq_tx);
    if (const json* d = r.child("devices")) {
      if (!d->is_array()) throw ConfigError("urllc.devices", "expected a list");
      for (std::size_t i = 0; i < d->size(); ++i) {
        c.urllc.devices.push_back(
            read_urllc_profile((*d)[i], "urllc.devices[" + std::to_string(i) + "]"));
      }
    }
    r.finish();
  }

  if (const json* aj = root.child("ai")) {
    ObjectReader r(*aj, "ai");
    auto& a = c.ai;
    r.get("device_count", a.device_count);
    if (const json* p = r.child("positions")) a.positions = read_positions(*p, "ai.positions");
    if (!r.has("device_count")) a.device_count = static_cast<int>(a.positions.size());
    r.get("layout_seed", a.layout_seed);
    r.get("required_updates", a.required_updates);
    r.get("message_bytes", a.message_bytes);
    read_per_direction(r, "max_harq_tx", a.max_harq_tx);
    read_per_direction(r, "max_rlc_retx", a.max_rlc_retx);
    r.get("compute_median_s", a.compute_median_s);
    r.get("compute_sigma", a.compute_sigma);
    r.get("server_compute_s", a.server_compute_s);
    r.get("t_max_s", a.t_max_s);
    r.get("episode_length", a.episode_length);
    if (const json* t = r.child("task")) a.task = read_task(*t, "ai.task");
    r.finish();
  }

  if (const json* av = root.child("availability")) {
    ObjectReader r(*av, "availability");
    r.get("requirement", c.availability_req);
    r.get("sensitivity", c.sensitivity);
    r.finish();
  }
  if (const json* rw = root.child("reward")) {
    ObjectReader r(*rw, "reward");
    r.get("upsilon", c.reward.upsilon);
    r.get("zeta", c.reward.zeta);
    r.finish();
  }
  root.get("slicing_fraction", c.slicing_fraction);
  root.get("single_urllc_duration_s", c.single_urllc_duration_s);
  if (const json* ag = root.child("agent")) c.agent = read_agent(*ag, "agent");
  root.finish();

  if (c.gnb_positions.empty()) c.gnb_positions = desk_defaults().gnb_positions;
  validate(c);
  return c;
}

json to_json(const ScenarioConfig& c) {
  json gnbs = json::array();
  for (const auto& g : c.gnb_positions) gnbs.push_back(write_vec3(g));

  json urllc_devices = json::array();
  for (const auto& d : c.urllc.devices) {
    urllc_devices.push_back(json{
        {"position", write_vec3(d.initial_position)},
        {"speed_mps", d.speed_mps},
        {"direction", d.mobility == MobilityPolicy::Fixed ? "fixed" : "random"},
        {"heading_deg", d.heading_deg},
        {"span_m", d.span_m},
        {"period_s", d.packet_period_s},
        {"ul_bytes", d.ul_bytes},
        {"dl_bytes", d.dl_bytes},
    });
  }
  json ai_positions = json::array();
  for (const auto& p : c.ai.positions) ai_positions.push_back(write_vec3(p));

  const auto& t = c.ai.task;
  const auto& a = c.agent;
  const auto& r = c.radio;
  const auto& p = c.propagation;
  return json{
      {"rng_seed", c.rng_seed},
      {"hall", {{"size_m", write_vec3(c.hall.size)}}},
      {"gnbs", gnbs},
      {"radio",
       {{"carrier_ghz", r.carrier_ghz},
        {"bandwidth_hz", r.bandwidth_hz},
        {"num_rbs", r.num_rbs},
        {"rb_bandwidth_hz", r.rb_bandwidth_hz},
        {"tti_s", r.tti_s},
        {"ul_tx_power_w", r.ul_tx_power_w},
        {"dl_tx_power_w", r.dl_tx_power_w},
        {"noise_figure_db", r.noise_figure_db},
        {"combining_gain_db", r.combining_gain_db},
        {"target_bler", r.target_bler},
        {"processing_ttis", r.processing_ttis},
        {"harq_feedback_ttis", r.harq_feedback_ttis},
        {"pf_smoothing", r.pf_smoothing},
        {"position_grid_m", r.position_grid_m}}},
      {"propagation",
       {{"h_clut_m", p.h_clut_m},
        {"d_clut_m", p.d_clut_m},
        {"r_clut", p.r_clut},
        {"h_device_m", p.h_device_m},
        {"shadowing_los_db", p.shadowing_los_db},
        {"shadowing_nlos_db", p.shadowing_nlos_db}}},
      {"urllc",
       {{"delay_bound_s", write_per_direction(c.urllc.delay_bound_s)},
        {"survival_time_s", write_per_direction(c.urllc.survival_time_s)},
        {"max_harq_tx", write_per_direction(c.urllc.max_harq_tx)},
        {"devices", urllc_devices}}},
      {"ai",
       {{"device_count", c.ai.device_count},
        {"positions", ai_positions},
        {"layout_seed", c.ai.layout_seed},
        {"required_updates", c.ai.required_updates},
        {"message_bytes", c.ai.message_bytes},
        {"max_harq_tx", write_per_direction(c.ai.max_harq_tx)},
        {"max_rlc_retx", write_per_direction(c.ai.max_rlc_retx)},
        {"compute_median_s", c.ai.compute_median_s},
        {"compute_sigma", c.ai.compute_sigma},
        {"server_compute_s", c.ai.server_compute_s},
        {"t_max_s", c.ai.t_max_s},
        {"episode_length", c.ai.episode_length},
        {"task",
         {{"kind", std::string(to_string(t.kind))},
          {"dimension", t.dimension},
          {"mu", t.mu},
          {"smoothness", t.smoothness},
          {"heterogeneity", t.heterogeneity},
          {"noise_sigma2", t.noise_sigma2},
          {"learning_rate", t.learning_rate},
          {"local_epochs", t.local_epochs},
          {"well_amplitude", t.well_amplitude},
          {"well_frequency", t.well_frequency},
          {"init_distance", t.init_distance},
          {"epsilon", t.epsilon}}}}},
      {"availability", {{"requirement", c.availability_req}, {"sensitivity", c.sensitivity}}},
      {"reward", {{"upsilon", c.reward.upsilon}, {"zeta", c.reward.zeta}}},
      {"slicing_fraction", c.slicing_fraction},
      {"single_urllc_duration_s", c.single_urllc_duration_s},
      {"agent",
       {{"discount", a.discount},
        {"minibatch", a.minibatch},
        {"replay_capacity", a.replay_capacity},
        {"hidden", a.hidden},
        {"priority_alpha", a.priority_alpha},
        {"priority_beta", a.priority_beta},
        {"learning_rate", a.learning_rate},
        {"soft_update", a.soft_update},
        {"temperature_mode", a.temperature_mode == TemperatureMode::Auto ? "auto" : "fixed"},
        {"temperature", a.temperature},
        {"min_buffer", a.min_buffer},
        {"replay", a.replay == ReplayMode::Prioritized ? "prioritized" : "uniform"},
        {"train_interval", a.train_interval},
        {"gradient_steps", a.gradient_steps},
        {"grad_clip", a.grad_clip},
        {"episodes", a.episodes}}},
  };
}

void validate(const ScenarioConfig& c) {
  const auto& ai = c.ai;
  require(ai.required_updates >= 1, "ai.required_updates", "n must be ≥ 1");
  require(ai.device_count >= 1, "ai.device_count", "N must be ≥ 1");
  require(ai.required_updates <= ai.device_count, "ai.required_updates", "n ≤ N violated");
  require(ai.positions.empty() || static_cast<int>(ai.positions.size()) == ai.device_count,
          "ai.positions", "length must equal ai.device_count");
  require(ai.t_max_s > 0, "ai.t_max_s", "must be > 0");
  require(ai.episode_length >= 1, "ai.episode_length", "K must be ≥ 1");
  require(ai.message_bytes > 0, "ai.message_bytes", "must be > 0");
  require(ai.compute_median_s >= 0, "ai.compute_median_s", "must be ≥ 0");
  require(ai.compute_sigma >= 0, "ai.compute_sigma", "must be ≥ 0");
  require(ai.server_compute_s >= 0, "ai.server_compute_s", "must be ≥ 0");
  for (Direction d : kDirections) {
    require(ai.max_harq_tx[d] >= 1, "ai.max_harq_tx", "must be ≥ 1");
    require(ai.max_rlc_retx[d] >= 0, "ai.max_rlc_retx", "must be ≥ 0");
    require(c.urllc.delay_bound_s[d] > 0, "urllc.delay_bound_s", "per-direction delay bound must be > 0");
    require(c.urllc.survival_time_s[d] >= 0, "urllc.survival_time_s", "must be ≥ 0");
    require(c.urllc.max_harq_tx[d] >= 1, "urllc.max_harq_tx", "must be ≥ 1");
  }

  const auto& t = ai.task;
  require(t.dimension >= 1, "ai.task.dimension", "must be ≥ 1");
  require(t.mu > 0 && t.mu <= t.smoothness, "ai.task.mu", "need 0 < mu ≤ smoothness");
  require(t.noise_sigma2 >= 0, "ai.task.noise_sigma2", "must be ≥ 0");
  require(t.learning_rate > 0, "ai.task.learning_rate", "must be > 0");
  require(t.local_epochs >= 1, "ai.task.local_epochs", "E must be ≥ 1");
  require(t.epsilon > 0, "ai.task.epsilon", "must be > 0");
  require(t.heterogeneity >= 0, "ai.task.heterogeneity", "must be ≥ 0");
  if (t.kind != TaskKind::Nonconvex) {
    require(t.learning_rate < 2.0 / t.smoothness, "ai.task.learning_rate",
            "must be < 2/L for a stable quadratic");
  }

  require(c.reward.upsilon >= 0 && c.reward.upsilon <= 1, "reward.upsilon", "υ must be in [0,1]");
  require(c.reward.zeta > 0, "reward.zeta", "ζ must be > 0");
  require(c.availability_req > 0 && c.availability_req <= 1, "availability.requirement",
          "must be in (0,1]");
  require(c.sensitivity > 0 && c.sensitivity < 1, "availability.sensitivity", "γ must be in (0,1)");
  require(c.slicing_fraction >= 0 && c.slicing_fraction <= 1, "slicing_fraction", "must be in [0,1]");
  require(c.single_urllc_duration_s > 0, "single_urllc_duration_s", "must be > 0");

  const auto& r = c.radio;
  require(r.carrier_ghz > 0, "radio.carrier_ghz", "must be > 0");
  require(r.bandwidth_hz > 0, "radio.bandwidth_hz", "must be > 0");
  require(r.num_rbs >= 1, "radio.num_rbs", "must be ≥ 1");
  require(r.rb_bandwidth_hz > 0 && r.num_rbs * r.rb_bandwidth_hz <= r.bandwidth_hz * (1 + 1e-9),
          "radio.num_rbs", "RBs exceed the bandwidth");
  require(r.tti_s > 0, "radio.tti_s", "must be > 0");
  require(r.ul_tx_power_w > 0, "radio.ul_tx_power_w", "must be > 0");
  require(r.dl_tx_power_w > 0, "radio.dl_tx_power_w", "must be > 0");
  require(r.target_bler > 0 && r.target_bler < 1, "radio.target_bler", "must be in (0,1)");
  require(r.processing_ttis >= 0, "radio.processing_ttis", "must be ≥ 0");
  require(r.harq_feedback_ttis >= 0, "radio.harq_feedback_ttis", "must be ≥ 0");
  require(r.pf_smoothing > 0 && r.pf_smoothing <= 1, "radio.pf_smoothing", "must be in (0,1]");
  require(r.position_grid_m > 0, "radio.position_grid_m", "must be > 0");

  const auto& p = c.propagation;
  require(p.r_clut > 0 && p.r_clut < 1, "propagation.r_clut", "must be in (0,1)");
  require(p.d_clut_m > 0, "propagation.d_clut_m", "must be > 0");
  require(p.shadowing_los_db >= 0 && p.shadowing_nlos_db >= 0, "propagation.shadowing",
          "standard deviations must be ≥ 0");

  require(!c.gnb_positions.empty(), "gnbs", "at least one gNB required");
  for (std::size_t i = 0; i < c.gnb_positions.size(); ++i) {
    const std::string f = "gnbs[" + std::to_string(i) + "]";
    require(inside(c.gnb_positions[i], c.hall), f, "outside hall bounds");
    require(c.gnb_positions[i].z > p.h_device_m, f, "gNB must be higher than devices");
  }
  for (std::size_t i = 0; i < c.urllc.devices.size(); ++i) {
    const auto& d = c.urllc.devices[i];
    const std::string f = "urllc.devices[" + std::to_string(i) + "]";
    require(inside(d.initial_position, c.hall), f + ".position", "outside hall bounds");
    require(d.packet_period_s > 0, f + ".period_s", "period must be > 0");
    require(d.ul_bytes > 0 && d.dl_bytes > 0, f, "byte sizes must be > 0");
    require(d.speed_mps >= 0 && d.span_m >= 0, f, "speed and span must be ≥ 0");
  }
  for (std::size_t i = 0; i < ai.positions.size(); ++i) {
    require(inside(ai.positions[i], c.hall), "ai.positions[" + std::to_string(i) + "]",
            "outside hall bounds");
  }

  const auto& a = c.agent;
  require(a.discount >= 0 && a.discount <= 1, "agent.discount", "λ must be in [0,1]");
  require(a.soft_update > 0 && a.soft_update <= 1, "agent.soft_update", "ν must be in (0,1]");
  require(a.minibatch >= 1, "agent.minibatch", "must be positive");
  require(a.replay_capacity >= 1, "agent.replay_capacity", "must be positive");
  require(a.min_buffer >= 1, "agent.min_buffer", "must be positive");
  require(!a.hidden.empty(), "agent.hidden", "need at least one hidden layer");
  for (int h : a.hidden) require(h >= 1, "agent.hidden", "widths must be positive");
  require(a.priority_alpha >= 0, "agent.priority_alpha", "must be ≥ 0");
  require(a.priority_beta >= 0 && a.priority_beta <= 1, "agent.priority_beta", "must be in [0,1]");
  require(a.learning_rate > 0, "agent.learning_rate", "must be > 0");
  require(a.temperature > 0, "agent.temperature", "ψ must be > 0");
  require(a.train_interval >= 1, "agent.train_interval", "must be ≥ 1");
  require(a.gradient_steps >= 1, "agent.gradient_steps", "must be ≥ 1");
  require(a.grad_clip > 0, "agent.grad_clip", "must be > 0");
  require(a.episodes >= 1, "agent.episodes", "must be ≥ 1");
}

ScenarioConfig parse_scenario(std::string_view text) {
  return from_json(json::parse(text));
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

Rng derive_rng(const ScenarioConfig& cfg, std::string_view label, std::uint64_t key_a,
               std::uint64_t key_b) {
  return make_stream(cfg.rng_seed, label, key_a, key_b);
}

std::vector<Vec3> ai_positions(const ScenarioConfig& cfg) {
  if (!cfg.ai.positions.empty()) return cfg.ai.positions;
  Rng rng = make_stream(cfg.ai.layout_seed, streams::kLayout);
  std::uniform_real_distribution<double> ux(0.0, cfg.hall.size.x);
  std::uniform_real_distribution<double> uy(0.0, cfg.hall.size.y);
  std::vector<Vec3> out;
  for (int i = 0; i < cfg.ai.device_count; ++i) {
    const double x = ux(rng);
    const double y = uy(rng);
    out.push_back(Vec3{x, y, cfg.propagation.h_device_m});
  }
  return out;
}

namespace {

std::vector<Vec3> at_height(std::initializer_list<std::pair<double, double>> xy, double z) {
  std::vector<Vec3> out;
  for (auto [x, y] : xy) out.push_back(Vec3{x, y, z});
  return out;
}

std::vector<UrllcProfile> semi_random_urllc(std::initializer_list<std::pair<double, double>> xy) {
  std::vector<UrllcProfile> out;
  for (auto [x, y] : xy) {
    UrllcProfile p;
    p.initial_position = Vec3{x, y, 1.5};
    out.push_back(p);
  }
  return out;
}

}  // namespace

ScenarioConfig desk_defaults() {
  ScenarioConfig c;
  c.rng_seed = 1;
  c.gnb_positions = at_height({{10, 10}, {30, 10}, {10, 30}, {30, 30}}, 8.0);
  c.urllc.devices = semi_random_urllc({{5, 20}, {20, 5}, {20, 20}, {35, 20}, {20, 35},
                                       {15, 12}, {25, 28}, {12, 27}, {28, 13}, {20, 15}});
  c.ai.device_count = 14;
  c.ai.positions = at_height({{4, 4}, {16, 6}, {24, 4}, {36, 6}, {6, 16}, {14, 18}, {26, 16},
                              {34, 18}, {4, 26}, {16, 24}, {24, 36}, {36, 34}, {10, 36}, {30, 26}},
                             1.5);
  c.ai.required_updates = 4;
  c.ai.episode_length = 20;
  c.ai.task = TaskParams{};
  c.agent.minibatch = 64;
  c.agent.learning_rate = 1e-3;
  c.agent.soft_update = 0.01;
  c.agent.train_interval = 1;
  c.agent.replay_capacity = 50000;
  return c;
}

ScenarioConfig full_scale() {
  ScenarioConfig c = desk_defaults();
  c.ai.device_count = 50;
  c.ai.positions.clear();
  c.ai.layout_seed = 50;
  c.ai.required_updates = 15;
  c.ai.episode_length = 50;
  c.agent = AgentHyperparams{};
  c.agent.episodes = 7000;
  c.single_urllc_duration_s = 102.0;
  return c;
}

ScenarioConfig toy_coexistence() {
  ScenarioConfig c;
  c.rng_seed = 1;
  c.gnb_positions = at_height({{10, 20}, {30, 20}}, 8.0);
  // URLLC devices attach to the left cell and drift toward the right gNB.
  c.urllc.devices = semi_random_urllc({{17, 18}, {17, 22}, {18, 20}});
  for (auto& d : c.urllc.devices) {
    d.mobility = MobilityPolicy::Fixed;
    d.heading_deg = 0.0;
    d.span_m = 8.0;
  }
  c.ai.device_count = 6;
  c.ai.positions = at_height({{4, 14}, {4, 26}, {8, 10}, {8, 30}, {36, 16}, {36, 24}}, 1.5);
  c.ai.required_updates = 2;
  c.ai.message_bytes = 2e5;
  c.ai.t_max_s = 1.0;
  c.ai.episode_length = 10;
  c.reward.upsilon = 0.8;
  c.single_urllc_duration_s = 5.0;
  c.agent.hidden = {64, 64};
  c.agent.minibatch = 64;
  c.agent.learning_rate = 1e-3;
  c.agent.soft_update = 0.01;
  c.agent.min_buffer = 200;
  c.agent.train_interval = 1;
  c.agent.gradient_steps = 1;
  c.agent.replay_capacity = 20000;
  c.agent.episodes = 2000;
  return c;
}

}  // namespace coexist::scenario
