#include "coexist/ran_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "coexist/link_adaptation.hpp"

namespace coexist::ran {

namespace {

constexpr double kEps = 1e-9;
constexpr double kByteEps = 1e-6;

double triangle(double x, double span) {
  if (span <= 0.0) return 0.0;
  const double m = std::fmod(x, 2.0 * span);
  return m <= span ? m : 2.0 * span - m;
}

// Overlap of two cyclic RB ranges on a ring of `n` RBs.
int cyclic_overlap(int s1, int c1, int s2, int c2, int n) {
  auto pieces = [n](int s, int c, int out[4]) {
    const int end = s + c;
    if (end <= n) {
      out[0] = s, out[1] = end, out[2] = 0, out[3] = 0;
    } else {
      out[0] = s, out[1] = n, out[2] = 0, out[3] = end - n;
    }
  };
  int a[4];
  int b[4];
  pieces(s1, c1, a);
  pieces(s2, c2, b);
  int total = 0;
  for (int i = 0; i < 4; i += 2) {
    for (int j = 0; j < 4; j += 2) {
      total += std::max(0, std::min(a[i + 1], b[j + 1]) - std::max(a[i], b[j]));
    }
  }
  return total;
}

// Split `tb` so the first part carries at most `bytes`.
TransportBlock split_block(TransportBlock& tb, double bytes) {
  TransportBlock head;
  head.tx_count = tb.tx_count;
  head.eligible_tti = tb.eligible_tti;
  std::vector<Segment> rest;
  for (const Segment& s : tb.segments) {
    const double room = bytes - head.bytes;
    if (room <= kByteEps) {
      rest.push_back(s);
    } else if (s.bytes <= room + kByteEps) {
      head.segments.push_back(s);
      head.bytes += s.bytes;
    } else {
      head.segments.push_back({s.packet_id, room});
      head.bytes += room;
      rest.push_back({s.packet_id, s.bytes - room});
    }
  }
  tb.segments = std::move(rest);
  tb.bytes = 0.0;
  for (const Segment& s : tb.segments) tb.bytes += s.bytes;
  return head;
}

}  // namespace

Engine::Engine(const scenario::ScenarioConfig& cfg, std::uint64_t run_seed, EngineOptions opts)
    : cfg_(cfg),
      opts_(opts),
      tti_s_(cfg.radio.tti_s),
      num_rbs_(cfg.radio.num_rbs),
      links_(cfg, cfg.rng_seed),
      fading_rng_(make_stream(run_seed, streams::kFading)),
      outcome_rng_(make_stream(run_seed, streams::kOutcome)),
      scheduler_rng_(make_stream(run_seed, streams::kScheduler)) {
  const double f = opts_.slicing_fraction;
  if (f > 0.0) {
    urllc_cap_ = static_cast<int>(std::floor(f * num_rbs_ + kEps));
    ai_cap_ = static_cast<int>(std::floor((1.0 - f) * num_rbs_ + kEps));
  } else {
    urllc_cap_ = num_rbs_;
    ai_cap_ = num_rbs_;
  }
  psd_dl_w_ = cfg.radio.dl_tx_power_w / num_rbs_;

  for (std::size_t u = 0; u < cfg.urllc.devices.size(); ++u) {
    const auto& prof = cfg.urllc.devices[u];
    urllc_pos0_.push_back(prof.initial_position);
    double heading = prof.heading_deg * std::numbers::pi / 180.0;
    if (prof.mobility == scenario::MobilityPolicy::RandomPerSeed) {
      Rng r = make_stream(run_seed, streams::kMobility, u);
      heading = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(r);
    }
    urllc_heading_.push_back(Vec3{std::cos(heading), std::sin(heading), 0.0});
    Rng tr = make_stream(run_seed, streams::kTraffic, u);
    std::uniform_real_distribution<double> ph(0.0, prof.packet_period_s);
    PerDirection<double> phase;
    phase.ul = ph(tr);
    phase.dl = ph(tr);
    urllc_phase_.push_back(phase);
    urllc_next_index_.push_back({0, 0});
  }
  if (opts_.ai_enabled) ai_pos_ = scenario::ai_positions(cfg);

  auto associate = [&](const Vec3& p) {
    int best = 0;
    double best_loss = std::numeric_limits<double>::infinity();
    for (int c = 0; c < num_cells(); ++c) {
      const double loss = links_.get(p, c).total_loss_db();
      if (loss < best_loss) best_loss = loss, best = c;
    }
    return best;
  };
  for (const Vec3& p : urllc_pos0_) urllc_cell_.push_back(associate(p));
  for (const Vec3& p : ai_pos_) ai_cell_.push_back(associate(p));

  urllc_buf_.resize(urllc_pos0_.size());
  for (auto& b : urllc_buf_) {
    for (Direction d : kDirections) b[d].mode = RlcMode::Um;
  }
  ai_buf_.resize(ai_pos_.size());
  for (auto& b : ai_buf_) {
    for (Direction d : kDirections) {
      b[d].mode = RlcMode::Am;
      b[d].max_retx = cfg.ai.max_rlc_retx[d];
    }
  }

  for (std::size_t u = 0; u < urllc_pos0_.size(); ++u) {
    PerDirection<metrics::AvailabilityRecord> r{
        metrics::AvailabilityRecord(cfg.urllc.survival_time_s.ul),
        metrics::AvailabilityRecord(cfg.urllc.survival_time_s.dl)};
    records_.push_back(r);
  }
  pending_.resize(urllc_pos0_.size());
  allocs_.resize(static_cast<std::size_t>(num_cells()));
  blocks_.resize(static_cast<std::size_t>(num_cells()));
  rr_cursor_.resize(static_cast<std::size_t>(num_cells()));
  log_ = metrics::WindowLog(num_urllc(), num_ai(), num_cells(), 0.0);
}

Vec3 Engine::urllc_position(int u, double t) const {
  const auto& prof = cfg_.urllc.devices[static_cast<std::size_t>(u)];
  const double s = triangle(prof.speed_mps * t, prof.span_m);
  const Vec3& p0 = urllc_pos0_[static_cast<std::size_t>(u)];
  const Vec3& h = urllc_heading_[static_cast<std::size_t>(u)];
  return Vec3{std::clamp(p0.x + h.x * s, 0.0, cfg_.hall.size.x),
              std::clamp(p0.y + h.y * s, 0.0, cfg_.hall.size.y), p0.z};
}

Vec3 Engine::device_position(Flow f, int device) const {
  return f == Flow::Urllc ? urllc_position(device, now()) : ai_pos_[static_cast<std::size_t>(device)];
}

RlcBuffer& Engine::buffer(Flow f, int device, Direction d) {
  return f == Flow::Urllc ? urllc_buf_[static_cast<std::size_t>(device)][d]
                          : ai_buf_[static_cast<std::size_t>(device)][d];
}

const RlcBuffer& Engine::buffer(Flow f, int device, Direction d) const {
  return f == Flow::Urllc ? urllc_buf_[static_cast<std::size_t>(device)][d]
                          : ai_buf_[static_cast<std::size_t>(device)][d];
}

double Engine::buffered_bytes(Flow f, int device, Direction d) const {
  const RlcBuffer& b = buffer(f, device, d);
  double sum = 0.0;
  for (std::uint64_t id : b.fifo) {
    auto it = packets_.find(id);
    if (it != packets_.end()) sum += it->second.remaining_bytes;
  }
  for (const auto& tb : b.harq) sum += tb.bytes;
  return sum;
}

std::size_t Engine::outstanding_packets(Flow f) const {
  std::size_t n = 0;
  for (const auto& [id, p] : packets_) n += p.flow == f;
  return n;
}

std::uint64_t Engine::enqueue_ai(int device, Direction dir, double bytes, std::uint64_t tag) {
  Packet p;
  p.id = next_packet_id_++;
  p.flow = Flow::Ai;
  p.dir = dir;
  p.device = device;
  p.size_bytes = bytes;
  p.created_at_s = now();
  p.remaining_bytes = bytes;
  p.unacked_bytes = bytes;
  p.tag = tag;
  packets_.emplace(p.id, p);
  buffer(Flow::Ai, device, dir).fifo.push_back(p.id);
  auto& c = counters_[static_cast<int>(Flow::Ai)];
  ++c.generated;
  c.generated_bytes += bytes;
  return p.id;
}

void Engine::flush_ai() {
  for (auto& per : ai_buf_) {
    for (Direction d : kDirections) {
      per[d].fifo.clear();
      per[d].harq.clear();
    }
  }
  auto& c = counters_[static_cast<int>(Flow::Ai)];
  for (auto it = packets_.begin(); it != packets_.end();) {
    if (it->second.flow == Flow::Ai) {
      ++c.flushed;
      it = packets_.erase(it);
    } else {
      ++it;
    }
  }
}

void Engine::push_availability(int u, Direction d, double t, bool success) {
  pending_[static_cast<std::size_t>(u)][d].push_back({t, success});
}

void Engine::settle_availability(double t) {
  for (std::size_t u = 0; u < pending_.size(); ++u) {
    for (Direction d : kDirections) {
      auto& pend = pending_[u][d];
      if (pend.empty()) continue;
      std::stable_sort(pend.begin(), pend.end(),
                       [](const PendingEvent& a, const PendingEvent& b) { return a.t < b.t; });
      std::size_t k = 0;
      while (k < pend.size() && pend[k].t <= t + kEps) {
        records_[u][d].on_event(pend[k].t, pend[k].success);
        ++k;
      }
      pend.erase(pend.begin(), pend.begin() + static_cast<std::ptrdiff_t>(k));
    }
  }
}

void Engine::generate_urllc() {
  const double t = now();
  for (int u = 0; u < num_urllc(); ++u) {
    const auto& prof = cfg_.urllc.devices[static_cast<std::size_t>(u)];
    for (Direction d : kDirections) {
      auto& idx = urllc_next_index_[static_cast<std::size_t>(u)][d];
      while (true) {
        const double created = urllc_phase_[static_cast<std::size_t>(u)][d] +
                               static_cast<double>(idx) * prof.packet_period_s;
        if (created > t + kEps) break;
        ++idx;
        Packet p;
        p.id = next_packet_id_++;
        p.flow = Flow::Urllc;
        p.dir = d;
        p.device = u;
        p.size_bytes = d == Direction::Ul ? prof.ul_bytes : prof.dl_bytes;
        p.created_at_s = created;
        p.deadline_s = created + cfg_.urllc.delay_bound_s[d];
        p.remaining_bytes = p.size_bytes;
        p.unacked_bytes = p.size_bytes;
        packets_.emplace(p.id, p);
        buffer(Flow::Urllc, u, d).fifo.push_back(p.id);
        auto& c = counters_[static_cast<int>(Flow::Urllc)];
        ++c.generated;
        c.generated_bytes += p.size_bytes;
      }
    }
  }
}

void Engine::finish_packet(Packet& p, DeliveryEvent::Kind kind, double t,
                           std::vector<DeliveryEvent>* ai_events) {
  auto& c = counters_[static_cast<int>(p.flow)];
  switch (kind) {
    case DeliveryEvent::Kind::Delivered:
      ++c.delivered;
      c.delivered_bytes += p.size_bytes;
      break;
    case DeliveryEvent::Kind::Late:
      ++c.late;
      c.dropped_bytes += p.size_bytes;
      break;
    case DeliveryEvent::Kind::Dropped:
      ++c.dropped;
      c.dropped_bytes += p.size_bytes;
      break;
  }
  if (p.flow == Flow::Urllc) {
    const bool ok = kind == DeliveryEvent::Kind::Delivered && t <= p.deadline_s + kEps;
    push_availability(p.device, p.dir, ok ? t : p.deadline_s, ok);
    if (ok) log_.urllc[static_cast<std::size_t>(p.device)][p.dir].delay_s.push_back(t - p.created_at_s);
  } else if (ai_events) {
    ai_events->push_back({p.id, p.flow, p.dir, p.device, p.created_at_s, t, kind, p.tag});
  }
  RlcBuffer& b = buffer(p.flow, p.device, p.dir);
  std::erase(b.fifo, p.id);
  for (auto& tb : b.harq) {
    std::erase_if(tb.segments, [&](const Segment& s) { return s.packet_id == p.id; });
    tb.bytes = 0.0;
    for (const Segment& s : tb.segments) tb.bytes += s.bytes;
  }
  std::erase_if(b.harq, [](const TransportBlock& tb) { return tb.segments.empty(); });
  packets_.erase(p.id);
}

void Engine::expire_urllc() {
  const double earliest =
      static_cast<double>(tti_ + 1 + cfg_.radio.processing_ttis) * tti_s_;
  std::vector<std::uint64_t> expired;
  for (const auto& [id, p] : packets_) {
    if (p.flow == Flow::Urllc && p.deadline_s + kEps < earliest) expired.push_back(id);
  }
  std::sort(expired.begin(), expired.end());
  for (std::uint64_t id : expired) {
    Packet& p = packets_.at(id);
    finish_packet(p, DeliveryEvent::Kind::Late, p.deadline_s, nullptr);
  }
}

double Engine::estimate_db(const RlcBuffer& b, Flow f, int device, Direction d, int cell,
                           int rbs) const {
  rbs = std::max(rbs, 1);
  if (b.sinr_estimate_db) {
    if (d == Direction::Ul && b.last_rbs > 0) {
      return *b.sinr_estimate_db + 10.0 * std::log10(static_cast<double>(b.last_rbs) / rbs);
    }
    return *b.sinr_estimate_db;
  }
  Vec3 pos = device_position(f, device);
  auto& self = const_cast<Engine&>(*this);
  const double gain = self.links_.get(pos, cell).gain();
  const double psd = d == Direction::Ul ? cfg_.radio.ul_tx_power_w / rbs : psd_dl_w_;
  const double noise = channel::thermal_noise_w(cfg_.radio.rb_bandwidth_hz, cfg_.radio.noise_figure_db);
  return channel::linear_to_db(psd * gain / noise) + cfg_.radio.combining_gain_db;
}

bool Engine::build_block(Flow f, int device, Direction d, int cell, int avail,
                         TransportBlock& tb, int& rbs, int& mcs, bool& is_retx) {
  if (avail <= 0) return false;
  RlcBuffer& b = buffer(f, device, d);
  const double target = cfg_.radio.target_bler;

  auto choose = [&](double bytes) {
    int r = d == Direction::Ul ? (b.last_rbs > 0 ? std::min(b.last_rbs, avail) : avail) : avail;
    for (int it = 0; it < 3; ++it) {
      mcs = link::select_mcs(estimate_db(b, f, device, d, cell, r), target);
      r = std::clamp(link::rbs_needed(bytes, mcs), 1, avail);
    }
    mcs = link::select_mcs(estimate_db(b, f, device, d, cell, r), target);
    rbs = std::clamp(link::rbs_needed(bytes, mcs), 1, avail);
    return std::min(bytes, rbs * link::bits_per_rb(mcs) / 8.0);
  };

  // Earliest eligible HARQ retransmission takes precedence.
  auto best = b.harq.end();
  for (auto it = b.harq.begin(); it != b.harq.end(); ++it) {
    if (it->eligible_tti <= tti_ && (best == b.harq.end() || it->eligible_tti < best->eligible_tti)) {
      best = it;
    }
  }
  if (best != b.harq.end()) {
    const double fit = choose(best->bytes);
    if (fit + kByteEps >= best->bytes) {
      tb = std::move(*best);
      b.harq.erase(best);
    } else {
      tb = split_block(*best, fit);
    }
    is_retx = true;
    return tb.bytes > 0.0;
  }

  double queued = 0.0;
  for (std::uint64_t id : b.fifo) queued += packets_.at(id).remaining_bytes;
  if (queued <= kByteEps) return false;
  const double cap = choose(queued);
  is_retx = false;
  tb = TransportBlock{};
  while (!b.fifo.empty() && tb.bytes + kByteEps < cap) {
    Packet& p = packets_.at(b.fifo.front());
    const double room = cap - tb.bytes;
    const double take = p.remaining_bytes <= room + kByteEps ? p.remaining_bytes : room;
    tb.segments.push_back({p.id, take});
    tb.bytes += take;
    p.remaining_bytes -= take;
    if (p.remaining_bytes <= kByteEps) {
      p.remaining_bytes = 0.0;
      b.fifo.pop_front();
    }
  }
  return tb.bytes > 0.0;
}

void Engine::schedule_cell(int cell, Direction d, std::vector<std::int64_t>& ai_served_bits) {
  auto& allocs = allocs_[static_cast<std::size_t>(cell)][d];
  auto& blocks = blocks_[static_cast<std::size_t>(cell)][d];
  allocs.clear();
  blocks.clear();

  const bool slicing = opts_.slicing_fraction > 0.0;
  int cursor_rb = slicing ? 0
                          : std::uniform_int_distribution<int>(0, num_rbs_ - 1)(scheduler_rng_);
  int free_rbs = num_rbs_;
  int urllc_left = std::min(urllc_cap_, free_rbs);

  auto has_data = [&](Flow f, int dev) {
    const RlcBuffer& b = buffer(f, dev, d);
    if (!b.fifo.empty()) return true;
    for (const auto& tb : b.harq) {
      if (tb.eligible_tti <= tti_) return true;
    }
    return false;
  };

  auto place = [&](Flow f, int dev, TransportBlock&& tb, int rbs, int mcs) {
    Allocation a;
    a.flow = f;
    a.device = dev;
    a.start = cursor_rb % num_rbs_;
    a.count = rbs;
    a.mcs = mcs;
    a.psd_w = d == Direction::Ul ? cfg_.radio.ul_tx_power_w / rbs : psd_dl_w_;
    cursor_rb += rbs;
    free_rbs -= rbs;
    tb.tx_count += 1;
    allocs.push_back(a);
    blocks.push_back(std::move(tb));
  };

  // URLLC first.
  std::vector<Candidate> urllc;
  std::vector<int> in_cell;
  for (int u = 0; u < num_urllc(); ++u) {
    if (urllc_cell_[static_cast<std::size_t>(u)] == cell) in_cell.push_back(u);
  }
  auto& cursor = rr_cursor_[static_cast<std::size_t>(cell)][d];
  for (std::size_t k = 0; k < in_cell.size(); ++k) {
    const int u = in_cell[k];
    if (!has_data(Flow::Urllc, u)) continue;
    double key = 0.0;
    if (d == Direction::Ul) {
      key = static_cast<double>((k + in_cell.size() - static_cast<std::size_t>(cursor) % in_cell.size()) %
                                in_cell.size());
    } else {
      key = std::numeric_limits<double>::infinity();
      const RlcBuffer& b = buffer(Flow::Urllc, u, d);
      for (std::uint64_t id : b.fifo) key = std::min(key, packets_.at(id).created_at_s);
      for (const auto& tb : b.harq) {
        if (tb.eligible_tti > tti_) continue;
        for (const Segment& s : tb.segments) key = std::min(key, packets_.at(s.packet_id).created_at_s);
      }
    }
    urllc.push_back({Flow::Urllc, u, key});
  }
  if (!in_cell.empty()) cursor = (cursor + 1) % static_cast<int>(in_cell.size());
  std::stable_sort(urllc.begin(), urllc.end(), [](const Candidate& a, const Candidate& b) {
    if (a.order_key != b.order_key) return a.order_key < b.order_key;
    return a.device < b.device;
  });
  for (const Candidate& c : urllc) {
    TransportBlock tb;
    int rbs = 0;
    int mcs = 0;
    bool retx = false;
    if (!build_block(Flow::Urllc, c.device, d, cell, urllc_left, tb, rbs, mcs, retx)) continue;
    urllc_left -= rbs;
    place(Flow::Urllc, c.device, std::move(tb), rbs, mcs);
  }

  if (!opts_.ai_enabled) return;
  int ai_left = slicing ? ai_cap_ : free_rbs;
  if (slicing) cursor_rb = num_rbs_ - ai_cap_;
  if (ai_left <= 0) return;

  std::vector<Candidate> ai;
  for (int a = 0; a < num_ai(); ++a) {
    if (ai_cell_[static_cast<std::size_t>(a)] != cell || !has_data(Flow::Ai, a)) continue;
    const RlcBuffer& b = buffer(Flow::Ai, a, d);
    const int m = link::select_mcs(estimate_db(b, Flow::Ai, a, d, cell, ai_left),
                                   cfg_.radio.target_bler);
    ai.push_back({Flow::Ai, a, link::bits_per_rb(m) * ai_left / b.pf_average_bits});
  }
  std::stable_sort(ai.begin(), ai.end(), [](const Candidate& a, const Candidate& b) {
    if (a.order_key != b.order_key) return a.order_key > b.order_key;
    return a.device < b.device;
  });
  for (const Candidate& c : ai) {
    if (ai_left <= 0) break;
    TransportBlock tb;
    int rbs = 0;
    int mcs = 0;
    bool retx = false;
    if (!build_block(Flow::Ai, c.device, d, cell, ai_left, tb, rbs, mcs, retx)) continue;
    ai_left -= rbs;
    ai_served_bits[static_cast<std::size_t>(c.device)] += static_cast<std::int64_t>(tb.bytes * 8.0);
    place(Flow::Ai, c.device, std::move(tb), rbs, mcs);
  }
}

void Engine::resolve_cell(int cell, Direction d, std::vector<DeliveryEvent>& ai_events) {
  auto& allocs = allocs_[static_cast<std::size_t>(cell)][d];
  auto& blocks = blocks_[static_cast<std::size_t>(cell)][d];
  const double rb_noise =
      channel::thermal_noise_w(cfg_.radio.rb_bandwidth_hz, cfg_.radio.noise_figure_db);
  const double combining = channel::db_to_linear(cfg_.radio.combining_gain_db);
  std::exponential_distribution<double> fading(1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  for (std::size_t i = 0; i < allocs.size(); ++i) {
    const Allocation& a = allocs[i];
    const Vec3 pos = device_position(a.flow, a.device);
    const double gain = links_.get(pos, cell).gain();
    const double signal = a.psd_w * a.count * gain * combining;
    double interference = 0.0;
    for (int other = 0; other < num_cells(); ++other) {
      if (other == cell) continue;
      for (const Allocation& b : allocs_[static_cast<std::size_t>(other)][d]) {
        const int ov = cyclic_overlap(a.start, a.count, b.start, b.count, num_rbs_);
        if (ov == 0) continue;
        const double g = d == Direction::Ul
                             ? links_.get(device_position(b.flow, b.device), cell).gain()
                             : links_.get(pos, other).gain();
        interference += b.psd_w * ov * g;
      }
    }
    const double noise = rb_noise * a.count;
    const double sinr = channel::linear_to_db(signal / (noise + interference));
    const double fade = fading(fading_rng_);
    const double sinr_faded = sinr + channel::linear_to_db(std::max(fade, 1e-300));
    TransportBlock& tb = blocks[i];
    bool ok;
    if (forced_[static_cast<int>(a.flow)]) {
      ok = *forced_[static_cast<int>(a.flow)];
    } else {
      const double per = link::per_from_sinr(sinr_faded, tb.bytes, a.mcs);
      ok = unif(outcome_rng_) >= per;
    }

    RlcBuffer& buf = buffer(a.flow, a.device, d);
    buf.sinr_estimate_db = sinr;
    buf.last_rbs = a.count;
    if (a.flow == Flow::Urllc) {
      auto& raw = log_.urllc[static_cast<std::size_t>(a.device)][d];
      ++raw.blocks;
      raw.failed_blocks += !ok;
      raw.sinr_db.push_back(sinr);
    } else {
      log_.ai_sinr_db[static_cast<std::size_t>(a.device)][d].push_back(sinr);
    }
    if (opts_.trace) {
      *opts_.trace << tti_ << ',' << cell << ',' << to_string(d) << ',' << to_string(a.flow) << ','
                   << a.device << ',' << a.start << ',' << a.count << ',' << a.mcs << ',' << sinr
                   << ',' << (ok ? 1 : 0) << '\n';
    }
    on_block_result(a.flow, a.device, d, std::move(tb), ok, ai_events);
  }
}

void Engine::on_block_result(Flow f, int device, Direction d, TransportBlock tb, bool ok,
                             std::vector<DeliveryEvent>& ai_events) {
  const double t_done = static_cast<double>(tti_ + 1 + cfg_.radio.processing_ttis) * tti_s_;
  RlcBuffer& b = buffer(f, device, d);
  if (ok) {
    for (const Segment& s : tb.segments) {
      auto it = packets_.find(s.packet_id);
      if (it == packets_.end()) continue;
      it->second.unacked_bytes -= s.bytes;
      if (it->second.unacked_bytes <= kByteEps) {
        finish_packet(it->second, DeliveryEvent::Kind::Delivered, t_done, &ai_events);
      }
    }
    return;
  }
  const int max_tx = f == Flow::Urllc ? cfg_.urllc.max_harq_tx[d] : cfg_.ai.max_harq_tx[d];
  if (tb.tx_count < max_tx) {
    tb.eligible_tti = tti_ + 1 + cfg_.radio.harq_feedback_ttis;
    b.harq.push_back(std::move(tb));
    return;
  }
  for (const Segment& s : tb.segments) {
    auto it = packets_.find(s.packet_id);
    if (it == packets_.end()) continue;
    Packet& p = it->second;
    if (f == Flow::Urllc) {
      finish_packet(p, DeliveryEvent::Kind::Dropped, p.deadline_s, nullptr);
      continue;
    }
    ++p.rlc_retx;
    if (p.rlc_retx > b.max_retx) {
      finish_packet(p, DeliveryEvent::Kind::Dropped, t_done, &ai_events);
      continue;
    }
    if (p.remaining_bytes <= kByteEps) b.fifo.push_front(p.id);
    p.remaining_bytes += s.bytes;
  }
}

std::vector<DeliveryEvent> Engine::step_tti() {
  settle_availability(now());
  generate_urllc();
  expire_urllc();

  std::vector<std::int64_t> served(ai_pos_.size(), 0);
  PerDirection<std::vector<std::int64_t>> ai_bits{served, served};
  for (int c = 0; c < num_cells(); ++c) {
    for (Direction d : kDirections) schedule_cell(c, d, ai_bits[d]);
  }

  std::vector<DeliveryEvent> ai_events;
  for (int c = 0; c < num_cells(); ++c) {
    for (Direction d : kDirections) {
      for (const Allocation& a : allocs_[static_cast<std::size_t>(c)][d]) {
        auto& g = log_.gnb[static_cast<std::size_t>(c)];
        (a.flow == Flow::Urllc ? g.urllc_rb_sum[d] : g.ai_rb_sum[d]) += a.count;
      }
    }
  }
  for (int c = 0; c < num_cells(); ++c) {
    for (Direction d : kDirections) resolve_cell(c, d, ai_events);
  }

  const double beta = cfg_.radio.pf_smoothing;
  for (std::size_t a = 0; a < ai_buf_.size(); ++a) {
    for (Direction d : kDirections) {
      auto& avg = ai_buf_[a][d].pf_average_bits;
      avg = std::max(1.0, (1.0 - beta) * avg + beta * static_cast<double>(ai_bits[d][a]));
    }
  }
  ++log_.ttis;
  if (on_tti) on_tti(*this);
  ++tti_;
  return ai_events;
}

}  // namespace coexist::ran
