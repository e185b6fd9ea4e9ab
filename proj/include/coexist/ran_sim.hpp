#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <unordered_map>
#include <vector>

#include "coexist/availability.hpp"
#include "coexist/channel.hpp"
#include "coexist/metrics.hpp"
#include "coexist/rng.hpp"
#include "coexist/scenario.hpp"
#include "coexist/types.hpp"

namespace coexist::ran {

enum class RlcMode { Am, Um };

struct Packet {
  std::uint64_t id = 0;
  Flow flow = Flow::Urllc;
  Direction dir = Direction::Ul;
  int device = 0;
  double size_bytes = 0.0;
  double created_at_s = 0.0;
  double deadline_s = std::numeric_limits<double>::infinity();
  double remaining_bytes = 0.0;  // not yet placed in a transport block
  double unacked_bytes = 0.0;    // not yet received correctly
  int rlc_retx = 0;
  std::uint64_t tag = 0;
};

struct Segment {
  std::uint64_t packet_id = 0;
  double bytes = 0.0;
};

struct TransportBlock {
  std::vector<Segment> segments;
  double bytes = 0.0;
  int tx_count = 0;
  std::int64_t eligible_tti = 0;
};

struct DeliveryEvent {
  enum class Kind { Delivered, Late, Dropped };
  std::uint64_t packet_id = 0;
  Flow flow = Flow::Urllc;
  Direction dir = Direction::Ul;
  int device = 0;
  double created_at_s = 0.0;
  double time_s = 0.0;
  Kind kind = Kind::Delivered;
  std::uint64_t tag = 0;
};

// Per-(flow, device, direction) RLC entity: FIFO of packet ids plus HARQ
// blocks waiting for retransmission.
struct RlcBuffer {
  RlcMode mode = RlcMode::Um;
  int max_retx = 0;
  std::deque<std::uint64_t> fifo;
  std::vector<TransportBlock> harq;
  std::optional<double> sinr_estimate_db;
  int last_rbs = 0;
  double pf_average_bits = 1.0;
};

// One RB allocation in one cell, direction and TTI.
struct Allocation {
  Flow flow = Flow::Urllc;
  int device = 0;
  int start = 0;  // first RB, allocations wrap cyclically
  int count = 0;
  int mcs = 0;
  double psd_w = 0.0;
};

struct FlowCounters {
  std::int64_t generated = 0;
  std::int64_t delivered = 0;
  std::int64_t late = 0;
  std::int64_t dropped = 0;
  std::int64_t flushed = 0;
  double generated_bytes = 0.0;
  double delivered_bytes = 0.0;
  double dropped_bytes = 0.0;
};

struct EngineOptions {
  bool ai_enabled = true;
  double slicing_fraction = 0.0;
  std::ostream* trace = nullptr;  // per-TB CSV rows when set
};

// TTI-resolution engine for one run. Deployment randomness (LOS and
// shadowing) comes from the scenario seed; the run seed drives everything
// that varies between repetitions.
class Engine {
 public:
  Engine(const scenario::ScenarioConfig& cfg, std::uint64_t run_seed, EngineOptions opts = {});

  // Advance one TTI. Returns AI delivery/drop events completed in this TTI.
  std::vector<DeliveryEvent> step_tti();

  std::int64_t tti() const { return tti_; }
  double now() const { return static_cast<double>(tti_) * tti_s_; }
  double tti_seconds() const { return tti_s_; }

  // AI traffic injected by the learning protocol at the current time.
  std::uint64_t enqueue_ai(int device, Direction dir, double bytes, std::uint64_t tag);
  void flush_ai();

  int num_cells() const { return static_cast<int>(cfg_.gnb_positions.size()); }
  int num_urllc() const { return static_cast<int>(urllc_pos0_.size()); }
  int num_ai() const { return static_cast<int>(ai_pos_.size()); }
  int urllc_cell(int u) const { return urllc_cell_[static_cast<std::size_t>(u)]; }
  int ai_cell(int a) const { return ai_cell_[static_cast<std::size_t>(a)]; }
  const std::vector<int>& urllc_cells() const { return urllc_cell_; }
  Vec3 urllc_position(int u, double t) const;
  const Vec3& ai_position(int a) const { return ai_pos_[static_cast<std::size_t>(a)]; }

  int urllc_rb_cap() const { return urllc_cap_; }
  int ai_rb_cap() const { return ai_cap_; }

  const metrics::AvailabilityRecord& availability(int u, Direction d) const {
    return records_[static_cast<std::size_t>(u)][d];
  }
  // Flush buffered availability events up to `t` (inclusive).
  void settle_availability(double t);

  double buffered_bytes(Flow f, int device, Direction d) const;

  metrics::WindowLog& window_log() { return log_; }
  const metrics::WindowLog& window_log() const { return log_; }
  void reset_window() { log_.reset(now()); }

  const FlowCounters& counters(Flow f) const { return counters_[static_cast<int>(f)]; }
  std::size_t outstanding_packets(Flow f) const;

  // Allocations made in the most recent TTI, per cell and direction.
  const std::vector<PerDirection<std::vector<Allocation>>>& last_allocations() const {
    return allocs_;
  }
  // Called after each TTI with the allocations (for invariant checks).
  std::function<void(const Engine&)> on_tti;

  channel::LinkCache& links() { return links_; }

  // Set a deterministic override for testing: every transport block on this
  // flow succeeds (or fails) regardless of SINR.
  void force_outcome(Flow f, std::optional<bool> success) { forced_[static_cast<int>(f)] = success; }

 private:
  struct PendingEvent {
    double t;
    bool success;
  };
  struct Candidate {
    Flow flow;
    int device;
    double order_key;
  };

  RlcBuffer& buffer(Flow f, int device, Direction d);
  const RlcBuffer& buffer(Flow f, int device, Direction d) const;
  Vec3 device_position(Flow f, int device) const;
  void generate_urllc();
  void expire_urllc();
  void schedule_cell(int cell, Direction d, std::vector<std::int64_t>& rb_plan);
  bool build_block(Flow f, int device, Direction d, int cell, int rbs_available,
                   TransportBlock& tb, int& rbs, int& mcs, bool& is_retx);
  double estimate_db(const RlcBuffer& b, Flow f, int device, Direction d, int cell, int rbs) const;
  void resolve_cell(int cell, Direction d, std::vector<DeliveryEvent>& ai_events);
  void on_block_result(Flow f, int device, Direction d, TransportBlock tb, bool ok,
                       std::vector<DeliveryEvent>& ai_events);
  void finish_packet(Packet& p, DeliveryEvent::Kind kind, double t,
                     std::vector<DeliveryEvent>* ai_events);
  void push_availability(int u, Direction d, double t, bool success);

  scenario::ScenarioConfig cfg_;
  EngineOptions opts_;
  double tti_s_;
  int num_rbs_;
  int urllc_cap_;
  int ai_cap_;
  double psd_dl_w_;
  std::int64_t tti_ = 0;
  std::uint64_t next_packet_id_ = 1;

  channel::LinkCache links_;
  Rng fading_rng_;
  Rng outcome_rng_;
  Rng scheduler_rng_;

  std::vector<Vec3> urllc_pos0_;
  std::vector<Vec3> urllc_heading_;
  std::vector<Vec3> ai_pos_;
  std::vector<int> urllc_cell_;
  std::vector<int> ai_cell_;
  std::vector<PerDirection<double>> urllc_phase_;
  std::vector<PerDirection<std::int64_t>> urllc_next_index_;

  std::vector<PerDirection<RlcBuffer>> urllc_buf_;
  std::vector<PerDirection<RlcBuffer>> ai_buf_;
  std::unordered_map<std::uint64_t, Packet> packets_;

  std::vector<PerDirection<metrics::AvailabilityRecord>> records_;
  std::vector<PerDirection<std::vector<PendingEvent>>> pending_;

  std::vector<PerDirection<std::vector<Allocation>>> allocs_;
  std::vector<PerDirection<std::vector<TransportBlock>>> blocks_;  // parallel to allocs_
  std::vector<PerDirection<int>> rr_cursor_;

  metrics::WindowLog log_;
  FlowCounters counters_[2];
  std::optional<bool> forced_[2];
};

}  // namespace coexist::ran
