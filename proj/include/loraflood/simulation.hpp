#pragma once

// Discrete-event simulation of the LoRa control mesh.
//
// Events are ordered by (time, node id, insertion sequence). Every random
// draw (link loss, relay jitter, carrier-sense backoff) comes from one seeded
// generator, so a (scenario, seed) pair always yields the same trace.

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "loraflood/node.hpp"
#include "loraflood/radio.hpp"
#include "loraflood/rng.hpp"

namespace loraflood {

enum class TxKind { Originated, Forwarded };

enum class TraceKind { TxStart, RxOk, RxError, RxDropped };

enum class ErrorCause { None, LinkLoss, Collision, HalfDuplex };

struct TraceRecord {
  SimTime time{0};
  TraceKind kind = TraceKind::TxStart;
  DeviceId node = 0;  // sender for TxStart, receiver otherwise
  DeviceId peer = 0;  // sender of the received frame
  ControlFrame frame;
  std::uint32_t channel = 0;
  SimTime airtime{0};
  TxKind tx_kind = TxKind::Originated;
  ErrorCause cause = ErrorCause::None;
  std::size_t tx_index = 0;
};

std::string format_trace_record(const TraceRecord& record);
std::string format_trace(std::span<const TraceRecord> trace);

struct TransmissionRecord {
  TransmissionEvent event;
  ControlFrame frame;
  TxKind kind;
};

class Simulation {
 public:
  using FrameSink = std::function<void(const ControlFrame&, SimTime)>;
  using Observer = std::function<void(const TraceRecord&)>;

  Simulation(Topology topology, RadioConfig radio, std::uint64_t seed,
             const std::vector<NodeConfig>& nodes);

  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  SimTime now() const noexcept { return now_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const RadioConfig& radio() const noexcept { return radio_; }
  const Topology& topology() const noexcept { return topology_; }
  void set_link(DeviceId a, DeviceId b, bool enabled, std::optional<double> p_err);

  bool has_node(DeviceId id) const { return nodes_.contains(id); }
  MeshNode& node(DeviceId id);
  const MeshNode& node(DeviceId id) const;
  std::vector<DeviceId> node_ids() const;
  void set_alive(DeviceId id, bool alive);

  /// Queues a frame at the sender; it goes on air no earlier than
  /// `requested`, subject to boot state, duty cycle and carrier sense.
  void enqueue(DeviceId sender, const ControlFrame& frame, TxKind kind, SimTime requested);

  /// Builds a frame at `sender` and queues it for now.
  ControlFrame originate(DeviceId sender, DeviceId destination, std::uint32_t action_id);

  void schedule_call(SimTime at, std::function<void()> call);
  void set_frame_sink(DeviceId id, FrameSink sink);
  void set_observer(Observer observer) { observer_ = std::move(observer); }

  /// Processes the next event. Returns false when nothing is pending.
  bool step();
  /// Processes every event with time <= until, then advances the clock.
  void run_until(SimTime until);
  /// Runs until no events remain or `limit` is reached; true if idle.
  bool run_until_idle(SimTime limit);
  bool idle() const noexcept { return events_.empty(); }

  const std::vector<TraceRecord>& trace() const noexcept { return trace_; }
  const std::vector<TransmissionRecord>& transmissions() const noexcept { return transmissions_; }
  std::uint64_t enqueued_count() const noexcept { return enqueued_; }
  std::size_t queued_frames() const;

 private:
  enum class EventKind { Attempt, TxEnd, Call };

  struct Event {
    SimTime time;
    DeviceId node;
    std::uint64_t seq;
    EventKind kind;
    std::size_t tx = 0;
    std::function<void()> call;
  };
  struct Later {
    bool operator()(const Event& x, const Event& y) const noexcept {
      if (x.time != y.time) return x.time > y.time;
      if (x.node != y.node) return x.node > y.node;
      return x.seq > y.seq;
    }
  };

  struct PendingTx {
    ControlFrame frame;
    std::vector<std::uint8_t> bytes;
    TxKind kind;
    SimTime requested;
  };

  struct NodeSlot {
    MeshNode node;
    std::deque<PendingTx> queue;
    bool transmitting = false;
    std::optional<SimTime> next_attempt;
    FrameSink sink;
  };

  void push(SimTime time, DeviceId node, EventKind kind, std::size_t tx = 0,
            std::function<void()> call = {});
  void arm(DeviceId id, SimTime at);
  void attempt(DeviceId id);
  void finish(std::size_t tx_index);
  void deliver(std::size_t tx_index);
  ErrorCause corruption(const TransmissionEvent& tx, DeviceId receiver) const;
  std::optional<SimTime> medium_busy_until(DeviceId listener) const;
  void apply(DeviceId receiver, const std::vector<Effect>& effects);
  void record(TraceRecord record);
  SimTime jitter();
  NodeSlot& slot(DeviceId id);

  Topology topology_;
  RadioConfig radio_;
  std::uint64_t seed_;
  Rng rng_;
  DutyCycleLimiter limiter_;
  std::map<DeviceId, NodeSlot> nodes_;
  std::priority_queue<Event, std::vector<Event>, Later> events_;
  std::uint64_t next_seq_ = 0;
  SimTime now_{0};
  std::vector<TraceRecord> trace_;
  std::vector<TransmissionRecord> transmissions_;
  std::deque<std::size_t> recent_;  // transmissions that may still overlap
  SimTime longest_airtime_{0};
  std::uint64_t enqueued_ = 0;
  Observer observer_;
};

}  // namespace loraflood
