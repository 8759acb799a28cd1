#include "loraflood/simulation.hpp"

#include <algorithm>
#include <sstream>

#include "loraflood/error.hpp"

namespace loraflood {

namespace {

std::string_view kind_token(TraceKind kind) {
  switch (kind) {
    case TraceKind::TxStart: return "TX";
    case TraceKind::RxOk: return "RX";
    case TraceKind::RxError: return "RXERR";
    case TraceKind::RxDropped: return "RXDROP";
  }
  return "?";
}

std::string_view cause_token(ErrorCause cause) {
  switch (cause) {
    case ErrorCause::None: return "none";
    case ErrorCause::LinkLoss: return "link";
    case ErrorCause::Collision: return "collision";
    case ErrorCause::HalfDuplex: return "half-duplex";
  }
  return "?";
}

}  // namespace

std::string format_trace_record(const TraceRecord& r) {
  std::ostringstream out;
  out << r.time.count() << ' ' << kind_token(r.kind) << " node=" << r.node;
  switch (r.kind) {
    case TraceKind::TxStart:
      out << ' ' << to_string(r.frame) << " ch=" << r.channel << " air=" << r.airtime.count()
          << (r.tx_kind == TxKind::Forwarded ? " fwd" : " orig");
      break;
    case TraceKind::RxOk:
      out << " from=" << r.peer << ' ' << to_string(r.frame) << " ch=" << r.channel;
      break;
    case TraceKind::RxError:
      out << " from=" << r.peer << " ch=" << r.channel << " cause=" << cause_token(r.cause);
      break;
    case TraceKind::RxDropped:
      out << " from=" << r.peer << " ch=" << r.channel;
      break;
  }
  out << " tx=" << r.tx_index;
  return out.str();
}

std::string format_trace(std::span<const TraceRecord> trace) {
  std::string out;
  for (const auto& record : trace) {
    out += format_trace_record(record);
    out += '\n';
  }
  return out;
}

Simulation::Simulation(Topology topology, RadioConfig radio, std::uint64_t seed,
                       const std::vector<NodeConfig>& nodes)
    : topology_(std::move(topology)),
      radio_(std::move(radio)),
      seed_(seed),
      rng_(seed),
      limiter_(radio_) {
  radio_.validate();
  for (const NodeConfig& config : nodes) {
    if (!topology_.has_node(config.id)) {
      throw Error(Errc::InvalidArgument,
                  "node " + std::to_string(config.id) + " missing from topology");
    }
    if (!nodes_.try_emplace(config.id, NodeSlot{MeshNode(config), {}, false, std::nullopt, {}}).second) {
      throw Error(Errc::InvalidArgument, "duplicate node " + std::to_string(config.id));
    }
  }
  for (DeviceId id : topology_.nodes()) {
    if (!nodes_.contains(id)) {
      throw Error(Errc::InvalidArgument, "topology node " + std::to_string(id) + " has no config");
    }
  }
}

Simulation::NodeSlot& Simulation::slot(DeviceId id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error(Errc::NotFound, "no node " + std::to_string(id));
  return it->second;
}

MeshNode& Simulation::node(DeviceId id) { return slot(id).node; }

const MeshNode& Simulation::node(DeviceId id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error(Errc::NotFound, "no node " + std::to_string(id));
  return it->second.node;
}

std::vector<DeviceId> Simulation::node_ids() const {
  std::vector<DeviceId> ids;
  for (const auto& [id, s] : nodes_) ids.push_back(id);
  return ids;
}

void Simulation::set_link(DeviceId a, DeviceId b, bool enabled, std::optional<double> p_err) {
  topology_.set_link(a, b, enabled, p_err);
}

void Simulation::set_alive(DeviceId id, bool alive) {
  NodeSlot& s = slot(id);
  s.node.set_alive(alive);
  if (alive && !s.queue.empty()) arm(id, std::max(now_, s.queue.front().requested));
}

std::size_t Simulation::queued_frames() const {
  std::size_t total = 0;
  for (const auto& [id, s] : nodes_) total += s.queue.size();
  return total;
}

void Simulation::push(SimTime time, DeviceId node, EventKind kind, std::size_t tx,
                      std::function<void()> call) {
  events_.push(Event{time, node, next_seq_++, kind, tx, std::move(call)});
}

void Simulation::arm(DeviceId id, SimTime at) {
  NodeSlot& s = slot(id);
  at = std::max(at, now_);
  if (s.next_attempt && *s.next_attempt <= at) return;
  s.next_attempt = at;
  push(at, id, EventKind::Attempt);
}

void Simulation::enqueue(DeviceId sender, const ControlFrame& frame, TxKind kind,
                         SimTime requested) {
  NodeSlot& s = slot(sender);
  PendingTx pending{frame, encode_frame(frame), kind, std::max(requested, now_)};
  // FIFO in request order; equal request times keep insertion order.
  auto pos = std::upper_bound(s.queue.begin(), s.queue.end(), pending.requested,
                              [](SimTime t, const PendingTx& p) { return t < p.requested; });
  s.queue.insert(pos, std::move(pending));
  ++enqueued_;
  if (!s.transmitting) arm(sender, s.queue.front().requested);
}

ControlFrame Simulation::originate(DeviceId sender, DeviceId destination,
                                   std::uint32_t action_id) {
  const ControlFrame frame = node(sender).originate(destination, action_id);
  enqueue(sender, frame, TxKind::Originated, now_);
  return frame;
}

void Simulation::schedule_call(SimTime at, std::function<void()> call) {
  push(std::max(at, now_), 0, EventKind::Call, 0, std::move(call));
}

void Simulation::set_frame_sink(DeviceId id, FrameSink sink) { slot(id).sink = std::move(sink); }

SimTime Simulation::jitter() {
  if (radio_.jitter <= SimTime::zero()) return SimTime{0};
  return SimTime{rng_.uniform_int(0, radio_.jitter.count())};
}

std::optional<SimTime> Simulation::medium_busy_until(DeviceId listener) const {
  std::optional<SimTime> busy;
  for (std::size_t index : recent_) {
    const TransmissionEvent& tx = transmissions_[index].event;
    if (tx.sender == listener || tx.start > now_ || tx.end() <= now_) continue;
    if (!topology_.connected(listener, tx.sender)) continue;
    busy = std::max(busy.value_or(tx.end()), tx.end());
  }
  return busy;
}

void Simulation::attempt(DeviceId id) {
  NodeSlot& s = slot(id);
  if (s.next_attempt && *s.next_attempt == now_) s.next_attempt.reset();
  if (s.transmitting || s.queue.empty()) return;
  MeshNode& node = s.node;
  if (!node.alive()) return;  // frozen until revived
  if (now_ < node.boot_until()) {
    arm(id, node.boot_until());
    return;
  }
  const PendingTx& head = s.queue.front();
  if (head.requested > now_) {
    arm(id, head.requested);
    return;
  }
  const SimTime air = airtime(head.bytes.size(), radio_);
  const SimTime allowed = limiter_.earliest_start(id, air, now_);
  if (allowed > now_) {
    arm(id, allowed);
    return;
  }
  if (radio_.listen_before_talk) {
    if (auto busy = medium_busy_until(id)) {
      arm(id, *busy + jitter());
      return;
    }
  }

  limiter_.commit(id, now_, air);
  TransmissionRecord tx{TransmissionEvent{id, head.bytes, now_, air,
                                          current_channel(now_, radio_, seed_)},
                        head.frame, head.kind};
  if (head.kind == TxKind::Originated) node.note_sent();
  s.queue.pop_front();
  s.transmitting = true;

  const std::size_t index = transmissions_.size();
  transmissions_.push_back(std::move(tx));
  recent_.push_back(index);
  longest_airtime_ = std::max(longest_airtime_, air);
  const TransmissionRecord& stored = transmissions_.back();
  record({now_, TraceKind::TxStart, id, 0, stored.frame, stored.event.channel, air, stored.kind,
          ErrorCause::None, index});
  push(now_ + air, id, EventKind::TxEnd, index);
}

ErrorCause Simulation::corruption(const TransmissionEvent& tx, DeviceId receiver) const {
  for (std::size_t index : recent_) {
    const TransmissionEvent& other = transmissions_[index].event;
    if (&other == &tx) continue;
    if (!(other.start < tx.end() && tx.start < other.end())) continue;
    if (other.sender == receiver) return ErrorCause::HalfDuplex;
  }
  if (!radio_.collisions) return ErrorCause::None;
  for (std::size_t index : recent_) {
    const TransmissionEvent& other = transmissions_[index].event;
    if (&other == &tx || other.channel != tx.channel) continue;
    if (!(other.start < tx.end() && tx.start < other.end())) continue;
    if (topology_.connected(receiver, other.sender)) return ErrorCause::Collision;
  }
  return ErrorCause::None;
}

void Simulation::deliver(std::size_t tx_index) {
  const TransmissionEvent& tx = transmissions_[tx_index].event;
  for (const Neighbor& neighbor : topology_.neighbors(tx.sender)) {
    // One draw per link per frame, whatever the receiver's state.
    const bool lost = rng_.bernoulli(neighbor.p_err);
    NodeSlot& receiver = slot(neighbor.id);
    TraceRecord rec{now_, TraceKind::RxOk, neighbor.id, tx.sender, {}, tx.channel, tx.airtime,
                    transmissions_[tx_index].kind, ErrorCause::None, tx_index};
    if (!receiver.node.can_transmit(now_)) {
      rec.kind = TraceKind::RxDropped;
      record(rec);
      continue;
    }
    ErrorCause cause = corruption(tx, neighbor.id);
    if (cause == ErrorCause::None && lost) cause = ErrorCause::LinkLoss;

    ReceptionOutcome outcome;
    if (cause == ErrorCause::None) outcome = decode_frame(tx.bytes);
    ReceptionResult result = receiver.node.handle_reception(outcome, now_);
    if (outcome) {
      rec.frame = *outcome;
    } else {
      rec.kind = TraceKind::RxError;
      rec.cause = cause;
    }
    record(rec);
    apply(neighbor.id, result.effects);
  }
}

void Simulation::apply(DeviceId receiver, const std::vector<Effect>& effects) {
  NodeSlot& s = slot(receiver);
  for (const Effect& effect : effects) {
    switch (effect.kind) {
      case Effect::Kind::Respond:
        enqueue(receiver, effect.frame, TxKind::Originated, effect.not_before + jitter());
        break;
      case Effect::Kind::Forward:
        enqueue(receiver, effect.frame, TxKind::Forwarded, effect.not_before + jitter());
        break;
      case Effect::Kind::Deliver:
        if (s.sink) s.sink(effect.frame, now_);
        break;
    }
  }
}

void Simulation::finish(std::size_t tx_index) {
  const DeviceId sender = transmissions_[tx_index].event.sender;
  deliver(tx_index);
  NodeSlot& s = slot(sender);
  s.transmitting = false;
  if (!s.queue.empty()) arm(sender, s.queue.front().requested);

  while (!recent_.empty() &&
         transmissions_[recent_.front()].event.end() + longest_airtime_ < now_) {
    recent_.pop_front();
  }
}

void Simulation::record(TraceRecord record) {
  trace_.push_back(record);
  if (observer_) observer_(trace_.back());
}

bool Simulation::step() {
  if (events_.empty()) return false;
  Event event = events_.top();
  events_.pop();
  now_ = std::max(now_, event.time);
  switch (event.kind) {
    case EventKind::Attempt: attempt(event.node); break;
    case EventKind::TxEnd: finish(event.tx); break;
    case EventKind::Call: event.call(); break;
  }
  return true;
}

void Simulation::run_until(SimTime until) {
  while (!events_.empty() && events_.top().time <= until) step();
  now_ = std::max(now_, until);
}

bool Simulation::run_until_idle(SimTime limit) {
  while (!events_.empty() && events_.top().time <= limit) step();
  return events_.empty();
}

}  // namespace loraflood
