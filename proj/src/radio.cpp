#include "loraflood/radio.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "loraflood/error.hpp"

namespace loraflood {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void check_p_err(double p_err) {
  if (!(p_err >= 0.0 && p_err <= 1.0)) {
    throw Error(Errc::InvalidArgument, "p_err must be in [0,1], got " + std::to_string(p_err));
  }
}

}  // namespace

std::string_view to_string(HopMode mode) noexcept {
  return mode == HopMode::RoundRobin ? "round-robin" : "seeded-permutation";
}

HopMode parse_hop_mode(std::string_view text) {
  if (text == "round-robin") return HopMode::RoundRobin;
  if (text == "seeded-permutation") return HopMode::SeededPermutation;
  throw Error(Errc::InvalidArgument, "unknown hop_mode '" + std::string(text) + "'");
}

void RadioConfig::validate() const {
  if (channels_mhz.empty()) throw Error(Errc::InvalidArgument, "channels_mhz is empty");
  if (!(duty_limit > 0.0 && duty_limit <= 1.0)) {
    throw Error(Errc::InvalidArgument, "duty_limit must be in (0,1]");
  }
  if (slot <= SimTime::zero()) throw Error(Errc::InvalidArgument, "slot_ms must be positive");
  if (air_rate_bps == 0) throw Error(Errc::InvalidArgument, "air_rate_bps must be positive");
  if (duty_window <= SimTime::zero()) {
    throw Error(Errc::InvalidArgument, "duty_window_s must be positive");
  }
  if (jitter < SimTime::zero()) throw Error(Errc::InvalidArgument, "jitter_ms must be >= 0");
}

SimTime RadioConfig::duty_budget() const {
  return SimTime{static_cast<std::int64_t>(
      std::floor(duty_limit * static_cast<double>(duty_window.count()) + 1e-6))};
}

SimTime airtime(std::size_t payload_bytes, const RadioConfig& config) {
  const std::uint64_t bits = (config.preamble_bytes + payload_bytes) * 8ULL;
  const std::uint64_t micros = (bits * 1'000'000ULL + config.air_rate_bps - 1) / config.air_rate_bps;
  return SimTime{static_cast<std::int64_t>(micros)};
}

std::uint32_t current_channel(SimTime t, const RadioConfig& config, std::uint64_t seed) {
  const auto count = static_cast<std::uint64_t>(config.channels_mhz.size());
  const auto slot = static_cast<std::uint64_t>(t.count() / config.slot.count());
  if (config.hop_mode == HopMode::RoundRobin) return static_cast<std::uint32_t>(slot % count);

  // Each cycle of `count` slots visits a fresh permutation of the channels.
  const std::uint64_t cycle = slot / count;
  std::vector<std::uint32_t> order(count);
  std::iota(order.begin(), order.end(), 0U);
  std::mt19937_64 engine(splitmix64(seed ^ splitmix64(cycle)));
  std::shuffle(order.begin(), order.end(), engine);
  return order[slot % count];
}

Topology::Topology(std::vector<DeviceId> nodes, std::vector<Link> links)
    : nodes_(std::move(nodes)), links_(std::move(links)) {
  std::sort(nodes_.begin(), nodes_.end());
  if (std::adjacent_find(nodes_.begin(), nodes_.end()) != nodes_.end()) {
    throw Error(Errc::InvalidArgument, "duplicate node id in topology");
  }
  for (std::size_t i = 0; i < links_.size(); ++i) {
    const Link& link = links_[i];
    if (link.a == link.b) {
      throw Error(Errc::InvalidArgument, "self-link on node " + std::to_string(link.a));
    }
    if (!has_node(link.a) || !has_node(link.b)) {
      throw Error(Errc::InvalidArgument, "link " + std::to_string(link.a) + "-" +
                                             std::to_string(link.b) + " references unknown node");
    }
    check_p_err(link.p_err);
    const auto key = std::minmax(link.a, link.b);
    if (!index_.emplace(key, i).second) {
      throw Error(Errc::InvalidArgument, "duplicate link " + std::to_string(key.first) + "-" +
                                             std::to_string(key.second));
    }
  }
}

bool Topology::has_node(DeviceId id) const {
  return std::binary_search(nodes_.begin(), nodes_.end(), id);
}

std::vector<Neighbor> Topology::neighbors(DeviceId id) const {
  std::vector<Neighbor> out;
  for (const Link& link : links_) {
    if (!link.enabled) continue;
    if (link.a == id) out.push_back({link.b, link.p_err});
    else if (link.b == id) out.push_back({link.a, link.p_err});
  }
  std::sort(out.begin(), out.end(), [](const Neighbor& x, const Neighbor& y) { return x.id < y.id; });
  return out;
}

const Link* Topology::find_link(DeviceId a, DeviceId b) const {
  auto it = index_.find(std::minmax(a, b));
  return it == index_.end() ? nullptr : &links_[it->second];
}

bool Topology::connected(DeviceId a, DeviceId b) const {
  const Link* link = find_link(a, b);
  return link != nullptr && link->enabled;
}

std::size_t Topology::link_index(DeviceId a, DeviceId b) const {
  auto it = index_.find(std::minmax(a, b));
  if (it == index_.end()) {
    throw Error(Errc::NotFound, "no link " + std::to_string(a) + "-" + std::to_string(b));
  }
  return it->second;
}

void Topology::set_link(DeviceId a, DeviceId b, bool enabled, std::optional<double> p_err) {
  Link& link = links_[link_index(a, b)];
  if (p_err) {
    check_p_err(*p_err);
    link.p_err = *p_err;
  }
  link.enabled = enabled;
}

void Topology::set_all_p_err(double p_err) {
  check_p_err(p_err);
  for (Link& link : links_) link.p_err = p_err;
}

DutyCycleLimiter::DutyCycleLimiter(const RadioConfig& config)
    : window_(config.duty_window), budget_(config.duty_budget()) {}

SimTime DutyCycleLimiter::earliest_start(DeviceId sender, SimTime airtime,
                                         SimTime requested) const {
  if (airtime > budget_) {
    throw Error(Errc::InvalidArgument, "frame airtime exceeds the whole duty-cycle budget");
  }
  auto it = history_.find(sender);
  if (it == history_.end() || it->second.empty()) return requested;
  const auto& past = it->second;

  // Walk back from the latest transmission to find the earliest window start
  // w such that past airtime after w leaves room for this frame.
  const SimTime room = budget_ - airtime;
  SimTime accumulated{0};
  std::optional<SimTime> window_start;
  for (auto rit = past.rbegin(); rit != past.rend(); ++rit) {
    const SimTime length = rit->end - rit->start;
    if (accumulated + length <= room) {
      accumulated += length;
      continue;
    }
    window_start = rit->end - (room - accumulated);
    break;
  }
  SimTime start = std::max(requested, past.back().end);
  if (window_start) start = std::max(start, *window_start + window_ - airtime);
  return start;
}

void DutyCycleLimiter::commit(DeviceId sender, SimTime start, SimTime airtime) {
  auto& past = history_[sender];
  past.push_back({start, start + airtime});
  // Intervals that ended a full window ago can never count again.
  while (!past.empty() && past.front().end <= start - window_) past.pop_front();
}

SimTime DutyCycleLimiter::schedule(DeviceId sender, SimTime airtime, SimTime requested) {
  const SimTime start = earliest_start(sender, airtime, requested);
  commit(sender, start, airtime);
  return start;
}

SimTime DutyCycleLimiter::used_in_window(DeviceId sender, SimTime t) const {
  auto it = history_.find(sender);
  if (it == history_.end()) return SimTime{0};
  SimTime used{0};
  const SimTime from = t - window_;
  for (const Interval& iv : it->second) {
    const SimTime lo = std::max(iv.start, from);
    const SimTime hi = std::min(iv.end, t);
    if (hi > lo) used += hi - lo;
  }
  return used;
}

}  // namespace loraflood

namespace loraflood {

TransmissionEvent schedule_tx(DutyCycleLimiter& limiter, const RadioConfig& config,
                              std::uint64_t seed, DeviceId sender,
                              std::vector<std::uint8_t> bytes, SimTime requested) {
  TransmissionEvent tx;
  tx.sender = sender;
  tx.airtime = airtime(bytes.size(), config);
  tx.bytes = std::move(bytes);
  tx.start = limiter.schedule(sender, tx.airtime, requested);
  tx.channel = current_channel(tx.start, config, seed);
  return tx;
}

}  // namespace loraflood
