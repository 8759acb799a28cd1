#pragma once

// Shared-medium model: time on air, the network-wide frequency-hopping
// schedule, link graph and duty-cycle accounting.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "loraflood/sim_time.hpp"
#include "loraflood/wire.hpp"

namespace loraflood {

enum class HopMode { RoundRobin, SeededPermutation };

std::string_view to_string(HopMode mode) noexcept;
HopMode parse_hop_mode(std::string_view text);

struct RadioConfig {
  std::uint32_t air_rate_bps = 2400;
  std::uint32_t preamble_bytes = 8;
  std::vector<std::uint32_t> channels_mhz{865, 866, 867, 868};
  SimTime slot = std::chrono::milliseconds(500);
  HopMode hop_mode = HopMode::RoundRobin;
  double duty_limit = 0.01;
  SimTime duty_window = std::chrono::seconds(3600);
  SimTime jitter = std::chrono::milliseconds(200);
  /// Carrier sense before transmitting; a busy medium defers the frame.
  bool listen_before_talk = true;
  /// Receiver-side corruption of overlapping same-channel receptions.
  bool collisions = true;

  /// Throws InvalidArgument on an unusable configuration.
  void validate() const;
  SimTime duty_budget() const;

  friend bool operator==(const RadioConfig&, const RadioConfig&) = default;
};

/// (preamble + payload) bytes at the serial air rate, rounded up to 1 us.
SimTime airtime(std::size_t payload_bytes, const RadioConfig& config);

/// Channel index in use network-wide at time t. Every node evaluates the same
/// schedule, so equal t gives equal channels.
std::uint32_t current_channel(SimTime t, const RadioConfig& config, std::uint64_t seed);

struct Link {
  DeviceId a = 0;
  DeviceId b = 0;
  double p_err = 0.0;
  bool enabled = true;

  friend bool operator==(const Link&, const Link&) = default;
};

struct Neighbor {
  DeviceId id;
  double p_err;
};

/// Undirected link graph.
class Topology {
 public:
  Topology() = default;
  Topology(std::vector<DeviceId> nodes, std::vector<Link> links);

  const std::vector<DeviceId>& nodes() const noexcept { return nodes_; }
  const std::vector<Link>& links() const noexcept { return links_; }
  bool has_node(DeviceId id) const;

  /// Enabled neighbors in ascending id order.
  std::vector<Neighbor> neighbors(DeviceId id) const;
  bool connected(DeviceId a, DeviceId b) const;
  const Link* find_link(DeviceId a, DeviceId b) const;

  /// Throws NotFound if the pair has no link, InvalidArgument for bad p_err.
  void set_link(DeviceId a, DeviceId b, bool enabled, std::optional<double> p_err);
  void set_all_p_err(double p_err);

 private:
  std::size_t link_index(DeviceId a, DeviceId b) const;

  std::vector<DeviceId> nodes_;
  std::vector<Link> links_;
  std::map<std::pair<DeviceId, DeviceId>, std::size_t> index_;
};

struct TransmissionEvent {
  DeviceId sender = 0;
  std::vector<std::uint8_t> bytes;
  SimTime start{0};
  SimTime airtime{0};
  std::uint32_t channel = 0;

  SimTime end() const noexcept { return start + airtime; }
};

/// Sliding-window airtime budget per sender. A sender's transmissions are
/// serial; each is placed at the earliest instant where the airtime inside
/// the trailing window that ends with it stays within duty_limit * window.
class DutyCycleLimiter {
 public:
  explicit DutyCycleLimiter(const RadioConfig& config);

  SimTime earliest_start(DeviceId sender, SimTime airtime, SimTime requested) const;
  void commit(DeviceId sender, SimTime start, SimTime airtime);

  /// earliest_start followed by commit.
  SimTime schedule(DeviceId sender, SimTime airtime, SimTime requested);

  /// Airtime of the sender inside (t - window, t].
  SimTime used_in_window(DeviceId sender, SimTime t) const;

 private:
  struct Interval {
    SimTime start;
    SimTime end;
  };

  SimTime window_;
  SimTime budget_;
  std::map<DeviceId, std::deque<Interval>> history_;
};

}  // namespace loraflood

namespace loraflood {

/// Places a frame on the sender's duty-cycle budget (deferring, never
/// dropping) and stamps the hop channel active at its start.
TransmissionEvent schedule_tx(DutyCycleLimiter& limiter, const RadioConfig& config,
                              std::uint64_t seed, DeviceId sender,
                              std::vector<std::uint8_t> bytes, SimTime requested);

}  // namespace loraflood
