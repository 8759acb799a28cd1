#pragma once

// Per-device protocol state: controlled-flooding reception, action execution
// and the five message counters.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "loraflood/dedup_cache.hpp"
#include "loraflood/sim_time.hpp"
#include "loraflood/wire.hpp"

namespace loraflood {

enum class MeshRole { MPP, MP };

std::string_view to_string(MeshRole role) noexcept;
/// Accepts "MPP" or "MP" (case-insensitive); throws InvalidArgument otherwise.
MeshRole parse_mesh_role(std::string_view text);

enum class Action : std::uint32_t {
  SensorOn = 1,
  SensorOff = 2,
  WifiOn = 3,
  WifiOff = 4,
  ApConnectionCount = 5,
  SensorToAp = 6,
  ApToSensor = 7,
  Reboot = 8,
  ConnectivityCheck = 9,
  SensorStatus = 10,
  ApStatus = 11,
};

struct ActionInfo {
  Action action;
  std::string_view name;   // API token, e.g. "ap-connection-count"
  std::string_view label;  // operator-facing, e.g. "AP Connection Count"
  bool query;
};

std::span<const ActionInfo> action_catalog() noexcept;
const ActionInfo* find_action(std::uint32_t action_id) noexcept;
/// Matches the API token or the label, ignoring case, spaces and hyphens.
const ActionInfo* find_action(std::string_view name) noexcept;

/// Action fields at or above the packing radix carry responses, not commands.
/// Zero is reserved and never executed.
constexpr bool is_response_code(std::uint32_t action_field) noexcept {
  return action_field >= kResponseRadix || action_field == 0;
}

struct MessageCounters {
  std::uint64_t errors = 0;
  std::uint64_t retransmitted = 0;
  std::uint64_t received = 0;
  std::uint64_t sent = 0;
  std::uint64_t ignored = 0;

  std::uint64_t successes() const noexcept { return retransmitted + received + ignored; }
  std::uint64_t receptions() const noexcept { return errors + successes(); }

  friend bool operator==(const MessageCounters&, const MessageCounters&) = default;
};

enum class ReceptionClass { Error, Received, Retransmitted, Ignored, Discarded };

struct Effect {
  enum class Kind {
    Respond,  // new frame originated by this node
    Forward,  // relay of the received frame
    Deliver,  // response handed up to the local application
  };
  Kind kind;
  ControlFrame frame;
  SimTime not_before{0};
};

struct ReceptionResult {
  ReceptionClass classification = ReceptionClass::Discarded;
  std::vector<Effect> effects;
};

/// A reception is either a decoded frame or nullopt for a corrupted one.
using ReceptionOutcome = std::optional<ControlFrame>;

struct NodeConfig {
  DeviceId id = 1;
  MeshRole role = MeshRole::MP;
  bool has_sensor = true;
  bool sensor_active = true;
  bool ap_active = true;
  std::uint32_t ap_clients = 0;
  std::size_t dedup_capacity = 1024;
  SimTime boot_delay = std::chrono::seconds(5);
};

class MeshNode {
 public:
  explicit MeshNode(const NodeConfig& config);

  ReceptionResult handle_reception(const ReceptionOutcome& outcome, SimTime now);

  /// Runs a catalog action and returns the response value (< 100). Throws
  /// UnknownAction for ids outside the catalog.
  std::uint32_t execute_action(std::uint32_t action_id, SimTime now);

  /// Builds a frame from this node with the next sequence number and marks it
  /// as already seen so its own echoes are ignored.
  ControlFrame originate(DeviceId destination, std::uint32_t action_id);

  bool duplicate_seen(DeviceId source, std::uint32_t message_id) const;

  /// Called by the medium when an originated frame goes on air.
  void note_sent() noexcept { ++counters_.sent; }

  bool can_transmit(SimTime now) const noexcept { return alive_ && now >= boot_until_; }
  bool alive() const noexcept { return alive_; }
  void set_alive(bool alive) noexcept { alive_ = alive; }

  DeviceId id() const noexcept { return id_; }
  MeshRole role() const noexcept { return role_; }
  bool has_sensor() const noexcept { return has_sensor_; }
  bool sensor_active() const noexcept { return sensor_active_; }
  bool ap_active() const noexcept { return ap_active_; }
  std::uint32_t ap_clients() const noexcept { return ap_clients_; }
  void set_ap_clients(std::uint32_t clients);
  SimTime boot_until() const noexcept { return boot_until_; }
  std::uint32_t next_message_id() const noexcept { return next_message_id_; }
  const MessageCounters& counters() const noexcept { return counters_; }
  const DedupCache& received_cache() const noexcept { return received_cache_; }
  const DedupCache& forwarded_cache() const noexcept { return forwarded_cache_; }

 private:
  void respond(ReceptionResult& result, const ControlFrame& request, SimTime now);

  DeviceId id_;
  MeshRole role_;
  bool has_sensor_;
  bool sensor_active_;
  bool ap_active_;
  std::uint32_t ap_clients_ = 0;
  bool alive_ = true;
  SimTime boot_until_{0};
  SimTime boot_delay_;
  std::uint32_t next_message_id_ = 1;
  DedupCache received_cache_;
  DedupCache forwarded_cache_;
  MessageCounters counters_;
};

}  // namespace loraflood
