#pragma once

// SDN controller: turns northbound action requests into frames originated by
// the gateway node, then matches the packed responses that flood back.

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "loraflood/registry.hpp"
#include "loraflood/simulation.hpp"

namespace loraflood {

struct ActionRequest {
  /// Explicit targets; ignored when `all` is set.
  std::vector<DeviceId> targets;
  bool all = false;
  std::uint32_t action_id = 0;
  SimTime timeout = std::chrono::seconds(10);
  unsigned retries = 2;
};

enum class CorrelationState { Pending, Answered, TimedOut };

struct CorrelationEntry {
  DeviceId target = 0;
  std::uint32_t message_id = 0;
  std::uint32_t action_id = 0;
  SimTime issued_at{0};
  CorrelationState state = CorrelationState::Pending;
  std::uint32_t value = 0;
  SimTime answered_at{0};
  unsigned attempts = 1;
};

struct TargetResult {
  DeviceId device = 0;
  bool answered = false;
  PackedResponse response;  // valid when answered
  unsigned attempts = 0;
  SimTime issued_at{0};     // of the attempt that completed
  SimTime completed_at{0};
};

struct DispatchResult {
  std::uint32_t action_id = 0;
  bool broadcast = false;
  std::vector<TargetResult> results;  // ascending device id
  SimTime started{0};
  SimTime finished{0};

  const TargetResult* find(DeviceId id) const;
};

struct ConnectivityResult {
  bool reachable = false;
  SimTime round_trip{0};
};

class Controller {
 public:
  /// Registers itself as the frame sink of the gateway node.
  Controller(Simulation& sim, Registry& registry, DeviceId gateway);

  Controller(const Controller&) = delete;
  Controller& operator=(const Controller&) = delete;

  /// Issues the request and advances the simulation until every target has
  /// answered or exhausted its retries. Throws UnknownAction, NoTargets,
  /// NotFound (unregistered target) or GatewayDown.
  DispatchResult dispatch(const ActionRequest& request);

  /// Single probe with action 9 and no retries. Throws NotFound.
  ConnectivityResult connectivity_check(DeviceId id, SimTime timeout = std::chrono::seconds(10));

  /// Frame sink for responses arriving at the gateway.
  void correlate_response(const ControlFrame& frame, SimTime at);

  /// Removes the device; an in-flight correlation for it ends timed out.
  void delete_device(DeviceId id);

  DeviceId gateway() const noexcept { return gateway_; }
  const std::vector<CorrelationEntry>& correlations() const noexcept { return entries_; }
  /// Every frame the controller put on the gateway queue, in order.
  const std::vector<ControlFrame>& outbound() const noexcept { return outbound_; }
  const std::deque<std::string>& diagnostics() const noexcept { return diagnostics_; }

 private:
  void issue(std::size_t entry_index);
  void on_deadline(std::size_t entry_index, unsigned attempt);
  bool all_resolved() const;
  void note(std::string message);

  Simulation& sim_;
  Registry& registry_;
  DeviceId gateway_;
  SimTime timeout_{0};
  unsigned retries_ = 0;
  std::uint64_t generation_ = 0;
  std::vector<CorrelationEntry> entries_;
  std::vector<ControlFrame> outbound_;
  std::deque<std::string> diagnostics_;
};

}  // namespace loraflood
