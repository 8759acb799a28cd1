#pragma once

// Thread-safe facade over one simulated network: the northbound API handlers
// call in concurrently, every call is serialized onto the simulation.

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <mutex>
#include <optional>
#include <vector>

#include "json.hpp"

#include "loraflood/controller.hpp"
#include "loraflood/metrics.hpp"
#include "loraflood/scenario.hpp"

namespace loraflood {

struct ServiceEvent {
  std::uint64_t seq = 0;
  nlohmann::json body;
};

/// Bounded, sequence-numbered event log with blocking readers.
class EventHub {
 public:
  explicit EventHub(std::size_t capacity = 4096) : capacity_(capacity) {}

  void publish(nlohmann::json body);
  /// Events with seq > after; waits up to `wait` when none are available.
  std::vector<ServiceEvent> wait_since(std::uint64_t after, std::chrono::milliseconds wait);
  std::uint64_t latest_seq() const;
  void close();
  bool closed() const;

 private:
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<ServiceEvent> events_;
  std::size_t capacity_;
  std::uint64_t next_seq_ = 1;
  bool closed_ = false;
};

/// ActionRequest from {targets:[ids]|"all", action:<name|id>, timeout_s?, retries?}.
/// Throws InvalidArgument or UnknownAction.
ActionRequest action_request_from_json(const nlohmann::json& body);
nlohmann::json dispatch_result_to_json(const DispatchResult& result);

class ControlService {
 public:
  /// Seeds the registry from the scenario's nodes unless the snapshot
  /// already holds devices.
  explicit ControlService(Scenario scenario,
                          std::optional<std::filesystem::path> registry_snapshot = {},
                          SimTime settle = std::chrono::seconds(1));

  nlohmann::json list_devices();
  nlohmann::json get_device(DeviceId id);
  nlohmann::json register_device(const nlohmann::json& body);
  /// Merges the given fields into the stored record.
  nlohmann::json update_device(DeviceId id, const nlohmann::json& body);
  void delete_device(DeviceId id);

  nlohmann::json dispatch(const nlohmann::json& body);
  DispatchResult dispatch(const ActionRequest& request);

  MetricsReport metrics();
  nlohmann::json topology();
  nlohmann::json set_link(DeviceId a, DeviceId b, const nlohmann::json& body);

  EventHub& events() noexcept { return events_; }

  /// Runs `fn` with exclusive access to the simulation and controller.
  template <typename Fn>
  auto with_network(Fn&& fn) {
    std::lock_guard lock(mutex_);
    return fn(sim_, controller_);
  }

 private:
  void observe(const TraceRecord& record);

  std::mutex mutex_;
  Scenario scenario_;
  Simulation sim_;
  Registry registry_;
  Controller controller_;
  EventHub events_;
  SimTime settle_;
  RunMetadata totals_;
};

}  // namespace loraflood
