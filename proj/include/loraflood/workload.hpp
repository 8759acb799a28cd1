#pragma once

// The hour-long evaluation workload: sequential requests through the
// controller, one-second pause after each, then counter collection.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "loraflood/controller.hpp"
#include "loraflood/metrics.hpp"
#include "loraflood/scenario.hpp"

namespace loraflood {

struct WorkloadOptions {
  SimTime duration = std::chrono::seconds(3600);
  SimTime pause = std::chrono::seconds(1);
  /// Cycled round-robin, independently of the target rotation.
  std::vector<std::uint32_t> actions{5, 9, 10, 11};
  SimTime timeout = std::chrono::seconds(10);
  unsigned retries = 2;
  /// After the last request, keep simulating until every queued frame has
  /// been sent and delivered (bounded by drain_limit).
  bool drain = true;
  SimTime drain_limit = std::chrono::hours(24);
  /// Overrides the scenario seed.
  std::optional<std::uint64_t> seed;
};

struct WorkloadRun {
  MetricsReport report;
  std::vector<TraceRecord> trace;
  std::vector<TransmissionRecord> transmissions;
  std::vector<ControlFrame> outbound;
  std::uint64_t enqueued = 0;
  std::size_t left_queued = 0;
};

DeviceRecord device_record(const NodeSpec& node);
std::vector<std::pair<DeviceId, std::string>> device_names(const Scenario& scenario);

/// Throws ScenarioInvalid for an unusable scenario or one without any
/// non-gateway device.
WorkloadRun run_workload(const Scenario& scenario, const WorkloadOptions& options = {});

/// Called before repetition `rep` (0-based) with a copy of the scenario.
using ScenarioMutator = std::function<void(int rep, Scenario& scenario)>;

/// True iff every repetition yields the same serialized report and trace.
bool verify_determinism(const Scenario& scenario, std::uint64_t seed, int repetitions,
                        WorkloadOptions options = {}, const ScenarioMutator& mutate = {});

}  // namespace loraflood
