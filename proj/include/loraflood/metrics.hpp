#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "loraflood/node.hpp"
#include "loraflood/simulation.hpp"

namespace loraflood {

struct Rates {
  double success_rate = 0.0;
  double error_rate = 0.0;

  friend bool operator==(const Rates&, const Rates&) = default;
};

/// error_rate = errors / (errors + successes). Throws EmptyCounters when the
/// device has no receptions at all.
Rates compute_rates(const MessageCounters& counters);

struct DeviceMetrics {
  DeviceId device = 0;
  std::string name;
  MessageCounters counters;
  std::optional<Rates> rates;  // absent for devices with no receptions

  friend bool operator==(const DeviceMetrics&, const DeviceMetrics&) = default;
};

struct RunMetadata {
  std::string scenario;
  std::uint64_t seed = 0;
  double simulated_duration_s = 0.0;
  std::uint64_t requests = 0;
  std::uint64_t answered = 0;
  std::uint64_t timed_out = 0;

  friend bool operator==(const RunMetadata&, const RunMetadata&) = default;
};

struct MetricsReport {
  std::vector<DeviceMetrics> devices;  // ascending id
  /// Unweighted means over devices that have rates.
  std::optional<Rates> aggregate;
  RunMetadata metadata;

  const DeviceMetrics* find(DeviceId id) const;
  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// Snapshot of every node's counters. `names` maps ids to labels.
MetricsReport build_report(const Simulation& sim,
                           const std::vector<std::pair<DeviceId, std::string>>& names,
                           RunMetadata metadata);
void finalize_aggregate(MetricsReport& report);

enum class ReportFormat { Json, Csv };

/// "json" or "csv"; throws UnknownFormat otherwise.
ReportFormat parse_report_format(std::string_view token);
/// Picks the format from a .json or .csv extension.
ReportFormat report_format_for(const std::filesystem::path& path);

nlohmann::json report_to_json(const MetricsReport& report);
MetricsReport report_from_json(const nlohmann::json& doc);
std::string report_to_csv(const MetricsReport& report);
std::string serialize_report(const MetricsReport& report, ReportFormat format);

/// Writes the serialized report. Throws IoFailure.
void export_report(const MetricsReport& report, ReportFormat format,
                   const std::filesystem::path& path);
MetricsReport load_report(const std::filesystem::path& path);

}  // namespace loraflood
